"""Small shared helpers: deterministic number formatting and atomic file writes."""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path


def fmt(x, na: str = "") -> str:
    """Format a number with 12 significant digits; None/NaN become `na`.

    Every CSV cell in the package goes through this so that identical runs
    produce byte-identical output files.
    """
    if x is None:
        return na
    xf = float(x)
    if math.isnan(xf):
        return na
    return f"{xf:.12g}"


def atomic_write_text(path, text: str) -> None:
    """Write `text` to `path` via a temp file in the same directory plus rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
