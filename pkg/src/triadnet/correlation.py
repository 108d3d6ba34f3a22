"""Correlation matrices of one calibration window and their sign structure.

Three flavours are supported: the phi coefficient of binarized partial
returns (computed from the 2x2 contingency counts), the sample Pearson
matrix of raw or median-removed returns, and a partial Pearson matrix with
the leading eigenpair removed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .preprocess import BinaryPanel, ReturnPanel
from .util import atomic_write_bytes, atomic_write_text, fmt

CORR_KINDS = ("phi", "pearson", "partial_pearson")

_BOUND_TOL = 1e-12
_EIG_GAP_TOL = 1e-10


@dataclass(eq=False)
class CorrMatrix:
    """Symmetric correlation matrix with its asset ordering and flavour."""

    assets: tuple
    values: np.ndarray
    kind: str

    def __post_init__(self):
        self.assets = tuple(self.assets)
        n = len(self.assets)
        if self.kind not in CORR_KINDS:
            raise DataError(f"unknown correlation kind {self.kind!r}")
        if self.values.shape != (n, n):
            raise DataError("correlation matrix shape mismatch")
        if not np.array_equal(self.values, self.values.T):
            raise DataError("correlation matrix must be exactly symmetric")
        if np.abs(self.values).max(initial=0.0) > 1 + _BOUND_TOL:
            raise DataError("correlation entries outside [-1, 1]")
        if self.kind in ("phi", "pearson") and n and not (np.diag(self.values) == 1.0).all():
            raise DataError("diagonal must be exactly 1")

    @property
    def n(self) -> int:
        return len(self.assets)


@dataclass(eq=False)
class SignedMatrix:
    """Sign structure of a correlation matrix: +/-1 off the diagonal, 0 on it."""

    assets: tuple
    values: np.ndarray

    def __post_init__(self):
        self.assets = tuple(self.assets)
        n = len(self.assets)
        if self.values.shape != (n, n):
            raise DataError("signed matrix shape mismatch")
        if not np.array_equal(self.values, self.values.T):
            raise DataError("signed matrix must be symmetric")
        if n and not (np.diag(self.values) == 0).all():
            raise DataError("signed matrix diagonal must be 0")
        off = self.values[~np.eye(n, dtype=bool)]
        if off.size and not np.isin(off, (-1, 1)).all():
            raise DataError("signed matrix off-diagonal entries must be -1 or +1")

    @property
    def n(self) -> int:
        return len(self.assets)


def _symmetrize(values: np.ndarray) -> np.ndarray:
    return (values + values.T) / 2.0


def phi_matrix(b: BinaryPanel) -> CorrMatrix:
    """Phi coefficients of the +/-1 columns via contingency counts.

    With c the number of days both columns are +1 and k the per-column counts
    of +1 days, phi = (T*c - k_i*k_j) / sqrt(k_i (T-k_i) k_j (T-k_j)). This
    equals the Pearson correlation of the columns, which the test suite
    asserts entrywise.
    """
    t, n = b.values.shape
    if t < 2:
        raise DataError("need at least 2 days for a correlation window")
    up = (b.values > 0).astype(np.int64)
    k = up.sum(axis=0)
    if ((k == 0) | (k == t)).any():
        raise DataError("constant binary column")
    c = up.T @ up
    num = (t * c - np.outer(k, k)).astype(float)
    d = (k * (t - k)).astype(np.int64)
    den = np.sqrt(np.outer(d, d).astype(float))
    values = _symmetrize(num / den)
    np.fill_diagonal(values, 1.0)
    return CorrMatrix(b.assets, values, "phi")


def pearson_matrix(r: ReturnPanel, remove_median: bool = False) -> CorrMatrix:
    """Sample Pearson correlation of the window's return columns.

    Requires a complete-case window. When remove_median is true the per-date
    median of the panel's own columns is subtracted first.
    """
    if not r.present.all():
        raise DataError("pearson_matrix needs a complete-case window")
    t, n = r.returns.shape
    if t < 2:
        raise DataError("need at least 2 days for a correlation window")
    x = r.returns
    if remove_median:
        x = x - np.median(x, axis=1)[:, None]
    z = x - x.mean(axis=0)
    norm = np.sqrt((z * z).sum(axis=0))
    if (norm == 0).any():
        bad = r.assets[int(np.argmin(norm))]
        raise DataError(f"constant return column {bad!r}")
    values = _symmetrize((z.T @ z) / np.outer(norm, norm))
    np.fill_diagonal(values, 1.0)
    return CorrMatrix(r.assets, values, "pearson")


def partial_pearson(r: ReturnPanel) -> CorrMatrix:
    """Pearson matrix of raw returns reconstructed without its leading eigenpair.

    The diagonal is left as computed (no renormalization). The leading
    eigenvalue must be strictly separated from the second one; degenerate
    spectra are rejected rather than resolved arbitrarily.
    """
    rho = pearson_matrix(r, remove_median=False)
    w, v = np.linalg.eigh(rho.values)
    lam1, lam2 = w[-1], w[-2] if len(w) > 1 else (w[-1], None)
    if len(w) < 2 or lam1 - lam2 <= _EIG_GAP_TOL:
        raise DataError("leading eigenvalue is not separated from the second")
    v1 = v[:, -1]
    values = _symmetrize(rho.values - lam1 * np.outer(v1, v1))
    diag = np.diag(values)
    if (diag < -_BOUND_TOL).any():
        raise DataError("partial Pearson diagonal has a negative entry")
    return CorrMatrix(r.assets, values, "partial_pearson")


def sign_matrix(corr: CorrMatrix) -> SignedMatrix:
    """+1 where the correlation is nonnegative, -1 where negative, 0 diagonal."""
    s = np.where(corr.values >= 0, 1, -1).astype(np.int8)
    np.fill_diagonal(s, 0)
    return SignedMatrix(corr.assets, s)


def write_corr_csv(corr: CorrMatrix, path) -> None:
    """Matrix as CSV with the asset list as header row and first column."""
    lines = ["," + ",".join(corr.assets)]
    for i, asset in enumerate(corr.assets):
        lines.append(asset + "," + ",".join(fmt(x) for x in corr.values[i]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_corr_cache(corr: CorrMatrix, path, end_date: str, window: int) -> None:
    """Compact binary cache: one JSON header line, then row-major little-endian f64."""
    header = {
        "end_date": end_date,
        "window": int(window),
        "kind": corr.kind,
        "assets": list(corr.assets),
    }
    payload = json.dumps(header, separators=(",", ":")).encode("utf-8") + b"\n"
    payload += np.ascontiguousarray(corr.values, dtype="<f8").tobytes()
    atomic_write_bytes(path, payload)


def read_corr_cache(path):
    """Inverse of write_corr_cache; returns (CorrMatrix, header dict)."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"unreadable cache {path}: {exc}") from exc
    nl = blob.find(b"\n")
    if nl < 0:
        raise DataError(f"cache {path} has no header line")
    try:
        header = json.loads(blob[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"cache {path} header is not valid JSON: {exc}") from exc
    assets = tuple(header["assets"])
    n = len(assets)
    values = np.frombuffer(blob[nl + 1 :], dtype="<f8")
    if values.size != n * n:
        raise DataError(f"cache {path} payload size mismatch")
    matrix = values.reshape(n, n).astype(float)
    return CorrMatrix(assets, matrix, header["kind"]), header
