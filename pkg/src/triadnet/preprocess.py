"""Log returns, market-mode removal, binarization and complete-case filtering.

The market mode of a trading day is estimated nonparametrically as the
cross-sectional median return; subtracting it and keeping only the sign of
what remains turns a return window into a dense matrix of +/-1 values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .ingest import PricePanel

MEDIAN_SCOPES = ("universe", "window")


@dataclass(eq=False)
class ReturnPanel:
    """Daily log returns; returns[t, i] is valid only where present[t, i]."""

    dates: tuple
    assets: tuple
    returns: np.ndarray
    present: np.ndarray

    def __post_init__(self):
        self.dates = tuple(self.dates)
        self.assets = tuple(self.assets)
        if self.returns.shape != (len(self.dates), len(self.assets)):
            raise DataError("return panel shape mismatch")
        if self.present.shape != self.returns.shape:
            raise DataError("return mask shape mismatch")
        vals = self.returns[self.present]
        if vals.size and not np.all(np.isfinite(vals)):
            raise DataError("present returns must be finite")


@dataclass(eq=False)
class BinaryPanel:
    """Dense +/-1 matrix of binarized partial returns for one window."""

    dates: tuple
    assets: tuple
    values: np.ndarray

    def __post_init__(self):
        self.dates = tuple(self.dates)
        self.assets = tuple(self.assets)
        if self.values.shape != (len(self.dates), len(self.assets)):
            raise DataError("binary panel shape mismatch")
        if not np.isin(self.values, (-1, 1)).all():
            raise DataError("binary panel entries must be -1 or +1")
        if self.values.shape[1] and (self.values.max(axis=0) == self.values.min(axis=0)).any():
            raise DataError("binary panel has a constant column")


def log_returns(panel: PricePanel) -> ReturnPanel:
    """Log price differences; a return exists only where both prices do."""
    if panel.n_dates < 2:
        raise DataError("need at least 2 dates to compute returns")
    present = panel.present[1:] & panel.present[:-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.log(panel.prices[1:]) - np.log(panel.prices[:-1])
    r = np.where(present, r, np.nan)
    return ReturnPanel(panel.dates[1:], panel.assets, r, present)


def market_mode(returns: ReturnPanel) -> np.ndarray:
    """Per-date median over the returns present that day.

    Even counts use the standard sample median (mean of the two central order
    statistics). A date with no present return at all is an error.
    """
    counts = returns.present.sum(axis=1)
    if (counts == 0).any():
        bad = returns.dates[int(np.argmin(counts))]
        raise DataError(f"date {bad} has no present returns")
    with np.errstate(invalid="ignore"):
        return np.nanmedian(np.where(returns.present, returns.returns, np.nan), axis=1)


def complete_case(returns: ReturnPanel) -> ReturnPanel:
    """Drop every asset with any missing return in the window."""
    keep = returns.present.all(axis=0)
    if not keep.any():
        raise DataError("no asset survives complete-case filtering")
    assets = tuple(a for a, k in zip(returns.assets, keep) if k)
    sub = returns.returns[:, keep]
    return ReturnPanel(returns.dates, assets, sub, np.ones_like(sub, dtype=bool))


def binarize(returns: ReturnPanel, median_scope: str = "universe") -> BinaryPanel:
    """Binarized partial returns of the window's complete-case assets.

    Assets with any missing return are dropped first. The market mode is then
    subtracted and the sign taken, with sign(0) = +1 so runs are reproducible.
    Columns whose sign never changes within the window are dropped because the
    phi coefficient is undefined at zero variance.

    median_scope selects the asset set the daily median is computed on:
    "universe" uses every asset present that day (before complete-case
    filtering), "window" uses only the complete-case survivors.
    """
    if median_scope not in MEDIAN_SCOPES:
        raise DataError(f"median_scope must be one of {MEDIAN_SCOPES}")
    keep = returns.present.all(axis=0)
    if not keep.any():
        raise DataError("no asset survives complete-case filtering")
    sub = returns.returns[:, keep]
    if median_scope == "universe":
        m = market_mode(returns)
    else:
        m = np.median(sub, axis=1)
    b = np.where(sub - m[:, None] >= 0, 1, -1).astype(np.int8)
    nonconst = b.max(axis=0) != b.min(axis=0)
    if not nonconst.any():
        raise DataError("no asset survives constant-column filtering")
    assets = tuple(a for a, k in zip(returns.assets, keep) if k)
    assets = tuple(a for a, k in zip(assets, nonconst) if k)
    return BinaryPanel(returns.dates, assets, b[:, nonconst])


def volatility(returns: ReturnPanel) -> float:
    """Mean absolute return over all present entries of the window."""
    if not returns.present.any():
        raise DataError("cannot compute volatility of an empty return panel")
    return float(np.mean(np.abs(returns.returns[returns.present])))
