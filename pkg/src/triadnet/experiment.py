"""Out-of-sample prediction of correlation-sign changes.

For an in-sample window ending at some date and a contiguous out-of-sample
window starting the next trading day, the sign matrix of each window is
computed independently on the assets that survive preprocessing in both.
Pairs whose sign switches form the positive class; the in-sample pair
stability score and the in-sample absolute correlation (both negated, so
higher means "more likely to switch") are the competing discriminators,
compared by ROC/AUC over rolling windows and a grid of window lengths.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .balance import eigvec_overlap, hamiltonian, pair_stability, spectral_summary
from .correlation import (
    CorrMatrix,
    partial_pearson,
    pearson_matrix,
    phi_matrix,
    sign_matrix,
)
from .errors import DataError
from .graphmetrics import (
    MIN_LINKS_FOR_ASSORTATIVITY,
    LabeledGraph,
    assortativity,
    link_density,
)
from .ingest import PricePanel, slice_window
from .preprocess import (
    BinaryPanel,
    ReturnPanel,
    binarize,
    complete_case,
    log_returns,
    market_mode,
    volatility,
)
from .svn import build_svn

logger = logging.getLogger(__name__)

SCORE_KINDS = ("delta", "absphi")


@dataclass(eq=False)
class SignChangeDataset:
    """Aligned pairs, switch labels and the two (negated) in-sample scores."""

    assets: tuple
    pairs: list
    labels: np.ndarray
    scores_delta: np.ndarray
    scores_absphi: np.ndarray
    s_in: np.ndarray
    s_out: np.ndarray

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)


@dataclass(eq=False)
class RocResult:
    """Threshold-sweep curve points and the tie-aware area under them."""

    points: list
    auc: float


@dataclass
class ExperimentRecord:
    """One (end date, window pair) evaluation of both discriminators."""

    end_date: str
    t_in: int
    t_out: int
    q_in: float
    q_out: float
    auc_delta: float
    auc_absphi: float
    h_in: float
    h_out: float
    volatility: float
    n_pairs: int


def default_t_values() -> list:
    """Ten window lengths from 20 to 2000 days in geometric progression."""
    raw = 20.0 * (100.0 ** (np.arange(10) / 9.0))
    return sorted({int(round(v)) for v in raw})


def _window_returns(panel: PricePanel, end_idx: int, t: int) -> ReturnPanel:
    if end_idx < t:
        raise DataError(
            f"insufficient history for a {t}-return window ending {panel.dates[end_idx]}"
        )
    return log_returns(slice_window(panel, panel.dates[end_idx], t + 1))


def _survivor_data(rp: ReturnPanel, corr_kind: str, median_scope: str):
    """Surviving assets of a window and the column data its correlations use."""
    if corr_kind == "phi":
        b = binarize(rp, median_scope=median_scope)
        return b.assets, b.values
    cc = complete_case(rp)
    if corr_kind == "pearson":
        if median_scope == "universe":
            med = market_mode(rp)
        else:
            med = np.median(cc.returns, axis=1)
        x = cc.returns - med[:, None]
    elif corr_kind == "partial_pearson":
        x = cc.returns
    else:
        raise DataError(f"unknown correlation kind {corr_kind!r}")
    keep = x.max(axis=0) != x.min(axis=0)
    if not keep.any():
        raise DataError("no asset survives constant-column filtering")
    assets = tuple(a for a, k in zip(cc.assets, keep) if k)
    return assets, x[:, keep]


def _corr_from_data(dates, assets, x, corr_kind: str) -> CorrMatrix:
    if corr_kind == "phi":
        return phi_matrix(BinaryPanel(dates, assets, x))
    rp = ReturnPanel(dates, assets, x, np.ones_like(x, dtype=bool))
    if corr_kind == "pearson":
        return pearson_matrix(rp, remove_median=False)
    return partial_pearson(rp)


def window_correlation(
    returns: ReturnPanel, corr_kind: str = "phi", median_scope: str = "universe"
) -> CorrMatrix:
    """Correlation matrix of one window, restricted to its surviving assets."""
    assets, x = _survivor_data(returns, corr_kind, median_scope)
    return _corr_from_data(returns.dates, assets, x, corr_kind)


def _dataset_from_returns(
    r_in: ReturnPanel, r_out: ReturnPanel, corr_kind: str, median_scope: str
) -> SignChangeDataset:
    assets_in, x_in = _survivor_data(r_in, corr_kind, median_scope)
    assets_out, x_out = _survivor_data(r_out, corr_kind, median_scope)
    common = sorted(set(assets_in) & set(assets_out))
    if len(common) < 3:
        raise DataError(f"only {len(common)} assets survive both windows (need 3)")
    ix_in = [assets_in.index(a) for a in common]
    ix_out = [assets_out.index(a) for a in common]
    corr_in = _corr_from_data(r_in.dates, common, x_in[:, ix_in], corr_kind)
    corr_out = _corr_from_data(r_out.dates, common, x_out[:, ix_out], corr_kind)
    s_in = sign_matrix(corr_in)
    s_out = sign_matrix(corr_out)
    iu, ju = np.triu_indices(len(common), k=1)
    labels = s_in.values[iu, ju] != s_out.values[iu, ju]
    delta = pair_stability(s_in)
    return SignChangeDataset(
        assets=tuple(common),
        pairs=list(zip(iu.tolist(), ju.tolist())),
        labels=labels,
        scores_delta=-delta[iu, ju],
        scores_absphi=-np.abs(corr_in.values[iu, ju]),
        s_in=s_in.values,
        s_out=s_out.values,
    )


def build_dataset(
    panel: PricePanel,
    end_in: str,
    t_in: int,
    t_out: int,
    corr_kind: str = "phi",
    median_scope: str = "universe",
) -> SignChangeDataset:
    """Sign-switch dataset for the window pair around `end_in`.

    The in-sample window holds the t_in returns ending at end_in; the
    out-of-sample window holds the t_out returns starting the next trading
    day, so the two never overlap. Labels mark pairs whose correlation sign
    differs between the windows; both score vectors are negated stability
    measures, so a higher score predicts a switch.
    """
    if t_in < 1 or t_out < 1:
        raise DataError("window lengths must be positive")
    end_idx = panel.date_index(end_in)
    if end_idx + t_out > panel.n_dates - 1:
        raise DataError(
            f"insufficient out-of-sample history after {end_in}: "
            f"need {t_out} more dates, have {panel.n_dates - 1 - end_idx}"
        )
    r_in = _window_returns(panel, end_idx, t_in)
    r_out = _window_returns(panel, end_idx + t_out, t_out)
    return _dataset_from_returns(r_in, r_out, corr_kind, median_scope)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    uniq, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    return ((starts + ends) / 2.0)[inverse]


def roc(labels, scores) -> RocResult:
    """ROC curve and AUC of `scores` against boolean `labels`.

    The AUC is the rank statistic (probability that a random positive
    outscores a random negative, ties counting one half), which equals the
    trapezoidal area under the tie-grouped threshold sweep returned in
    `points`.
    """
    y = np.asarray(labels, dtype=bool)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape or y.ndim != 1:
        raise DataError("labels and scores must be equal-length vectors")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc needs at least one positive and one negative label")
    ranks = _average_ranks(s)
    auc = (ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    tp = np.cumsum(y[order])
    fp = np.cumsum(~y[order])
    boundary = np.nonzero(np.diff(sorted_scores) != 0)[0]
    cut = np.append(boundary, y.size - 1)
    points = [(0.0, 0.0)]
    points.extend((fp[i] / n_neg, tp[i] / n_pos) for i in cut)
    return RocResult(points=points, auc=float(auc))


def stability_profile(dataset: SignChangeDataset, which: str, bin_width: float = 0.05):
    """Per-bin probability that the in-sample sign is preserved out of sample.

    Bins cover the raw discriminator range (the pair stability score lives in
    [-1, 1], the absolute correlation in [0, 1]). Empty bins are emitted with
    count 0 and a null probability. Returns (bin center, probability, count)
    triples.
    """
    if which not in SCORE_KINDS:
        raise DataError(f"which must be one of {SCORE_KINDS}")
    if bin_width <= 0:
        raise DataError("bin_width must be positive")
    if dataset.n_pairs == 0:
        raise DataError("empty dataset")
    if which == "delta":
        raw = -dataset.scores_delta
        lo, hi = -1.0, 1.0
    else:
        raw = -dataset.scores_absphi
        lo, hi = 0.0, 1.0
    n_bins = max(1, int(np.ceil((hi - lo) / bin_width - 1e-12)))
    idx = np.clip(((raw - lo) / bin_width).astype(int), 0, n_bins - 1)
    preserved = ~dataset.labels
    out = []
    for b in range(n_bins):
        in_bin = idx == b
        count = int(in_bin.sum())
        prob = float(preserved[in_bin].mean()) if count else None
        out.append((lo + (b + 0.5) * bin_width, prob, count))
    return out


# Worker state for process pools: the panel is shipped once per worker.
_GRID_STATE = {}


def _grid_init(panel, corr_kind, median_scope):
    _GRID_STATE["panel"] = panel
    _GRID_STATE["corr_kind"] = corr_kind
    _GRID_STATE["median_scope"] = median_scope


def _evaluate_window(panel, t_in, t_out, end_idx, corr_kind, median_scope):
    """One grid cell evaluation; returns (record | None, skip reason | None)."""
    try:
        r_in = _window_returns(panel, end_idx, t_in)
        r_out = _window_returns(panel, end_idx + t_out, t_out)
        ds = _dataset_from_returns(r_in, r_out, corr_kind, median_scope)
    except DataError as exc:
        return None, f"window infeasible: {exc}"
    if ds.labels.all() or not ds.labels.any():
        return None, "single-class window (no switch variation)"
    n = len(ds.assets)
    record = ExperimentRecord(
        end_date=panel.dates[end_idx],
        t_in=t_in,
        t_out=t_out,
        q_in=t_in / n,
        q_out=t_out / n,
        auc_delta=roc(ds.labels, ds.scores_delta).auc,
        auc_absphi=roc(ds.labels, ds.scores_absphi).auc,
        h_in=hamiltonian(ds.s_in),
        h_out=hamiltonian(ds.s_out),
        volatility=volatility(r_in),
        n_pairs=ds.n_pairs,
    )
    return record, None


def _grid_task(task):
    t_in, t_out, end_idx = task
    return task, _evaluate_window(
        _GRID_STATE["panel"],
        t_in,
        t_out,
        end_idx,
        _GRID_STATE["corr_kind"],
        _GRID_STATE["median_scope"],
    )


def grid_tasks(panel: PricePanel, t_values, step: int):
    """All feasible (t_in, t_out, end index) combinations, in deterministic order."""
    tasks = []
    for t_in in t_values:
        for t_out in t_values:
            for end_idx in range(t_in, panel.n_dates - t_out, step):
                tasks.append((t_in, t_out, end_idx))
    return tasks


def run_grid(
    panel: PricePanel,
    t_values,
    step: int,
    corr_kind: str = "phi",
    median_scope: str = "universe",
    jobs: int = 1,
) -> list:
    """Evaluate every (t_in, t_out) cell on rolling end dates.

    Window pairs that fail preprocessing or have no class variation are
    skipped (and logged), not errors. Records come back sorted by
    (t_in, t_out, end_date) regardless of the degree of parallelism.
    """
    t_values = list(t_values)
    if not t_values or any(t < 1 for t in t_values):
        raise DataError("t_values must be positive window lengths")
    if step < 1:
        raise DataError("step must be at least 1 day")
    tasks = grid_tasks(panel, t_values, step)
    results = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_grid_init,
            initargs=(panel, corr_kind, median_scope),
        ) as pool:
            chunk = max(1, len(tasks) // (jobs * 8))
            results = list(pool.map(_grid_task, tasks, chunksize=chunk))
    else:
        _grid_init(panel, corr_kind, median_scope)
        results = [_grid_task(t) for t in tasks]
    records = []
    skipped = 0
    for task, (record, reason) in results:
        if record is None:
            skipped += 1
            logger.debug("skipping t_in=%d t_out=%d end_idx=%d: %s", *task, reason)
        else:
            records.append(record)
    if skipped:
        logger.info("grid skipped %d of %d windows", skipped, len(tasks))
    records.sort(key=lambda r: (r.t_in, r.t_out, r.end_date))
    return records


def aggregate_cells(records) -> dict:
    """Per (t_in, t_out) means of both AUCs: cell -> (mean_delta, mean_absphi, count)."""
    sums = {}
    for r in records:
        key = (r.t_in, r.t_out)
        sd, sp, c = sums.get(key, (0.0, 0.0, 0))
        sums[key] = (sd + r.auc_delta, sp + r.auc_absphi, c + 1)
    return {
        key: (sd / c, sp / c, c) for key, (sd, sp, c) in sums.items()
    }


def timeseries_rows(
    panel: PricePanel,
    window: int,
    step: int = 1,
    corr_kind: str = "phi",
    median_scope: str = "universe",
    alpha: float = 0.1,
) -> list:
    """Rolling per-date diagnostics for one window length.

    Each row carries the balance index, the positive-network assortativity
    (null below 10 links) and density, the window volatility, the leading
    eigenvalue fraction, and the leading-eigenvector overlap with the next
    (out-of-sample) window of the same length where one exists.
    """
    rows = []
    for end_idx in range(window, panel.n_dates, step):
        try:
            r_in = _window_returns(panel, end_idx, window)
            assets_in, x_in = _survivor_data(r_in, corr_kind, median_scope)
            if len(assets_in) < 3:
                raise DataError("fewer than 3 surviving assets")
            corr_in = _corr_from_data(r_in.dates, assets_in, x_in, corr_kind)
            b = binarize(r_in, median_scope=median_scope)
        except DataError as exc:
            logger.debug("timeseries skips %s: %s", panel.dates[end_idx], exc)
            continue
        net = build_svn(b, alpha=alpha, polarity="positive")
        graph = LabeledGraph(net.adjacency, tuple(panel.sectors[a] for a in net.assets))
        g_value = None
        if graph.m >= MIN_LINKS_FOR_ASSORTATIVITY:
            try:
                g_value = assortativity(graph)
            except DataError:
                g_value = None
        fracs, _ = spectral_summary(corr_in, k=1)
        overlap = None
        if end_idx + window <= panel.n_dates - 1:
            try:
                r_out = _window_returns(panel, end_idx + window, window)
                assets_out, x_out = _survivor_data(r_out, corr_kind, median_scope)
                common = sorted(set(assets_in) & set(assets_out))
                if len(common) >= 2:
                    _, v1_out = spectral_summary(
                        _corr_from_data(
                            r_out.dates,
                            common,
                            x_out[:, [assets_out.index(a) for a in common]],
                            corr_kind,
                        ),
                        k=1,
                    )
                    _, v1_in = spectral_summary(
                        _corr_from_data(
                            r_in.dates,
                            common,
                            x_in[:, [assets_in.index(a) for a in common]],
                            corr_kind,
                        ),
                        k=1,
                    )
                    overlap = eigvec_overlap(v1_in, v1_out)
            except DataError:
                overlap = None
        rows.append(
            {
                "date": panel.dates[end_idx],
                "h": hamiltonian(sign_matrix(corr_in).values),
                "g": g_value,
                "density": link_density(graph, len(net.assets)) if len(net.assets) >= 2 else None,
                "volatility": volatility(r_in),
                "lambda1_frac": max(float(fracs[0]), 0.0),
                "v1_overlap": overlap,
            }
        )
    return rows


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    nx, ny = np.linalg.norm(xc), np.linalg.norm(yc)
    if nx == 0 or ny == 0:
        raise DataError("correlation undefined for a constant series")
    return float(xc @ yc / (nx * ny))


def h_auc_association(records) -> tuple:
    """(Pearson, Spearman) correlation between auc_delta and out-of-sample balance."""
    if len(records) < 3:
        raise DataError("need at least 3 records")
    auc = np.array([r.auc_delta for r in records])
    h_out = np.array([r.h_out for r in records])
    pearson = _pearson(auc, h_out)
    spearman = _pearson(_average_ranks(auc), _average_ranks(h_out))
    return pearson, spearman
