"""Relevance testing of candidate changes via a block multiplier bootstrap.

For each candidate i with flanking window (k_{i-1}, k_{i+1}] of length n_i,
the size of the change is estimated by the sup-norm M_i of the window CUSUM
and turned into the detector

    T_i = sqrt(n_i) * (M_i - h_i (1 - h_i) * delta),

where h_i is the relative position of the candidate inside its window.  The
detectors are aggregated by the maximum and compared against the empirical
(1-alpha)-quantile of a bootstrap that multiplies centered moving blocks of
de-jumped residual curves by standard normal weights, evaluated on the
estimated extremal sets of the mean difference.

Conventions (all deterministic):
  * blocks that would overrun either window end are truncated to the window,
    and a truncated block of length L_k uses sqrt(L_k) normalization and the
    centering share L_k / n_i, so constant residuals give exactly zero;
  * the multiplier for the block starting at absolute index k is a function
    of (replicate, k) only, so overlapping candidate windows share weights;
  * per-replicate streams are derived from the base seed by counter-style
    splitting, making replicates order-independent and parallelizable;
  * the quantile is the ceil((1-alpha) R)-th order statistic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .binseg import ChangePointSet, binseg, default_xi
from .fda import Curve, FunctionalSeries, segment_mean
from .cusum import cusum_supnorm_at
from .tuning import select_block_length

__all__ = [
    "Detector",
    "ExtremalSets",
    "BootstrapConfig",
    "RelevanceReport",
    "MultivariateResult",
    "detector",
    "extremal_sets",
    "bootstrap_replicate",
    "bootstrap_quantile",
    "detect_relevant",
    "detect_relevant_multivariate",
    "empirical_quantile",
]


@dataclass(frozen=True)
class Detector:
    """Per-candidate change-size statistic."""

    i: int
    n_i: int
    h_at_change: float
    M: float
    T: float

    def __post_init__(self):
        if not (0.0 < self.h_at_change < 1.0):
            raise ValueError("h_at_change must be strictly inside (0, 1)")
        if self.M < 0.0:
            raise ValueError("M must be nonnegative")


@dataclass(frozen=True)
class ExtremalSets:
    """Grid indices where +/-(mu1 - mu2) comes within `margin` of the sup."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]
    margin: float

    def __post_init__(self):
        if not (self.plus or self.minus):
            raise ValueError("at least one extremal set must be nonempty")


@dataclass(frozen=True)
class BootstrapConfig:
    R: int = 1000
    L: int | None = None  # None resolves via the block-length rule
    alpha: float = 0.1
    c: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if self.L is not None and self.L < 1:
            raise ValueError("L must be >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        if self.c <= 0.0:
            raise ValueError("c must be positive")


@dataclass(frozen=True)
class RelevanceReport:
    candidates: ChangePointSet
    detectors: tuple[Detector, ...]
    quantile: float | None
    bootstrap_draws: np.ndarray
    relevant: tuple[bool, ...]
    segment_means: tuple[Curve, ...]
    extremal: tuple[ExtremalSets, ...]
    delta: float

    @property
    def relevant_indices(self) -> tuple[int, ...]:
        return tuple(
            k for k, flag in zip(self.candidates.indices, self.relevant) if flag
        )


def detector(x: FunctionalSeries, cps: ChangePointSet, i: int, delta: float) -> Detector:
    """Detector T_i for candidate i (1-based) at relevance threshold delta."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    lo, hi = cps.window(i)
    n_i = hi - lo
    if n_i < 4:
        raise ValueError(f"window for candidate {i} degenerate (n_i={n_i} < 4)")
    h = cps.h_at_change(i)
    M = cusum_supnorm_at(x, lo, hi, cps.indices[i - 1])
    T = math.sqrt(n_i) * (M - h * (1.0 - h) * delta)
    return Detector(i=i, n_i=n_i, h_at_change=h, M=M, T=T)


def extremal_sets(mu1: Curve, mu2: Curve, n: int, c: float) -> ExtremalSets:
    """Estimated extremal sets of mu1 - mu2 with margin c log(n) / sqrt(n).

    `n` is the length of the full series (not the candidate window).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if c <= 0:
        raise ValueError("c must be positive")
    diff = mu1.values - mu2.values
    margin = c * math.log(n) / math.sqrt(n)
    cutoff = float(np.max(np.abs(diff))) - margin
    plus = tuple(int(j) for j in np.flatnonzero(diff >= cutoff))
    minus = tuple(int(j) for j in np.flatnonzero(-diff >= cutoff))
    return ExtremalSets(plus=plus, minus=minus, margin=margin)


def _window_means(x: FunctionalSeries, cps: ChangePointSet, i: int) -> tuple[Curve, Curve]:
    lo, hi = cps.window(i)
    k = cps.indices[i - 1]
    return segment_mean(x, lo + 1, k), segment_mean(x, k + 1, hi)


class _CandidateContext:
    """Precomputed, replicate-independent pieces of the bootstrap process.

    `terms` holds one row per block position k = lo..hi:

        terms[k - lo] = (block_sum_k - (L_k / n_i) * window_sum) / sqrt(L_k * n_i)

    so a replicate statistic only needs two weighted sums of rows against the
    multiplier vector (up to the candidate, and over the whole window).
    """

    def __init__(self, x: FunctionalSeries, cps: ChangePointSet, i: int, L: int, c: float):
        lo, hi = cps.window(i)
        n_i = hi - lo
        if n_i < 2 * L + 2:
            raise ValueError(
                f"candidate {i} (index {cps.indices[i - 1]}): window length "
                f"{n_i} too short for block length L={L} (need >= {2 * L + 2})"
            )
        self.lo, self.hi, self.n_i = lo, hi, n_i
        self.h = cps.h_at_change(i)
        k_i = cps.indices[i - 1]
        self.split = k_i - lo + 1  # number of block positions lo..k_i

        mu1, mu2 = _window_means(x, cps, i)
        jump = mu2.values - mu1.values
        y = x.values[lo:hi].copy()
        y[k_i - lo :] -= jump  # de-jump observations j > k_i
        window_sum = y.sum(axis=0)

        # inclusive prefix sums with a zero row in front: rows of y are the
        # window observations lo+1..hi
        prefix = np.vstack([np.zeros(x.p), np.cumsum(y, axis=0)])
        pos = np.arange(lo, hi + 1)
        b_lo = np.maximum(pos, lo + 1)
        b_hi = np.minimum(pos + L - 1, hi)
        lengths = np.maximum(b_hi - b_lo + 1, 0)
        block_sums = prefix[b_hi - lo] - prefix[b_lo - lo - 1]
        block_sums[lengths == 0] = 0.0

        share = lengths[:, None] / n_i
        scale = np.where(lengths > 0, np.sqrt(lengths * float(n_i)), 1.0)
        self.terms = (block_sums - share * window_sum) / scale[:, None]

        es = extremal_sets(mu1, mu2, x.n, c)
        self.extremal = es
        self.plus = np.array(es.plus, dtype=int)
        self.minus = np.array(es.minus, dtype=int)

    def statistics(self, xi_block: np.ndarray) -> np.ndarray:
        """Replicate statistics for multiplier rows xi_block (chunk, n_i+1)."""
        b_at_change = xi_block[:, : self.split] @ self.terms[: self.split]
        b_at_end = xi_block @ self.terms
        w = b_at_change - self.h * b_at_end
        parts = []
        if self.plus.size:
            parts.append(w[:, self.plus].max(axis=1))
        if self.minus.size:
            parts.append((-w[:, self.minus]).max(axis=1))
        return np.maximum.reduce(parts)


def bootstrap_replicate(
    x: FunctionalSeries,
    cps: ChangePointSet,
    i: int,
    cfg: BootstrapConfig,
    multipliers: np.ndarray,
) -> float:
    """One bootstrap statistic for candidate i from an explicit multiplier
    vector.

    multipliers[j] weights the block starting at absolute index lo + j, where
    (lo, hi] is the candidate window; at least n_i + 1 values are required.
    """
    if cfg.L is None:
        raise ValueError("bootstrap_replicate needs a concrete block length L")
    ctx = _CandidateContext(x, cps, i, cfg.L, cfg.c)
    xi = np.asarray(multipliers, dtype=float)
    if xi.ndim != 1 or xi.size < ctx.n_i + 1:
        raise ValueError(
            f"need at least {ctx.n_i + 1} multipliers, got {xi.size}"
        )
    return float(ctx.statistics(xi[None, : ctx.n_i + 1])[0])


def empirical_quantile(draws: np.ndarray, alpha: float) -> float:
    """ceil((1-alpha) R)-th order statistic of the draws."""
    r = len(draws)
    if r < 1:
        raise ValueError("no draws")
    rank = math.ceil((1.0 - alpha) * r - 1e-9)
    rank = min(max(rank, 1), r)
    return float(np.sort(np.asarray(draws))[rank - 1])


def _replicate_multipliers(seed: int, r: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, r]).standard_normal(n + 1)


# worker state for process pools (populated once per worker via _pool_init)
_WORKER_CTXS: list[_CandidateContext] | None = None
_WORKER_ARGS: tuple[int, int] | None = None


def _chunk_draws(
    ctxs: list[_CandidateContext], seed: int, n: int, reps: range
) -> np.ndarray:
    xi = np.vstack([_replicate_multipliers(seed, r, n) for r in reps])
    per_candidate = [
        ctx.statistics(xi[:, ctx.lo : ctx.hi + 1]) for ctx in ctxs
    ]
    return np.maximum.reduce(per_candidate)


def _pool_chunk(reps: tuple[int, int]) -> np.ndarray:
    assert _WORKER_CTXS is not None and _WORKER_ARGS is not None
    seed, n = _WORKER_ARGS
    return _chunk_draws(_WORKER_CTXS, seed, n, range(*reps))


def _pool_init(ctxs, args):
    global _WORKER_CTXS, _WORKER_ARGS
    _WORKER_CTXS = ctxs
    _WORKER_ARGS = args


def _bootstrap_draws(
    x: FunctionalSeries,
    cps: ChangePointSet,
    cfg: BootstrapConfig,
    workers: int = 1,
) -> np.ndarray:
    """R aggregate draws max_i T_i^(r); bit-identical for any worker count."""
    ctxs = [_CandidateContext(x, cps, i, cfg.L, cfg.c) for i in range(1, cps.m + 1)]
    if workers <= 1:
        return _chunk_draws(ctxs, cfg.seed, x.n, range(cfg.R))
    bounds = np.linspace(0, cfg.R, workers * 4 + 1, dtype=int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_pool_init, initargs=(ctxs, (cfg.seed, x.n))
    ) as pool:
        parts = list(pool.map(_pool_chunk, chunks))
    return np.concatenate(parts)


def bootstrap_quantile(
    x: FunctionalSeries,
    cps: ChangePointSet,
    delta: float,
    cfg: BootstrapConfig,
    workers: int = 1,
) -> tuple[float, np.ndarray]:
    """Quantile q*_{1-alpha} and the R aggregate bootstrap draws.

    The draws do not depend on delta (it only shifts the detectors); the
    argument is accepted for interface symmetry with the detection entry
    point.
    """
    del delta
    if cps.m == 0:
        raise ValueError("no candidates to bootstrap")
    if cfg.L is None:
        cfg = replace(cfg, L=select_block_length(x))
    draws = _bootstrap_draws(x, cps, cfg, workers=workers)
    return empirical_quantile(draws, cfg.alpha), draws


def _segment_means(x: FunctionalSeries, cps: ChangePointSet) -> tuple[Curve, ...]:
    padded = cps.padded_indices
    return tuple(
        segment_mean(x, padded[j] + 1, padded[j + 1]) for j in range(cps.m + 1)
    )


def detect_relevant(
    x: FunctionalSeries,
    delta: float,
    cfg: BootstrapConfig | None = None,
    xi: float | None = None,
    min_seg: int | None = None,
    workers: int = 1,
) -> RelevanceReport:
    """Full two-step pipeline: segmentation, then bootstrap relevance test.

    When xi or the block length are not given they are resolved by the
    default tuning rules; min_seg defaults to 2L + 2 so every candidate
    window can host the bootstrap blocks.
    """
    if cfg is None:
        cfg = BootstrapConfig()
    if cfg.L is None:
        cfg = replace(cfg, L=select_block_length(x))
    if xi is None:
        xi = default_xi(x)
    if min_seg is None:
        min_seg = 2 * cfg.L + 2

    cps = binseg(x, xi, min_seg)
    if cps.m == 0:
        return RelevanceReport(
            candidates=cps,
            detectors=(),
            quantile=None,
            bootstrap_draws=np.empty(0),
            relevant=(),
            segment_means=_segment_means(x, cps),
            extremal=(),
            delta=delta,
        )

    detectors = tuple(detector(x, cps, i, delta) for i in range(1, cps.m + 1))
    extremal = tuple(
        extremal_sets(*_window_means(x, cps, i), x.n, cfg.c)
        for i in range(1, cps.m + 1)
    )
    quantile, draws = bootstrap_quantile(x, cps, delta, cfg, workers=workers)
    relevant = tuple(d.T > quantile for d in detectors)
    return RelevanceReport(
        candidates=cps,
        detectors=detectors,
        quantile=quantile,
        bootstrap_draws=draws,
        relevant=relevant,
        segment_means=_segment_means(x, cps),
        extremal=extremal,
        delta=delta,
    )


# ---------------------------------------------------------------------------
# multivariate extensions


def _phi(values: np.ndarray, q: float) -> float:
    if q == math.inf:
        return float(np.max(values))
    return float(np.sum(np.abs(values) ** q) ** (1.0 / q))


@dataclass(frozen=True)
class MultivariateResult:
    """Joint relevance result for an aggregated multivariate statistic."""

    candidates: ChangePointSet
    coordinate_M: np.ndarray  # shape (m, d)
    aggregated_M: tuple[float, ...]
    detectors: tuple[Detector, ...]
    quantile: float | None
    bootstrap_draws: np.ndarray
    relevant: tuple[bool, ...]
    delta: float
    q: float


def detect_relevant_multivariate(
    xs: list[FunctionalSeries],
    deltas: list[float] | None = None,
    mode: str = "per-coordinate",
    q: float = math.inf,
    delta: float | None = None,
    cfg: BootstrapConfig | None = None,
    xi: float | None = None,
    min_seg: int | None = None,
):
    """Relevant changes across d coordinate series observed simultaneously.

    "per-coordinate" runs the univariate pipeline per coordinate with its own
    threshold delta_l, but the bootstrap aggregate (and hence the quantile)
    takes the max over coordinates as well as candidates; returns one report
    per coordinate sharing that quantile.

    "aggregated" forms one candidate set (sorted union over coordinates),
    aggregates the coordinate sup-norms with phi = ||.||_q before rescaling,
    and bootstraps the aggregate via plug-in directional weights
    (M_l / phi(M))^(q-1); returns a MultivariateResult.  With d = 1 both modes
    reduce exactly to the univariate pipeline.
    """
    if not xs:
        raise ValueError("no coordinate series")
    n = xs[0].n
    if any(s.n != n for s in xs):
        raise ValueError("all coordinates must have the same number of curves")
    if cfg is None:
        cfg = BootstrapConfig()
    if cfg.L is None:
        cfg = replace(cfg, L=select_block_length(xs[0]))
    if min_seg is None:
        min_seg = 2 * cfg.L + 2

    if mode == "per-coordinate":
        if deltas is None:
            raise ValueError("per-coordinate mode needs per-coordinate deltas")
        if len(deltas) != len(xs):
            raise ValueError("need one delta per coordinate")
        return _per_coordinate(xs, list(deltas), cfg, xi, min_seg)
    if mode == "aggregated":
        if delta is None:
            raise ValueError("aggregated mode needs a single delta")
        if not (1.0 <= q):
            raise ValueError("aggregation exponent q must be >= 1")
        return _aggregated(xs, float(delta), q, cfg, xi, min_seg)
    raise ValueError(f"unknown mode {mode!r}")


def _per_coordinate(xs, deltas, cfg, xi, min_seg):
    candidate_sets = [
        binseg(x, default_xi(x) if xi is None else xi, min_seg) for x in xs
    ]
    all_ctxs: list[list[_CandidateContext]] = []
    detector_lists = []
    extremal_lists = []
    for x, cps, d in zip(xs, candidate_sets, deltas):
        dets = tuple(detector(x, cps, i, d) for i in range(1, cps.m + 1))
        exts = tuple(
            extremal_sets(*_window_means(x, cps, i), x.n, cfg.c)
            for i in range(1, cps.m + 1)
        )
        all_ctxs.append(
            [_CandidateContext(x, cps, i, cfg.L, cfg.c) for i in range(1, cps.m + 1)]
        )
        detector_lists.append(dets)
        extremal_lists.append(exts)

    flat_ctxs = [ctx for ctxs in all_ctxs for ctx in ctxs]
    if flat_ctxs:
        n = xs[0].n
        xi_rows = np.vstack(
            [_replicate_multipliers(cfg.seed, r, n) for r in range(cfg.R)]
        )
        per_cand = [ctx.statistics(xi_rows[:, ctx.lo : ctx.hi + 1]) for ctx in flat_ctxs]
        draws = np.maximum.reduce(per_cand)
        quantile = empirical_quantile(draws, cfg.alpha)
    else:
        draws = np.empty(0)
        quantile = None

    reports = []
    for x, cps, d, dets, exts in zip(
        xs, candidate_sets, deltas, detector_lists, extremal_lists
    ):
        relevant = tuple(det.T > quantile for det in dets) if dets else ()
        reports.append(
            RelevanceReport(
                candidates=cps,
                detectors=dets,
                quantile=quantile,
                bootstrap_draws=draws,
                relevant=relevant,
                segment_means=_segment_means(x, cps),
                extremal=exts,
                delta=d,
            )
        )
    return reports


def _aggregated(xs, delta, q, cfg, xi, min_seg):
    union: set[int] = set()
    for x in xs:
        union.update(binseg(x, default_xi(x) if xi is None else xi, min_seg).indices)
    cps = ChangePointSet(tuple(sorted(union)), xs[0].n, float("nan"))
    if cps.m == 0:
        return MultivariateResult(
            candidates=cps,
            coordinate_M=np.empty((0, len(xs))),
            aggregated_M=(),
            detectors=(),
            quantile=None,
            bootstrap_draws=np.empty(0),
            relevant=(),
            delta=delta,
            q=q,
        )

    m, d = cps.m, len(xs)
    coord_M = np.empty((m, d))
    ctxs = [[_CandidateContext(x, cps, i, cfg.L, cfg.c) for x in xs] for i in range(1, m + 1)]
    for i in range(1, m + 1):
        lo, hi = cps.window(i)
        for l, x in enumerate(xs):
            coord_M[i - 1, l] = cusum_supnorm_at(x, lo, hi, cps.indices[i - 1])

    detectors = []
    weights = np.empty((m, d))
    for i in range(1, m + 1):
        lo, hi = cps.window(i)
        n_i = hi - lo
        h = cps.h_at_change(i)
        agg = _phi(coord_M[i - 1], q)
        T = math.sqrt(n_i) * (agg - h * (1.0 - h) * delta)
        detectors.append(Detector(i=i, n_i=n_i, h_at_change=h, M=agg, T=T))
        weights[i - 1] = _phi_gradient(coord_M[i - 1], q, agg)

    n = xs[0].n
    xi_rows = np.vstack([_replicate_multipliers(cfg.seed, r, n) for r in range(cfg.R)])
    per_cand = []
    for i in range(1, m + 1):
        coord_stats = [
            ctx.statistics(xi_rows[:, ctx.lo : ctx.hi + 1]) for ctx in ctxs[i - 1]
        ]
        per_cand.append(sum(w * s for w, s in zip(weights[i - 1], coord_stats)))
    draws = np.maximum.reduce(per_cand)
    quantile = empirical_quantile(draws, cfg.alpha)
    relevant = tuple(det.T > quantile for det in detectors)
    return MultivariateResult(
        candidates=cps,
        coordinate_M=coord_M,
        aggregated_M=tuple(float(_phi(coord_M[i], q)) for i in range(m)),
        detectors=tuple(detectors),
        quantile=quantile,
        bootstrap_draws=draws,
        relevant=relevant,
        delta=delta,
        q=q,
    )


def _phi_gradient(values: np.ndarray, q: float, agg: float) -> np.ndarray:
    """Plug-in directional weights of ||.||_q at the observed sup-norms."""
    d = values.size
    if q == math.inf:
        w = np.zeros(d)
        w[int(np.argmax(values))] = 1.0
        return w
    if agg <= 0.0:
        return np.full(d, d ** (1.0 / q - 1.0))
    return (values / agg) ** (q - 1.0)
