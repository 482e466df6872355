"""Data-driven tuning rules: relevance threshold, block length, defaults."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import variogram
from .fda import Curve, FunctionalSeries, sup_norm

__all__ = ["TuningDefaults", "select_delta", "select_block_length"]

# quadratic-spectral bandwidth constant (standard plug-in form)
_QS_CONST = 1.3221


@dataclass(frozen=True)
class TuningDefaults:
    c: float = 0.1
    alpha: float = 0.1
    R: int = 1000
    block_strategy: str = "fixed"  # "fixed" (exponent 1/4) or "plugin"
    block_exponent: float = 0.25  # admissible range [1/5, 2/7]
    delta_fraction: float = 1.0 / 3.0
    edge_fraction: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.edge_fraction < 0.5):
            raise ValueError("edge_fraction must be in (0, 0.5)")
        if self.block_strategy == "fixed" and not (0.2 <= self.block_exponent <= 2.0 / 7.0):
            raise ValueError("fixed block exponent must lie in [1/5, 2/7]")
        if min(self.c, self.alpha, self.R, self.delta_fraction) <= 0:
            raise ValueError("defaults must be positive")


def select_delta(
    x: FunctionalSeries,
    edge_fraction: float = 0.05,
    fraction: float = 1.0 / 3.0,
) -> float:
    """Relevance threshold from the sup distance of the edge means.

    Averages the first and last floor(edge_fraction * n) curves and returns
    `fraction` times the sup-norm of their difference, the heuristic for data
    that drifts from a rest state to a changed state over the recording.
    """
    n_edge = int(edge_fraction * x.n)
    if n_edge < 1:
        raise ValueError(
            f"edge window empty: floor({edge_fraction} * {x.n}) < 1"
        )
    mu_initial = x.values[:n_edge].mean(axis=0)
    mu_final = x.values[x.n - n_edge :].mean(axis=0)
    return fraction * sup_norm(Curve(x.grid, mu_initial - mu_final))


def _ceil_exact(v: float) -> int:
    # guard against 256**0.25 = 4.000000000000001-style float fuzz
    r = round(v)
    if abs(v - r) < 1e-9:
        return int(r)
    return int(math.ceil(v))


def select_block_length(x: FunctionalSeries, strategy: str = "fixed") -> int:
    """Bootstrap block length.

    "fixed": L = ceil(n^(1/4)), inside the admissible exponent range.
    "plugin": quadratic-spectral plug-in bandwidth driven by the aggregate
    lag-correlation norms, rounded and clamped to [2, floor(n^(2/7))].
    The result always satisfies 2L + 2 <= n.
    """
    n = x.n
    if n < 16:
        raise ValueError("need n >= 16 to select a block length")
    if strategy == "fixed":
        L = _ceil_exact(n**0.25)
    elif strategy == "plugin":
        L = _plugin_block_length(x)
    else:
        raise ValueError(f"unknown block strategy {strategy!r}")
    return max(1, min(L, (n - 2) // 2))


def _plugin_block_length(x: FunctionalSeries) -> int:
    n = x.n
    max_lag = min(n - 2, _ceil_exact(n ** (1.0 / 3.0)))
    v = np.array(variogram(x, max_lag).values)
    upper = max(2, int(n ** (2.0 / 7.0)))
    if not np.all(np.isfinite(v)) or v[0] <= 0:
        return 2
    ks = np.arange(1, max_lag + 1, dtype=float)
    numer = 2.0 * float(np.dot(ks * ks, v[1:]))
    denom = float(v[0] + 2.0 * v[1:].sum())
    alpha2 = (numer / denom) ** 2
    bandwidth = _QS_CONST * (alpha2 * n) ** 0.2
    return min(max(2, int(round(bandwidth))), upper)
