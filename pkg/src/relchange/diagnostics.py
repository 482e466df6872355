"""Serial-dependence diagnostics: lag-k autocorrelation surfaces and their
L2 aggregation (variogram).

Centering uses the global sample mean, which slightly inflates correlations
when mean changes are present; this matches the intended diagnostic use on
(approximately) stationary stretches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fda import FunctionalSeries

__all__ = ["Variogram", "autocorr_surface", "variogram"]


@dataclass(frozen=True)
class Variogram:
    lags: tuple[int, ...]
    values: tuple[float, ...]  # NaN marks an undefined (degenerate) lag


def autocorr_surface(x: FunctionalSeries, k: int) -> np.ndarray:
    """Empirical lag-k correlation surface gamma_k(t, s), shape (p, p).

    Entry (a, b) correlates X_j(t_a) with X_{j+k}(t_b) over j = 1..n-k after
    centering at the global mean curve.  Entries with a degenerate denominator
    are reported as NaN rather than silently zero.
    """
    if not (0 <= k <= x.n - 2):
        raise ValueError(f"lag {k} outside 0..{x.n - 2}")
    xbar = x.values.mean(axis=0)
    a = x.values[: x.n - k] - xbar
    b = x.values[k:] - xbar
    num = a.T @ b
    den = np.sqrt(np.outer((a * a).sum(axis=0), (b * b).sum(axis=0)))
    with np.errstate(invalid="ignore", divide="ignore"):
        surf = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.nan)
    return surf


def variogram(x: FunctionalSeries, max_lag: int) -> Variogram:
    """L2 norms of the correlation surfaces for lags 0..max_lag.

    Norms use 2-d trapezoid quadrature on the grid.  A lag whose surface has
    any undefined entry gets value NaN.
    """
    if max_lag > x.n - 2:
        raise ValueError(f"max_lag {max_lag} exceeds n-2 = {x.n - 2}")
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    w = x.grid.trapezoid_weights
    values = []
    for k in range(max_lag + 1):
        surf = autocorr_surface(x, k)
        if np.any(np.isnan(surf)):
            values.append(float("nan"))
        else:
            values.append(float(np.sqrt(w @ (surf * surf) @ w)))
    return Variogram(tuple(range(max_lag + 1)), tuple(values))
