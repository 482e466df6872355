"""Functional CUSUM process over an index window.

For a window (l, r] the process compares running partial means against the
window mean,

    U(k/n, t) = (1/(r-l)) * ( sum_{j=l+1..k} X_j(t)
                              - (k-l)/(r-l) * sum_{j=l+1..r} X_j(t) ),

evaluated at the integer arguments k = l+1..r only, where the fractional
interpolation term of the continuous-time definition vanishes.  Prefix sums
use compensated (Kahan) accumulation so the rounding error stays bounded for
very long windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fda import FunctionalSeries

__all__ = [
    "CusumEvaluation",
    "cusum",
    "cusum_argmax_l2",
    "cusum_supnorm_at",
]

# relative slack when resolving argmax ties; float plateaus (e.g. equal
# adjacent mean segments) must resolve to the smallest index deterministically
_TIE_RTOL = 1e-10


def compensated_cumsum(rows: np.ndarray) -> np.ndarray:
    """Row-wise running sum down axis 0 with Kahan compensation."""
    out = np.empty_like(rows, dtype=float)
    total = np.zeros(rows.shape[1], dtype=float)
    comp = np.zeros(rows.shape[1], dtype=float)
    for i in range(rows.shape[0]):
        y = rows[i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


@dataclass(frozen=True)
class CusumEvaluation:
    """CUSUM rows for window (l, r]: row k-l-1 holds U(k/n, .), k = l+1..r."""

    l: int
    r: int
    values: np.ndarray  # shape (r-l, p)

    def row(self, k: int) -> np.ndarray:
        """Row for argument k/n, k in l+1..r."""
        if not (self.l < k <= self.r):
            raise IndexError(f"k={k} outside ({self.l}, {self.r}]")
        return self.values[k - self.l - 1]


def _check_window(x: FunctionalSeries, l: int, r: int) -> None:
    if not (0 <= l < r <= x.n):
        raise ValueError(f"invalid window ({l}, {r}] for n={x.n}")
    if r - l < 2:
        raise ValueError(f"window ({l}, {r}] shorter than 2")


def cusum(x: FunctionalSeries, l: int, r: int) -> CusumEvaluation:
    """All CUSUM rows of window (l, r] in one prefix-sum pass, O((r-l) p)."""
    _check_window(x, l, r)
    w = r - l
    prefix = compensated_cumsum(x.values[l:r])
    frac = np.arange(1, w + 1, dtype=float)[:, None] / w
    vals = (prefix - frac * prefix[-1]) / w
    return CusumEvaluation(l, r, vals)


def _l2_row_norms(x: FunctionalSeries, ev: CusumEvaluation) -> np.ndarray:
    w = x.grid.trapezoid_weights
    return np.sqrt((ev.values * ev.values) @ w)


def cusum_argmax_l2(x: FunctionalSeries, l: int, r: int) -> tuple[int, float]:
    """Maximizer of the L2-norm of U(k/n, .) over interior k = l+1..r-1.

    Returns (k_hat, attained maximum).  Ties, including float plateaus agreeing
    to relative tolerance 1e-10, break to the smallest k.
    """
    ev = cusum(x, l, r)
    norms = _l2_row_norms(x, ev)[:-1]  # drop k = r (identically 0)
    best = float(np.max(norms))
    tie_set = np.flatnonzero(norms >= best - _TIE_RTOL * abs(best))
    k_hat = l + 1 + int(tie_set[0])
    return k_hat, best


def cusum_supnorm_at(x: FunctionalSeries, l: int, r: int, k: int) -> float:
    """Sup over the whole window rectangle of |U|, for a candidate l < k < r.

    The candidate index only gates the precondition; the supremum runs over
    every row k' = l+1..r and every grid point.
    """
    _check_window(x, l, r)
    if not (l < k < r):
        raise ValueError(f"candidate k={k} not inside window ({l}, {r})")
    ev = cusum(x, l, r)
    return float(np.max(np.abs(ev.values)))
