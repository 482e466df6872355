"""Binary segmentation over the functional CUSUM.

A window is split at the L2-argmax of the CUSUM whenever the scaled statistic

    U_stat = sqrt(r - l) * || U(k_hat/n, .) ||_2

exceeds the threshold xi_n; recursion continues in both children with the
detected index as exclusive/inclusive boundary.  The sqrt(window) scaling is
what makes the default threshold rule sigma_hat * sqrt(3 log n) meaningful:
at a change the scaled statistic grows like sqrt(window) while under the null
it stays bounded in probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cusum import cusum_argmax_l2
from .fda import FunctionalSeries, SegmentMap

__all__ = ["ChangePointSet", "binseg", "default_xi"]


@dataclass(frozen=True)
class ChangePointSet:
    """Ordered candidate change indices (1-based, strictly inside 1..n)."""

    indices: tuple[int, ...]
    n: int
    threshold_used: float

    def __post_init__(self):
        idx = tuple(int(k) for k in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx and not (1 <= idx[0] and idx[-1] <= self.n - 1):
            raise ValueError(f"indices must lie strictly inside (0, {self.n})")

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def m(self) -> int:
        return len(self.indices)

    @property
    def scaled(self) -> tuple[float, ...]:
        return tuple(k / self.n for k in self.indices)

    @property
    def padded_indices(self) -> tuple[int, ...]:
        """Indices with the sentinels 0 and n attached."""
        return (0, *self.indices, self.n)

    @property
    def padded_scaled(self) -> tuple[float, ...]:
        return (0.0, *self.scaled, 1.0)

    def window(self, i: int) -> tuple[int, int]:
        """Index window (k_{i-1}, k_{i+1}] flanking candidate i (1-based)."""
        if not 1 <= i <= self.m:
            raise IndexError(f"candidate {i} outside 1..{self.m}")
        padded = self.padded_indices
        return padded[i - 1], padded[i + 1]

    def segment_map(self, i: int) -> SegmentMap:
        lo, hi = self.window(i)
        return SegmentMap(lo / self.n, hi / self.n)

    def h_at_change(self, i: int) -> float:
        """Relative position of candidate i inside its window."""
        lo, hi = self.window(i)
        return (self.indices[i - 1] - lo) / (hi - lo)


def binseg(x: FunctionalSeries, xi_n: float, min_seg: int = 2) -> ChangePointSet:
    """Recursive segmentation; windows of length <= min_seg are not searched.

    Implemented with an explicit work stack, so the recursion depth is bounded
    regardless of the threshold.  Deterministic: ties at the argmax break to
    the smallest index and the output is sorted.
    """
    if xi_n < 0:
        raise ValueError("xi_n must be nonnegative")
    if min_seg < 1:
        raise ValueError("min_seg must be positive")
    if x.n < 2 * min_seg:
        raise ValueError(f"need n >= 2*min_seg, got n={x.n}, min_seg={min_seg}")

    eps = np.finfo(float).eps
    found: list[int] = []
    stack: list[tuple[int, int]] = [(0, x.n)]
    while stack:
        l, r = stack.pop()
        if r - l <= min_seg or r - l < 3:
            continue
        k_hat, best = cusum_argmax_l2(x, l, r)
        stat = math.sqrt(r - l) * best
        # a statistic below the float-noise level of the prefix sums is no
        # evidence of a change even when xi_n = 0 (e.g. constant data)
        noise_floor = 64.0 * eps * math.sqrt(r - l) * float(
            np.max(np.abs(x.values[l:r]), initial=1.0)
        )
        if stat > xi_n and stat > noise_floor:
            found.append(k_hat)
            stack.append((l, k_hat))
            stack.append((k_hat, r))
    return ChangePointSet(tuple(sorted(found)), x.n, xi_n)


def default_xi(x: FunctionalSeries) -> float:
    """Threshold rule sigma_hat * sqrt(3 log n).

    sigma_hat^2 is the median of the halved squared L2-norms of successive
    curve differences; for an even count the lower-middle order statistic is
    taken.
    """
    if x.n < 3:
        raise ValueError("need at least 3 curves for the threshold rule")
    diffs = np.diff(x.values, axis=0)
    w = x.grid.trapezoid_weights
    sq = ((diffs * diffs) @ w) / 2.0
    sq.sort()
    sigma_sq = float(sq[(sq.size - 1) // 2])  # lower-middle for even counts
    return math.sqrt(sigma_sq) * math.sqrt(3.0 * math.log(x.n))
