"""Grid-sampled functional data: curves, series, norms and segment rescaling.

Curves are stored as plain float vectors sampled on a shared grid in [0, 1].
All norms are grid approximations: the sup-norm is the grid maximum and the
L2-norm uses trapezoid quadrature, so nonuniform grids (e.g. from cycle
resampling) are handled correctly.  Accuracy is controlled by the grid size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "Curve",
    "FunctionalSeries",
    "SegmentMap",
    "sup_norm",
    "l2_norm",
    "segment_mean",
    "rescale",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    if out is a:
        out = out.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample points t_1 < ... < t_p inside [0, 1]."""

    points: np.ndarray

    def __post_init__(self):
        pts = _readonly(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise ValueError("grid points must lie in [0, 1]")

    @classmethod
    def uniform(cls, size: int) -> "Grid":
        return cls(np.linspace(0.0, 1.0, size))

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights w with sum(w) = t_p - t_1."""
        pts = self.points
        w = np.empty_like(pts)
        w[0] = (pts[1] - pts[0]) / 2.0
        w[-1] = (pts[-1] - pts[-2]) / 2.0
        w[1:-1] = (pts[2:] - pts[:-2]) / 2.0
        return w


@dataclass(frozen=True)
class Curve:
    """One sampled curve, aligned with its grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size != self.grid.size:
            raise ValueError("curve length must equal grid size")
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")


@dataclass(frozen=True)
class FunctionalSeries:
    """n curves on a common grid, in temporal order (rows of `values`)."""

    grid: Grid
    values: np.ndarray  # shape (n, p)

    def __post_init__(self):
        vals = _readonly(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2:
            raise ValueError("series values must be a 2-d array (n curves x p points)")
        if vals.shape[0] < 2:
            raise ValueError("series needs at least 2 curves")
        if vals.shape[1] != self.grid.size:
            raise ValueError("curve length must equal grid size")
        if not np.all(np.isfinite(vals)):
            raise ValueError("series values must be finite")

    @classmethod
    def from_curves(cls, curves: list[Curve]) -> "FunctionalSeries":
        if not curves:
            raise ValueError("no curves given")
        grid = curves[0].grid
        for c in curves:
            if c.grid.size != grid.size or not np.array_equal(c.grid.points, grid.points):
                raise ValueError("all curves must share the grid")
        return cls(grid, np.stack([c.values for c in curves]))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def curve(self, j: int) -> Curve:
        """The j-th curve, 1-based (j = 1..n)."""
        if not 1 <= j <= self.n:
            raise IndexError(f"curve index {j} outside 1..{self.n}")
        return Curve(self.grid, self.values[j - 1])


@dataclass(frozen=True)
class SegmentMap:
    """Affine map sending [lo, hi] onto [0, 1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise ValueError(f"need 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")

    def __call__(self, s: float) -> float:
        return rescale(self, s)

    def inverse(self, u: float) -> float:
        return self.lo + u * (self.hi - self.lo)


def sup_norm(c: Curve) -> float:
    """Grid maximum of |values| (the sup-norm on a dense grid)."""
    return float(np.max(np.abs(c.values)))


def l2_norm(c: Curve) -> float:
    """sqrt of the trapezoid-rule approximation of the integral of the square."""
    w = c.grid.trapezoid_weights
    return float(np.sqrt(np.dot(w, c.values * c.values)))


def segment_mean(x: FunctionalSeries, frm: int, to: int) -> Curve:
    """Pointwise mean of curves frm..to (1-based, inclusive on both ends)."""
    if not (1 <= frm <= to <= x.n):
        raise ValueError(f"invalid window [{frm}, {to}] for n={x.n}")
    return Curve(x.grid, x.values[frm - 1 : to].mean(axis=0))


def rescale(m: SegmentMap, s: float) -> float:
    """(s - lo) / (hi - lo); errors outside [lo, hi]."""
    if s < m.lo or s > m.hi:
        raise ValueError(f"{s} outside [{m.lo}, {m.hi}]")
    if s == m.lo:
        return 0.0
    if s == m.hi:
        return 1.0
    return (s - m.lo) / (m.hi - m.lo)
