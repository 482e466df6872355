"""Monte Carlo data generator: bump-perturbed sinusoidal means and a
functional MA(1) error process over a cubic B-spline basis.

The mean schedule places a localized spiky bump (a cubic spline supported on
[0, 0.16]) on top of a smooth base curve; segments differ by 0, 1 or 2 bump
heights.  Errors follow eps_i = eta_i + Theta eta_{i-1} where eta_i has
independent truncated Gaussian coefficients in a 21-dimensional cubic
B-spline basis and Theta is a random operator rescaled to spectral norm 0.8,
drawn once per scenario seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline, CubicSpline

from .fda import FunctionalSeries, Grid

__all__ = [
    "SimScenario",
    "FmaParams",
    "bump_delta_j",
    "scenario_mean",
    "gen_fma1",
    "gen_series",
    "two_change_scenario",
    "three_change_scenario",
]

# interior bump knots; reflections about t = 0.085 fill 0.09..0.15 and the
# support endpoints are anchored to zero
_BUMP_LEFT_T = (0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08)
_BUMP_LEFT_V = (2.0, 5.0, 9.0, 10.0, 12.0, 15.0, 22.0, 25.0)
_BUMP_AXIS = 0.085
_BUMP_SUPPORT = (0.0, 0.16)


def _bump_knots() -> tuple[np.ndarray, np.ndarray]:
    ts = [_BUMP_SUPPORT[0], *_BUMP_LEFT_T]
    vs = [0.0, *_BUMP_LEFT_V]
    for t, v in zip(reversed(_BUMP_LEFT_T), reversed(_BUMP_LEFT_V)):
        tr = 2.0 * _BUMP_AXIS - t
        if tr < _BUMP_SUPPORT[1] - 1e-9:
            ts.append(tr)
            vs.append(v)
    ts.append(_BUMP_SUPPORT[1])
    vs.append(0.0)
    return np.array(ts), np.array(vs)


_BUMP_SPLINE = CubicSpline(*_bump_knots(), bc_type="natural")


def bump_delta_j(t):
    """The bump: natural cubic spline on [0, 0.16], zero elsewhere."""
    t = np.asarray(t, dtype=float)
    inside = (t >= _BUMP_SUPPORT[0]) & (t <= _BUMP_SUPPORT[1])
    out = np.where(inside, _BUMP_SPLINE(t), 0.0)
    return float(out) if out.ndim == 0 else out


def scenario_mean(mean_id: int, t):
    """Segment mean mu_1..mu_4 evaluated at t.

    mu_1 = base, mu_2 = base + bump, mu_3 = base + 2 bump, mu_4 = base + bump,
    with base(t) = 20 (sin(2 pi t) + cos(2 pi t)).
    """
    t = np.asarray(t, dtype=float)
    base = 20.0 * (np.sin(2.0 * np.pi * t) + np.cos(2.0 * np.pi * t))
    bumps = {1: 0.0, 2: 1.0, 3: 2.0, 4: 1.0}
    if mean_id not in bumps:
        raise ValueError(f"unknown mean id {mean_id!r}")
    out = base + bumps[mean_id] * bump_delta_j(t)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FmaParams:
    basis_dim: int = 21
    truncation: float = 4.0  # coefficients outside [-4, 4] are zeroed
    theta_scale: float = 0.8

    def coeff_sds(self) -> np.ndarray:
        """sd(N_{i,.}) = 1/i for basis coordinate i = 1..dim."""
        return 1.0 / np.arange(1, self.basis_dim + 1)

    def psi_sds(self) -> np.ndarray:
        """sd(Psi_{ij}) = 1/(i j)."""
        i = np.arange(1, self.basis_dim + 1, dtype=float)
        return 1.0 / np.outer(i, i)


@dataclass(frozen=True)
class SimScenario:
    n: int
    change_fractions: tuple[float, ...]
    mean_ids: tuple[int, ...]
    grid: Grid = field(default_factory=lambda: Grid.uniform(100))
    seed: int = 0

    def __post_init__(self):
        fr = tuple(float(f) for f in self.change_fractions)
        object.__setattr__(self, "change_fractions", fr)
        object.__setattr__(self, "mean_ids", tuple(int(i) for i in self.mean_ids))
        if any(not 0.0 < f < 1.0 for f in fr) or any(
            b <= a for a, b in zip(fr, fr[1:])
        ):
            raise ValueError("change fractions must be strictly increasing in (0, 1)")
        if len(self.mean_ids) != len(fr) + 1:
            raise ValueError("need one mean label per segment (changes + 1)")

    @property
    def change_indices(self) -> tuple[int, ...]:
        """Planted 1-based change indices floor(n * fraction)."""
        return tuple(int(math.floor(self.n * f)) for f in self.change_fractions)


def two_change_scenario(n: int, grid_size: int = 100, seed: int = 0) -> SimScenario:
    return SimScenario(
        n=n,
        change_fractions=(1.0 / 3.0, 2.0 / 3.0),
        mean_ids=(1, 2, 3),
        grid=Grid.uniform(grid_size),
        seed=seed,
    )


def three_change_scenario(n: int, grid_size: int = 100, seed: int = 0) -> SimScenario:
    return SimScenario(
        n=n,
        change_fractions=(0.25, 0.5, 0.75),
        mean_ids=(1, 2, 3, 4),
        grid=Grid.uniform(grid_size),
        seed=seed,
    )


def bspline_basis(grid: Grid, dim: int = 21) -> np.ndarray:
    """Cubic B-spline basis on uniform clamped knots, shape (p, dim)."""
    degree = 3
    interior = np.linspace(0.0, 1.0, dim - degree + 1)[1:-1]
    knots = np.concatenate([[0.0] * (degree + 1), interior, [1.0] * (degree + 1)])
    return BSpline(knots, np.eye(dim), degree, extrapolate=False)(grid.points)


def truncate_coefficients(raw: np.ndarray, bound: float = 4.0) -> np.ndarray:
    """Zero every coefficient with |value| > bound (the indicator window)."""
    return np.where(np.abs(raw) <= bound, raw, 0.0)


def _spectral_norm_power_iteration(a: np.ndarray, rtol: float = 1e-12) -> float:
    """Largest singular value via power iteration on a^T a."""
    ata = a.T @ a
    v = np.full(a.shape[1], 1.0 / math.sqrt(a.shape[1]))
    prev = 0.0
    for _ in range(100_000):
        w = ata @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - prev) <= rtol * norm:
            break
        prev = norm
    return math.sqrt(norm)


def draw_theta(rng: np.random.Generator, params: FmaParams) -> np.ndarray:
    """Random MA operator: 0.8 * Psi / sigma_1(Psi) on basis coefficients."""
    psi = rng.standard_normal((params.basis_dim, params.basis_dim)) * params.psi_sds()
    return params.theta_scale * psi / _spectral_norm_power_iteration(psi)


def gen_fma1(
    n: int,
    grid: Grid,
    params: FmaParams | None = None,
    seed: int = 0,
) -> FunctionalSeries:
    """n error curves of the fMA(1) process, deterministic given the seed.

    Draw order: Psi first (once), then the (n+1) x dim coefficient matrix.
    """
    if params is None:
        params = FmaParams()
    rng = np.random.default_rng(seed)
    theta = draw_theta(rng, params)
    raw = rng.standard_normal((n + 1, params.basis_dim)) * params.coeff_sds()
    eta = truncate_coefficients(raw, params.truncation)
    coeffs = eta[1:] + eta[:-1] @ theta.T
    basis = bspline_basis(grid, params.basis_dim)
    return FunctionalSeries(grid, coeffs @ basis.T)


def mean_schedule(scn: SimScenario) -> np.ndarray:
    """Mean matrix (n, p): curve j carries mu_i for floor(n s_{i-1}) < j <= floor(n s_i)."""
    boundaries = (0, *scn.change_indices, scn.n)
    rows = np.empty((scn.n, scn.grid.size))
    for seg, mean_id in enumerate(scn.mean_ids):
        mu = scenario_mean(mean_id, scn.grid.points)
        rows[boundaries[seg] : boundaries[seg + 1]] = mu
    return rows


def gen_series(
    scn: SimScenario,
    params: FmaParams | None = None,
    noiseless: bool = False,
) -> FunctionalSeries:
    """Simulated series: mean schedule plus (optional) fMA(1) noise."""
    means = mean_schedule(scn)
    if noiseless:
        return FunctionalSeries(scn.grid, means)
    noise = gen_fma1(scn.n, scn.grid, params, seed=scn.seed)
    return FunctionalSeries(scn.grid, means + noise.values)
