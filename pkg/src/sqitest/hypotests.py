"""The two displacement tests as decision rules and error-probability maps.

HH: Hotelling's T-squared on heterodyne outcomes.  The scaled statistic
F = (nu / (mu (n-1))) T^2 with mu = 2m, nu = n - 2m follows a noncentral F
law with noncentrality lambda = n * kappa(theta, eta, N), so its type II
error is the noncentral F cdf at the level-alpha critical point; a seeded
Monte Carlo route simulates the whole chain instead.

SI: the squeezing-invariant test.  For a pure alternative (mixture 0) the
type II error has the closed form

    beta = (1-alpha) e^{-n s^2} / B((n-1)/2, 1/2)
           * int_0^pi e^{n s^2 cos phi} sin^{n-2} phi dphi,   s = |theta|,

independent of the squeezing.  For two copies and any mixture the test
reduces to the square of the integer count-difference statistic, evaluated
through its lattice law and the randomized level equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from .distributions import NoncentralFParams
from .fock import solve_level_equation
from .phase_space import GaussianSpec, SqueezeParam, heterodyne_sample, kappa, rng_stream


@dataclass(frozen=True)
class TestSpec:
    """Problem dimensions and level for one of the two tests."""

    __test__ = False  # not a pytest case despite the name

    modes: int
    copies: int
    mixture: float
    alpha: float
    kind: str = "si"  # "hh" | "si"

    def __post_init__(self):
        if self.kind not in ("hh", "si"):
            raise ValueError("kind must be 'hh' or 'si'")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.mixture < 0:
            raise ValueError("mixture must be >= 0")
        if self.kind == "hh" and self.copies <= 2 * self.modes:
            raise ValueError(
                "the Hotelling test needs more than 2m copies "
                "(sample covariance is singular otherwise)"
            )
        if self.kind == "si" and self.copies < 2:
            raise ValueError("the invariant test needs at least two copies")

    @property
    def mu_dof(self) -> int:
        return 2 * self.modes

    @property
    def nu_dof(self) -> int:
        return self.copies - 2 * self.modes


class SingularCovarianceError(ValueError):
    """Raised when the sample covariance of the supplied data is singular."""


def hotelling_F(samples: np.ndarray) -> float:
    """Scaled Hotelling statistic (nu / (mu (n-1))) * n xbar' Sbar^{-1} xbar.

    ``samples`` is an (n, 2m) array of heterodyne outcomes; the sample
    covariance uses divisor n - 1.
    """
    samples = np.asarray(samples, dtype=float)
    n, p = samples.shape
    if p % 2 != 0:
        raise ValueError("sample dimension must be even (2m)")
    m = p // 2
    if n <= 2 * m:
        raise ValueError("need more than 2m samples")
    xbar = samples.mean(axis=0)
    centered = samples - xbar
    cov = centered.T @ centered / (n - 1)
    try:
        sol = np.linalg.solve(cov, xbar)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError("sample covariance is singular") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularCovarianceError("sample covariance is singular")
    t2 = n * float(xbar @ sol)
    mu, nu = 2 * m, n - 2 * m
    return (nu / (mu * (n - 1))) * t2


def hh_type2_analytic(theta, eta: SqueezeParam, spec: TestSpec) -> float:
    """Type II error of the Hotelling test: noncentral F cdf at the critical point."""
    if spec.kind != "hh":
        raise ValueError("spec.kind must be 'hh'")
    lam = spec.copies * kappa(theta, eta, spec.mixture)
    c = dist.critical_point(spec.alpha, spec.mu_dof, spec.nu_dof)
    return dist.noncentral_f_cdf(c, NoncentralFParams(spec.mu_dof, spec.nu_dof, lam))


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    reps: int


def hh_type2_montecarlo(theta, eta: SqueezeParam, spec: TestSpec, reps: int,
                        seed: int = 0) -> MonteCarloEstimate:
    """Acceptance frequency of the Hotelling test over simulated heterodyne data.

    Deterministic under a fixed seed; replicates are vectorized but drawn
    from the single stream (seed,) so the estimate does not depend on
    batching.
    """
    if spec.kind != "hh":
        raise ValueError("spec.kind must be 'hh'")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gspec = GaussianSpec(spec.modes, np.atleast_1d(np.asarray(theta, dtype=complex)),
                         eta, spec.mixture)
    n, p = spec.copies, 2 * spec.modes
    rng = rng_stream(seed)
    flat = heterodyne_sample(gspec, reps * n, rng=rng)
    x = flat.reshape(reps, n, p)
    xbar = x.mean(axis=1)
    centered = x - xbar[:, None, :]
    cov = np.einsum("rni,rnj->rij", centered, centered) / (n - 1)
    sol = np.linalg.solve(cov, xbar[..., None])[..., 0]
    t2 = n * np.einsum("ri,ri->r", xbar, sol)
    f = (spec.nu_dof / (spec.mu_dof * (n - 1))) * t2
    c = dist.critical_point(spec.alpha, spec.mu_dof, spec.nu_dof)
    accept = float(np.mean(f <= c))
    stderr = float(np.sqrt(max(accept * (1.0 - accept), 1e-12) / reps))
    return MonteCarloEstimate(accept, stderr, reps)


def si_type2_closed(theta_norm: float, spec: TestSpec) -> float:
    """Closed-form type II error of the invariant test for a pure state."""
    if spec.mixture != 0.0:
        raise ValueError("closed form available only for mixture 0")
    n = spec.copies
    z = n * float(theta_norm) ** 2
    scaled = dist.exp_cos_integral_scaled(z, n)
    return (1.0 - spec.alpha) * scaled / dist.beta_function((n - 1) / 2.0, 0.5)


def _squared_law(d: dist.IntegerDistribution):
    """Atoms and masses of X = Y^2 for a lattice law Y."""
    masses = {}
    for v, p in zip(d.support, d.pmf):
        masses[v * v] = masses.get(v * v, 0.0) + p
    xs = np.array(sorted(masses), dtype=float)
    return xs, np.array([masses[x] for x in xs])


def si_type2_n2(theta_norm: float, modes: int, mixture: float, alpha: float,
                tol: float = 1e-12) -> float:
    """Type II error of the two-copy invariant test via the lattice law.

    The observable is the square of the count-difference statistic; the
    randomized level equation is solved on its null law and the same
    thresholds are applied to the displaced law.
    """
    null = dist.count_difference_distribution(modes, 0.0, mixture, tol)
    x0, p0 = _squared_law(null)
    sol = solve_level_equation(p0, alpha)
    alt = dist.count_difference_distribution(modes, float(theta_norm), mixture, tol)
    xa, pa = _squared_law(alt)
    cum = np.cumsum(pa)

    def cum_at(x):
        i = int(np.searchsorted(xa, x + 0.5)) - 1  # atoms are integers
        return 0.0 if i < 0 else float(cum[i])

    fs = 0.0 if sol.s_index < 0 else cum_at(x0[sol.s_index])
    ft = cum_at(x0[sol.t_index])
    if sol.degenerate:
        return fs
    return (1.0 - sol.w) * fs + sol.w * ft


def si_small_theta_slope(spec: TestSpec, thetas=(1e-2, 5e-3, 2.5e-3)) -> float:
    """Quadratic coefficient of 1 - alpha - beta at theta -> 0, extrapolated.

    Richardson extrapolation in theta^2 over the given halving sequence;
    the closed form gives (1 - alpha) * n exactly in the limit.
    """
    if spec.mixture != 0.0:
        raise ValueError("slope extraction implemented for mixture 0")
    g = [(1.0 - spec.alpha - si_type2_closed(t, spec)) / t ** 2 for t in thetas]
    # remainder is O(theta^2) and theta halves, so the ratio in theta^2 is 4
    for _ in range(len(thetas) - 1):
        g = [(4.0 * g[i + 1] - g[i]) / 3.0 for i in range(len(g) - 1)]
    return g[0]


@dataclass(frozen=True)
class CrossingResult:
    """Witnesses of the error-curve crossing, with the scanned curve."""

    theta_small: float | None
    theta_large: float | None
    theta_grid: np.ndarray = field(repr=False)
    beta_si: np.ndarray = field(repr=False)
    beta_hh: np.ndarray = field(repr=False)

    @property
    def found_both(self) -> bool:
        return self.theta_small is not None and self.theta_large is not None


def crossing_check(alpha: float, theta_grid) -> CrossingResult:
    """Scan for the two orderings of the error curves (one mode, three copies).

    Small displacements favor the invariant test (beta_si < beta_hh); the
    Hotelling curve eventually undercuts it because its tail decays
    exponentially in theta^2 while the invariant test's decays like
    theta^{-2}.  At alpha = 0.05 the second crossing sits near theta = 31,
    so grids must extend that far; missing witnesses are reported as None,
    never fabricated.
    """
    grid = np.asarray(theta_grid, dtype=float)
    spec_si = TestSpec(1, 3, 0.0, alpha, "si")
    spec_hh = TestSpec(1, 3, 0.0, alpha, "hh")
    eta0 = SqueezeParam.zero(1)
    beta_si = np.array([si_type2_closed(t, spec_si) for t in grid])
    beta_hh = np.array([hh_type2_analytic(t, eta0, spec_hh) for t in grid])
    small = large = None
    margin = 1e-12
    for t, bs, bh in zip(grid, beta_si, beta_hh):
        if t <= 0:
            continue
        if small is None and bs < bh - margin:
            small = float(t)
        if large is None and bs > bh + margin:
            large = float(t)
    return CrossingResult(small, large, grid, beta_si, beta_hh)
