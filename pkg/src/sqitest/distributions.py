"""Special distributions for the two displacement tests.

Continuous side: the noncentral F density/cdf as a Poisson-weighted beta
series, and the level-alpha critical point of the central F distribution.

Discrete side: the lattice law of the photon count-difference statistic
observed on two copies of a displaced thermal state.  Its characteristic
function factorizes as

    phi(r) = [gamma(r) gamma(-r)]^m  psi_s(r) psi_s(-r),
    gamma(r) = 1 / (N + 1 - N e^{ir}),
    psi_s(r) = exp[gamma(r) (e^{ir} - 1) s^2],

with s the displacement norm; equivalently the variable is distributed as
F - G + sum_k k (P_k - Q_k) with F, G negative binomial NB_m(N/(N+1)) and
P_k, Q_k Poisson with rate s^2 N^{k-1} / (N+1)^{k+1}, all independent.
Both routes are implemented and cross-checked; plain Fourier inversion on
the integer lattice serves as the bridge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, gammaln

# Series stopping: relative floor plus an absolute guard against underflow
# stalls when the noncentrality is large.
_REL_STOP = 1e-16
_ABS_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# integer-lattice distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerDistribution:
    """Finite-support pmf on a contiguous integer range, with tail bookkeeping.

    ``pmf[k]`` is the probability of ``lo + k``; ``tail_mass`` is the
    probability mass lost to truncation, so sum(pmf) + tail_mass == 1.
    """

    lo: int
    pmf: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        object.__setattr__(self, "pmf", pmf)
        if np.any(pmf < -1e-15):
            raise ValueError("pmf entries must be nonnegative")
        total = pmf.sum() + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"pmf plus tail mass must be 1, got {total!r}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.pmf) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def prob(self, y: int) -> float:
        if y < self.lo or y > self.hi:
            return 0.0
        return float(self.pmf[y - self.lo])

    def cdf(self, y: float) -> float:
        if y < self.lo:
            return 0.0
        k = min(int(np.floor(y)) - self.lo, len(self.pmf) - 1)
        return float(self.pmf[: k + 1].sum())

    def mean(self) -> float:
        return float(self.support @ self.pmf)

    def cf(self, r) -> np.ndarray:
        """Characteristic function sum_y pmf(y) e^{iry} (vectorized in r)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.exp(1j * np.outer(r, self.support)) @ self.pmf
        return out if out.size > 1 else out[0]

    def to_text(self) -> str:
        lines = [f"{v} {p:.17g}" for v, p in zip(self.support, self.pmf)]
        lines.append(f"tail_mass {self.tail_mass:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntegerDistribution":
        values, probs, tail = [], [], 0.0
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            if a == "tail_mass":
                tail = float(b)
            else:
                values.append(int(a))
                probs.append(float(b))
        values = np.asarray(values)
        if np.any(np.diff(values) != 1):
            raise ValueError("support must be contiguous")
        return cls(int(values[0]), np.asarray(probs), tail)


def point_mass(value: int = 0) -> IntegerDistribution:
    return IntegerDistribution(value, np.array([1.0]))


def poisson_pmf(lam: float, tol: float = 1e-14) -> np.ndarray:
    """Poisson pmf on 0..K, truncated where the upper tail drops below tol."""
    if lam < 0:
        raise ValueError("rate must be >= 0")
    if lam == 0.0:
        return np.array([1.0])
    hi = int(np.ceil(lam + 12.0 * np.sqrt(lam) + 30.0))
    k = np.arange(hi + 1)
    logp = -lam + k * np.log(lam) - gammaln(k + 1)
    p = np.exp(logp)
    keep = np.nonzero(np.cumsum(p) <= 1.0 - tol)[0]
    cut = keep[-1] + 2 if keep.size else 1
    return p[: min(cut + 1, hi + 1)]


def neg_binomial(shape: int, p: float, tol: float = 1e-14) -> IntegerDistribution:
    """NB(shape, p): pmf(x) = C(shape+x-1, x) (1-p)^shape p^x on x >= 0.

    Its characteristic function is (1-p)^shape (1 - p e^{ir})^{-shape}.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if shape < 1:
        raise ValueError("shape must be >= 1")
    if p == 0.0:
        return point_mass(0)
    # mean shape*p/(1-p); geometric tail decay by factor p
    hi = int(np.ceil((shape * p / (1 - p) + 10 * np.sqrt(shape) + 20)
                     + np.log(tol) / np.log(p)))
    x = np.arange(hi + 1)
    logp = (gammaln(shape + x) - gammaln(x + 1) - gammaln(shape)
            + shape * np.log1p(-p) + x * np.log(p))
    pmf = np.exp(logp)
    tail = max(0.0, 1.0 - pmf.sum())
    return IntegerDistribution(0, pmf, tail)


def neg_binomial_cf(shape: int, p: float, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return (1 - p) ** shape * (1 - p * np.exp(1j * r)) ** (-shape)


def _difference(dist: IntegerDistribution) -> IntegerDistribution:
    """Law of X - X' for two independent copies of ``dist`` (symmetric)."""
    pmf = np.convolve(dist.pmf, dist.pmf[::-1])
    lo = dist.lo - dist.hi
    tail = min(1.0, 2.0 * dist.tail_mass)
    pmf = pmf * (1.0 - tail) / pmf.sum() if pmf.sum() > 0 else pmf
    return IntegerDistribution(lo, pmf, tail)


def _stretch(dist: IntegerDistribution, k: int) -> IntegerDistribution:
    """Law of k * X: support spaced by k, zeros in between."""
    if k == 1:
        return dist
    pmf = np.zeros(k * (len(dist.pmf) - 1) + 1)
    pmf[::k] = dist.pmf
    return IntegerDistribution(dist.lo * k, pmf, dist.tail_mass)


def _convolve(a: IntegerDistribution, b: IntegerDistribution) -> IntegerDistribution:
    pmf = np.convolve(a.pmf, b.pmf)
    tail = min(1.0, a.tail_mass + b.tail_mass)
    pmf = pmf * (1.0 - tail) / pmf.sum() if pmf.sum() > 0 else pmf
    return IntegerDistribution(a.lo + b.lo, pmf, tail)


def count_difference_distribution(modes: int, displacement_norm: float,
                                  mixture: float, tol: float = 1e-12
                                  ) -> IntegerDistribution:
    """Lattice law of the count-difference statistic on two copies.

    Built as the convolution of the NB_m(N/(N+1)) difference with the
    k-scaled Poisson differences; the k-sum stops once the mean of the
    dropped components falls below ``tol``.  Exactly symmetric about 0.
    """
    if mixture < 0:
        raise ValueError("mixture must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    N = float(mixture)
    s2 = float(displacement_norm) ** 2
    comp_tol = min(1e-14, tol / 16.0)

    p = N / (N + 1.0)
    out = _difference(neg_binomial(modes, p, comp_tol)) if p > 0 else point_mass(0)

    x = p  # dropped-mean tail: s2/(N+1)^2 * sum_{j>k} j x^{j-1}
    k = 0
    while True:
        k += 1
        if x == 0.0 and k > 1:
            break
        remaining = (s2 / (N + 1.0) ** 2
                     * ((k + 1) * x**k * (1 - x) + x ** (k + 1)) / (1 - x) ** 2)
        lam_k = s2 * N ** (k - 1) / (N + 1.0) ** (k + 1)
        if lam_k > 0.0:
            pmf_k = poisson_pmf(lam_k, comp_tol)
            pois = IntegerDistribution(0, pmf_k, max(0.0, 1.0 - pmf_k.sum()))
            out = _convolve(out, _stretch(_difference(pois), k))
        if remaining < tol:
            break
    # enforce exact symmetry (the construction is symmetric; float error is not)
    pmf = 0.5 * (out.pmf + out.pmf[::-1])
    # trim negligible wings into the tail account, keeping symmetry
    cum = np.cumsum(pmf)
    cut = int(np.searchsorted(cum, comp_tol / 4.0))
    if cut > 0:
        trimmed = float(cum[cut - 1] + pmf[len(pmf) - cut:].sum())
        pmf = pmf[cut: len(pmf) - cut]
        return IntegerDistribution(out.lo + cut, pmf, out.tail_mass + trimmed)
    return IntegerDistribution(out.lo, pmf, out.tail_mass)


def count_difference_cf(modes: int, displacement_norm: float, mixture: float,
                        r) -> np.ndarray:
    """Characteristic function [gamma(r)gamma(-r)]^m psi_s(r) psi_s(-r)."""
    r = np.asarray(r, dtype=float)
    N = float(mixture)
    s2 = float(displacement_norm) ** 2

    def gamma(rr):
        return 1.0 / (N + 1.0 - N * np.exp(1j * rr))

    def psi(rr):
        return np.exp(gamma(rr) * (np.exp(1j * rr) - 1.0) * s2)

    return (gamma(r) * gamma(-r)) ** modes * psi(r) * psi(-r)


def skellam_pmf(y: int, lam: float) -> float:
    """Direct series for P(P1 - P2 = y), P1, P2 ~ Poisson(lam) independent.

    sum_j e^{-2 lam} lam^{2j+|y|} / (j! (j+|y|)!); kept independent of the
    convolution construction so it can serve as its oracle.
    """
    y = abs(int(y))
    if lam == 0.0:
        return 1.0 if y == 0 else 0.0
    total = 0.0
    j = 0
    while True:
        logt = -2.0 * lam + (2 * j + y) * np.log(lam) - gammaln(j + 1) - gammaln(j + y + 1)
        term = np.exp(logt)
        total += term
        if j > lam and (term < _REL_STOP * total or term < _ABS_FLOOR):
            break
        j += 1
    return total


def invert_integer_cf(cf, support_bound: int, tol: float = 1e-10,
                      mass_tol: float = 1e-8) -> IntegerDistribution:
    """Recover an integer-lattice pmf from its characteristic function.

    pmf(y) = (1/2pi) int_{-pi}^{pi} cf(r) e^{-iry} dr, trapezoid rule on a
    uniform grid with doubling until the result is stable to ``tol``.
    Raises if mass beyond ``support_bound`` exceeds ``mass_tol``.
    """
    ys = np.arange(-support_bound, support_bound + 1)
    prev = None
    K = max(64, 4 * support_bound + 4)
    for _ in range(12):
        r = -np.pi + 2.0 * np.pi * np.arange(K) / K
        vals = np.asarray(cf(r), dtype=complex)
        pmf = (np.exp(-1j * np.outer(ys, r)) @ vals).real / K
        if prev is not None and np.max(np.abs(pmf - prev)) < tol:
            break
        prev = pmf
        K *= 2
    pmf = np.clip(pmf, 0.0, None)
    missing = 1.0 - pmf.sum()
    if missing > mass_tol:
        raise ValueError(
            f"support bound {support_bound} too small: unassigned mass {missing:.3e}"
        )
    return IntegerDistribution(-support_bound, pmf, max(0.0, missing))


def total_variation(a: IntegerDistribution, b: IntegerDistribution) -> float:
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    pa = np.zeros(hi - lo + 1)
    pb = np.zeros(hi - lo + 1)
    pa[a.lo - lo: a.lo - lo + len(a.pmf)] = a.pmf
    pb[b.lo - lo: b.lo - lo + len(b.pmf)] = b.pmf
    return 0.5 * float(np.abs(pa - pb).sum() + a.tail_mass + b.tail_mass)


# ---------------------------------------------------------------------------
# noncentral F distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoncentralFParams:
    """Degrees of freedom (mu, nu) and noncentrality lambda >= 0."""

    mu_dof: int
    nu_dof: int
    noncentrality: float = 0.0

    def __post_init__(self):
        if self.mu_dof < 1 or self.nu_dof < 1:
            raise ValueError("degrees of freedom must be >= 1")
        if self.noncentrality < 0:
            raise ValueError("noncentrality must be >= 0")


def noncentral_f_pdf(f: float, params: NoncentralFParams) -> float:
    """Density sum_k [e^{-l/2}(l/2)^k/k!] x^{k+mu/2} (1-x)^{nu/2} / (B(k+mu/2, nu/2) f).

    Here x = mu f / (mu f + nu).  Terms are accumulated until one falls
    below 1e-16 of the running sum with k past the noncentrality.
    """
    if f <= 0:
        raise ValueError("f must be positive")
    mu, nu, lam = params.mu_dof, params.nu_dof, params.noncentrality
    x = mu * f / (mu * f + nu)
    log_x, log_1mx = np.log(x), np.log1p(-x)
    half = lam / 2.0
    total = 0.0
    k = 0
    while True:
        log_w = -half + (k * np.log(half) if k else 0.0) - gammaln(k + 1)
        log_term = (log_w - betaln(k + mu / 2.0, nu / 2.0)
                    + (k + mu / 2.0) * log_x + (nu / 2.0) * log_1mx - np.log(f))
        term = np.exp(log_term)
        total += term
        if half == 0.0:
            break
        if k > lam and (term < _REL_STOP * total or term < _ABS_FLOOR):
            break
        k += 1
        if k > 200000:
            break
    return total


def noncentral_f_cdf(c: float, params: NoncentralFParams) -> float:
    """P(F <= c) by term-wise regularized incomplete-beta accumulation."""
    if c <= 0:
        return 0.0
    mu, nu, lam = params.mu_dof, params.nu_dof, params.noncentrality
    x = mu * c / (mu * c + nu)
    half = lam / 2.0
    if half == 0.0:
        return float(betainc(mu / 2.0, nu / 2.0, x))
    total = 0.0
    done_mass = 0.0
    block = 256
    k0 = 0
    while True:
        k = np.arange(k0, k0 + block)
        w = np.exp(-half + k * np.log(half) - gammaln(k + 1))
        ib = betainc(k + mu / 2.0, nu / 2.0, x)
        total += float(w @ ib)
        done_mass += float(w.sum())
        k0 += block
        # remaining Poisson mass bounds the rest of the series (ib <= ib[-1])
        if k0 > half and (1.0 - done_mass) * ib[-1] < 1e-18:
            break
        if k0 > half + 200.0 * np.sqrt(half + 1.0) + 2000:
            break
    return min(total, 1.0)


def critical_point(alpha: float, mu: int, nu: int) -> float:
    """Smallest c with P(central F > c) = alpha, by bracketing bisection.

    alpha in (0, 1) strictly: alpha = 0 has no finite critical point (the
    resulting acceptance rule is trivial) and alpha = 1 degenerates to 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    params = NoncentralFParams(mu, nu, 0.0)
    target = 1.0 - alpha
    lo, hi = 0.0, 1.0
    while noncentral_f_cdf(hi, params) < target:
        hi *= 2.0
        if hi > 1e18:
            raise RuntimeError("failed to bracket the critical point")
    while hi - lo > 1e-14 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if noncentral_f_cdf(mid, params) < target:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    if abs(noncentral_f_cdf(c, params) - target) > 1e-10:
        raise RuntimeError("critical point solve did not reach tolerance")
    return c


def beta_function(x: float, y: float) -> float:
    if x <= 0 or y <= 0:
        raise ValueError("beta function arguments must be positive")
    return float(np.exp(gammaln(x) + gammaln(y) - gammaln(x + y)))


def exp_cos_integral_scaled(z: float, n: int) -> float:
    """e^{-|z|} int_0^pi e^{z cos phi} sin^{n-2} phi dphi, overflow-free.

    The integrand e^{z cos phi - |z|} stays in [0, 1], so this is usable for
    arbitrarily large |z|; accuracy 1e-12 relative.
    """
    from scipy.integrate import quad

    if n < 2:
        raise ValueError("n must be >= 2")
    scale = abs(z)
    val, _ = quad(lambda p: np.exp(z * np.cos(p) - scale) * np.sin(p) ** (n - 2),
                  0.0, np.pi, epsabs=1e-300, epsrel=1e-12, limit=400)
    return float(val)


def exp_cos_integral(z: float, n: int) -> float:
    """int_0^pi e^{z cos phi} sin^{n-2} phi dphi to 1e-12 relative accuracy.

    At z = 0 this is the beta function B((n-1)/2, 1/2); overflows for
    |z| beyond ~700 (use the scaled variant there).
    """
    return exp_cos_integral_scaled(z, n) * float(np.exp(abs(z)))
