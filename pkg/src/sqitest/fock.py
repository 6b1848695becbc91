"""Truncated Fock-space oracle for m modes x n copies.

Everything here is brute force on a dense or sparse cutoff basis: each of
the m*n single-mode factors keeps occupations 0..d-1, so the total space
has dimension d^(m*n).  Operators are built literally from annihilation
matrices; unitaries are matrix exponentials of explicitly constructed
quadratic generators.  The point of this module is to be an independent
check for every closed form in the package, so nothing clever is assumed:
no identity is used that the truncated matrices do not satisfy themselves.

Index conventions: copy indices j, k run 1..n and mode indices i run 1..m
(matching the tensor order copy 1 modes, copy 2 modes, ...); flattened
slot s = (j-1)*m + (i-1) is the position in the kron chain, first factor
most significant.

Truncation bookkeeping: states report their truncation loss (1 - trace),
and edge sectors (total photon number >= d) carry O(1) clipping artifacts,
so operator-level identities are asserted on the *complete* sectors
(total photons <= d-1) or on interior occupation blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import sparse
from scipy.linalg import expm, eigh
from scipy.sparse.linalg import expm_multiply

from .phase_space import SqueezeParam

_HERM_TOL = 1e-10
_CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class FockConfig:
    """Mode count, copy count and per-mode cutoff of a truncated space."""

    modes: int
    copies: int
    cutoff: int
    budget: int = 2 ** 20

    def __post_init__(self):
        if self.modes < 1 or self.copies < 1:
            raise ValueError("modes and copies must be >= 1")
        if self.cutoff < 2:
            raise ValueError("cutoff must be >= 2")
        if self.dim > self.budget:
            raise ValueError(
                f"total dimension {self.cutoff}^{self.slots} = {self.dim} "
                f"exceeds budget {self.budget}"
            )

    @property
    def slots(self) -> int:
        return self.modes * self.copies

    @property
    def dim(self) -> int:
        return self.cutoff ** self.slots

    def slot(self, mode: int, copy: int) -> int:
        """Flattened kron position of (mode i, copy j), both 1-based."""
        if not 1 <= mode <= self.modes:
            raise ValueError(f"mode index {mode} out of range 1..{self.modes}")
        if not 1 <= copy <= self.copies:
            raise ValueError(f"copy index {copy} out of range 1..{self.copies}")
        return (copy - 1) * self.modes + (mode - 1)


@dataclass(frozen=True)
class TruncatedOperator:
    config: FockConfig
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.config.dim, self.config.dim):
            raise ValueError("entry matrix side must equal the configured dimension")
        object.__setattr__(self, "entries", entries)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def unitarity_defect(self, mask=None) -> float:
        g = self.entries.conj().T @ self.entries - np.eye(self.config.dim)
        if mask is not None:
            g = g[np.ix_(mask, mask)]
        return float(np.max(np.abs(g)))


@dataclass(frozen=True)
class TruncatedState:
    config: FockConfig
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.config.dim, self.config.dim):
            raise ValueError("entry matrix side must equal the configured dimension")
        defect = np.max(np.abs(entries - entries.conj().T))
        if defect > _HERM_TOL:
            raise ValueError(f"density matrix not hermitian (defect {defect:.3e})")
        object.__setattr__(self, "entries", entries)

    @property
    def trunc_loss(self) -> float:
        """Probability mass lost to the cutoff: 1 - trace."""
        return float(1.0 - np.real(np.trace(self.entries)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())


def _require_dense(config: FockConfig, limit: int = 4096):
    if config.dim > limit:
        raise ValueError(
            f"dense construction at dimension {config.dim} exceeds the "
            f"dense limit {limit}; use the vector/sparse interfaces"
        )


# ---------------------------------------------------------------------------
# occupation bookkeeping
# ---------------------------------------------------------------------------

def occupations(config: FockConfig) -> np.ndarray:
    """(dim, slots) table of per-slot occupation numbers."""
    idx = np.unravel_index(np.arange(config.dim), (config.cutoff,) * config.slots)
    return np.stack(idx, axis=1)


def total_photons(config: FockConfig) -> np.ndarray:
    return occupations(config).sum(axis=1)


def complete_sector_mask(config: FockConfig) -> np.ndarray:
    """Basis states in total-photon sectors unaffected by the cutoff."""
    return total_photons(config) <= config.cutoff - 1


def interior_mask(config: FockConfig, margin: int) -> np.ndarray:
    """Basis states with every occupation <= cutoff - 1 - margin."""
    return occupations(config).max(axis=1) <= config.cutoff - 1 - margin


# ---------------------------------------------------------------------------
# elementary operators and states
# ---------------------------------------------------------------------------

def annihilation(cutoff: int) -> np.ndarray:
    """Single-mode lowering matrix: (k, k+1) entry sqrt(k+1)."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    return np.diag(np.sqrt(np.arange(1.0, cutoff)), 1).astype(complex)


def slot_annihilation(config: FockConfig, slot: int) -> sparse.csr_matrix:
    d = config.cutoff
    a = sparse.diags(np.sqrt(np.arange(1.0, d)), 1, format="csr")
    left = sparse.identity(d ** slot, format="csr", dtype=float)
    right = sparse.identity(d ** (config.slots - slot - 1), format="csr", dtype=float)
    return sparse.kron(sparse.kron(left, a, format="csr"), right, format="csr").astype(complex)


def mode_annihilation(config: FockConfig, mode: int, copy: int) -> sparse.csr_matrix:
    return slot_annihilation(config, config.slot(mode, copy))


def coherent_vector(theta: complex, cutoff: int) -> np.ndarray:
    """Cutoff expansion e^{-|theta|^2/2} sum_k theta^k/sqrt(k!) over k < cutoff."""
    k = np.arange(cutoff)
    if theta == 0:
        v = np.zeros(cutoff, dtype=complex)
        v[0] = 1.0
        return v
    from scipy.special import gammaln
    logmag = -abs(theta) ** 2 / 2.0 + k * np.log(abs(theta)) - 0.5 * gammaln(k + 1.0)
    phase = np.exp(1j * k * np.angle(theta))
    return np.exp(logmag) * phase


def coherent_tail_mass(theta: complex, cutoff: int) -> float:
    v = coherent_vector(theta, cutoff)
    return float(max(0.0, 1.0 - np.real(v.conj() @ v)))


def coherent_product_vector(config: FockConfig, Z) -> np.ndarray:
    """Product coherent vector for the m x n displacement matrix Z."""
    Z = np.asarray(Z, dtype=complex).reshape(config.modes, config.copies)
    vecs = [coherent_vector(Z[i, j], config.cutoff)
            for j in range(config.copies) for i in range(config.modes)]
    return reduce(np.kron, vecs)


def thermal_occupation(mixture: float, cutoff: int) -> np.ndarray:
    """Geometric occupation law (1/(N+1)) (N/(N+1))^k, truncated."""
    if mixture < 0:
        raise ValueError("mixture must be >= 0")
    if mixture == 0.0:
        p = np.zeros(cutoff)
        p[0] = 1.0
        return p
    ratio = mixture / (mixture + 1.0)
    return (1.0 / (mixture + 1.0)) * ratio ** np.arange(cutoff)


def displacement(theta: complex, cutoff: int) -> TruncatedOperator:
    """exp(theta a* - conj(theta) a) at the cutoff; exactly unitary there."""
    a = annihilation(cutoff)
    gen = theta * a.conj().T - np.conj(theta) * a
    return TruncatedOperator(FockConfig(1, 1, cutoff), expm(gen))


def thermal_coherent_state(theta: complex, mixture: float, cutoff: int) -> TruncatedState:
    """Displaced thermal single-mode state at the cutoff."""
    if mixture < 0:
        raise ValueError("mixture must be >= 0")
    diag = np.diag(thermal_occupation(mixture, cutoff)).astype(complex)
    if theta == 0:
        rho = diag
    else:
        D = displacement(theta, cutoff).entries
        rho = D @ diag @ D.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return TruncatedState(FockConfig(1, 1, cutoff), rho)


def product_state(config: FockConfig, Z, mixture: float,
                  dense_limit: int = 4096) -> TruncatedState:
    """Tensor product of displaced thermal states, displacement column j per copy.

    ``Z`` may be an m x n matrix, an m-vector (same displacement for every
    copy), or a scalar (m = 1).
    """
    _require_dense(config, dense_limit)
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 0:
        Z = np.full((config.modes, config.copies), complex(Z))
    elif Z.ndim == 1:
        Z = np.tile(Z.reshape(config.modes, 1), (1, config.copies))
    factors = [thermal_coherent_state(Z[i, j], mixture, config.cutoff).entries
               for j in range(config.copies) for i in range(config.modes)]
    rho = reduce(np.kron, factors)
    return TruncatedState(config, rho)


# ---------------------------------------------------------------------------
# quadratic generators
# ---------------------------------------------------------------------------

def mode_mixing_generator(config: FockConfig, A) -> sparse.csr_matrix:
    """sum_j sum_{i,i'} A[i,i'] a*_{i,j} a_{i',j} for anti-hermitian A."""
    A = np.asarray(A, dtype=complex).reshape(config.modes, config.modes)
    if np.max(np.abs(A + A.conj().T)) > 1e-9:
        raise ValueError("A must be anti-hermitian")
    out = None
    for j in range(1, config.copies + 1):
        ops = [mode_annihilation(config, i, j) for i in range(1, config.modes + 1)]
        for i in range(config.modes):
            for i2 in range(config.modes):
                if A[i, i2] == 0:
                    continue
                term = A[i, i2] * (ops[i].conj().T @ ops[i2])
                out = term if out is None else out + term
    if out is None:
        out = sparse.csr_matrix((config.dim, config.dim), dtype=complex)
    return out.tocsr()


def copy_mixing_generator(config: FockConfig, B) -> sparse.csr_matrix:
    """sum_i sum_{j,k} B[j,k] a*_{i,j} a_{i,k} for anti-hermitian B."""
    B = np.asarray(B, dtype=complex).reshape(config.copies, config.copies)
    if np.max(np.abs(B + B.conj().T)) > 1e-9:
        raise ValueError("B must be anti-hermitian")
    out = None
    for i in range(1, config.modes + 1):
        ops = [mode_annihilation(config, i, j) for j in range(1, config.copies + 1)]
        for j in range(config.copies):
            for k in range(config.copies):
                if B[j, k] == 0:
                    continue
                term = B[j, k] * (ops[j].conj().T @ ops[k])
                out = term if out is None else out + term
    if out is None:
        out = sparse.csr_matrix((config.dim, config.dim), dtype=complex)
    return out.tocsr()


def plane_rotation_matrix(n: int, j: int, k: int) -> np.ndarray:
    """Real antisymmetric n x n matrix with -1 at (j,k) and +1 at (k,j), 1-based."""
    J = np.zeros((n, n))
    if j != k:
        J[j - 1, k - 1] = -1.0
        J[k - 1, j - 1] = 1.0
    return J


def beamsplitter_generator(config: FockConfig, j: int, k: int) -> sparse.csr_matrix:
    """Anti-hermitian a*_k a_j - a*_j a_k summed over modes; zero when j = k.

    exp(t * generator) is a beamsplitter mixing copies j and k.
    """
    for idx in (j, k):
        if not 1 <= idx <= config.copies:
            raise ValueError(f"copy index {idx} out of range 1..{config.copies}")
    if j == k:
        return sparse.csr_matrix((config.dim, config.dim), dtype=complex)
    return copy_mixing_generator(config, plane_rotation_matrix(config.copies, j, k))


def phase_difference_generator(config: FockConfig, j: int, k: int) -> sparse.csr_matrix:
    """Diagonal i * (photon number of copy j - photon number of copy k)."""
    for idx in (j, k):
        if not 1 <= idx <= config.copies:
            raise ValueError(f"copy index {idx} out of range 1..{config.copies}")
    occ = occupations(config)
    diag = np.zeros(config.dim)
    for i in range(1, config.modes + 1):
        if j != k:
            diag += occ[:, config.slot(i, j)] - occ[:, config.slot(i, k)]
    return sparse.diags(1j * diag.astype(complex), format="csr")


def squeeze_generator(eta: SqueezeParam, config: FockConfig) -> sparse.csr_matrix:
    """Quadratic generator whose exponential is the n-fold squeeze product.

    Per copy: sum_{i,i'} A a*_i a_{i'} + S/2 a*_i a*_{i'} - conj(S)/2 a_i a_{i'}.
    """
    if eta.modes != config.modes:
        raise ValueError("eta mode count does not match the configuration")
    A, S = eta.A, eta.S
    out = None
    for j in range(1, config.copies + 1):
        ops = [mode_annihilation(config, i, j) for i in range(1, config.modes + 1)]
        for i in range(config.modes):
            for i2 in range(config.modes):
                term = None
                if A[i, i2] != 0:
                    term = A[i, i2] * (ops[i].conj().T @ ops[i2])
                if S[i, i2] != 0:
                    t2 = 0.5 * S[i, i2] * (ops[i].conj().T @ ops[i2].conj().T)
                    t2 = t2 - 0.5 * np.conj(S[i, i2]) * (ops[i] @ ops[i2])
                    term = t2 if term is None else term + t2
                if term is not None:
                    out = term if out is None else out + term
    if out is None:
        out = sparse.csr_matrix((config.dim, config.dim), dtype=complex)
    return out.tocsr()


def squeeze(eta: SqueezeParam, config: FockConfig,
            dense_limit: int = 4096) -> TruncatedOperator:
    """n-fold tensor power of the squeeze unitary, as exp of the summed generator."""
    _require_dense(config, dense_limit)
    gen = squeeze_generator(eta, config).toarray()
    return TruncatedOperator(config, expm(gen))


# ---------------------------------------------------------------------------
# pooling rotation and the invariance-defect observable
# ---------------------------------------------------------------------------

def pooling_rotation(config: FockConfig, dense_limit: int = 4096) -> TruncatedOperator:
    """Unitary R = R_{n-1} ... R_1 with R_k = exp(arctan(sqrt k) * bs_{k,k+1}).

    Pools the common displacement of the n copies into the last copy:
    R rho^{(x)n} R* = vacuum^{(x)(n-1)} (x) rho(sqrt(n) theta), up to the
    truncation loss.
    """
    if config.copies < 2:
        raise ValueError("pooling rotation needs at least two copies")
    _require_dense(config, dense_limit)
    out = np.eye(config.dim, dtype=complex)
    for k in range(1, config.copies):
        gen = np.arctan(np.sqrt(k)) * beamsplitter_generator(config, k, k + 1)
        out = expm(gen.toarray()) @ out
    return TruncatedOperator(config, out)


def apply_pooling_rotation(config: FockConfig, psi: np.ndarray,
                           inverse: bool = False) -> np.ndarray:
    """Apply the pooling rotation to a state vector via sparse exponentials."""
    if config.copies < 2:
        raise ValueError("pooling rotation needs at least two copies")
    ks = range(1, config.copies)
    sign = 1.0
    if inverse:
        ks = reversed(list(ks))
        sign = -1.0
    out = np.asarray(psi, dtype=complex)
    for k in ks:
        gen = sign * np.arctan(np.sqrt(k)) * beamsplitter_generator(config, k, k + 1)
        out = expm_multiply(gen.tocsc(), out)
    return out


def rotation_defect_observable(config: FockConfig,
                               dense_limit: int = 4096) -> TruncatedOperator:
    """Positive observable sum_k R* bs_{k,n} bs_{k,n}* R.

    Vanishes exactly on states invariant under simultaneous rotation of the
    copy index, so its kernel is the mode-wise rotation-invariant subspace.
    """
    if config.copies < 2:
        raise ValueError("needs at least two copies")
    _require_dense(config, dense_limit)
    n = config.copies
    R = pooling_rotation(config, dense_limit).entries
    T = np.zeros((config.dim, config.dim), dtype=complex)
    for k in range(1, n):
        v = beamsplitter_generator(config, k, n)
        B = (-v) @ R  # v* = -v for the anti-hermitian generator
        T += B.conj().T @ B
    return TruncatedOperator(config, 0.5 * (T + T.conj().T))


# ---------------------------------------------------------------------------
# spectral machinery
# ---------------------------------------------------------------------------

def cluster_eigenvalues(values: np.ndarray, tol: float = _CLUSTER_TOL):
    """Group an ascending eigenvalue list into clusters separated by > tol.

    Returns (cluster_values, slices) with one representative (mean) per
    cluster; degenerate clusters are merged.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.array([]), []
    cuts = np.nonzero(np.diff(values) > tol)[0]
    starts = np.concatenate([[0], cuts + 1])
    ends = np.concatenate([cuts + 1, [values.size]])
    reps = np.array([values[s:e].mean() for s, e in zip(starts, ends)])
    return reps, [slice(int(s), int(e)) for s, e in zip(starts, ends)]


def _check_hermitian(entries: np.ndarray, what: str):
    defect = np.max(np.abs(entries - entries.conj().T))
    if defect > _HERM_TOL:
        raise ValueError(f"{what} must be hermitian (defect {defect:.3e})")


def spectral_projection(op: TruncatedOperator, threshold: float,
                        cluster_tol: float = _CLUSTER_TOL) -> TruncatedOperator:
    """Projection onto eigenspaces of a hermitian operator with value <= threshold.

    Whole eigenvalue clusters are kept or dropped together (cluster width
    ``cluster_tol``), so thresholds inside a degenerate cluster keep it.
    """
    _check_hermitian(op.entries, "spectral projection input")
    vals, vecs = eigh(op.entries)
    keep = vals <= threshold + cluster_tol
    P = vecs[:, keep] @ vecs[:, keep].conj().T
    return TruncatedOperator(op.config, P)


@dataclass(frozen=True)
class SpectralMeasure:
    """Weighted spectrum: Tr[rho P_cluster] per eigenvalue cluster."""

    values: np.ndarray
    weights: np.ndarray

    def total(self) -> float:
        return float(self.weights.sum())

    def as_lattice(self, scale: float = 1.0, tol: float = 1e-6):
        """Aggregate onto the integer lattice values/scale.

        Returns (integers, weights, remainder): clusters further than ``tol``
        from an integer (cutoff-edge artifacts) contribute their weight to
        ``remainder`` instead of the lattice.
        """
        scaled = self.values / scale
        rounded = np.rint(scaled)
        on_lattice = np.abs(scaled - rounded) <= tol
        remainder = float(self.weights[~on_lattice].sum())
        agg = {}
        for v, w in zip(rounded[on_lattice].astype(int), self.weights[on_lattice]):
            agg[v] = agg.get(v, 0.0) + w
        ints = np.array(sorted(agg))
        return ints, np.array([agg[v] for v in ints]), remainder


def spectral_measure(state, obs: TruncatedOperator,
                     cluster_tol: float = _CLUSTER_TOL) -> SpectralMeasure:
    """Distribution of outcomes when ``obs`` is measured on ``state``.

    ``state`` may be a TruncatedState (density matrix) or a plain vector
    (pure state).  Weights sum to the state trace/norm.
    """
    _check_hermitian(obs.entries, "observable")
    vals, vecs = eigh(obs.entries)
    if isinstance(state, TruncatedState):
        B = state.entries @ vecs
        per_vec = np.real(np.sum(vecs.conj() * B, axis=0))
    else:
        psi = np.asarray(state, dtype=complex)
        per_vec = np.abs(vecs.conj().T @ psi) ** 2
    reps, slices = cluster_eigenvalues(vals, cluster_tol)
    weights = np.array([per_vec[s].sum() for s in slices])
    return SpectralMeasure(reps, weights)


# ---------------------------------------------------------------------------
# rotation averaging (Haar average over simultaneous copy rotations)
# ---------------------------------------------------------------------------

def _circle_average_diag(eigvals: np.ndarray, n_angles: int) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return np.exp(1j * np.outer(eigvals, t)).mean(axis=1)


def _sin_weight_nodes(n_nodes: int):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    beta = 0.5 * np.pi * (x + 1.0)
    weights = w * (np.pi / 2.0) * np.sin(beta) / 2.0  # Haar: sin(beta)/2 on [0, pi]
    return beta, weights


def rotation_average_projector(config: FockConfig, n_angles: int = 512,
                               n_nodes: int = 64, tol: float = 1e-6,
                               dense_limit: int = 2500) -> TruncatedOperator:
    """Quadrature average of exp(bs-rotations) over the copy-rotation group.

    n = 2 averages exp(t bs_{1,2}) over t in [0, 2pi) (trapezoid rule);
    n = 3 uses the Euler product R12(a) R23(b) R12(c) with the sin(b) Haar
    weight, tensor Gauss-Legendre in b.  Resolution doubles until the
    projector is stable to ``tol``.  On complete photon sectors this equals
    the projection onto the kernel of the rotation-defect observable.
    """
    if config.copies not in (2, 3):
        raise ValueError("rotation averaging implemented for 2 or 3 copies")
    _require_dense(config, dense_limit)

    h12 = (-1j) * beamsplitter_generator(config, 1, 2).toarray()
    _check_hermitian(h12, "beamsplitter generator")
    lam12, v12 = eigh(h12)

    if config.copies == 3:
        h23 = (-1j) * beamsplitter_generator(config, 2, 3).toarray()
        lam23, v23 = eigh(h23)

    def diag12(K):
        return _circle_average_diag(lam12, K)

    def diag23(G):
        beta, wts = _sin_weight_nodes(G)
        return np.exp(1j * np.outer(lam23, beta)) @ wts

    K, G = n_angles, n_nodes
    d12 = diag12(K)
    d23 = diag23(G) if config.copies == 3 else None
    for _ in range(6):
        d12_next = diag12(2 * K)
        stable = np.max(np.abs(d12_next - d12)) < tol
        if config.copies == 3:
            d23_next = diag23(G + 32)
            stable = stable and np.max(np.abs(d23_next - d23)) < tol
            d23 = d23_next
            G += 32
        d12 = d12_next
        K *= 2
        if stable:
            break

    W12 = (v12 * d12) @ v12.conj().T
    if config.copies == 2:
        W = W12
    else:
        M23 = (v23 * d23) @ v23.conj().T
        W = W12 @ M23 @ W12
    return TruncatedOperator(config, W)


def rotation_average_apply(config: FockConfig, psi: np.ndarray,
                           n_angles: int = 128, n_nodes: int = 48) -> np.ndarray:
    """Apply the rotation average to a state vector without dense matrices."""
    if config.copies not in (2, 3):
        raise ValueError("rotation averaging implemented for 2 or 3 copies")
    v12 = beamsplitter_generator(config, 1, 2).tocsc()

    def circle_avg(vec):
        K = n_angles
        grid = expm_multiply(v12, vec, start=0.0,
                             stop=2.0 * np.pi * (K - 1) / K, num=K, endpoint=True)
        return grid.mean(axis=0)

    out = circle_avg(np.asarray(psi, dtype=complex))
    if config.copies == 3:
        v23 = beamsplitter_generator(config, 2, 3).tocsc()
        beta, wts = _sin_weight_nodes(n_nodes)
        acc = np.zeros_like(out)
        for b, w in zip(beta, wts):
            acc = acc + w * expm_multiply(b * v23, out)
        out = circle_avg(acc)
    return out


def invariant_expectation(config: FockConfig, psi: np.ndarray,
                          tol: float = 1e-6, n_angles: int = 128,
                          n_nodes: int = 48, max_doublings: int = 4) -> float:
    """<psi| P |psi> with P the rotation-average projector, doubling until stable."""
    psi = np.asarray(psi, dtype=complex)
    prev = None
    K, G = n_angles, n_nodes
    for _ in range(max_doublings):
        avg = rotation_average_apply(config, psi, n_angles=K, n_nodes=G)
        val = float(np.real(psi.conj() @ avg))
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        K *= 2
        G += 32
    return prev


# ---------------------------------------------------------------------------
# randomized level equation and the invariant test's error probability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSolution:
    """Thresholds (s, t) and randomization weight w of the level equation.

    ``s_index`` is -1 when s lies below the whole spectrum (projection 0).
    ``degenerate`` marks an exact hit of the target mass, where the
    randomized pair collapses to a single non-randomized threshold (w = 1).
    """

    s_index: int
    t_index: int
    w: float
    degenerate: bool

    def accept_probability(self, cumulative: np.ndarray) -> float:
        """(1-w) F(s) + w F(t) for a cumulative mass array over the spectrum."""
        fs = 0.0 if self.s_index < 0 else float(cumulative[self.s_index])
        ft = float(cumulative[self.t_index])
        if self.degenerate:
            return fs
        return (1.0 - self.w) * fs + self.w * ft


def solve_level_equation(null_masses: np.ndarray, alpha: float,
                         exact_tol: float = 1e-12) -> LevelSolution:
    """Solve 1 - alpha = (1-w) F(s) + w F(t) on a discrete spectrum.

    ``null_masses`` are the null-state masses per ascending spectral value.
    Picks the smallest threshold t whose cumulative null mass reaches
    1 - alpha, with s the previous value (or below the spectrum) and
    0 < w <= 1; an exact hit collapses to the single threshold s = t.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    cum = np.cumsum(np.asarray(null_masses, dtype=float))
    target = 1.0 - alpha
    i = int(np.searchsorted(cum, target - exact_tol))
    if i >= len(cum):
        raise ValueError(
            "truncated null law carries too little mass to reach the level "
            f"(have {cum[-1]:.12f}, need {target:.12f})"
        )
    if abs(cum[i] - target) <= exact_tol:
        return LevelSolution(i, i, 1.0, True)
    prev = cum[i - 1] if i >= 1 else 0.0
    w = (target - prev) / (cum[i] - prev)
    return LevelSolution(i - 1, i, float(w), False)


def si_type2_fock(theta, mixture: float, alpha: float, config: FockConfig,
                  dense_limit: int = 2500, quad_tol: float = 1e-6) -> float:
    """Acceptance probability of the invariant test on a displaced alternative.

    Solves the randomized level equation on the discrete spectrum of the
    rotation-defect observable under the null state, then evaluates the
    same randomized projection pair on the displaced state.  The mixture-0
    case routes through the rotation-average projector (the null state sits
    exactly in the kernel), which keeps large copy counts affordable; the
    general case eigendecomposes densely.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if config.copies < 2:
        raise ValueError("the invariant test needs at least two copies")
    theta = np.atleast_1d(np.asarray(theta, dtype=complex)).reshape(config.modes)

    if mixture == 0.0:
        # Null = vacuum, which the defect observable annihilates exactly, so
        # the solved thresholds are s below the spectrum, t = 0, w = 1-alpha
        # (or the degenerate kernel projection at alpha = 0).
        Z = np.tile(theta.reshape(-1, 1), (1, config.copies))
        psi = coherent_product_vector(config, Z)
        q = invariant_expectation(config, psi, tol=quad_tol)
        coeff = 1.0 if alpha == 0.0 else (1.0 - alpha)
        return coeff * q

    T = rotation_defect_observable(config, dense_limit)
    vals, vecs = eigh(T.entries)
    reps, slices = cluster_eigenvalues(vals)

    def cluster_masses(rho):
        B = rho @ vecs
        per_vec = np.real(np.sum(vecs.conj() * B, axis=0))
        return np.array([per_vec[s].sum() for s in slices])

    null = product_state(config, np.zeros(config.modes), mixture, dense_limit)
    sol = solve_level_equation(cluster_masses(null.entries), alpha)
    alt = product_state(config, theta, mixture, dense_limit)
    cum_alt = np.cumsum(cluster_masses(alt.entries))
    return sol.accept_probability(cum_alt)


def auto_cutoff(displacement_norm: float, mixture: float, eps: float = 1e-8,
                probe: int = 200) -> int:
    """Smallest per-mode cutoff whose occupation tail is below eps.

    Uses the exact occupation law of the displaced thermal state computed at
    a generous probe cutoff.
    """
    occ = np.real(np.diag(
        thermal_coherent_state(abs(displacement_norm), mixture, probe).entries))
    cum = np.cumsum(occ)
    idx = np.nonzero(cum >= 1.0 - eps)[0]
    if idx.size == 0:
        raise ValueError("probe cutoff too small for the requested tail")
    return max(2, int(idx[0]) + 2)


# ---------------------------------------------------------------------------
# textual dumps (debugging interface)
# ---------------------------------------------------------------------------

def dump_entries(obj, path):
    """Write operator/state entries as text: header 'm n d', one row per line."""
    entries = obj.entries
    cfg = obj.config
    with open(path, "w") as fh:
        fh.write(f"{cfg.modes} {cfg.copies} {cfg.cutoff}\n")
        for row in entries:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")


def load_entries(path, kind: str = "operator"):
    """Read a dump written by ``dump_entries``; kind is 'operator' or 'state'."""
    with open(path) as fh:
        m, n, d = (int(t) for t in fh.readline().split())
        cfg = FockConfig(m, n, d)
        rows = []
        for line in fh:
            vals = np.fromstring(line, sep=" ")
            rows.append(vals[0::2] + 1j * vals[1::2])
    entries = np.array(rows)
    if kind == "state":
        return TruncatedState(cfg, entries)
    return TruncatedOperator(cfg, entries)
