"""Finite-dimensional operator algebra: validated domain types, tensor
products, the Born rule, and seeded random generators.

All types are immutable value objects; every operation is a pure function
of its inputs (randomness always flows through an explicit integer seed,
fed to numpy's PCG64 generator). Complex matrices are dense numpy arrays
with the row-major tensor index convention (i_A, i_B) -> i_A * dim_B + i_B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadRank,
    DimensionMismatch,
    DimensionOverflow,
    InvalidDimension,
    NotHermitian,
    NotPositive,
    SingularNormalizer,
    SumNotIdentity,
    TraceNotOne,
)

#: Default cap on Hilbert-space dimension (d^2 = 64 reference outcomes at most).
DIM_CAP = 8

HERMITIAN_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-12
PROB_FLOOR = -1e-12
PROB_SUM_TOL = 1e-10


def check_dim(d: int, cap: int = DIM_CAP) -> int:
    """Validate a Hilbert-space dimension, 2 <= d <= cap."""
    d = int(d)
    if d < 2 or d > cap:
        raise InvalidDimension(f"dimension {d} outside supported range 2..{cap}")
    return d


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Ket:
    """Unit vector in a d-dimensional complex Hilbert space."""

    dim: int
    amplitudes: np.ndarray

    def density(self) -> "DensityOperator":
        """The rank-1 state |psi><psi|."""
        m = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.dim, _freeze(0.5 * (m + m.conj().T)))


def make_ket(amplitudes, cap: int = DIM_CAP) -> Ket:
    """Validate and wrap a complex amplitude vector (unit norm within 1e-12)."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    d = check_dim(v.shape[0], cap)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"ket norm {norm!r} differs from 1 by more than {NORM_TOL}")
    return Ket(d, _freeze(v.copy()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator."""

    dim: int
    matrix: np.ndarray

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class Povm:
    """Finite measurement: positive operators summing to identity.

    ``elements`` has shape (n_outcomes, d, d); outcome j indexes axis 0.
    """

    dim: int
    elements: np.ndarray

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.elements[j]


@dataclass(frozen=True)
class ProbVector:
    """Probability distribution over outcome labels.

    Entries in [-1e-12, 0) are clipped to zero on construction; anything
    more negative, or a total off 1 by more than 1e-10, is rejected.
    """

    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


def make_prob_vector(values) -> ProbVector:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.min(initial=0.0) < PROB_FLOOR:
        raise ValueError(
            f"probability {v.min():.3e} below the tolerance floor {PROB_FLOOR}"
        )
    v = np.where(v < 0.0, 0.0, v)
    total = float(v.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"probabilities sum to {total!r}, expected 1 within {PROB_SUM_TOL}")
    return ProbVector(_freeze(v))


def hermitian_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def validate_density(matrix, cap: int = DIM_CAP) -> DensityOperator:
    """Validate a matrix as a density operator.

    Checks Hermiticity, positivity and unit trace at the standard 1e-10
    tolerances. Eigenvalues in [-1e-10, 0) are treated as accumulated
    floating error: they are clipped to 0 and the operator renormalized.

    Raises NotHermitian, NotPositive or TraceNotOne, each reporting the
    measured deviation.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    d = check_dim(m.shape[0], cap)
    dev = hermitian_deviation(m)
    if dev > HERMITIAN_TOL:
        raise NotHermitian(dev, what="density matrix")
    m = 0.5 * (m + m.conj().T)
    trace = float(np.real(np.trace(m)))
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceNotOne(trace)
    w, v = np.linalg.eigh(m)
    if w[0] < -EIGENVALUE_TOL:
        raise NotPositive(float(w[0]), what="density matrix")
    if w[0] < 0.0:
        w = np.where(w < 0.0, 0.0, w)
        m = (v * w) @ v.conj().T
        m = 0.5 * (m + m.conj().T)
        m = m / np.real(np.trace(m))
    return DensityOperator(d, _freeze(m))


def make_povm(elements, cap: int = DIM_CAP) -> Povm:
    """Validate a list of matrices as a POVM (the invariants of the type)."""
    els = np.asarray(elements, dtype=complex)
    if els.ndim != 3 or els.shape[1] != els.shape[2]:
        raise ValueError(f"expected shape (n, d, d), got {els.shape}")
    d = check_dim(els.shape[1], cap)
    for j, el in enumerate(els):
        dev = hermitian_deviation(el)
        if dev > HERMITIAN_TOL:
            raise NotHermitian(dev, what=f"POVM element {j}")
        w = np.linalg.eigvalsh(0.5 * (el + el.conj().T))
        if w[0] < -EIGENVALUE_TOL:
            raise NotPositive(float(w[0]), what=f"POVM element {j}")
    dev = float(np.max(np.abs(els.sum(axis=0) - np.eye(d))))
    if dev > HERMITIAN_TOL:
        raise SumNotIdentity(dev)
    return Povm(d, _freeze(els.copy()))


def tensor(a: np.ndarray, b: np.ndarray, cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product with the (i_A, i_B) -> i_A * dim_B + i_B convention.

    Accepts operators (2-d) or kets (1-d). Raises DimensionOverflow when the
    product dimension exceeds the cap.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    out_dim = a.shape[0] * b.shape[0]
    if out_dim > cap:
        raise DimensionOverflow(out_dim, cap)
    return np.kron(a, b)


def born_probabilities(rho: DensityOperator, povm: Povm) -> ProbVector:
    """Outcome distribution q(j) = tr(rho F_j).

    This is the ground-truth oracle the probability-only rewriting is
    checked against.
    """
    if rho.dim != povm.dim:
        raise DimensionMismatch(f"state dim {rho.dim} != POVM dim {povm.dim}")
    q = np.real(np.einsum("ij,aji->a", rho.matrix, povm.elements))
    return make_prob_vector(q)


def expectation(rho: DensityOperator, operator: np.ndarray) -> float:
    """Real expectation value tr(rho A) for Hermitian A."""
    if rho.dim != operator.shape[0]:
        raise DimensionMismatch(
            f"state dim {rho.dim} != operator dim {operator.shape[0]}"
        )
    return float(np.real(np.einsum("ij,ji->", rho.matrix, operator)))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure_state(dim: int, seed: int, cap: int = DIM_CAP) -> Ket:
    """Haar-distributed pure state: normalized complex standard normals."""
    d = check_dim(dim, cap)
    rng = np.random.default_rng(seed)
    v = _complex_normal(rng, d)
    v /= np.linalg.norm(v)
    return Ket(d, _freeze(v))


def random_density(dim: int, rank: int, seed: int, cap: int = DIM_CAP) -> DensityOperator:
    """Random state rho = G G^dag / tr(G G^dag), G a d x rank complex normal."""
    d = check_dim(dim, cap)
    if not 1 <= rank <= d:
        raise BadRank(f"rank {rank} outside 1..{d}")
    rng = np.random.default_rng(seed)
    g = _complex_normal(rng, (d, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    m /= np.real(np.trace(m))
    return DensityOperator(d, _freeze(m))


def random_povm(dim: int, n_outcomes: int, seed: int, cap: int = DIM_CAP) -> Povm:
    """Random POVM from n Wishart factors, whitened to sum to identity.

    Draws A_k = G_k G_k^dag, S = sum_k A_k and returns
    {S^{-1/2} A_k S^{-1/2}}. Raises SingularNormalizer when S has
    condition number above 1e12.
    """
    d = check_dim(dim, cap)
    if n_outcomes < 2:
        raise ValueError(f"need at least 2 outcomes, got {n_outcomes}")
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(n_outcomes):
        g = _complex_normal(rng, (d, d))
        a = g @ g.conj().T
        parts.append(0.5 * (a + a.conj().T))
    s = np.sum(parts, axis=0)
    w, v = np.linalg.eigh(s)
    cond = float(w[-1] / w[0]) if w[0] > 0 else np.inf
    if cond > 1e12:
        raise SingularNormalizer(cond)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    els = np.array([inv_sqrt @ a @ inv_sqrt for a in parts])
    els = 0.5 * (els + els.conj().transpose(0, 2, 1))
    return make_povm(els, cap)


def basis_ket(dim: int, index: int) -> Ket:
    """Computational basis vector |index> in dimension dim."""
    d = check_dim(dim)
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return Ket(d, _freeze(v))


def projector_povm(vectors) -> Povm:
    """Projective measurement onto an orthonormal basis given as row vectors."""
    vecs = np.asarray(vectors, dtype=complex)
    els = np.array([np.outer(v, v.conj()) for v in vecs])
    return make_povm(els)
