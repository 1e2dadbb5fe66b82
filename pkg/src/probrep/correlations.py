"""Bipartite correlation scenarios: joint outcome tables, CHSH, steering
ensembles, and the single-system embedding of a two-qubit measurement.

Outcome sign convention for correlators: the first POVM element of every
binary measurement maps to +1, the second to -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, NotBipartite, WrongArity, WrongDimension
from .operators import (
    DensityOperator,
    Ket,
    Povm,
    _freeze,
    born_probabilities,
    make_ket,
    make_povm,
    tensor,
)

BLOCK_SUM_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementFamily:
    """One POVM per setting label, all in the same dimension."""

    settings: Tuple
    povms: Tuple[Povm, ...]

    def __post_init__(self):
        if len(self.settings) != len(self.povms):
            raise ValueError("one POVM per setting label required")
        dims = {p.dim for p in self.povms}
        if len(dims) != 1:
            raise DimensionMismatch(f"family mixes dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.povms[0].dim

    def __len__(self) -> int:
        return len(self.settings)


def family(settings: Sequence, povms: Sequence[Povm]) -> MeasurementFamily:
    return MeasurementFamily(tuple(settings), tuple(povms))


@dataclass(frozen=True)
class CorrelationTable:
    """p(x, y | a, b) stored as one (n_x, n_y) block per setting pair."""

    settings_a: Tuple
    settings_b: Tuple
    probs: Dict[Tuple, np.ndarray]

    def block(self, a, b) -> np.ndarray:
        return self.probs[(a, b)]

    def correlator(self, a, b) -> float:
        """The +1/-1 correlator E(a, b) of a 2x2 block."""
        blk = self.probs[(a, b)]
        if blk.shape != (2, 2):
            raise WrongArity(f"correlator needs a 2x2 block, got {blk.shape}")
        return float(blk[0, 0] - blk[0, 1] - blk[1, 0] + blk[1, 1])


def make_table(settings_a, settings_b, probs: Dict[Tuple, np.ndarray]) -> CorrelationTable:
    out = {}
    for a in settings_a:
        for b in settings_b:
            blk = np.asarray(probs[(a, b)], dtype=float)
            total = float(blk.sum())
            if abs(total - 1.0) > BLOCK_SUM_TOL:
                raise ValueError(
                    f"block ({a!r}, {b!r}) sums to {total!r}, expected 1"
                )
            out[(a, b)] = _freeze(blk.copy())
    return CorrelationTable(tuple(settings_a), tuple(settings_b), out)


def correlation_table(
    psi: Ket, fam_a: MeasurementFamily, fam_b: MeasurementFamily
) -> CorrelationTable:
    """Joint distribution p(x, y | a, b) = <psi| A^a_x (x) B^b_y |psi>."""
    da, db = fam_a.dim, fam_b.dim
    if psi.dim != da * db:
        raise DimensionMismatch(
            f"state dim {psi.dim} != {da} * {db} for the two families"
        )
    amp = psi.amplitudes.reshape(da, db)
    probs = {}
    for a, pa in zip(fam_a.settings, fam_a.povms):
        for b, pb in zip(fam_b.settings, fam_b.povms):
            blk = np.real(
                np.einsum(
                    "mu,xmn,yuv,nv->xy",
                    amp.conj(),
                    pa.elements,
                    pb.elements,
                    amp,
                    optimize=True,
                )
            )
            probs[(a, b)] = blk
    return make_table(fam_a.settings, fam_b.settings, probs)


def chsh_value(table: CorrelationTable) -> float:
    """|E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)| for a 2x2-setting table."""
    if len(table.settings_a) != 2 or len(table.settings_b) != 2:
        raise WrongArity(
            f"CHSH needs 2 settings per side, got "
            f"{len(table.settings_a)} x {len(table.settings_b)}"
        )
    a1, a2 = table.settings_a
    b1, b2 = table.settings_b
    e = table.correlator
    return float(abs(e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2)))


def lhv_chsh_bound() -> float:
    """Deterministic-strategy bound on the CHSH combination.

    Enumerates all 16 local deterministic assignments x = f(a), y = g(b),
    builds each as a correlation table, and takes the maximum CHSH value.
    (This is the exhaustive vertex oracle; the value is exactly 2.)
    """
    best = 0.0
    for fa in range(4):
        for gb in range(4):
            xa = ((fa >> 0) & 1, (fa >> 1) & 1)
            yb = ((gb >> 0) & 1, (gb >> 1) & 1)
            probs = {}
            for ia, a in enumerate(("a1", "a2")):
                for ib, b in enumerate(("b1", "b2")):
                    blk = np.zeros((2, 2))
                    blk[xa[ia], yb[ib]] = 1.0
                    probs[(a, b)] = blk
            table = make_table(("a1", "a2"), ("b1", "b2"), probs)
            best = max(best, chsh_value(table))
    return best


def no_signalling_check(table: CorrelationTable) -> float:
    """Largest spread of one side's marginals across the other side's settings."""
    worst = 0.0
    for b in table.settings_b:
        margs = np.stack(
            [table.block(a, b).sum(axis=0) for a in table.settings_a]
        )
        worst = max(worst, float(np.max(margs.max(axis=0) - margs.min(axis=0))))
    for a in table.settings_a:
        margs = np.stack(
            [table.block(a, b).sum(axis=1) for b in table.settings_b]
        )
        worst = max(worst, float(np.max(margs.max(axis=0) - margs.min(axis=0))))
    return worst


@dataclass(frozen=True)
class SteeringReport:
    """Conditioned ensembles of subsystem B for two measurement choices on A.

    ``ensembles`` holds (probability, conditional state) pairs restricted to
    outcomes with nonzero probability; ``marginals`` are the two partial
    traces (equal by no-signalling); ``overlap`` is the maximum fidelity
    between a member of one ensemble and a member of the other.
    """

    ensembles: Tuple[List[Tuple[float, DensityOperator]], List[Tuple[float, DensityOperator]]]
    marginals: Tuple[DensityOperator, DensityOperator]
    overlap: float

    @property
    def no_steering(self) -> bool:
        """True when the two ensembles share a state (maximum fidelity ~ 1)."""
        return self.overlap > 1.0 - 1e-9


def _projective_rank1_vectors(povm: Povm) -> np.ndarray:
    """Extract basis vectors from a projective rank-1 POVM, or raise."""
    d = povm.dim
    if len(povm) != d:
        raise ValueError(f"projective basis in dimension {d} needs {d} elements")
    vecs = np.empty((d, d), dtype=complex)
    for k, el in enumerate(povm.elements):
        w, v = np.linalg.eigh(el)
        if abs(w[-1] - 1.0) > 1e-10 or (d > 1 and w[-2] > 1e-10):
            raise ValueError(f"element {k} is not a rank-1 projector")
        vecs[k] = v[:, -1]
    return vecs


def steering_ensembles(psi: Ket, basis_1: Povm, basis_2: Povm) -> SteeringReport:
    """Condition subsystem B of a pure bipartite state on two bases for A.

    The subsystem split is inferred from the basis dimension: A has
    dim(basis) and B the remaining factor. Probability-zero outcomes are
    dropped (the ensemble is the support set).
    """
    da = basis_1.dim
    if basis_2.dim != da:
        raise DimensionMismatch("both steering bases must act on subsystem A")
    if psi.dim % da != 0 or psi.dim // da < 2:
        raise NotBipartite(
            f"state dim {psi.dim} does not split as {da} x d_B with d_B >= 2"
        )
    db = psi.dim // da
    # row-major split (i_A, i_B) -> i_A * d_B + i_B, matching tensor()
    amp = psi.amplitudes.reshape(da, db)

    ensembles = []
    marginals = []
    for basis in (basis_1, basis_2):
        vecs = _projective_rank1_vectors(basis)
        members = []
        marginal = np.zeros((db, db), dtype=complex)
        for k in range(da):
            sub = vecs[k].conj() @ amp  # unnormalized conditional ket of B
            prob = float(np.real(sub.conj() @ sub))
            marginal += np.outer(sub, sub.conj())
            if prob > 1e-12:
                cond = np.outer(sub, sub.conj()) / prob
                cond = 0.5 * (cond + cond.conj().T)
                members.append((prob, DensityOperator(db, _freeze(cond))))
        ensembles.append(members)
        marginal = 0.5 * (marginal + marginal.conj().T)
        marginals.append(DensityOperator(db, _freeze(marginal)))

    overlap = 0.0
    for _, rho1 in ensembles[0]:
        for _, rho2 in ensembles[1]:
            # members are pure, so fidelity reduces to tr(rho1 rho2)
            overlap = max(overlap, float(np.real(np.trace(rho1.matrix @ rho2.matrix))))
    return SteeringReport(
        ensembles=(ensembles[0], ensembles[1]),
        marginals=(marginals[0], marginals[1]),
        overlap=overlap,
    )


def spin32_embedding(
    fam_a: MeasurementFamily, fam_b: MeasurementFamily
) -> MeasurementFamily:
    """Embed two qubit families as joint measurements on one 4-level system.

    Uses the basis identification |0>,|1>,|2>,|3> <-> |00>,|01>,|10>,|11>;
    the joint POVM for setting (a, b) has elements A^a_x (x) B^b_y with the
    flat outcome index x * n_y + y.
    """
    if fam_a.dim != 2 or fam_b.dim != 2:
        raise WrongDimension("embedding is defined for a pair of qubit families")
    settings = []
    povms = []
    for a, pa in zip(fam_a.settings, fam_a.povms):
        for b, pb in zip(fam_b.settings, fam_b.povms):
            els = [tensor(ea, eb) for ea in pa.elements for eb in pb.elements]
            settings.append((a, b))
            povms.append(make_povm(np.array(els)))
    return MeasurementFamily(tuple(settings), tuple(povms))


def embedded_correlation_table(
    psi: Ket, fam_a: MeasurementFamily, fam_b: MeasurementFamily
) -> CorrelationTable:
    """Evaluate the spin-3/2 embedding of (fam_a, fam_b) on a 4-level state.

    Accepts the single-system state whose amplitudes match the two-qubit
    state under the basis identification. Blocks are reshaped back to
    (x, y), so the result is directly comparable to correlation_table.
    """
    joint = spin32_embedding(fam_a, fam_b)
    if psi.dim != joint.dim:
        raise DimensionMismatch(f"state dim {psi.dim} != joint dim {joint.dim}")
    rho = psi.density()
    probs = {}
    for (a, b), povm in zip(joint.settings, joint.povms):
        ia = fam_a.settings.index(a)
        ib = fam_b.settings.index(b)
        nx = len(fam_a.povms[ia])
        ny = len(fam_b.povms[ib])
        q = born_probabilities(rho, povm)
        probs[(a, b)] = q.values.reshape(nx, ny)
    return make_table(fam_a.settings, fam_b.settings, probs)


# ---------------------------------------------------------------------------
# stock states and measurement directions
# ---------------------------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def phi_plus() -> Ket:
    """(|00> + |11>) / sqrt(2)."""
    return make_ket(np.array([1, 0, 0, 1]) / np.sqrt(2))


def singlet() -> Ket:
    """(|01> - |10>) / sqrt(2)."""
    return make_ket(np.array([0, 1, -1, 0]) / np.sqrt(2))


def direction_povm(theta: float, plane: str = "xy") -> Povm:
    """Binary qubit measurement along a Bloch direction at angle theta.

    plane "xy": direction (cos theta, sin theta, 0) (azimuth from +x);
    plane "zx": direction (sin theta, 0, cos theta) (polar from +z).
    The projector onto the +1 eigenstate comes first.
    """
    if plane == "xy":
        n = np.cos(theta) * PAULI_X + np.sin(theta) * PAULI_Y
    elif plane == "zx":
        n = np.sin(theta) * PAULI_X + np.cos(theta) * PAULI_Z
    else:
        raise ValueError(f"unknown plane {plane!r}")
    eye = np.eye(2, dtype=complex)
    return make_povm(np.array([(eye + n) / 2, (eye - n) / 2]))


def angle_family(thetas: Sequence[float], plane: str = "xy") -> MeasurementFamily:
    """Family of direction measurements labeled by their angles in degrees."""
    labels = tuple(f"{np.degrees(t):g}" for t in thetas)
    return MeasurementFamily(labels, tuple(direction_povm(t, plane) for t in thetas))


#: Angles (radians) achieving the Tsirelson bound for the singlet with the
#: CHSH combination used by chsh_value: A at 90 and 0 degrees azimuth, B at
#: 45 and 135.
CANONICAL_CHSH_ANGLES = (
    (np.pi / 2, 0.0),
    (np.pi / 4, 3 * np.pi / 4),
)


def canonical_chsh_table(psi: Ket = None) -> CorrelationTable:
    """Joint outcome table at the canonical CHSH settings (default: singlet)."""
    psi = singlet() if psi is None else psi
    fam_a = angle_family(CANONICAL_CHSH_ANGLES[0])
    fam_b = angle_family(CANONICAL_CHSH_ANGLES[1])
    return correlation_table(psi, fam_a, fam_b)
