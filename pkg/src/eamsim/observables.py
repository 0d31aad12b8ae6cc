"""Selection-rule matrix elements, populations, reduced density operators and entropy."""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .dynamics import StateVector, Trajectory
from .errors import ContractViolation
from .hamiltonian import (
    AcceptorPairArms,
    AcceptorPairEam,
    BellPair,
    DonorArm,
    DonorEam,
    LabeledBasis,
    _hermiticity_error,
)
from .model import check_eam, eam_window, wrap_eam

ENTROPY_CUTOFF = 1e-14
TRACE_TOL = 1e-10
PSD_TOL = 1e-12


# --- subsystem labels -----------------------------------------------------

@dataclass(frozen=True)
class LocalGround:
    family: ClassVar[str] = "local"


@dataclass(frozen=True)
class LocalEam:
    q: int
    family: ClassVar[str] = "local"


@dataclass(frozen=True)
class LocalArm:
    j: int
    family: ClassVar[str] = "local"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    basis: LabeledBasis
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=np.complex128)
        if rho.shape != (self.basis.dim, self.basis.dim):
            raise ContractViolation(f"density matrix shape {rho.shape} does not match basis")
        err, scale = _hermiticity_error(rho)
        if err > 1e-12 * scale:
            raise ContractViolation(f"density matrix not Hermitian ({err:.3e})")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractViolation(f"density matrix trace {tr!r} != 1")
        lowest = float(np.linalg.eigvalsh(rho)[0])
        if lowest < -PSD_TOL:
            raise ContractViolation(f"density matrix has negative eigenvalue {lowest!r}")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def population(self, label) -> float:
        k = self.basis.index(label)
        return float(self.matrix[k, k].real)


@dataclass(frozen=True)
class SelectionTable:
    """Cutting matrix elements for every acceptor pair ``(q1, q2)``."""

    arm_count: int
    qc_element: complex
    entries: dict

    def allowed(self, tol: float = 0.0) -> list[tuple[int, int]]:
        scale = abs(self.qc_element)
        return [pair for pair, value in self.entries.items() if abs(value) > tol * scale]

    def conserves_eam(self) -> bool:
        """True when only pairs with ``q1 + q2 = 0 (mod N)`` are nonzero."""
        n = self.arm_count
        limit = 1e-14 * abs(self.qc_element)
        return all(
            abs(value) <= limit
            for (q1, q2), value in self.entries.items()
            if wrap_eam(q1 + q2, n) != 0
        )


def qc_matrix_element(q1: int, q2: int, qc_element: complex, arm_count: int) -> complex:
    """Donor(q=0) -> acceptor pair (q1, q2) cutting amplitude.

    The cyclic phase sum collapses to ``M / sqrt(N)`` when ``q1 + q2 = 0 (mod N)``
    and to exactly zero otherwise.
    """
    check_eam(q1, arm_count)
    check_eam(q2, arm_count)
    if wrap_eam(q1 + q2, arm_count) != 0:
        return 0j
    return complex(qc_element) / math.sqrt(arm_count)


def selection_table(qc_element: complex, arm_count: int) -> SelectionTable:
    window = eam_window(arm_count)
    entries = {
        (q1, q2): qc_matrix_element(q1, q2, qc_element, arm_count)
        for q1 in window
        for q2 in window
    }
    return SelectionTable(arm_count, complex(qc_element), entries)


def reduced_density_acceptor1(u_a: complex) -> DensityOperator:
    """Two-level reduced state of acceptor 1: ``diag(|u_a|^2/2, 1 - |u_a|^2/2)`` on (+1, -1)."""
    p = abs(u_a) ** 2
    if p > 1.0 + TRACE_TOL:
        raise ValueError(f"|u_a| must be <= 1, got {abs(u_a)!r}")
    p = min(p, 1.0)
    basis = LabeledBasis([LocalEam(1), LocalEam(-1)])
    return DensityOperator(basis, np.diag([p / 2.0, 1.0 - p / 2.0]))


def two_level_entropy(u_a) -> np.ndarray | float:
    """Entropy in bits of :func:`reduced_density_acceptor1`, vectorized over ``u_a``."""
    p = np.clip(np.abs(np.asarray(u_a)) ** 2, 0.0, 1.0) / 2.0
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        hp = np.where(p > ENTROPY_CUTOFF, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        hq = np.where(q > ENTROPY_CUTOFF, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    s = hp + hq
    return float(s) if s.ndim == 0 else s


def von_neumann_entropy(rho: DensityOperator) -> float:
    """``-Tr(rho log2 rho)``; eigenvalues below 1e-14 contribute nothing."""
    lam = np.linalg.eigvalsh(rho.matrix)
    lam = lam[lam > ENTROPY_CUTOFF]
    s = float(-np.sum(lam * np.log2(lam)))
    return min(max(s, 0.0), math.log2(rho.basis.dim))


def _local_factors(basis: LabeledBasis):
    """Map each label to a list of ``((donor, acceptor1, acceptor2), weight)`` terms.

    The EAM family factorizes as donor {ground, q=0, ...} x acceptor {ground,
    window}; the arm family as donor {ground, arms} x acceptor {ground, arms}.
    A Bell pair spreads over ``(q, -q)`` and ``(-q, q)`` with weight ``1/sqrt(2)``.
    """
    family = getattr(basis[0], "family", None)
    if family == "eam":
        donor_qs = sorted({label.q for label in basis if isinstance(label, DonorEam)})
        pair_qs = sorted(
            {label.q1 for label in basis if isinstance(label, AcceptorPairEam)}
            | {label.q2 for label in basis if isinstance(label, AcceptorPairEam)}
            | {s * label.q for label in basis if isinstance(label, BellPair) for s in (1, -1)}
        )
        donor_local = [LocalGround()] + [LocalEam(q) for q in donor_qs]
        acc_local = [LocalGround()] + [LocalEam(q) for q in pair_qs]
        d_index = {q: k + 1 for k, q in enumerate(donor_qs)}
        a_index = {q: k + 1 for k, q in enumerate(pair_qs)}
        factors = []
        for label in basis:
            if isinstance(label, DonorEam):
                factors.append([((d_index[label.q], 0, 0), 1.0)])
            elif isinstance(label, AcceptorPairEam):
                factors.append([((0, a_index[label.q1], a_index[label.q2]), 1.0)])
            elif isinstance(label, BellPair) and label.q != 0:
                w = 1.0 / math.sqrt(2.0)
                q = label.q
                factors.append([((0, a_index[q], a_index[-q]), w), ((0, a_index[-q], a_index[q]), w)])
            else:
                raise ContractViolation(f"label {label!r} has no declared tensor factorization")
        return donor_local, acc_local, factors
    if family == "arm":
        donor_js = sorted({label.j for label in basis if isinstance(label, DonorArm)})
        arm_js = sorted(
            {label.s for label in basis if isinstance(label, AcceptorPairArms)}
            | {label.t for label in basis if isinstance(label, AcceptorPairArms)}
        )
        donor_local = [LocalGround()] + [LocalArm(j) for j in donor_js]
        acc_local = [LocalGround()] + [LocalArm(j) for j in arm_js]
        d_index = {j: k + 1 for k, j in enumerate(donor_js)}
        a_index = {j: k + 1 for k, j in enumerate(arm_js)}
        factors = [
            [((d_index[label.j], 0, 0), 1.0)] if isinstance(label, DonorArm)
            else [((0, a_index[label.s], a_index[label.t]), 1.0)]
            for label in basis
        ]
        return donor_local, acc_local, factors
    raise ContractViolation(f"basis family {family!r} has no declared tensor factorization")


_KEEP = {"donor": 0, "acceptor1": 1, "acceptor2": 2}


def partial_trace(psi: StateVector, keep: str) -> DensityOperator:
    """Reduced density operator of one molecule (``"donor"``, ``"acceptor1"`` or ``"acceptor2"``).

    Each molecule's local space includes its ground state, so the donor
    population shows up as acceptor ground-state occupancy.
    """
    if keep not in _KEEP:
        raise ValueError(f"keep must be one of {sorted(_KEEP)}, got {keep!r}")
    donor_local, acc_local, factors = _local_factors(psi.basis)
    tensor = np.zeros((len(donor_local), len(acc_local), len(acc_local)), dtype=np.complex128)
    for amp, terms in zip(psi.amplitudes, factors):
        for idx, weight in terms:
            tensor[idx] += weight * amp
    axis = _KEEP[keep]
    moved = np.moveaxis(tensor, axis, 0).reshape(tensor.shape[axis], -1)
    rho = moved @ moved.conj().T
    local = donor_local if axis == 0 else acc_local
    return DensityOperator(LabeledBasis(local), rho)


def population_by_label(traj: Trajectory, grouping: Callable | Iterable) -> np.ndarray:
    """Summed ``|amplitude|^2`` over a group of labels at every time.

    ``grouping`` is either a predicate on labels or a collection of labels.
    Results are clipped to [0, 1] so rounding never reports 1 + 2e-16.
    """
    if callable(grouping):
        idx = [k for k, label in enumerate(traj.basis) if grouping(label)]
    else:
        idx = [traj.basis.index(label) for label in grouping]
    if not idx:
        raise ValueError("population group selects no basis labels")
    return np.clip(np.sum(np.abs(traj.amplitudes[:, idx]) ** 2, axis=1), 0.0, 1.0)


def is_allowed_pair(label, arm_count: int) -> bool:
    return isinstance(label, AcceptorPairEam) and wrap_eam(label.q1 + label.q2, arm_count) == 0


def is_forbidden_pair(label, arm_count: int) -> bool:
    return isinstance(label, AcceptorPairEam) and wrap_eam(label.q1 + label.q2, arm_count) != 0
