"""Labeled dense Hamiltonians for the cutting triad, its reduced models and the chain.

Canonical orderings (frozen, golden files depend on them):

* arm sector:  ``DonorArm(1..N)`` then ``AcceptorPairArms(s, t)`` with ``s`` major
* EAM pairs:   ``DonorEam(0)`` then ``AcceptorPairEam(q1, q2)`` lexicographic over the window
* two level:   ``BellPair(1)`` then ``DonorEam(0)``
* chain:       ``ChainDonor()`` then ``ChainPair(1..L)``
"""
from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import BasisMismatch, ContractViolation, UnsupportedConfiguration
from .model import (
    ChainSpec,
    MoleculeSpec,
    TriadSpec,
    bell_coupling,
    eam_window,
    mode_energy,
)

HERMITIAN_RTOL = 1e-12


# --- basis labels ---------------------------------------------------------

@dataclass(frozen=True)
class Arm:
    """Single excitation on arm ``j`` of an isolated molecule."""
    j: int
    family: ClassVar[str] = "molecule"


@dataclass(frozen=True)
class DonorArm:
    j: int
    family: ClassVar[str] = "arm"


@dataclass(frozen=True)
class AcceptorPairArms:
    s: int
    t: int
    family: ClassVar[str] = "arm"


@dataclass(frozen=True)
class DonorEam:
    q: int
    family: ClassVar[str] = "eam"


@dataclass(frozen=True)
class AcceptorPairEam:
    q1: int
    q2: int
    family: ClassVar[str] = "eam"


@dataclass(frozen=True)
class BellPair:
    """Symmetric combination ``(|q,-q> + |-q,q>)/sqrt(2)`` of acceptor EAM pairs."""
    q: int
    family: ClassVar[str] = "eam"


@dataclass(frozen=True)
class ChainDonor:
    family: ClassVar[str] = "chain"


@dataclass(frozen=True)
class ChainPair:
    """Bell pair shared by chain sites ``-n`` and ``+n``."""
    n: int
    family: ClassVar[str] = "chain"


class LabeledBasis(Sequence):
    """Ordered, duplicate-free list of labels defining matrix and vector indices."""

    def __init__(self, labels: Iterable[Hashable]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("a basis needs at least one label")
        index = {label: k for k, label in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("basis labels must be distinct")
        families = {getattr(label, "family", None) for label in labels}
        if len(families) != 1:
            raise ValueError(f"basis mixes label families {sorted(map(str, families))}")
        self._labels = labels
        self._index = index

    def __getitem__(self, k):
        return self._labels[k]

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledBasis):
            return NotImplemented
        return self._labels == other._labels

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        return f"LabeledBasis({list(self._labels)!r})"

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def dim(self) -> int:
        return len(self._labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} not in basis") from None


def _hermiticity_error(matrix: np.ndarray) -> tuple[float, float]:
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    return float(np.max(np.abs(matrix - matrix.conj().T))), scale


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense complex Hermitian matrix indexed by a :class:`LabeledBasis`.

    The matrix is copied and made read-only on construction.
    """

    basis: LabeledBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        n = self.basis.dim
        if m.shape != (n, n):
            raise BasisMismatch(f"matrix shape {m.shape} does not match basis dimension {n}")
        err, scale = _hermiticity_error(m)
        if err > HERMITIAN_RTOL * scale:
            raise ContractViolation(f"operator is not Hermitian: max|H - H^dag| = {err:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def element(self, row, col) -> complex:
        return complex(self.matrix[self.basis.index(row), self.basis.index(col)])

    def restrict(self, labels: Iterable) -> HermitianOperator:
        """Submatrix on ``labels`` (kept in the given order)."""
        sub = LabeledBasis(labels)
        idx = [self.basis.index(label) for label in sub]
        return HermitianOperator(sub, self.matrix[np.ix_(idx, idx)])

    def transform(self, embedding: np.ndarray, basis: LabeledBasis) -> HermitianOperator:
        """Return ``U^dag H U`` where the columns of ``embedding`` span ``basis``."""
        u = np.asarray(embedding)
        if u.shape != (self.dim, basis.dim):
            raise BasisMismatch(f"embedding shape {u.shape} incompatible with {self.dim} -> {basis.dim}")
        return HermitianOperator(basis, u.conj().T @ self.matrix @ u)

    def expectation(self, amplitudes: np.ndarray) -> float:
        v = np.asarray(amplitudes)
        return float(np.real(np.vdot(v, self.matrix @ v)))


# --- builders -------------------------------------------------------------

def _odd_arm_count(spec: TriadSpec) -> int:
    n = spec.arm_count
    eam_window(n)
    return n


def _require_three_arms(spec: TriadSpec, what: str) -> None:
    if spec.arm_count != 3:
        raise UnsupportedConfiguration(f"{what} is defined for three-arm molecules only (N={spec.arm_count})")


def ring_matrix(arm_count: int, delta: float, tau: complex) -> np.ndarray:
    """Single-excitation ring Hamiltonian: ``delta`` on site, ``tau`` from arm j to j+1."""
    h = np.diag(np.full(arm_count, delta, dtype=np.complex128))
    for j in range(arm_count):
        k = (j + 1) % arm_count
        h[k, j] += tau
        h[j, k] += np.conj(tau)
    return h


def build_molecule(molecule: MoleculeSpec) -> HermitianOperator:
    """Isolated molecule in its single-arm-excitation basis ``Arm(1..N)``."""
    n = molecule.arm_count
    basis = LabeledBasis(Arm(j) for j in range(1, n + 1))
    return HermitianOperator(basis, ring_matrix(n, molecule.delta, molecule.tau))


def arm_sector_basis(arm_count: int) -> LabeledBasis:
    n = arm_count
    labels = [DonorArm(j) for j in range(1, n + 1)]
    labels += [AcceptorPairArms(s, t) for s in range(1, n + 1) for t in range(1, n + 1)]
    return LabeledBasis(labels)


def build_arm_sector(spec: TriadSpec) -> HermitianOperator:
    """Triad Hamiltonian on {donor arm excited} + {one excitation on each acceptor}.

    Dimension ``N + N**2``.  The cutting term links ``DonorArm(j)`` only to
    ``AcceptorPairArms(j, j)``.  The detuning factor is not applied here; it
    belongs to the reduced models.
    """
    n = _odd_arm_count(spec)
    donor = ring_matrix(n, spec.donor.delta, spec.donor.tau)
    single = ring_matrix(n, spec.acceptor.delta, spec.acceptor.tau)
    eye = np.eye(n)
    pairs = np.kron(single, eye) + np.kron(eye, single)

    h = np.zeros((n + n * n, n + n * n), dtype=np.complex128)
    h[:n, :n] = donor
    h[n:, n:] = pairs
    m = spec.qc_element
    for j in range(n):
        row = n + j * n + j
        h[row, j] = m
        h[j, row] = np.conj(m)
    return HermitianOperator(arm_sector_basis(n), h)


def eam_pair_basis(arm_count: int) -> LabeledBasis:
    window = eam_window(arm_count)
    labels = [DonorEam(0)] + [AcceptorPairEam(q1, q2) for q1 in window for q2 in window]
    return LabeledBasis(labels)


def build_eam_pair(spec: TriadSpec) -> HermitianOperator:
    """Zero-EAM donor plus every acceptor EAM pair, dimension ``N**2 + 1``."""
    # local import: observables imports this module
    from .observables import qc_matrix_element

    n = _odd_arm_count(spec)
    basis = eam_pair_basis(n)
    h = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    h[0, 0] = spec.detuning * mode_energy(spec.donor, 0)
    energies = {q: mode_energy(spec.acceptor, q) for q in eam_window(n)}
    for k, label in enumerate(basis):
        if k == 0:
            continue
        h[k, k] = energies[label.q1] + energies[label.q2]
        g = qc_matrix_element(label.q1, label.q2, spec.qc_element, n)
        h[k, 0] = g
        h[0, k] = np.conj(g)
    return HermitianOperator(basis, h)


def two_level_basis() -> LabeledBasis:
    return LabeledBasis([BellPair(1), DonorEam(0)])


def build_two_level(spec: TriadSpec) -> HermitianOperator:
    """Effective 2x2 model on (Bell acceptor pair, donor).

    Both diagonal entries are built from the acceptor energy ``2 E_1``; the donor
    entry is ``detuning * 2 E_1``, so this matches the EAM-pair model only for a
    resonant donor.
    """
    _require_three_arms(spec, "the two-level model")
    e2 = 2.0 * mode_energy(spec.acceptor, 1)
    g = bell_coupling(spec.qc_element)
    h = np.array([[e2, g], [np.conj(g), spec.detuning * e2]], dtype=np.complex128)
    return HermitianOperator(two_level_basis(), h)


def chain_basis(half_length: int) -> LabeledBasis:
    return LabeledBasis([ChainDonor()] + [ChainPair(n) for n in range(1, half_length + 1)])


def literal_chain_coupling(qc_element: complex) -> complex:
    """Alternative donor-to-pair coupling ``3 M`` (unnormalized pair operators)."""
    return 3.0 * complex(qc_element)


def build_chain(chain: ChainSpec) -> HermitianOperator:
    """Donor plus ``L`` Bell-pair sites coupled by nearest-neighbour ``eta``; dimension ``L + 1``."""
    spec = chain.triad
    _require_three_arms(spec, "the chain model")
    n_pairs = chain.half_length
    e2 = 2.0 * mode_energy(spec.acceptor, 1)
    g = bell_coupling(spec.qc_element) if chain.coupling is None else chain.coupling

    h = np.zeros((n_pairs + 1, n_pairs + 1), dtype=np.complex128)
    h[0, 0] = spec.detuning * e2
    h[1:, 1:] = e2 * np.eye(n_pairs)
    h[1, 0] = g
    h[0, 1] = np.conj(g)
    for k in range(1, n_pairs):
        h[k + 1, k] = chain.eta
        h[k, k + 1] = np.conj(chain.eta)
    return HermitianOperator(chain_basis(n_pairs), h)


# --- embeddings between bases ---------------------------------------------

def twisted_state(arm_count: int, q: int) -> np.ndarray:
    """Arm amplitudes ``exp(2 pi i (j-1) q / N) / sqrt(N)`` of the EAM-``q`` exciton."""
    j = np.arange(arm_count)
    return np.exp(2j * np.pi * j * q / arm_count) / math.sqrt(arm_count)


def eam_embedding(arm_count: int) -> np.ndarray:
    """Columns: EAM-pair basis states written in the arm-sector basis.

    Shape ``(N + N**2, N**2 + 1)``; ``U^dag H_arm U`` gives the EAM-pair model
    (at unit detuning).
    """
    n = arm_count
    arm = arm_sector_basis(n)
    eam = eam_pair_basis(n)
    u = np.zeros((arm.dim, eam.dim), dtype=np.complex128)
    u[:n, 0] = twisted_state(n, 0)
    for k, label in enumerate(eam):
        if k == 0:
            continue
        u[n:, k] = np.kron(twisted_state(n, label.q1), twisted_state(n, label.q2))
    return u


def bell_embedding() -> np.ndarray:
    """Columns: two-level basis states written in the three-arm EAM-pair basis."""
    eam = eam_pair_basis(3)
    u = np.zeros((eam.dim, 2), dtype=np.complex128)
    u[eam.index(AcceptorPairEam(1, -1)), 0] = 1 / math.sqrt(2)
    u[eam.index(AcceptorPairEam(-1, 1)), 0] = 1 / math.sqrt(2)
    u[eam.index(DonorEam(0)), 1] = 1.0
    return u
