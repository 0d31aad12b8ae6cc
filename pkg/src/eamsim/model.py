"""Molecule and assembly parameters plus closed-form single-molecule quantities.

Units: hbar = 1 and every energy is expressed in one caller-chosen reference
unit, so times come out in the inverse of that unit.

An EAM (excitonic angular momentum) label is a plain ``int`` restricted to the
symmetric window ``-(N-1)/2 .. (N-1)/2`` of an ``N``-arm molecule; arithmetic on
labels is modulo ``N`` (see :func:`wrap_eam`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EamDomainError, UnsupportedConfiguration

__all__ = [
    "MoleculeSpec",
    "TriadSpec",
    "ChainSpec",
    "eam_window",
    "wrap_eam",
    "check_eam",
    "mode_energy",
    "resonant_donor_delta",
    "resonant_triad",
    "bell_coupling",
]


def _finite_complex(value, name: str) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return z


@dataclass(frozen=True)
class MoleculeSpec:
    """Tight-binding data of one centrosymmetric molecule.

    Parameters
    ----------
    arm_count : int
        Number of arms ``N`` (>= 3).
    delta : float
        Excitation energy of a single arm.
    tau : complex
        Nearest-neighbour arm-to-arm hopping.  Only ``|tau|`` enters the mode
        energies; the phase is kept for the arm-basis builders.
    """

    arm_count: int
    delta: float
    tau: complex = 0.0

    def __post_init__(self):
        if isinstance(self.arm_count, bool) or int(self.arm_count) != self.arm_count:
            raise ValueError(f"arm_count must be an integer, got {self.arm_count!r}")
        if self.arm_count < 3:
            raise ValueError(f"arm_count must be >= 3, got {self.arm_count}")
        object.__setattr__(self, "arm_count", int(self.arm_count))
        delta = float(self.delta)
        if not math.isfinite(delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "tau", _finite_complex(self.tau, "tau"))


@dataclass(frozen=True)
class TriadSpec:
    """Donor sandwiched between two identical acceptors.

    ``qc_element`` is the arm-to-arm cutting matrix element and ``detuning`` the
    dimensionless factor multiplying the donor energy in the reduced models
    (1.0 is resonance).
    """

    donor: MoleculeSpec
    acceptor: MoleculeSpec
    qc_element: complex
    detuning: float = 1.0

    def __post_init__(self):
        if self.donor.arm_count != self.acceptor.arm_count:
            raise ValueError(
                "donor and acceptor must have the same arm count "
                f"({self.donor.arm_count} != {self.acceptor.arm_count})"
            )
        object.__setattr__(self, "qc_element", _finite_complex(self.qc_element, "qc_element"))
        gamma = float(self.detuning)
        if not (math.isfinite(gamma) and gamma > 0):
            raise ValueError(f"detuning must be a positive finite number, got {self.detuning!r}")
        object.__setattr__(self, "detuning", gamma)

    @property
    def arm_count(self) -> int:
        return self.donor.arm_count


@dataclass(frozen=True)
class ChainSpec:
    """Triad extended by ``half_length`` acceptor sites on each side.

    ``coupling`` overrides the donor-to-first-pair matrix element; ``None``
    selects the Bell-state normalization ``M*sqrt(2/3)``.
    """

    triad: TriadSpec
    half_length: int
    eta: complex
    coupling: complex | None = None

    def __post_init__(self):
        if isinstance(self.half_length, bool) or int(self.half_length) != self.half_length:
            raise ValueError(f"half_length must be an integer, got {self.half_length!r}")
        if self.half_length < 1:
            raise ValueError(f"half_length must be >= 1, got {self.half_length}")
        object.__setattr__(self, "half_length", int(self.half_length))
        object.__setattr__(self, "eta", _finite_complex(self.eta, "eta"))
        if self.coupling is not None:
            object.__setattr__(self, "coupling", _finite_complex(self.coupling, "coupling"))

    @property
    def site_count(self) -> int:
        return 2 * self.half_length + 1


def eam_window(arm_count: int) -> list[int]:
    """Allowed EAM labels of an ``arm_count``-arm molecule, ascending.

    Only odd arm counts have an integer symmetric window; even ones raise
    :class:`UnsupportedConfiguration`.

    >>> eam_window(3)
    [-1, 0, 1]
    """
    if isinstance(arm_count, bool) or int(arm_count) != arm_count or arm_count < 3:
        raise UnsupportedConfiguration(f"arm count must be an integer >= 3, got {arm_count!r}")
    if arm_count % 2 == 0:
        raise UnsupportedConfiguration(
            f"even arm count {arm_count} has no symmetric integer EAM window; use odd N"
        )
    half = (int(arm_count) - 1) // 2
    return list(range(-half, half + 1))


def wrap_eam(q: int, arm_count: int) -> int:
    """Map any integer onto the EAM window by adding multiples of ``arm_count``."""
    half = (arm_count - 1) // 2
    return (int(q) + half) % arm_count - half


def check_eam(q: int, arm_count: int) -> int:
    window = eam_window(arm_count)
    if q not in window:
        raise EamDomainError(f"EAM {q!r} outside window [{window[0]}, {window[-1]}] for N={arm_count}")
    return int(q)


def mode_energy(molecule: MoleculeSpec, q: int) -> float:
    """Energy ``delta + 2|tau| cos(2 pi q / N)`` of the twisted exciton with EAM ``q``."""
    n = molecule.arm_count
    check_eam(q, n)
    return molecule.delta + 2.0 * abs(molecule.tau) * math.cos(2.0 * math.pi * q / n)


def resonant_donor_delta(acceptor: MoleculeSpec, donor_tau: complex, eam: int = 1) -> float:
    """Donor arm energy that puts the zero-EAM donor state on resonance.

    The returned value satisfies ``mode_energy(donor, 0) == 2 * mode_energy(acceptor, eam)``.
    For three arms and ``eam=1`` this is ``2 (delta_1 - |tau_1|) - 2 |tau_0|``.
    """
    return 2.0 * mode_energy(acceptor, eam) - 2.0 * abs(complex(donor_tau))


def resonant_triad(
    acceptor: MoleculeSpec,
    qc_element: complex,
    donor_tau: complex | None = None,
    detuning: float = 1.0,
    eam: int = 1,
) -> TriadSpec:
    """Build a triad whose donor is resonant with the ``(eam, -eam)`` acceptor pair.

    ``donor_tau`` defaults to the acceptor hopping.
    """
    if donor_tau is None:
        donor_tau = acceptor.tau
    delta0 = resonant_donor_delta(acceptor, donor_tau, eam)
    donor = MoleculeSpec(acceptor.arm_count, delta0, donor_tau)
    return TriadSpec(donor, acceptor, qc_element, detuning)


def bell_coupling(qc_element: complex) -> complex:
    """Donor to symmetric Bell pair matrix element ``M sqrt(2/3)`` of the three-arm triad."""
    return complex(qc_element) * math.sqrt(2.0 / 3.0)
