"""Exact propagation by spectral decomposition and the closed-form two-level solution."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .errors import BasisMismatch, ContractViolation, UnsupportedConfiguration
from .hamiltonian import HermitianOperator, LabeledBasis, _hermiticity_error, HERMITIAN_RTOL
from .model import TriadSpec, bell_coupling, mode_energy

NORM_TOL = 1e-10
SPECTRUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: LabeledBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128)
        if v.shape != (self.basis.dim,):
            raise BasisMismatch(f"amplitude shape {v.shape} does not match basis dimension {self.basis.dim}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > NORM_TOL:
            raise ContractViolation(f"state is not normalized (norm {norm!r})")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def basis_state(cls, basis: LabeledBasis, label) -> StateVector:
        v = np.zeros(basis.dim, dtype=np.complex128)
        v[basis.index(label)] = 1.0
        return cls(basis, v)

    def amplitude(self, label) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def population(self, label) -> float:
        return abs(self.amplitude(label)) ** 2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Amplitudes on a time grid; row ``k`` of ``amplitudes`` is the state at ``times[k]``."""

    basis: LabeledBasis
    times: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        a = np.array(self.amplitudes, dtype=np.complex128)
        if t.ndim != 1 or a.shape != (t.size, self.basis.dim):
            raise BasisMismatch(f"amplitudes {a.shape} do not match {t.size} times x {self.basis.dim} labels")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        err = self.norm_error_of(a)
        if err > NORM_TOL:
            raise ContractViolation(f"trajectory lost normalization (max error {err:.3e})")
        t.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amplitudes", a)

    @staticmethod
    def norm_error_of(amplitudes: np.ndarray) -> float:
        if amplitudes.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.norm(amplitudes, axis=1) - 1.0)))

    def __len__(self) -> int:
        return self.times.size

    @property
    def norm_error(self) -> float:
        return self.norm_error_of(self.amplitudes)

    @property
    def populations(self) -> np.ndarray:
        """``|amplitude|^2`` per label, clipped to [0, 1] against rounding."""
        return np.clip(np.abs(self.amplitudes) ** 2, 0.0, 1.0)

    def state(self, k: int) -> StateVector:
        return StateVector(self.basis, self.amplitudes[k])

    @property
    def states(self) -> list[StateVector]:
        return [self.state(k) for k in range(len(self))]

    def column(self, label) -> np.ndarray:
        return self.amplitudes[:, self.basis.index(label)]


@dataclass(frozen=True, eq=False)
class Spectrum:
    basis: LabeledBasis
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigendecompose(op: HermitianOperator) -> Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian operator."""
    h = op.matrix
    err, scale = _hermiticity_error(h)
    if err > HERMITIAN_RTOL * scale:
        raise ContractViolation(f"eigendecompose needs a Hermitian matrix (max|H - H^dag| = {err:.3e})")
    evals, evecs = np.linalg.eigh(h)
    hnorm = max(float(np.linalg.norm(h, 2)), 1e-300)
    resid = np.linalg.norm(h @ evecs - evecs * evals, axis=0)
    if resid.size and resid.max() > SPECTRUM_TOL * max(hnorm, 1.0):
        raise ContractViolation(f"eigenpair residual {resid.max():.3e} too large")
    unit_err = np.max(np.abs(evecs.conj().T @ evecs - np.eye(op.dim)))
    if unit_err > SPECTRUM_TOL:
        raise ContractViolation(f"eigenvectors not unitary (error {unit_err:.3e})")
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return Spectrum(op.basis, evals, evecs)


def evolve(op: HermitianOperator, psi0: StateVector, times, spectrum: Spectrum | None = None) -> Trajectory:
    """Propagate ``psi0`` under ``op`` to every time in ``times``.

    Uses ``psi(t) = sum_k v_k exp(-i lambda_k t) <v_k|psi0>``; the row at
    ``t == 0`` is ``psi0`` itself.
    """
    if psi0.basis != op.basis:
        raise BasisMismatch("initial state and Hamiltonian live in different bases")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if spectrum is None:
        spectrum = eigendecompose(op)
    v = spectrum.eigenvectors
    coeffs = v.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, spectrum.eigenvalues))
    amps = (phases * coeffs) @ v.T
    amps[times == 0.0] = psi0.amplitudes
    return Trajectory(op.basis, times, amps)


def rabi_frequency(spec: TriadSpec) -> float:
    """Population-transfer frequency of the effective two-level model.

    ``2 sqrt((2|M|^2 + 3 (gamma-1)^2 E_1^2) / 3)`` with ``E_1`` the acceptor q=1 energy.
    """
    if spec.arm_count != 3:
        raise UnsupportedConfiguration("the Rabi frequency formula is for three-arm triads")
    e1 = mode_energy(spec.acceptor, 1)
    m2 = abs(spec.qc_element) ** 2
    return 2.0 * math.sqrt((2.0 * m2 + 3.0 * (spec.detuning - 1.0) ** 2 * e1 ** 2) / 3.0)


def two_level_amplitudes(spec: TriadSpec, t):
    """Closed-form ``(u_d(t), u_a(t))`` for a donor that is fully excited at ``t = 0``.

    ``u_d`` is the donor amplitude, ``u_a`` the amplitude of the symmetric Bell
    pair.  ``t`` may be a scalar or an array.
    """
    if spec.arm_count != 3:
        raise UnsupportedConfiguration("the two-level model is for three-arm triads")
    e2 = 2.0 * mode_energy(spec.acceptor, 1)
    bell_energy, donor_energy = e2, spec.detuning * e2
    g = bell_coupling(spec.qc_element)
    mean = 0.5 * (bell_energy + donor_energy)
    half_split = 0.5 * (donor_energy - bell_energy)
    omega = math.hypot(half_split, abs(g))

    t = np.asarray(t, dtype=float)
    # sin(omega t) / omega, finite as omega -> 0
    sin_over = t * np.sinc(omega * t / np.pi)
    carrier = np.exp(-1j * mean * t)
    u_d = carrier * (np.cos(omega * t) - 1j * half_split * sin_over)
    u_a = carrier * (-1j * g * sin_over)
    if u_d.ndim == 0:
        return complex(u_d), complex(u_a)
    return u_d, u_a


def max_bell_population(spec: TriadSpec) -> float:
    """Peak Bell population ``(2|M|^2/3) / (2|M|^2/3 + ((gamma-1) E_1)^2)``."""
    e1 = mode_energy(spec.acceptor, 1)
    coupling = 2.0 * abs(spec.qc_element) ** 2 / 3.0
    detune = ((spec.detuning - 1.0) * e1) ** 2
    if coupling == 0.0:
        return 0.0
    return coupling / (coupling + detune)


def fit_oscillation_frequency(times, series) -> float:
    """Angular frequency of a single-tone signal ``a + b cos(w t) + c sin(w t)``.

    A zero-padded FFT peak gives the starting guess, then a least-squares fit
    refines it.  A flat series returns 0.0.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(series, dtype=float)
    if t.size < 4:
        raise ValueError("need at least four samples to fit a frequency")
    centred = y - y.mean()
    if np.max(np.abs(centred)) < 1e-12:
        return 0.0
    dt = float(np.mean(np.diff(t)))
    n_fft = 8 * int(2 ** math.ceil(math.log2(t.size)))
    spectrum = np.abs(np.fft.rfft(centred * np.hanning(t.size), n_fft))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n_fft, dt)
    spectrum[0] = 0.0
    w0 = float(freqs[np.argmax(spectrum)])

    def tone(x, a, b, c, w):
        return a + b * np.cos(w * x) + c * np.sin(w * x)

    guess = [y.mean(), float(np.max(centred)), 0.0, w0]
    with warnings.catch_warnings():
        # a noiseless tone fits exactly and leaves the covariance undefined
        warnings.simplefilter("ignore", OptimizeWarning)
        params, _ = curve_fit(tone, t, y, p0=guess, maxfev=20000)
    return abs(float(params[3]))
