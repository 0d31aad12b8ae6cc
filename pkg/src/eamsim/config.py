"""Flat ``key = value`` scenario configuration.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Complex values use Python syntax (``0.1+0.02j``).  ``delta_donor = resonant``
puts the donor on resonance with the ``(resonant_eam, -resonant_eam)`` pair.
``chain_coupling`` is ``bell`` (``M sqrt(2/3)``), ``literal`` (``3 M``) or a number.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, EamsimError
from .hamiltonian import literal_chain_coupling
from .model import ChainSpec, MoleculeSpec, TriadSpec, eam_window, resonant_donor_delta

KINDS = ("triad", "entropy-map", "chain", "five-arm", "selection-table")

_FIVE_ARM_DELTA = 1.0 / (1.0 + (2.0 / 15.0) * math.cos(2.0 * math.pi / 5.0))


@dataclass
class ScenarioConfig:
    kind: str = "triad"
    arm_count: int = 3
    delta_donor: float | None = None
    resonant_eam: int = 1
    tau_donor: complex = 0.1
    delta_acceptor: float = 1.1
    tau_acceptor: complex = 0.1
    qc_element: complex = 0.01
    detuning: float = 1.0
    eta: complex = 1.0
    half_length: int = 60
    chain_coupling: str | complex = "bell"
    t_max: float = 1000.0
    samples: int = 2001
    gamma_min: float = 0.8
    gamma_max: float = 1.2
    gamma_samples: int = 41
    wavefront_threshold: float = 1e-2

    def molecule(self, which: str) -> MoleculeSpec:
        if which == "acceptor":
            return MoleculeSpec(self.arm_count, self.delta_acceptor, self.tau_acceptor)
        delta = self.delta_donor
        if delta is None:
            delta = resonant_donor_delta(self.molecule("acceptor"), self.tau_donor, self.resonant_eam)
        return MoleculeSpec(self.arm_count, delta, self.tau_donor)

    def triad(self, detuning: float | None = None) -> TriadSpec:
        gamma = self.detuning if detuning is None else detuning
        return TriadSpec(self.molecule("donor"), self.molecule("acceptor"), self.qc_element, gamma)

    def chain(self) -> ChainSpec:
        coupling = self.chain_coupling
        if coupling == "bell":
            coupling = None
        elif coupling == "literal":
            coupling = literal_chain_coupling(self.qc_element)
        return ChainSpec(self.triad(), self.half_length, self.eta, coupling)


# Defaults per scenario.  Triad-type scenarios fix the energy unit so that the
# acceptor q=1 energy is 1; the chain fixes eta = 1.
KIND_DEFAULTS: dict[str, dict] = {
    "triad": dict(),
    "entropy-map": dict(qc_element=0.1, t_max=100.0, samples=2001),
    "chain": dict(
        delta_acceptor=0.6, tau_acceptor=0.1, qc_element=1.0 / 6.0,
        eta=1.0, half_length=60, t_max=40.0, samples=801,
    ),
    "five-arm": dict(
        arm_count=5, resonant_eam=2, delta_acceptor=_FIVE_ARM_DELTA,
        tau_acceptor=_FIVE_ARM_DELTA / 15.0, tau_donor=_FIVE_ARM_DELTA / 15.0,
        qc_element=0.05, detuning=1.077, t_max=300.0, samples=3001,
    ),
    "selection-table": dict(qc_element=1.0),
}

FIELD_NAMES = [f.name for f in dataclasses.fields(ScenarioConfig)]


def default_config(kind: str) -> ScenarioConfig:
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {', '.join(KINDS)}")
    return ScenarioConfig(kind=kind, **KIND_DEFAULTS[kind])


# --- value codecs ---------------------------------------------------------

def _parse_int(text: str) -> int:
    value = float(text) if any(c in text for c in ".eE") else int(text)
    if int(value) != value:
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _parse_complex(text: str) -> complex:
    value = complex(text.replace(" ", ""))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _parse_delta_donor(text: str):
    return None if text.lower() == "resonant" else _parse_float(text)


def _parse_coupling(text: str):
    lowered = text.lower()
    if lowered in ("bell", "literal"):
        return lowered
    return _parse_complex(text)


def _parse_kind(text: str) -> str:
    if text not in KINDS:
        raise ValueError(f"unknown scenario kind {text!r}")
    return text


_PARSERS = {
    "kind": _parse_kind,
    "arm_count": _parse_int,
    "delta_donor": _parse_delta_donor,
    "resonant_eam": _parse_int,
    "tau_donor": _parse_complex,
    "delta_acceptor": _parse_float,
    "tau_acceptor": _parse_complex,
    "qc_element": _parse_complex,
    "detuning": _parse_float,
    "eta": _parse_complex,
    "half_length": _parse_int,
    "chain_coupling": _parse_coupling,
    "t_max": _parse_float,
    "samples": _parse_int,
    "gamma_min": _parse_float,
    "gamma_max": _parse_float,
    "gamma_samples": _parse_int,
    "wavefront_threshold": _parse_float,
}


def format_number(x) -> str:
    """Shortest repr that round-trips; complex values without parentheses."""
    if isinstance(x, complex):
        if x.imag == 0.0:
            return repr(x.real)
        sign = "-" if math.copysign(1.0, x.imag) < 0 else "+"
        return f"{x.real!r}{sign}{abs(x.imag)!r}j"
    return repr(x)


def _format_value(key: str, value) -> str:
    if key == "delta_donor" and value is None:
        return "resonant"
    if isinstance(value, str):
        return value
    return format_number(value)


def format_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{key} = {_format_value(key, getattr(cfg, key))}\n" for key in FIELD_NAMES)


# --- parsing --------------------------------------------------------------

def _assign(cfg: ScenarioConfig, key: str, raw: str, where: str) -> None:
    if key not in _PARSERS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    if raw == "":
        raise ConfigError(f"{where}: {key}: missing value")
    try:
        setattr(cfg, key, _PARSERS[key](raw))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {key}: {exc}") from None


def _split(line: str, where: str) -> tuple[str, str]:
    if "=" not in line:
        raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
    key, raw = line.split("=", 1)
    return key.strip(), raw.strip()


def parse_config(text: str, kind: str | None = None, overrides=(), source: str = "config") -> ScenarioConfig:
    """Parse config text on top of the defaults for ``kind`` and validate it.

    ``kind`` comes from the command line; a ``kind`` key in the text must agree
    with it.  ``overrides`` are ``key=value`` strings applied last.
    """
    entries: list[tuple[str, str, str]] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        key, raw = _split(line, where)
        if key in seen:
            raise ConfigError(f"{where}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        entries.append((key, raw, where))

    file_kind = next((raw for key, raw, _ in entries if key == "kind"), None)
    if kind is None:
        kind = file_kind or "triad"
    elif file_kind is not None and file_kind != kind:
        raise ConfigError(f"{source}: kind {file_kind!r} in file does not match requested {kind!r}")

    cfg = default_config(kind)
    for key, raw, where in entries:
        _assign(cfg, key, raw, where)
    for n, item in enumerate(overrides, start=1):
        where = f"override {n}"
        key, raw = _split(item, where)
        if key == "kind":
            raise ConfigError(f"{where}: kind cannot be overridden")
        _assign(cfg, key, raw, where)
    validate(cfg)
    return cfg


def load_config(path: str | Path | None, kind: str, overrides=()) -> ScenarioConfig:
    if path is None:
        return parse_config("", kind, overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, kind, overrides, source=str(path))


_THREE_ARM_KINDS = ("triad", "entropy-map", "chain")


def validate(cfg: ScenarioConfig) -> None:
    """Raise :class:`ConfigError` naming the offending field."""
    def bad(key, msg):
        raise ConfigError(f"{key}: {msg}")

    try:
        eam_window(cfg.arm_count)
    except EamsimError as exc:
        bad("arm_count", str(exc))
    if cfg.kind in _THREE_ARM_KINDS and cfg.arm_count != 3:
        bad("arm_count", f"scenario {cfg.kind} needs arm_count = 3")
    if cfg.kind == "five-arm" and cfg.arm_count != 5:
        bad("arm_count", "scenario five-arm needs arm_count = 5")
    if cfg.resonant_eam not in eam_window(cfg.arm_count):
        bad("resonant_eam", f"{cfg.resonant_eam} outside the EAM window")
    if cfg.t_max <= 0:
        bad("t_max", "must be > 0")
    if cfg.samples < 2:
        bad("samples", "need at least 2 time samples")
    if cfg.half_length < 1:
        bad("half_length", "must be >= 1")
    if cfg.gamma_samples < 1:
        bad("gamma_samples", "need at least one detuning value")
    if cfg.gamma_min <= 0 or cfg.gamma_max < cfg.gamma_min:
        bad("gamma_min", "detuning range must satisfy 0 < gamma_min <= gamma_max")
    if cfg.gamma_samples > 1 and cfg.gamma_max == cfg.gamma_min:
        bad("gamma_max", "empty detuning range for more than one sample")
    if not cfg.wavefront_threshold > 0:
        bad("wavefront_threshold", "must be > 0")
    try:
        cfg.triad()
        if cfg.kind == "chain":
            cfg.chain()
    except ValueError as exc:
        bad("parameters", str(exc))
