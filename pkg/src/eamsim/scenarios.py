"""Scenario runners: simulate, then write CSV series and a flat run summary.

Every CSV has a one-line header and numbers printed with 17 significant
digits.  The summary file holds the echoed configuration followed by the
derived results, one ``key = value`` per line.
"""
from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, format_config, format_number
from .dynamics import (
    StateVector,
    evolve,
    fit_oscillation_frequency,
    max_bell_population,
    rabi_frequency,
    two_level_amplitudes,
)
from .hamiltonian import (
    AcceptorPairEam,
    BellPair,
    ChainDonor,
    ChainPair,
    DonorEam,
    build_arm_sector,
    build_chain,
    build_eam_pair,
    build_two_level,
    eam_embedding,
    eam_pair_basis,
)
from .model import eam_window, mode_energy, wrap_eam
from .observables import (
    is_forbidden_pair,
    partial_trace,
    population_by_label,
    selection_table,
    two_level_entropy,
    von_neumann_entropy,
)

log = logging.getLogger(__name__)

MIN_SAMPLES_PER_PERIOD = 40


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return format_number(complex(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], columns: list) -> None:
    cols = [np.asarray(c) for c in columns]
    rows = len(cols[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(rows):
            fh.write(",".join(_fmt(c[k]) for c in cols) + "\n")


def write_summary(path: Path, cfg: ScenarioConfig, results: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_config(cfg))
        for key, value in results.items():
            fh.write(f"{key} = {value if isinstance(value, str) else _fmt(value)}\n")


def time_grid(cfg: ScenarioConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.t_max, cfg.samples)


def _check_resolution(times: np.ndarray, omega: float, what: str) -> None:
    if omega <= 0 or times.size < 2:
        return
    per_period = (2 * math.pi / omega) / (times[1] - times[0])
    if per_period < MIN_SAMPLES_PER_PERIOD:
        log.warning("%s: only %.1f samples per oscillation period (want >= %d)",
                    what, per_period, MIN_SAMPLES_PER_PERIOD)


def _entropy_profile(spec, times):
    _, u_a = two_level_amplitudes(spec, times)
    return two_level_entropy(u_a)


# --- triad ----------------------------------------------------------------

def run_triad(cfg: ScenarioConfig, out_dir: Path) -> dict:
    """Three-arm triad: effective two-level model next to the full arm-sector oracle."""
    out_dir = Path(out_dir)
    spec = cfg.triad()
    times = time_grid(cfg)
    omega = rabi_frequency(spec)
    _check_resolution(times, omega, "triad")

    two = build_two_level(spec)
    traj2 = evolve(two, StateVector.basis_state(two.basis, DonorEam(0)), times)
    donor2 = population_by_label(traj2, [DonorEam(0)])
    bell2 = population_by_label(traj2, [BellPair(1)])
    s1_two = two_level_entropy(traj2.column(BellPair(1)))

    arm = build_arm_sector(spec)
    u = eam_embedding(3)
    traj_arm = evolve(arm, StateVector(arm.basis, u[:, 0]), times)
    eam_amps = traj_arm.amplitudes @ u.conj()
    eam = eam_pair_basis(3)

    def pop(*labels):
        total = np.sum(np.abs(eam_amps[:, [eam.index(label) for label in labels]]) ** 2, axis=1)
        return np.clip(total, 0.0, 1.0)

    donor_arm = pop(DonorEam(0))
    bell_arm = pop(AcceptorPairEam(1, -1), AcceptorPairEam(-1, 1))
    zero_arm = pop(AcceptorPairEam(0, 0))
    s1_arm = two_level_entropy(np.sqrt(np.clip(bell_arm, 0.0, 1.0)))
    s1_full = np.array([von_neumann_entropy(partial_trace(st, "acceptor1")) for st in traj_arm.states])

    write_csv(
        out_dir / "triad_trajectory.csv",
        ["time", "donor_two_level", "bell_two_level", "s1_two_level",
         "donor_arm", "bell_arm", "zero_pair_arm", "s1_arm", "s1_full_trace_arm"],
        [times, donor2, bell2, s1_two, donor_arm, bell_arm, zero_arm, s1_arm, s1_full],
    )
    fitted = fit_oscillation_frequency(times, donor2)
    results = {
        "acceptor_mode_energy_q1": mode_energy(spec.acceptor, 1),
        "donor_mode_energy_q0": mode_energy(spec.donor, 0),
        "omega_qc": omega,
        "fitted_frequency": fitted,
        "frequency_relative_error": abs(fitted - omega) / omega if omega > 0 else 0.0,
        "max_bell_population_predicted": max_bell_population(spec),
        "max_entropy": float(np.max(s1_two)),
        "max_entropy_arm": float(np.max(s1_arm)),
        "max_entropy_full_trace_arm": float(np.max(s1_full)),
        "max_zero_pair_population_arm": float(np.max(zero_arm)),
        "norm_error_two_level": traj2.norm_error,
        "norm_error_arm": traj_arm.norm_error,
    }
    write_summary(out_dir / "triad_summary.txt", cfg, results)
    return results


# --- entropy map ----------------------------------------------------------

def entropy_map(cfg: ScenarioConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(times, gammas, S)`` with ``S[i, k]`` the acceptor entropy at ``times[i]``, ``gammas[k]``."""
    times = time_grid(cfg)
    gammas = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_samples)
    surface = np.column_stack([_entropy_profile(cfg.triad(detuning=g), times) for g in gammas])
    return times, gammas, surface


def run_entropy_map(cfg: ScenarioConfig, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    times, gammas, surface = entropy_map(cfg)
    _check_resolution(times, max(rabi_frequency(cfg.triad(detuning=g)) for g in gammas), "entropy-map")
    header = ["time"] + [f"s1_gamma={_fmt(g)}" for g in gammas]
    write_csv(out_dir / "entropy_map.csv", header, [times] + list(surface.T))

    maxima = surface.max(axis=0)
    predicted = [max_bell_population(cfg.triad(detuning=g)) for g in gammas]
    write_csv(
        out_dir / "entropy_map_maxima.csv",
        ["gamma", "max_s1", "max_bell_population_predicted", "omega_qc"],
        [gammas, maxima, predicted, [rabi_frequency(cfg.triad(detuning=g)) for g in gammas]],
    )
    results = {
        "min_entropy": float(surface.min()),
        "max_entropy": float(surface.max()),
        "max_entropy_at_t0": float(np.max(surface[0])),
        "gamma_of_max_entropy": float(gammas[int(np.argmax(maxima))]),
    }
    write_summary(out_dir / "entropy_map_summary.txt", cfg, results)
    return results


# --- chain ----------------------------------------------------------------

def wavefront(populations: np.ndarray, threshold: float) -> np.ndarray:
    """Outermost pair index ``n`` whose population reaches ``threshold`` (0 if none).

    ``populations`` has shape ``(times, L)`` with column ``n-1`` for ``ChainPair(n)``.
    """
    above = populations >= threshold
    n = populations.shape[1]
    last = n - np.argmax(above[:, ::-1], axis=1)
    return np.where(above.any(axis=1), last, 0)


def site_populations(pair_pops: np.ndarray, donor_pop: np.ndarray) -> np.ndarray:
    """Mirror pair populations onto sites ``-L..L``; site 0 carries the donor."""
    return np.column_stack([pair_pops[:, ::-1], donor_pop, pair_pops])


def run_chain(cfg: ScenarioConfig, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    chain = cfg.chain()
    times = time_grid(cfg)
    h = build_chain(chain)
    traj = evolve(h, StateVector.basis_state(h.basis, ChainDonor()), times)
    pops = traj.populations
    donor, pairs = pops[:, 0], pops[:, 1:]
    total = pops.sum(axis=1)
    front = wavefront(pairs, cfg.wavefront_threshold)
    L = chain.half_length

    write_csv(
        out_dir / "chain_populations.csv",
        ["time", "donor"] + [f"pair_{n}" for n in range(1, L + 1)] + ["total", "wavefront"],
        [times, donor] + list(pairs.T) + [total, front],
    )
    sites = site_populations(pairs, donor)
    write_csv(
        out_dir / "chain_sites.csv",
        ["time"] + [f"site_{n}" for n in range(-L, L + 1)],
        [times] + list(sites.T),
    )

    speed_limit = 2.0 * abs(chain.eta)
    moving = (front > 0) & (front < L)
    speed = float(np.polyfit(times[moving], front[moving], 1)[0]) if moving.sum() >= 2 else float("nan")
    results = {
        "site_count": chain.site_count,
        "donor_coupling": h.element(ChainPair(1), ChainDonor()),
        "norm_error": float(np.max(np.abs(total - 1.0))),
        "light_cone_speed": speed_limit,
        "wavefront_speed": speed,
        "max_light_cone_excess": float(np.max(front - (speed_limit * times + 2.0))),
        "final_donor_population": float(donor[-1]),
        "max_mirror_asymmetry": float(np.max(np.abs(sites - sites[:, ::-1]))),
    }
    write_summary(out_dir / "chain_summary.txt", cfg, results)
    return results


# --- five arm -------------------------------------------------------------

def run_five_arm(cfg: ScenarioConfig, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    spec = cfg.triad()
    n = spec.arm_count
    times = time_grid(cfg)
    h = build_eam_pair(spec)
    traj = evolve(h, StateVector.basis_state(h.basis, DonorEam(0)), times)

    def pair(q1, q2):
        return population_by_label(traj, [AcceptorPairEam(q1, q2)])

    columns = {"donor": population_by_label(traj, [DonorEam(0)])}
    magnitudes = [q for q in eam_window(n) if q > 0]
    for q in magnitudes:
        columns[f"pairs_pm{q}"] = pair(q, -q) + pair(-q, q)
    columns["pair_0_0"] = pair(0, 0)
    for q in magnitudes:
        columns[f"pair_+{q}_-{q}"] = pair(q, -q)
        columns[f"pair_-{q}_+{q}"] = pair(-q, q)
    forbidden = [k for k, label in enumerate(traj.basis) if is_forbidden_pair(label, n)]
    columns["forbidden_max"] = np.max(traj.populations[:, forbidden], axis=1)
    columns["total"] = traj.populations.sum(axis=1)

    write_csv(out_dir / "five_arm_populations.csv", ["time"] + list(columns), [times] + list(columns.values()))

    asym = max(float(np.max(np.abs(pair(q, -q) - pair(-q, q)))) for q in magnitudes)
    results = {
        "donor_energy": float(h.element(DonorEam(0), DonorEam(0)).real),
        **{f"pair_energy_pm{q}": 2.0 * mode_energy(spec.acceptor, q) for q in [0] + magnitudes},
        **{f"max_population_pm{q}": float(np.max(columns[f"pairs_pm{q}"])) for q in magnitudes},
        "max_population_0_0": float(np.max(columns["pair_0_0"])),
        "min_donor_population": float(np.min(columns["donor"])),
        "max_forbidden_population": float(np.max(columns["forbidden_max"])),
        "max_pair_asymmetry": asym,
        "norm_error": traj.norm_error,
    }
    write_summary(out_dir / "five_arm_summary.txt", cfg, results)
    return results


# --- selection table ------------------------------------------------------

def arm_basis_qc_elements(spec) -> dict:
    """``<pair (q1,q2)| H_arm |donor q=0>`` from the arm-sector matrix and twisted states."""
    n = spec.arm_count
    h = build_arm_sector(spec).matrix
    u = eam_embedding(n)
    basis = eam_pair_basis(n)
    donor = u[:, 0]
    return {
        (label.q1, label.q2): complex(np.vdot(u[:, k], h @ donor))
        for k, label in enumerate(basis)
        if isinstance(label, AcceptorPairEam)
    }


def run_selection_table(cfg: ScenarioConfig, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    spec = cfg.triad()
    n = spec.arm_count
    table = selection_table(spec.qc_element, n)
    oracle = arm_basis_qc_elements(spec)
    pairs = list(table.entries)
    values = [table.entries[p] for p in pairs]
    write_csv(
        out_dir / "selection_table.csv",
        ["q1", "q2", "real", "imag", "magnitude", "allowed", "arm_basis_magnitude"],
        [
            [p[0] for p in pairs], [p[1] for p in pairs],
            [v.real for v in values], [v.imag for v in values], [abs(v) for v in values],
            [wrap_eam(p[0] + p[1], n) == 0 for p in pairs],
            [abs(oracle[p]) for p in pairs],
        ],
    )
    deviation = max(abs(table.entries[p] - oracle[p]) for p in pairs)
    allowed = table.allowed()
    conserved = table.conserves_eam() and deviation <= 1e-12 * max(abs(spec.qc_element), 1.0)
    results = {
        "allowed_pairs": len(allowed),
        "total_pairs": len(pairs),
        "allowed_magnitude": abs(spec.qc_element) / math.sqrt(n),
        "max_arm_basis_deviation": deviation,
        "verdict": "EAM conserved" if conserved else "EAM NOT conserved",
    }
    write_summary(out_dir / "selection_table_summary.txt", cfg, results)
    return results


RUNNERS = {
    "triad": run_triad,
    "entropy-map": run_entropy_map,
    "chain": run_chain,
    "five-arm": run_five_arm,
    "selection-table": run_selection_table,
}
