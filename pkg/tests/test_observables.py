import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eamsim.dynamics import StateVector, evolve, rabi_frequency, two_level_amplitudes
from eamsim.errors import ContractViolation
from eamsim.hamiltonian import (
    AcceptorPairEam,
    ChainDonor,
    DonorEam,
    LabeledBasis,
    build_arm_sector,
    build_chain,
    build_eam_pair,
    eam_embedding,
    eam_pair_basis,
)
from eamsim.model import ChainSpec, MoleculeSpec, TriadSpec, eam_window, resonant_triad, wrap_eam
from eamsim.observables import (
    DensityOperator,
    LocalEam,
    LocalGround,
    is_forbidden_pair,
    partial_trace,
    population_by_label,
    qc_matrix_element,
    reduced_density_acceptor1,
    selection_table,
    two_level_entropy,
    von_neumann_entropy,
)

import oracles

M = 0.37 + 0.21j


# --- selection rule -------------------------------------------------------

def test_qc_element_allowed_three_arms():
    assert qc_matrix_element(1, -1, M, 3) == pytest.approx(M / math.sqrt(3), abs=1e-15)


def test_qc_element_forbidden_three_arms():
    assert qc_matrix_element(1, 1, M, 3) == 0


def test_qc_element_five_arms_brute_force():
    expected = M / 5 ** 1.5 * oracles.cyclic_sum(2 + -2, 5)
    assert qc_matrix_element(2, -2, M, 5) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(M / math.sqrt(5), abs=1e-15)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_qc_element_equals_cyclic_sum(n):
    for q1 in eam_window(n):
        for q2 in eam_window(n):
            expected = M / n ** 1.5 * oracles.cyclic_sum(q1 + q2, n)
            assert abs(qc_matrix_element(q1, q2, M, n) - expected) <= 1e-14


@pytest.mark.parametrize("n", [3, 5])
def test_selection_rule_from_explicit_arm_states(n):
    spec = TriadSpec(MoleculeSpec(n, 2.0, 0.13 + 0.02j), MoleculeSpec(n, 1.0, 0.07), M)
    h = build_arm_sector(spec).matrix
    for q1 in eam_window(n):
        for q2 in eam_window(n):
            assert abs(oracles.arm_matrix_element(h, n, q1, q2) - qc_matrix_element(q1, q2, M, n)) <= 1e-12


@pytest.mark.parametrize("n,allowed", [(3, 3), (5, 5), (7, 7)])
def test_selection_table_counts(n, allowed):
    table = selection_table(M, n)
    assert len(table.entries) == n * n
    assert len(table.allowed()) == allowed
    assert table.conserves_eam()
    for pair in table.allowed():
        assert wrap_eam(sum(pair), n) == 0
        assert abs(table.entries[pair]) == pytest.approx(abs(M) / math.sqrt(n), rel=1e-15)


# --- reduced density / entropy -------------------------------------------

@pytest.mark.parametrize(
    "u_a,diag",
    [(1.0, (0.5, 0.5)), (0.0, (0.0, 1.0)), (math.sqrt(0.5), (0.25, 0.75)), (1j, (0.5, 0.5))],
)
def test_reduced_density_acceptor1(u_a, diag):
    rho = reduced_density_acceptor1(u_a)
    np.testing.assert_allclose(np.diag(rho.matrix).real, diag, atol=1e-15)
    assert rho.basis.labels == (LocalEam(1), LocalEam(-1))


@pytest.mark.parametrize(
    "diag,expected",
    [((0.5, 0.5), 1.0), ((1.0, 0.0), 0.0), ((0.25, 0.75), 0.811278)],
)
def test_von_neumann_entropy_examples(diag, expected):
    rho = DensityOperator(LabeledBasis([LocalEam(1), LocalEam(-1)]), np.diag(diag))
    assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-6)


def test_entropy_of_pure_state_is_zero():
    v = np.array([0.6, 0.8j])
    rho = DensityOperator(LabeledBasis([LocalEam(1), LocalEam(-1)]), np.outer(v, v.conj()))
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0, 1), st.floats(0, 2 * math.pi))
def test_two_level_entropy_matches_density_route(r, phase):
    u_a = r * complex(math.cos(phase), math.sin(phase))
    s = two_level_entropy(u_a)
    assert s == pytest.approx(von_neumann_entropy(reduced_density_acceptor1(u_a)), abs=1e-12)
    assert 0.0 <= s <= 1.0


def test_two_level_entropy_is_one_only_at_full_transfer():
    assert two_level_entropy(1.0) == 1.0
    assert two_level_entropy(0.999) < 1.0


def test_density_operator_contracts():
    basis = LabeledBasis([LocalEam(1), LocalEam(-1)])
    with pytest.raises(ContractViolation):
        DensityOperator(basis, np.diag([0.6, 0.6]))
    with pytest.raises(ContractViolation):
        DensityOperator(basis, np.diag([1.2, -0.2]))
    with pytest.raises(ContractViolation):
        DensityOperator(basis, np.array([[0.5, 0.1], [0.3, 0.5]]))


# --- partial trace --------------------------------------------------------

def eam_state(n, amplitudes):
    basis = eam_pair_basis(n)
    v = np.zeros(basis.dim, dtype=complex)
    for label, amp in amplitudes.items():
        v[basis.index(label)] = amp
    return StateVector(basis, v)


def test_partial_trace_bell_state_full_transfer():
    psi = eam_state(3, {AcceptorPairEam(1, -1): 1 / math.sqrt(2), AcceptorPairEam(-1, 1): 1 / math.sqrt(2)})
    rho = partial_trace(psi, "acceptor1")
    assert rho.population(LocalGround()) == pytest.approx(0.0)
    assert rho.population(LocalEam(1)) == pytest.approx(0.5)
    assert rho.population(LocalEam(-1)) == pytest.approx(0.5)
    assert von_neumann_entropy(rho) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.1, math.pi / 2])
def test_partial_trace_of_bell_superposition(theta):
    u_d, u_a = math.cos(theta), -1j * math.sin(theta)
    psi = eam_state(3, {
        DonorEam(0): u_d,
        AcceptorPairEam(1, -1): u_a / math.sqrt(2),
        AcceptorPairEam(-1, 1): u_a / math.sqrt(2),
    })
    rho = partial_trace(psi, "acceptor1")
    expected = np.diag([abs(u_d) ** 2, abs(u_a) ** 2 / 2, 0.0, abs(u_a) ** 2 / 2])
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)
    assert rho.basis.labels == (LocalGround(), LocalEam(-1), LocalEam(0), LocalEam(1))
    assert partial_trace(psi, "acceptor2").matrix == pytest.approx(rho.matrix)


def test_partial_trace_product_state_is_pure():
    # donor ground, acceptor 1 in q=+1, acceptor 2 in q=-1
    psi = eam_state(3, {AcceptorPairEam(1, -1): 1.0})
    for keep in ("donor", "acceptor1", "acceptor2"):
        rho = partial_trace(psi, keep)
        assert rho.purity == pytest.approx(1.0)
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)


def test_partial_trace_five_arm_equal_weights():
    amp = 0.5
    psi = eam_state(5, {AcceptorPairEam(q, -q): amp for q in (1, -1, 2, -2)})
    lam = np.sort(partial_trace(psi, "acceptor1").eigenvalues)
    np.testing.assert_allclose(lam[-4:], [0.25] * 4, atol=1e-15)
    np.testing.assert_allclose(lam[:-4], 0.0, atol=1e-15)
    assert von_neumann_entropy(partial_trace(psi, "acceptor1")) == pytest.approx(2.0, abs=1e-12)


def test_partial_trace_invariant_under_arm_to_eam_change():
    spec = resonant_triad(MoleculeSpec(3, 1.1, 0.1), 0.05)
    arm = build_arm_sector(spec)
    u = eam_embedding(3)
    traj = evolve(arm, StateVector(arm.basis, u[:, 0]), [0.0, 7.0, 31.0])
    for k in range(3):
        arm_state = traj.state(k)
        eam_state_ = StateVector(eam_pair_basis(3), u.conj().T @ arm_state.amplitudes)
        s_arm = von_neumann_entropy(partial_trace(arm_state, "acceptor1"))
        s_eam = von_neumann_entropy(partial_trace(eam_state_, "acceptor1"))
        assert s_arm == pytest.approx(s_eam, abs=1e-10)


def test_partial_trace_needs_declared_factorization():
    spec = ChainSpec(resonant_triad(MoleculeSpec(3, 0.6, 0.1), 1 / 6), 3, 1.0)
    h = build_chain(spec)
    with pytest.raises(ContractViolation):
        partial_trace(StateVector.basis_state(h.basis, ChainDonor()), "acceptor1")


# --- populations ----------------------------------------------------------

@pytest.fixture(scope="module")
def resonant_run():
    spec = resonant_triad(MoleculeSpec(3, 1.1, 0.1), 0.01)
    op = build_eam_pair(spec)
    w = rabi_frequency(spec)
    t = np.linspace(0, 2 * 2 * np.pi / w, 401)
    return spec, evolve(op, StateVector.basis_state(op.basis, DonorEam(0)), t)


def test_population_of_all_labels_is_one(resonant_run):
    _, traj = resonant_run
    np.testing.assert_allclose(population_by_label(traj, lambda label: True), 1.0, atol=1e-12)


def test_population_donor_starts_at_one(resonant_run):
    _, traj = resonant_run
    assert population_by_label(traj, [DonorEam(0)])[0] == 1.0


def test_population_partition_sums_to_one(resonant_run):
    _, traj = resonant_run
    groups = [
        [DonorEam(0)],
        [AcceptorPairEam(1, -1), AcceptorPairEam(-1, 1)],
        [AcceptorPairEam(0, 0)],
        lambda label: is_forbidden_pair(label, 3),
    ]
    total = sum(population_by_label(traj, g) for g in groups)
    np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_bell_population_follows_sin_squared(resonant_run):
    spec, traj = resonant_run
    w = rabi_frequency(spec)
    bell = population_by_label(traj, [AcceptorPairEam(1, -1), AcceptorPairEam(-1, 1)])
    # the (0,0) pair is detuned by 6 tau_1 and soaks up ~1e-4 of the population
    np.testing.assert_allclose(bell, np.sin(w * traj.times / 2) ** 2, atol=2e-3)


def test_population_empty_group_is_error(resonant_run):
    _, traj = resonant_run
    with pytest.raises(ValueError):
        population_by_label(traj, lambda label: False)


@settings(max_examples=20, deadline=None)
@given(n=st.sampled_from([3, 5]), gamma=st.floats(0.8, 1.2),
       m=st.complex_numbers(min_magnitude=1e-3, max_magnitude=0.3, allow_nan=False))
def test_symmetric_pairs_and_forbidden_pairs(n, gamma, m):
    spec = resonant_triad(MoleculeSpec(n, 1.0, 0.1), m, detuning=gamma, eam=(n - 1) // 2)
    op = build_eam_pair(spec)
    traj = evolve(op, StateVector.basis_state(op.basis, DonorEam(0)), np.linspace(0, 500, 251))
    for q in range(1, (n - 1) // 2 + 1):
        a = population_by_label(traj, [AcceptorPairEam(q, -q)])
        b = population_by_label(traj, [AcceptorPairEam(-q, q)])
        assert np.max(np.abs(a - b)) <= 1e-10
    assert np.max(population_by_label(traj, lambda label: is_forbidden_pair(label, n))) <= 1e-12


def test_entropy_is_periodic_in_rabi_period():
    spec = resonant_triad(MoleculeSpec(3, 1.1, 0.1), 0.1, detuning=1.05)
    period = 2 * np.pi / rabi_frequency(spec)
    t = np.linspace(0, period, 97)
    s0 = two_level_entropy(two_level_amplitudes(spec, t)[1])
    s1 = two_level_entropy(two_level_amplitudes(spec, t + 3 * period)[1])
    np.testing.assert_allclose(s0, s1, atol=1e-10)


def test_partial_trace_of_bell_state_matches_two_level_populations():
    from eamsim.dynamics import two_level_amplitudes
    from eamsim.hamiltonian import BellPair, build_two_level
    from eamsim.model import MoleculeSpec, resonant_triad
    from eamsim.observables import LocalEam, LocalGround

    spec = resonant_triad(MoleculeSpec(3, 1.1, 0.1), 0.05)
    op = build_two_level(spec)
    u_d, u_a = two_level_amplitudes(spec, 17.0)
    psi = StateVector(op.basis, [u_a, u_d] if op.basis[0] == BellPair(1) else [u_d, u_a])
    rho = partial_trace(psi, "acceptor1")
    assert rho.population(LocalEam(1)) == pytest.approx(abs(u_a) ** 2 / 2, abs=1e-14)
    assert rho.population(LocalEam(-1)) == pytest.approx(abs(u_a) ** 2 / 2, abs=1e-14)
    assert rho.population(LocalGround()) == pytest.approx(abs(u_d) ** 2, abs=1e-14)
    assert rho.population(LocalEam(1)) == pytest.approx(reduced_density_acceptor1(u_a).population(LocalEam(1)))
