import json
import math

import numpy as np
import pytest
import scipy.linalg

from qmaxent.channels import (
    amplitude_damping,
    bit_flip,
    dephasing_channel,
    depolarizing,
    identity_channel,
    partial_trace_channel,
)
from qmaxent.entropy import relative_entropy, von_neumann_entropy
from qmaxent.errors import InvalidInputError, PreconditionError, UnsupportedError
from qmaxent.linalg import (
    PAULI,
    CoarseGraining,
    is_unitary,
    random_density,
    random_hermitian,
    random_unitary,
    tensor,
    thermal_state,
)
from qmaxent.maxent import ConstraintSet, population_constraints
from qmaxent.scenarios import (
    KNOWLEDGE_GRADES,
    REGISTRY,
    EvolutionSpec,
    ScenarioReport,
    energy_basis,
    format_float,
    inputs_digest,
    propagate,
    scenario_coarse_grained,
    scenario_dephasing_channel,
    scenario_fine_grained,
    scenario_joint_coarse,
    scenario_maxent,
    scenario_obs_channel,
    scenario_one_to_one,
    scenario_open_system,
)

from _gen import block_uniform, diagonal_state, random_coarse_graining, rng

LN2 = math.log(2)
SX, SZ = PAULI["x"], PAULI["z"]
PLUS = np.full((2, 2), 0.5, dtype=complex)
ZERO = np.diag([1.0, 0.0]).astype(complex)


# propagation --------------------------------------------------------------------


def test_propagate_zero_hamiltonian_is_identity():
    np.testing.assert_array_equal(propagate(EvolutionSpec.constant(np.zeros((3, 3)), 2.0, 8)), np.eye(3))


def test_propagate_constant_hamiltonian_matches_expm():
    h = random_hermitian(4, rng(50))
    u = propagate(EvolutionSpec.constant(h, 1.7, 5))
    np.testing.assert_allclose(u, scipy.linalg.expm(-1j * h * 1.7), atol=1e-9)
    assert is_unitary(u)


def test_propagate_ramp_is_second_order():
    spec = lambda n: EvolutionSpec(((0.0, SZ), (1.0, SZ + SX)), 1.0, n)  # noqa: E731
    u1, u2, u4 = (propagate(spec(n)) for n in (16, 32, 64))
    ratio = np.linalg.norm(u1 - u2) / np.linalg.norm(u2 - u4)
    assert 3.5 <= ratio <= 4.5


def test_evolution_spec_validation():
    with pytest.raises(InvalidInputError):
        EvolutionSpec(((1.0, SZ), (0.5, SX)), 1.0)
    with pytest.raises(InvalidInputError):
        EvolutionSpec(((0.0, SZ),), 1.0, 0)
    with pytest.raises(InvalidInputError):
        EvolutionSpec(((0.0, SZ), (1.0, np.eye(3))), 1.0)
    spec = EvolutionSpec(((0.0, SZ), (2.0, SX)), 3.0)
    np.testing.assert_allclose(spec.hamiltonian(1.0), (SZ + SX) / 2)
    np.testing.assert_allclose(spec.hamiltonian(2.5), SX)


# closed systems ------------------------------------------------------------------


def test_fine_grained_ground_state_constant_h_is_zero():
    h = np.diag([0.0, 1.0, 2.5])
    r = scenario_fine_grained(np.diag([1.0, 0, 0]), EvolutionSpec.constant(h, 3.0, 16))
    assert r.quantities["sigma_d"] == pytest.approx(0.0, abs=1e-12)
    assert r.passed()


def test_fine_grained_sudden_quench():
    t = 0.7
    r = scenario_fine_grained(ZERO, EvolutionSpec.constant(SX, t, 256), basis_schedule=(energy_basis(SZ), energy_basis(SX)))
    # after exp(-i sx t) on |0>, populations in the sx basis stay 1/2
    assert r.quantities["sigma_d"] == pytest.approx(LN2, abs=1e-12)
    assert r.oracle_deltas["sigma_solver"] < 1e-8
    # measured in the original basis instead: cos^2 t, sin^2 t
    r = scenario_fine_grained(ZERO, EvolutionSpec.constant(SX, t, 256), basis_schedule=(np.eye(2), np.eye(2)))
    p = np.array([math.cos(t) ** 2, math.sin(t) ** 2])
    assert r.quantities["sigma_d"] == pytest.approx(-np.sum(p * np.log(p)), abs=1e-9)
    assert r.oracle_deltas["sigma_solver"] < 1e-8


@pytest.mark.parametrize("seed", range(20))
def test_fine_grained_random_quench_nonnegative(seed):
    g = rng(200 + seed)
    d = int(g.integers(2, 6))
    h0, h1 = random_hermitian(d, g), random_hermitian(d, g)
    rho0 = diagonal_state(energy_basis(h0), g)
    spec = EvolutionSpec(((0.0, h0), (1.0, h1)), float(g.uniform(0.2, 2.0)), 64)
    r = scenario_fine_grained(rho0, spec)
    assert r.quantities["sigma_d"] >= -1e-12
    assert r.converged and r.max_delta < 1e-7
    assert r.oracle_deltas["mes_entropy_change"] < 1e-8
    assert r.oracle_deltas["vn_entropy_final"] < 1e-9


def test_fine_grained_rejects_coherent_initial_state():
    with pytest.raises(PreconditionError):
        scenario_fine_grained(PLUS, EvolutionSpec.constant(SZ, 1.0))


def test_coarse_grained_trivial_evolution_is_zero():
    g = rng(51)
    cg = random_coarse_graining(5, g)
    rho0 = block_uniform(cg, g)
    r = scenario_coarse_grained(rho0, (cg, cg), EvolutionSpec.constant(np.zeros((5, 5)), 1.0))
    assert r.quantities["sigma_obs"] == pytest.approx(0.0, abs=1e-12)
    assert r.passed()


def test_coarse_grained_rank_one_matches_fine_grained():
    g = rng(52)
    h0, h1 = random_hermitian(3, g), random_hermitian(3, g)
    spec = EvolutionSpec(((0.0, h0), (1.0, h1)), 1.0, 32)
    b0, b1 = energy_basis(h0), energy_basis(h1)
    rho0 = diagonal_state(b0, g)
    fine = scenario_fine_grained(rho0, spec, basis_schedule=(b0, b1))
    coarse = scenario_coarse_grained(rho0, (CoarseGraining.fine(b0), CoarseGraining.fine(b1)), spec)
    assert coarse.quantities["sigma_obs"] == pytest.approx(fine.quantities["sigma_d"], abs=1e-12)


def test_coarse_grained_random_six_dim():
    g = rng(53)
    cg0, cg1 = CoarseGraining.from_basis(random_unitary(6, g), (1, 2, 3)), random_coarse_graining(6, g)
    rho0 = block_uniform(cg0, g)
    r = scenario_coarse_grained(rho0, (cg0, cg1), EvolutionSpec.constant(random_hermitian(6, g), 1.0, 32))
    assert r.oracle_deltas["sigma_solver"] < 1e-8
    assert r.oracle_deltas["mes_entropy_change"] < 1e-8
    assert r.quantities["sigma_obs"] >= -1e-12


def test_coarse_grained_rejects_malformed_state():
    cg = CoarseGraining.from_basis(np.eye(3), (2, 1))
    with pytest.raises(PreconditionError):
        scenario_coarse_grained(np.diag([0.6, 0.2, 0.2]), (cg, cg), EvolutionSpec.constant(np.eye(3), 1.0))


# open systems --------------------------------------------------------------------


def test_open_system_identity_evolution():
    g = rng(54)
    h_e = random_hermitian(3, g)
    rho_s, rho_e = random_density(2, g), thermal_state(h_e, 0.9)
    r = scenario_open_system(rho_s, rho_e, np.eye(6), h_e=h_e)
    q = r.quantities
    for grade in ("energy", "full_initial", "full_final_local"):
        assert q[f"sigma_{grade}"] == pytest.approx(0.0, abs=1e-9)
    assert q["sigma_none"] == pytest.approx(math.log(3) - von_neumann_entropy(rho_e), abs=1e-9)
    assert r.passed()


@pytest.mark.parametrize("d_e", [2, 4])
def test_open_system_graded_knowledge(d_e):
    g = rng(55 + d_e)
    h_e = random_hermitian(d_e, g)
    rho_e0 = thermal_state(h_e, 1.2)
    r = scenario_open_system(random_density(2, g), rho_e0, random_unitary(2 * d_e, g), h_e=h_e)
    q, dlt = r.quantities, r.oracle_deltas
    assert r.converged and r.max_delta < 1e-7
    gap = q["sigma_full_initial"] - q["sigma_full_final_local"]
    assert gap == pytest.approx(q["environment_relative_entropy"], abs=1e-8)
    assert gap >= -1e-12
    assert dlt["thermodynamic_form"] < 1e-8
    assert dlt["info_decomposition"] < 1e-8
    for grade in KNOWLEDGE_GRADES:
        assert dlt[f"closure_{grade}"] < 1e-9
        assert q[f"sigma_{grade}"] >= -1e-12


def test_open_system_flux_takes_both_signs():
    # swap a pure system with a maximally mixed environment: the system gains
    # ln 2 of entropy with no correlations, so the flux carries all of it
    swap = np.eye(4)[[0, 2, 1, 3]]
    r = scenario_open_system(ZERO, np.eye(2) / 2, swap, knowledge="full_final_local")
    assert r.quantities["phi_full_final_local"] == pytest.approx(LN2, abs=1e-9)
    g = rng(58)
    r = scenario_open_system(random_density(2, g), thermal_state(SZ, 1.0), random_unitary(4, g), knowledge="full_initial")
    assert r.quantities["phi_full_initial"] < 0


def test_open_system_without_energy_grade_skips_hamiltonian():
    r = scenario_open_system(PLUS, np.eye(2) / 2, np.eye(4), knowledge=("none", "full_initial"))
    assert "beta0" not in r.quantities
    with pytest.raises(InvalidInputError):
        scenario_open_system(PLUS, np.eye(2) / 2, np.eye(4), knowledge="energy")
    with pytest.raises(InvalidInputError):
        scenario_open_system(PLUS, np.eye(2) / 2, np.eye(4), knowledge="partial")


def test_open_system_rejects_non_unitary():
    with pytest.raises(PreconditionError):
        scenario_open_system(PLUS, np.eye(2) / 2, 0.5 * np.eye(4), knowledge="none")


def test_joint_coarse_no_interaction():
    g = rng(59)
    cg_e = CoarseGraining.from_basis(np.eye(3), (1, 2))
    rho = tensor(random_density(2, g), block_uniform(cg_e, g))
    r = scenario_joint_coarse(rho, cg_e, np.eye(6))
    assert r.quantities["gap"] == pytest.approx(0.0, abs=1e-10)
    assert r.quantities["sigma_joint"] == pytest.approx(r.quantities["sigma_local"], abs=1e-10)


def test_joint_coarse_swap_like_and_correlated():
    swap = np.eye(4)[[0, 2, 1, 3]]
    g = rng(60)
    fine = CoarseGraining.fine(np.eye(2))
    rho = tensor(random_density(2, g), np.diag([0.3, 0.7]))
    r = scenario_joint_coarse(rho, fine, swap)
    assert r.oracle_deltas["gap"] < 1e-8
    cnot = np.eye(4)[[0, 1, 3, 2]]
    r = scenario_joint_coarse(tensor(PLUS, ZERO), fine, cnot)
    assert r.quantities["gap"] == pytest.approx(LN2, abs=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_joint_sigma_never_exceeds_local(seed):
    g = rng(300 + seed)
    d_s, d_e = 2, int(g.integers(2, 5))
    cg_e = random_coarse_graining(d_e, g)
    rho = tensor(random_density(d_s, g), block_uniform(cg_e, g))
    r = scenario_joint_coarse(rho, cg_e, random_unitary(d_s * d_e, g))
    assert r.quantities["sigma_joint"] <= r.quantities["sigma_local"] + 1e-12
    assert r.converged and r.max_delta < 1e-7


def test_joint_coarse_preconditions():
    fine = CoarseGraining.fine(np.eye(2))
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    with pytest.raises(PreconditionError):
        scenario_joint_coarse(bell, fine, np.eye(4))
    coarse = CoarseGraining.from_basis(np.eye(2), (2,))
    with pytest.raises(PreconditionError):
        scenario_joint_coarse(tensor(PLUS, ZERO), coarse, np.eye(4))


# channels -----------------------------------------------------------------------


def test_one_to_one_identity_is_zero():
    r = scenario_one_to_one(identity_channel(2), random_density(2, rng(61)))
    assert r.quantities["sigma"] < 1e-9
    assert r.quantities["entropy_change_dilation"] == pytest.approx(0.0, abs=1e-10)


def test_one_to_one_examples():
    r = scenario_one_to_one(bit_flip(0.25), ZERO)
    assert r.quantities["entropy_change_dilation"] == pytest.approx(0.562335, abs=1e-5)
    r = scenario_one_to_one(amplitude_damping(0.3), PLUS)
    out = amplitude_damping(0.3)(PLUS)
    assert r.quantities["entropy_change_dilation"] == pytest.approx(von_neumann_entropy(out), abs=1e-8)
    assert r.quantities["sigma"] < 1e-6


def test_one_to_one_rejects_unsupported_channels():
    with pytest.raises(UnsupportedError):
        scenario_one_to_one(bit_flip(0.5), ZERO)
    with pytest.raises(UnsupportedError):
        scenario_one_to_one(dephasing_channel(np.eye(2)), ZERO)
    with pytest.raises(UnsupportedError):
        scenario_one_to_one(partial_trace_channel(2, 2), np.eye(4) / 4)


def test_dephasing_channel_examples():
    assert scenario_dephasing_channel(np.eye(2), np.diag([0.3, 0.7])).quantities["sigma_channel"] == pytest.approx(0.0, abs=1e-9)
    r = scenario_dephasing_channel(np.eye(2), PLUS)
    assert r.quantities["sigma_channel"] == pytest.approx(LN2, abs=1e-9)
    g = rng(62)
    r = scenario_dephasing_channel(random_unitary(4, g), random_density(4, g))
    assert r.oracle_deltas["channel_vs_measurement"] < 1e-8
    assert r.oracle_deltas["sigma_channel"] < 1e-8


def test_obs_channel_examples():
    g = rng(63)
    cg = CoarseGraining.from_basis(random_unitary(6, g), (1, 2, 3))
    assert scenario_obs_channel(cg, block_uniform(cg, g)).quantities["sigma_channel"] == pytest.approx(0.0, abs=1e-9)
    rho = random_density(6, g)
    r = scenario_obs_channel(cg, rho)
    assert r.oracle_deltas["sigma_channel"] < 1e-8
    b = random_unitary(3, g)
    rho3 = random_density(3, g)
    fine = scenario_obs_channel(CoarseGraining.fine(b), rho3).quantities["sigma_channel"]
    assert fine == pytest.approx(scenario_dephasing_channel(b, rho3).quantities["sigma_channel"], abs=1e-9)


def test_maxent_scenario():
    rho = random_density(3, rng(64))
    r = scenario_maxent(rho, population_constraints(np.eye(3), rho))
    assert r.passed()
    r = scenario_maxent(rho, ConstraintSet(3))
    assert r.quantities["sigma"] == pytest.approx(relative_entropy(rho, np.eye(3) / 3), abs=1e-12)


# reports and registry ------------------------------------------------------------


def test_report_serialization():
    r = ScenarioReport("x", "abc", {"a": 1.0, "b": math.inf}, {"a": 1e-12, "c": 2e-13}, seed=7)
    rows = r.csv_rows("label")
    assert rows[0] == ("label", "a", "1", "9.9999999999999998e-13", "7")
    assert ("label", "c", "", "2.0000000000000001e-13", "7") in rows
    d = json.loads(r.to_json())
    assert d["quantities"]["b"] == "inf"
    assert format_float(-0.0) == "0"
    assert float(format_float(0.1 + 0.2)) == 0.1 + 0.2


def test_inputs_digest_is_stable_and_sensitive():
    a = random_density(3, rng(65))
    assert inputs_digest(a, "x") == inputs_digest(a.copy(), "x")
    b = a.copy()
    b[0, 0] += 1e-16
    assert inputs_digest(a) != inputs_digest(b) or np.array_equal(a, b)
    assert inputs_digest(bit_flip(0.1)) != inputs_digest(depolarizing(0.1))


def test_registry_lists_every_scenario():
    import qmaxent.scenarios as sc

    funcs = {n for n in dir(sc) if n.startswith("scenario_") and callable(getattr(sc, n))}
    assert funcs == set(REGISTRY)
    for sid, info in REGISTRY.items():
        assert info.func.__name__ == sid
        assert info.anchor and info.parameters
