import math

import numpy as np
import pytest

from hadronvqe.circuits.ansatz import singlet_sector_ansatz
from hadronvqe.errors import CacheMissError, OutOfDomainError, ParameterError
from hadronvqe.exact import SectorSpec, hadron_masses, sector_basis
from hadronvqe.model import LatticeParams, build_hamiltonian, model_operators
from hadronvqe.simulator import prepare
from hadronvqe.simulator.sampling import string_estimates
from hadronvqe.vqe import (
    EnergyObjective,
    EvaluationCache,
    MeasurementPlan,
    OptimizerConfig,
    PenaltyCost,
    best_cached,
    cost_excited_gram_schmidt,
    cost_excited_penalty,
    cost_ground,
    make_estimator,
    noise_study,
    optimize,
    optimize_sequential,
    reweight_cache,
    run_baryon_mass,
    run_brickwork_baryon,
    run_meson_mass,
)
from hadronvqe.vqe.costs import default_beta, gram_schmidt_value
from hadronvqe.vqe.optimizer import fit_sinusoid, initial_design


@pytest.fixture
def vacuum_problem():
    ansatz = singlet_sector_ansatz(2, 0)
    blocks = model_operators(2).blocks
    plan = MeasurementPlan.from_blocks(blocks)
    estimator = make_estimator("exact", ansatz.circuit, ansatz.initial, plan)
    objective = EnergyObjective(estimator, blocks.align(plan.strings), 1.0, 1.0)
    return ansatz, blocks, objective


def exact_energy(ansatz, theta, m_tilde, x):
    h = build_hamiltonian(LatticeParams(2, m_tilde, x))
    return prepare(ansatz.circuit, theta, ansatz.initial).expectation(h)


def test_cache_key_is_periodic_and_quantised():
    cache = EvaluationCache(quantum=1e-6)
    assert cache.key([0.1, 1.0]) == cache.key([0.1 + 2 * math.pi, 1.0 + 1e-9])
    assert cache.key([0.1, 1.0]) != cache.key([0.1, 1.0 + 1e-5])
    assert cache.key([2 * math.pi - 1e-9]) == cache.key([0.0])


def test_cache_store_and_miss():
    blocks = model_operators(2).blocks
    cache = EvaluationCache()
    entry = cache.store([0.2], blocks.strings[:2], [0.5, -0.5], {"mode": "exact"})
    assert [0.2 + 2 * math.pi] in cache
    assert len(cache) == 1
    assert np.array_equal(entry.values_for(blocks.strings[1:2]), [-0.5])
    with pytest.raises(CacheMissError):
        entry.values_for(blocks.strings)
    with pytest.raises(CacheMissError):
        reweight_cache(cache, [0.9], blocks, 1.0, 1.0)


def test_objective_caches_evaluations(vacuum_problem, rng):
    ansatz, _, objective = vacuum_problem
    theta = rng.uniform(0, 2 * math.pi, ansatz.n_params)
    first = objective.energy(theta)
    assert objective.energy(theta + 2 * math.pi) == first
    assert objective.evaluations == 1
    assert first == pytest.approx(exact_energy(ansatz, theta, 1.0, 1.0), abs=1e-12)


def test_smallest_mesh_step_reaches_a_new_cache_entry(vacuum_problem):
    ansatz, _, objective = vacuum_problem
    step = OptimizerConfig().min_step
    assert objective.cache.quantum * 10 <= step

    theta = np.full(ansatz.n_params, 0.7)
    shifted = theta.copy()
    shifted[0] += step
    assert objective.cache.key(theta) != objective.cache.key(shifted)

    objective.energy(theta)
    moved = objective.energy(shifted)
    assert objective.evaluations == 2
    assert moved == pytest.approx(exact_energy(ansatz, shifted, 1.0, 1.0), abs=1e-12)


def test_reweighting_matches_fresh_evaluation(vacuum_problem, rng):
    ansatz, blocks, objective = vacuum_problem
    theta = rng.uniform(0, 2 * math.pi, ansatz.n_params)
    objective.energy(theta)
    moved = objective.at(0.5, 3.0)
    assert moved.energy(theta) == pytest.approx(exact_energy(ansatz, theta, 0.5, 3.0), abs=1e-12)
    assert moved.evaluations == 0
    assert reweight_cache(objective.cache, theta, objective.blocks, 1.0, 1.0) == objective.energy(theta)


def test_best_cached_orders_by_reweighted_energy(vacuum_problem, rng):
    ansatz, _, objective = vacuum_problem
    points = rng.uniform(0, 2 * math.pi, (6, ansatz.n_params))
    for theta in points:
        objective.energy(theta)
    ranked = best_cached(objective.cache, objective.blocks, 2.0, 0.5, count=6)
    energies = [e for e, _ in ranked]
    assert energies == sorted(energies)
    assert energies[0] == pytest.approx(min(exact_energy(ansatz, t, 2.0, 0.5) for t in points), abs=1e-12)


def test_sampled_reweighting_uses_stored_records(rng):
    ansatz = singlet_sector_ansatz(2, 0)
    blocks = model_operators(2).blocks
    plan = MeasurementPlan.from_blocks(blocks)
    estimator = make_estimator("sampled", ansatz.circuit, ansatz.initial, plan, shots=2000, seed=4)
    objective = EnergyObjective(estimator, blocks.align(plan.strings), 1.0, 1.0)
    theta = rng.uniform(0, 2 * math.pi, ansatz.n_params)

    objective.energy(theta)
    recomputed = np.dot(objective.blocks.coefficients(0.7, 2.0), string_estimates(estimator.last_records, plan.strings))
    assert objective.at(0.7, 2.0).energy(theta) == pytest.approx(recomputed, abs=1e-12)
    assert np.array_equal(estimator(theta), estimator(theta))


def test_estimator_factory_checks():
    ansatz = singlet_sector_ansatz(2, 0)
    plan = MeasurementPlan.from_blocks(model_operators(2).blocks)
    with pytest.raises(ParameterError):
        make_estimator("sampled", ansatz.circuit, ansatz.initial, plan)
    with pytest.raises(ParameterError):
        make_estimator("analog", ansatz.circuit, ansatz.initial, plan)
    with pytest.raises(ParameterError):
        MeasurementPlan.from_blocks(model_operators(2).blocks, model_operators(4).blocks)


def test_joint_plan_covers_both_sets():
    small = model_operators(2).blocks
    plan = MeasurementPlan.from_blocks(small, small)
    assert plan.strings == tuple(sorted(small.strings, key=lambda s: s.sort_key))
    assert len(plan) == len(small.strings)


def test_ground_cost_on_reference_state():
    ansatz = singlet_sector_ansatz(2, 0)
    h = build_hamiltonian(LatticeParams(2, 1.0, 2.0))
    theta = np.zeros(ansatz.n_params)
    assert cost_ground(theta, h, ansatz) == pytest.approx(exact_energy(ansatz, theta, 1.0, 2.0), abs=1e-12)


def test_penalty_cost_limits():
    ansatz = singlet_sector_ansatz(2, 0)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    reference = np.zeros(ansatz.n_params)
    energy = exact_energy(ansatz, reference, 1.0, 1.0)
    assert cost_excited_penalty(reference, h, reference, 10.0, ansatz) == pytest.approx(energy + 10.0)

    orthogonal = np.array([math.pi / 2] + [0.0] * (ansatz.n_params - 1))
    plain = exact_energy(ansatz, orthogonal, 1.0, 1.0)
    assert cost_excited_penalty(orthogonal, h, reference, 10.0, ansatz) == pytest.approx(plain, abs=1e-7)
    square = cost_excited_penalty(reference, h, reference, 10.0, ansatz, power="square")
    assert square == pytest.approx(energy + 10.0)


def test_penalty_rejects_bad_settings(vacuum_problem):
    _, _, objective = vacuum_problem
    with pytest.raises(ParameterError):
        PenaltyCost(objective, [0.0, 0.0], 0.0)
    with pytest.raises(ParameterError):
        PenaltyCost(objective, [0.0, 0.0], 1.0, power="cube")


def test_gram_schmidt_formula_and_guard():
    assert gram_schmidt_value(1.0, 0.0, -3.0) == 1.0
    assert gram_schmidt_value(1.0, 0.5, -1.0) == pytest.approx(3.0)
    shift = gram_schmidt_value(0.2, 0.99, -0.9) - gram_schmidt_value(0.2, 0.99, -1.0)
    assert shift == pytest.approx(-0.1 * 0.99 / 0.01)
    with pytest.raises(OutOfDomainError):
        gram_schmidt_value(0.0, 1 - 1e-7, -1.0)


def test_gram_schmidt_cost_on_reference_and_orthogonal():
    ansatz = singlet_sector_ansatz(2, 0)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    reference = np.zeros(ansatz.n_params)
    with pytest.raises(OutOfDomainError):
        cost_excited_gram_schmidt(reference, h, reference, -1.0, ansatz)
    orthogonal = np.array([math.pi / 2] + [0.0] * (ansatz.n_params - 1))
    value = cost_excited_gram_schmidt(orthogonal, h, reference, -1.0, ansatz)
    assert value == pytest.approx(exact_energy(ansatz, orthogonal, 1.0, 1.0), abs=1e-9)


def test_default_beta_grows_at_strong_coupling():
    blocks = model_operators(2).blocks
    assert default_beta(2, 1.0, 1.0, blocks) == pytest.approx(2 * (2 + blocks.electric_norm_bound()))
    assert default_beta(2, 1.0, 0.5, blocks) > default_beta(2, 1.0, 1.0, blocks)


def test_optimizer_config():
    config = OptimizerConfig(seed=3)
    assert config.replace(budget=40).budget == 40
    assert config.replace(budget=40).seed == 3
    with pytest.raises(ParameterError):
        config.replace(levels=2)
    with pytest.raises(ParameterError):
        OptimizerConfig(budget=0)


def test_initial_design_shapes():
    corners = initial_design(2, 100, 0)
    assert corners.shape == (4, 2)
    assert {tuple(p) for p in corners} == {(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)}
    cube = initial_design(6, 100, 0)
    assert cube.shape == (14, 6)
    assert np.all((cube >= 0) & (cube < 2 * math.pi))
    assert np.array_equal(cube, initial_design(6, 100, 0))


def test_one_dimensional_cosine():
    result = optimize(lambda t: math.cos(t[0]), 1, OptimizerConfig(budget=60))
    assert result.best_theta[0] == pytest.approx(math.pi, abs=1e-6)
    assert result.best_value == pytest.approx(-1.0)


def test_separable_minimum_and_trace_invariants():
    def cost(theta):
        return 2 - math.cos(theta[0] - 1.0) - math.cos(theta[1] - 2.5)

    config = OptimizerConfig(budget=300, seed=1)
    result = optimize(cost, 2, config, frequencies=[1.0, 1.0])
    assert result.best_value < 1e-8
    assert result.evaluations <= config.budget
    assert result.best_value == min(t.value for t in result.trace)
    assert np.all(np.diff(result.best_so_far()) <= 0)
    assert {t.source for t in result.trace} <= {"mesh", "surrogate", "cache", "polish"}


def test_optimizer_is_deterministic():
    def cost(theta):
        return math.sin(theta[0]) * math.cos(2 * theta[1]) + 0.3 * math.cos(theta[2])

    config = OptimizerConfig(budget=80, seed=5)
    first = optimize(cost, 3, config)
    second = optimize(cost, 3, config)
    assert [t.theta for t in first.trace] == [t.theta for t in second.trace]
    assert first.best_value == second.best_value


def test_budget_is_respected_in_many_dimensions():
    calls = []

    def cost(theta):
        calls.append(theta)
        return float(np.sum(np.cos(theta)))

    result = optimize(cost, 6, OptimizerConfig(budget=30))
    assert result.evaluations <= 30
    assert len(calls) == result.evaluations
    assert result.stop_reason == "budget"


def test_warm_start_comes_first():
    result = optimize(lambda t: math.cos(t[0] - 0.4), 1, OptimizerConfig(budget=40), warm_start=[[0.4 + math.pi]])
    assert result.trace[0].source == "cache"
    assert result.trace[0].theta[0] == pytest.approx(0.4 + math.pi)


def test_out_of_domain_points_are_infinite():
    def cost(theta):
        if theta[0] < 1.0:
            raise OutOfDomainError("too close")
        return -math.cos(theta[0] - 3.0)

    result = optimize(cost, 1, OptimizerConfig(budget=100))
    assert any(math.isinf(t.value) for t in result.trace)
    assert result.best_value == pytest.approx(-1.0, abs=1e-4)


def test_optimizer_rejects_oversized_problems():
    with pytest.raises(ParameterError):
        optimize(lambda t: 0.0, 21)
    with pytest.raises(ParameterError):
        optimize(lambda t: 0.0, 3, OptimizerConfig(budget=5))


def test_no_parameters_means_one_evaluation():
    result = optimize(lambda t: 4.2, 0)
    assert result.evaluations == 1
    assert result.best_value == 4.2
    assert result.stop_reason == "no parameters"


@pytest.mark.parametrize("a,b,c", [(0.3, -0.7, 0.4), (1.0, 0.2, -0.9), (0.0, 1.0, 0.0)])
def test_fit_sinusoid(a, b, c):
    def f(u):
        return a + b * math.cos(u) + c * math.sin(u)

    u, value = fit_sinusoid(f(0.0), f(math.pi / 2), f(-math.pi / 2))
    assert f(u) == pytest.approx(value)
    grid = np.linspace(-math.pi, math.pi, 2001)
    assert value <= min(f(t) for t in grid) + 1e-12


def test_sequential_sweeps_reach_separable_minimum():
    def cost(theta):
        return -math.cos(theta[0] - 0.3) - math.cos(2 * theta[1] - 1.0) - math.cos(theta[2] + 0.2)

    result = optimize_sequential(cost, [1.0, 2.0, 1.0], budget=400)
    assert result.best_value == pytest.approx(-3.0, abs=1e-9)
    assert result.evaluations <= 400
    with pytest.raises(ParameterError):
        optimize_sequential(cost, [1.0, None, 1.0])


def test_baryon_mass_two_sites_matches_exact():
    rows = run_baryon_mass(2, 1.0, [0.5, 1.0], reduce=False)
    assert [r.x for r in rows] == [0.5, 1.0]
    for row in rows:
        exact = hadron_masses(LatticeParams(2, 1.0, row.x))
        assert row.e_vacuum >= exact.e_vacuum - 1e-9
        assert row.e_vacuum == pytest.approx(exact.e_vacuum, abs=1e-5)
        assert row.e_baryon == pytest.approx(exact.e_baryon, abs=1e-9)
        assert row.m_baryon == pytest.approx(exact.m_baryon, abs=1e-5)
        assert row.evaluations > 0
    assert list(rows[0].row()) == ["N", "m_tilde", "x", "E_v", "E_b", "M_b", "evals_used"]


def test_baryon_mass_with_convex_error_scales_exactly():
    clean = run_baryon_mass(2, 1.0, [1.0], reduce=False)[0]
    study = noise_study(2, 1.0, 1.0, depolarizing=0.01, convex_probability=0.2)
    assert study.mass_ideal == pytest.approx(clean.m_baryon, abs=1e-9)
    assert study.mass_convex == pytest.approx(0.8 * study.mass_ideal, abs=1e-10)
    bias = [abs(v - study.ideal) for v in study.fold_values]
    assert bias[0] <= bias[1] + 1e-12
    assert bias[1] <= bias[2] + 1e-12
    assert {"E_fold1", "E_fold3", "E_fold5", "E_zne", "M_b_convex"} <= set(study.row())


def test_empty_grids_and_bad_methods():
    with pytest.raises(ParameterError):
        run_baryon_mass(2, 1.0, [])
    with pytest.raises(ParameterError):
        run_meson_mass(2, 1.0, [1.0], method="lanczos")


def test_brickwork_respects_variational_bound():
    result = run_brickwork_baryon(2, 1.0, 1.0, layers_vacuum=2, layers_baryon=2, budget=600)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    for energy, baryon_number in ((result.e_vacuum, 0), (result.e_baryon, 1)):
        basis = sector_basis(2, SectorSpec(baryon_number, qz_zero=False))
        floor = np.linalg.eigvalsh(h.sector_matrix(basis))[0]
        assert energy >= floor - 1e-9
    assert result.evaluations <= 1200


@pytest.mark.slow
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0])
def test_baryon_mass_four_sites_matches_exact(x):
    (row,) = run_baryon_mass(4, 1.0, [x])
    exact = hadron_masses(LatticeParams(4, 1.0, x))
    assert row.e_vacuum == pytest.approx(exact.e_vacuum, abs=1e-6)
    assert row.e_baryon == pytest.approx(exact.e_baryon, abs=1e-6)
    assert row.m_baryon == pytest.approx(exact.m_baryon, abs=1e-4)


@pytest.mark.slow
def test_baryon_mass_strong_coupling_endpoint():
    (row,) = run_baryon_mass(4, 1.0, [0.01])
    assert row.m_baryon == pytest.approx(2.0, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("method", ["penalty", "gram_schmidt"])
def test_meson_mass_two_sites_matches_exact(method):
    (row,) = run_meson_mass(2, 1.0, [1.0], method=method)
    exact = hadron_masses(LatticeParams(2, 1.0, 1.0))
    assert row.m_meson == pytest.approx(exact.m_meson, abs=1e-4)
    assert row.overlap_final <= 0.01
    assert not row.flagged


@pytest.mark.slow
def test_penalty_and_gram_schmidt_agree():
    (penalty,) = run_meson_mass(2, 1.0, [1.0], method="penalty")
    (projected,) = run_meson_mass(2, 1.0, [1.0], method="gram_schmidt")
    assert penalty.e_meson == pytest.approx(projected.e_meson, abs=1e-4)


@pytest.mark.slow
def test_six_site_brickwork_baryon():
    result = run_brickwork_baryon(6, 1.0, 1.0)
    exact = hadron_masses(LatticeParams(6, 1.0, 1.0))
    assert abs(result.e_vacuum - exact.e_vacuum) / exact.m_baryon <= 0.05
    assert abs(result.e_baryon - exact.e_baryon) / exact.m_baryon <= 0.05
