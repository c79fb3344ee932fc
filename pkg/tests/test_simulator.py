import json
import math

import numpy as np
import pytest

from hadronvqe.circuits.ansatz import ansatz_brickwork
from hadronvqe.circuits.circuit import Circuit, slot
from hadronvqe.circuits.gates import cnot, multi_ry, multi_x, pswap, ry, ry_matrix, swap
from hadronvqe.errors import DimensionError, ParameterError, SingularMatrixError
from hadronvqe.model import LatticeParams, build_hamiltonian, model_operators, vacuum_state
from hadronvqe.pauli import PauliSum, group_for_measurement
from hadronvqe.simulator import (
    ConvexError,
    MeasurementRecord,
    NoiseModel,
    Program,
    StateVector,
    apply_circuit,
    calibration_matrices,
    estimate_expectations,
    expectation_exact,
    fold_cnots,
    noisy_expectation,
    overlap_probability,
    prepare,
    readout_mitigate,
    sample_groups,
    zne_cnot_folding,
)
from hadronvqe.simulator.noise import rng_stream


def unitary(circuit: Circuit, theta=()) -> np.ndarray:
    return np.column_stack([prepare(circuit, theta, i).amplitudes for i in range(1 << circuit.n_qubits)])


BELL = Circuit(2, (ry(1, slot(0)), cnot(1, 2)))


def test_gate_placement_matches_kron():
    circuit = Circuit(3, (multi_ry([3], 1, 0.7),))
    up, down = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    expected = np.kron(up, np.eye(4)) + np.kron(down, np.kron(np.eye(2), ry_matrix(0.7)))
    assert np.allclose(unitary(circuit), expected)


def test_state_vector_contracts():
    with pytest.raises(DimensionError):
        StateVector(2, np.ones(3))
    with pytest.raises(DimensionError):
        StateVector.basis_state(2, 4)
    with pytest.raises(DimensionError):
        apply_circuit(StateVector(3), BELL, [0.1])
    assert StateVector(2).amplitudes[0] == 1.0


def test_trajectory_noise_needs_generator():
    noise = NoiseModel(0.1)
    with pytest.raises(ParameterError):
        apply_circuit(StateVector(2), BELL, [0.3], noise)
    state = apply_circuit(StateVector(2), BELL, [0.3], noise, rng_stream(1, "trajectory"))
    assert state.norm == pytest.approx(1.0)


def test_rng_streams_are_keyed():
    a = rng_stream(7, "shots", 0, 1, 2).random(4)
    b = rng_stream(7, "shots", 0, 1, 2).random(4)
    c = rng_stream(7, "shots", 0, 1, 3).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("p", [0.0, 0.01, 0.1])
def test_noisy_expectation_damps_pair_strings(p):
    theta = [1.1]
    noise = NoiseModel(p)
    damping = 1 - 16 * p / 15
    zz = PauliSum.from_labels({"ZZ": 1.0})
    zi = PauliSum.from_labels({"ZI": 1.0})
    assert noisy_expectation(BELL, theta, 0, zz, noise) == pytest.approx(damping)
    assert noisy_expectation(BELL, theta, 0, zi, noise) == pytest.approx(damping * math.cos(1.1))


def test_noiseless_channel_matches_statevector(rng):
    ansatz = ansatz_brickwork(2, 2)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    theta = rng.uniform(0, 2 * math.pi, ansatz.n_params)
    exact = expectation_exact(prepare(ansatz.circuit, theta, ansatz.initial), h)
    assert noisy_expectation(ansatz.circuit, theta, ansatz.initial, h, NoiseModel()) == pytest.approx(exact)


def test_fold_cnots_keeps_unitary(rng):
    circuit = Circuit(3, (ry(1, slot(0)), cnot(1, 2), pswap(2, 3, slot(1)), multi_ry([1], 3, slot(2))))
    theta = rng.uniform(0, 2 * math.pi, 3)
    for factor in (3, 5):
        folded = fold_cnots(circuit, factor)
        assert np.allclose(unitary(folded, theta), unitary(circuit, theta), atol=1e-12)
        assert folded.cnot_count == factor * circuit.cnot_count
    with pytest.raises(ParameterError):
        fold_cnots(circuit, 2)


def test_fold_bias_grows_and_extrapolation_helps():
    observable = PauliSum.from_labels({"ZZ": 1.0, "ZI": 0.5})
    theta = [0.8]
    ideal = prepare(BELL, theta).expectation(observable)
    result = zne_cnot_folding(BELL, theta, observable, NoiseModel(0.02))
    bias = [abs(v - ideal) for v in result.values]
    assert result.folds == (1, 3, 5)
    assert bias[0] <= bias[1] <= bias[2]
    assert abs(result.extrapolated - ideal) < bias[0]
    with pytest.raises(ParameterError):
        zne_cnot_folding(BELL, theta, observable, NoiseModel(0.02), folds=(3, 3))


def test_sampled_zne_is_reproducible():
    observable = PauliSum.from_labels({"ZZ": 1.0})
    noise = NoiseModel(0.05, seed=3)
    first = zne_cnot_folding(BELL, [0.4], observable, noise, shots=512)
    second = zne_cnot_folding(BELL, [0.4], observable, noise, shots=512)
    assert first == second


def test_sampling_is_deterministic_per_seed(rng):
    ansatz = ansatz_brickwork(2, 1)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    program = Program(ansatz.circuit, tuple(rng.uniform(0, 2 * math.pi, ansatz.n_params)), ansatz.initial)
    groups = group_for_measurement(h)
    first = sample_groups(program, groups, 1000, seed=11)
    again = sample_groups(program, groups, 1000, seed=11)
    other = sample_groups(program, groups, 1000, seed=12)
    assert [r.counts for r in first] == [r.counts for r in again]
    assert [r.counts for r in first] != [r.counts for r in other]
    assert all(sum(r.counts.values()) == 1000 for r in first)


def test_sampled_energy_within_error_bars(rng):
    ansatz = ansatz_brickwork(2, 2)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    theta = rng.uniform(0, 2 * math.pi, ansatz.n_params)
    state = prepare(ansatz.circuit, theta, ansatz.initial)
    records = sample_groups(state, group_for_measurement(h), 20000, seed=5)
    estimate = estimate_expectations(records, h)
    assert estimate.standard_error > 0
    assert abs(estimate.energy - state.expectation(h)) <= 6 * estimate.standard_error


@pytest.mark.slow
@pytest.mark.parametrize("seed", [21, 22, 23, 24])
def test_million_shot_energy_within_five_standard_errors(seed):
    ansatz = ansatz_brickwork(2, 2)
    h = build_hamiltonian(LatticeParams(2, 1.0, 1.0))
    theta = np.random.default_rng(seed).uniform(0, 2 * math.pi, ansatz.n_params)
    state = prepare(ansatz.circuit, theta, ansatz.initial)
    estimate = estimate_expectations(sample_groups(state, group_for_measurement(h), 10**6, seed=seed), h)
    assert abs(estimate.energy - state.expectation(h)) <= 5 * estimate.standard_error


def test_norm_survives_a_thousand_gates(rng, caplog):
    n_qubits = 5
    gates = []
    for _ in range(1000):
        a, b, c = (int(q) + 1 for q in rng.choice(n_qubits, size=3, replace=False))
        kind = rng.integers(5)
        if kind == 0:
            gates.append(ry(a, float(rng.uniform(0, 2 * math.pi))))
        elif kind == 1:
            gates.append(cnot(a, b))
        elif kind == 2:
            gates.append(swap(a, b))
        elif kind == 3:
            gates.append(pswap(a, b, float(rng.uniform(0, 2 * math.pi))))
        else:
            gates.append(multi_x([a, b], c))
    circuit = Circuit(n_qubits, tuple(gates))
    start = StateVector.basis_state(n_qubits, 0b10110)
    with caplog.at_level("WARNING", logger="hadronvqe.simulator.statevector"):
        state = apply_circuit(start, circuit, ())
    assert abs(state.norm - 1) <= 1e-10
    assert "norm drifted" not in caplog.text


def test_basis_state_diagonal_energy_has_no_spread():
    h = model_operators(2).blocks.hamiltonian(1.0, 1.0)
    diagonal = PauliSum.from_terms(h.n_qubits, (t for t in h if t.string.is_diagonal))
    state = StateVector.basis_state(4, vacuum_state(2))
    estimate = estimate_expectations(sample_groups(state, group_for_measurement(diagonal), 300, seed=1), diagonal)
    assert estimate.energy == pytest.approx(state.expectation(diagonal))
    assert estimate.standard_error == pytest.approx(0.0)


def test_depolarizing_sampling_needs_program():
    groups = group_for_measurement(PauliSum.from_labels({"ZZ": 1.0}))
    with pytest.raises(ParameterError):
        sample_groups(StateVector(2), groups, 10, NoiseModel(0.1))
    with pytest.raises(ParameterError):
        sample_groups(StateVector(2), groups, 0)


def test_measurement_record_checks_and_json():
    group = group_for_measurement(PauliSum.from_labels({"ZZ": 1.0}))[0]
    with pytest.raises(ParameterError):
        MeasurementRecord(group, 0, 10, {0: 4})
    record = MeasurementRecord(group, 0, 10, {0: 4, 0b01: 6})
    data = json.loads(record.to_json())
    assert data["counts"] == {"00": 4, "10": 6}
    assert np.allclose(record.distribution(2), [0.4, 0.6, 0, 0])


def test_readout_mitigation_inverts_confusion():
    first = np.array([[0.9, 0.2], [0.1, 0.8]])
    second = np.array([[0.95, 0.05], [0.05, 0.95]])
    true = np.array([0.5, 0.1, 0.3, 0.1])
    observed = np.kron(second, first) @ true
    assert np.allclose(readout_mitigate(observed, [first, second]), true)
    assert np.allclose(readout_mitigate({0: 10}, calibration_matrices(1, 0.0, 0.0)), [1.0, 0.0])
    with pytest.raises(SingularMatrixError):
        readout_mitigate(observed, [first, np.full((2, 2), 0.5)])
    with pytest.raises(ParameterError):
        readout_mitigate(np.zeros(4), [first, second])


def test_readout_noise_is_recovered_by_mitigation():
    noise = NoiseModel.uniform(2, readout_flip=0.1, seed=2)
    state = StateVector.basis_state(2, 0b10)
    group = group_for_measurement(PauliSum.from_labels({"ZZ": 1.0}))[0]
    (record,) = sample_groups(state, [group], 20000, noise, seed=2)
    raw = record.distribution(2)
    assert raw[0b10] < 0.85
    assert readout_mitigate(record.counts, noise.readout)[0b10] == pytest.approx(1.0, abs=0.03)


def test_noise_model_validation():
    with pytest.raises(ParameterError):
        NoiseModel(1.0)
    with pytest.raises(ParameterError):
        NoiseModel(0.0, (np.array([[0.5, 0.5], [0.6, 0.5]]),))
    assert NoiseModel().is_noiseless
    assert not NoiseModel.uniform(2, readout_flip=0.01).is_noiseless


def test_overlap_probability_exact_and_sampled():
    circuit = Circuit(1, (ry(1, slot(0)),))
    assert overlap_probability(circuit, [0.4], [0.4]) == pytest.approx(1.0)
    assert overlap_probability(circuit, [0.4], [1.4]) == pytest.approx(math.cos(0.5) ** 2)
    sampled = overlap_probability(circuit, [0.4], [1.4], shots=4000, seed=9)
    assert sampled == pytest.approx(math.cos(0.5) ** 2, abs=0.04)
    assert sampled == overlap_probability(circuit, [0.4], [1.4], shots=4000, seed=9)


def test_noisy_overlap_is_damped():
    value = overlap_probability(BELL, [0.7], [0.7], noise=NoiseModel(0.01))
    assert 0.9 < value < 1.0


def test_convex_error_mixing():
    strings = PauliSum.from_labels({"II": 1.0, "ZZ": 1.0, "XI": 1.0}).strings
    values = np.array([1.0 if s.is_identity else 0.6 for s in strings])
    mixed = ConvexError(0.25).apply(strings, values)
    for string, value in zip(strings, mixed):
        assert value == pytest.approx(1.0 if string.is_identity else 0.45)
    with pytest.raises(ParameterError):
        ConvexError(1.5)
