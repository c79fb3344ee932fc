from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.circuits.gates import Gate
from hadronvqe.config import SimulatorConfig
from hadronvqe.errors import DimensionError, ParameterError
from hadronvqe.pauli.strings import PauliString
from hadronvqe.pauli.sums import PauliSum, pauli_expectations


log = logging.getLogger(__name__)

_TWO_QUBIT_PAULIS = [(a, b) for a in "IXYZ" for b in "IXYZ" if (a, b) != ("I", "I")]


def apply_matrix(amplitudes: np.ndarray, n_qubits: int, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Applies a 2^k x 2^k unitary whose local bit j acts on qubits[j].

    Qubit q is bit q - 1 of the index, so it lives on tensor axis n - q.
    """

    k = len(qubits)
    axes = [n_qubits - q for q in reversed(qubits)]
    tensor = amplitudes.reshape((2,) * n_qubits)
    gate = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


class StateVector:
    """Amplitudes of an n-qubit pure state, mutated in place by gates."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        dim = 1 << n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=complex)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != dim:
            raise DimensionError(f"{amplitudes.size} amplitudes for {n_qubits} qubits")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> StateVector:
        if not 0 <= index < 1 << n_qubits:
            raise DimensionError(f"basis state {index} outside {n_qubits} qubits")
        amplitudes = np.zeros(1 << n_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(n_qubits, amplitudes)

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply(self, gate: Gate, theta: Sequence[float] = ()) -> None:
        if max(gate.qubits) > self.n_qubits:
            raise DimensionError(f"{gate.kind.value} on {gate.qubits} for {self.n_qubits} qubits")
        self.amplitudes = apply_matrix(self.amplitudes, self.n_qubits, gate.matrix(theta), gate.qubits)

    def apply_pauli(self, string: PauliString) -> None:
        basis = np.arange(self.amplitudes.size)
        targets, phases = string.action(basis)
        out = np.empty_like(self.amplitudes)
        out[targets] = phases * self.amplitudes
        self.amplitudes = out

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def expectation(self, h: PauliSum) -> float:
        self._check(h.n_qubits)
        return h.expectation(self.amplitudes)

    def expectations(self, strings: Sequence[PauliString]) -> np.ndarray:
        return pauli_expectations(self.amplitudes, strings)

    def overlap(self, other: StateVector) -> complex:
        self._check(other.n_qubits)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _check(self, n_qubits: int) -> None:
        if n_qubits != self.n_qubits:
            raise DimensionError(f"{n_qubits}-qubit operand on a {self.n_qubits}-qubit state")


def _depolarize(state: StateVector, pair: tuple[int, int], p: float, rng: np.random.Generator) -> None:
    if rng.random() >= p:
        return
    a, b = _TWO_QUBIT_PAULIS[rng.integers(len(_TWO_QUBIT_PAULIS))]
    ops = {q: letter for q, letter in zip(pair, (a, b)) if letter != "I"}
    state.apply_pauli(PauliString.from_ops(state.n_qubits, ops))


def apply_circuit(
    state: StateVector,
    circuit: Circuit,
    theta: Sequence[float] = (),
    noise=None,
    rng: np.random.Generator | None = None,
) -> StateVector:
    """Runs the circuit on a copy of state.

    With a depolarizing noise model one trajectory is drawn from rng: after
    every CNOT equivalent a random two-qubit Pauli hits its pair with
    probability p.
    """

    if state.n_qubits != circuit.n_qubits:
        raise DimensionError(f"{circuit.n_qubits}-qubit circuit on a {state.n_qubits}-qubit state")
    theta = circuit.check_theta(theta)
    noisy = noise is not None and noise.depolarizing > 0
    if noisy and rng is None:
        raise ParameterError("trajectory noise needs a random generator")

    out = state.copy()
    for gate in circuit.gates:
        out.apply(gate, theta)
        if noisy:
            for pair in gate.noise_pairs():
                _depolarize(out, pair, noise.depolarizing, rng)

    drift = abs(out.norm - state.norm)
    if drift > SimulatorConfig.norm_tolerance:
        log.warning("norm drifted by %.3g over %d gates", drift, len(circuit))
    return out


def prepare(circuit: Circuit, theta: Sequence[float], initial: int = 0) -> StateVector:
    """Noiseless U(theta)|initial>."""

    return apply_circuit(StateVector.basis_state(circuit.n_qubits, initial), circuit, theta)


def expectation_exact(state: StateVector, h: PauliSum) -> float:
    return state.expectation(h)
