from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.circuits.gates import GateKind
from hadronvqe.errors import ParameterError
from hadronvqe.pauli.conjugation import conjugate
from hadronvqe.pauli.strings import PauliString
from hadronvqe.pauli.sums import PauliSum


log = logging.getLogger(__name__)

# first spawn key of every random stream
PURPOSES = {
    "trajectory": 1,
    "shots": 2,
    "readout": 3,
    "design": 4,
    "surrogate": 5,
}


def rng_stream(seed: int, purpose: str, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, purpose, keys...)."""

    sequence = np.random.SeedSequence(int(seed), spawn_key=(PURPOSES[purpose], *(int(k) for k in keys)))
    return np.random.Generator(np.random.Philox(sequence))


def calibration_matrices(n_qubits: int, p01: float, p10: float) -> tuple[np.ndarray, ...]:
    """Per-qubit confusion matrices, column = true bit, row = observed bit.

    p10 is the chance to read 1 from a true 0, p01 to read 0 from a true 1.
    """

    matrix = np.array([[1 - p10, p01], [p10, 1 - p01]], dtype=float)
    return tuple(matrix.copy() for _ in range(n_qubits))


@dataclass(frozen=True)
class NoiseModel:
    depolarizing: float = 0.0
    readout: tuple[np.ndarray, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.depolarizing < 1:
            raise ParameterError(f"depolarizing probability must be in [0, 1), got {self.depolarizing}")
        if self.readout is not None:
            matrices = tuple(np.asarray(m, dtype=float) for m in self.readout)
            for q, m in enumerate(matrices, start=1):
                if m.shape != (2, 2) or np.any(m < 0) or not np.allclose(m.sum(axis=0), 1.0):
                    raise ParameterError(f"readout matrix of qubit {q} is not column-stochastic")
            object.__setattr__(self, "readout", matrices)

    @classmethod
    def uniform(cls, n_qubits: int, depolarizing: float = 0.0, readout_flip: float = 0.0, seed: int = 0) -> NoiseModel:
        readout = calibration_matrices(n_qubits, readout_flip, readout_flip) if readout_flip else None
        return cls(depolarizing, readout, seed)

    @property
    def is_noiseless(self) -> bool:
        return self.depolarizing == 0 and self.readout is None

    def flip_probabilities(self, n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-qubit chances to flip a true 0 and a true 1."""

        if self.readout is None:
            return np.zeros(n_qubits), np.zeros(n_qubits)
        if len(self.readout) < n_qubits:
            raise ParameterError(f"{len(self.readout)} readout matrices for {n_qubits} qubits")
        from_zero = np.array([m[1, 0] for m in self.readout[:n_qubits]])
        from_one = np.array([m[0, 1] for m in self.readout[:n_qubits]])
        return from_zero, from_one


def fold_cnots(circuit: Circuit, factor: int) -> Circuit:
    """Noise amplification by gate folding.

    Each CNOT becomes `factor` CNOTs, every other multi-qubit gate g
    becomes g (g^dag g)^((factor - 1) / 2). The unitary is unchanged.
    """

    if factor < 1 or factor % 2 == 0:
        raise ParameterError(f"fold factor must be odd and positive, got {factor}")
    gates = []
    for gate in circuit.gates:
        if gate.kind is GateKind.CNOT:
            gates.extend([gate] * factor)
        elif len(gate.qubits) > 1:
            gates.append(gate)
            gates.extend([gate.inverse(), gate] * ((factor - 1) // 2))
        else:
            gates.append(gate)
    return Circuit(circuit.n_qubits, tuple(gates), circuit.n_params)


def depolarize_observable(h: PauliSum, pair: tuple[int, int], p: float) -> PauliSum:
    """Adjoint of the two-qubit depolarizing channel.

    Strings acting on the pair shrink by 1 - 16 p / 15, the rest are kept.
    """

    mask = sum(1 << (q - 1) for q in pair)
    damping = 1 - 16 * p / 15
    return h.map_strings(h.n_qubits, lambda s: (s, damping if s.support & mask else 1.0))


def noisy_expectation(
    circuit: Circuit,
    theta: Sequence[float],
    initial: int,
    observable: PauliSum,
    noise: NoiseModel,
) -> float:
    """Exact expectation under depolarizing noise, propagated backwards
    through the bound circuit onto the observable."""

    bound = circuit.bind(theta)
    h = observable
    for gate in reversed(bound.gates):
        for pair in gate.noise_pairs():
            h = depolarize_observable(h, pair, noise.depolarizing)
        h = conjugate(h, gate)

    value = 0.0
    for string, coefficient in h.terms.items():
        if string.is_diagonal:
            value += coefficient * (-1 if (string.z & initial).bit_count() % 2 else 1)
    return value


def basis_projector(n_qubits: int, index: int) -> PauliSum:
    """|b><b| as the product of (1 +- Z_q) / 2."""

    terms = {}
    for z in range(1 << n_qubits):
        sign = -1 if (z & index).bit_count() % 2 else 1
        terms[PauliString(n_qubits, 0, z)] = sign / (1 << n_qubits)
    return PauliSum(n_qubits, terms)


@dataclass(frozen=True)
class ConvexError:
    """Mixes a parameter independent error state into every measurement.

    The default error state is maximally mixed, every non-identity string
    has expectation zero on it.
    """

    probability: float
    error_values: dict[PauliString, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ParameterError(f"error probability must be in [0, 1], got {self.probability}")

    def error_value(self, string: PauliString) -> float:
        if string in self.error_values:
            return self.error_values[string]
        return 1.0 if string.is_identity else 0.0

    def apply(self, strings: Sequence[PauliString], values: np.ndarray) -> np.ndarray:
        errors = np.array([self.error_value(s) for s in strings])
        return (1 - self.probability) * np.asarray(values, dtype=float) + self.probability * errors


def mix_error(strings: Sequence[PauliString], values: np.ndarray, probability: float) -> np.ndarray:
    return ConvexError(probability).apply(strings, values)
