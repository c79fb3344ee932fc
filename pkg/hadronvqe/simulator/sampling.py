from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.config import SimulatorConfig
from hadronvqe.errors import DimensionError, ParameterError
from hadronvqe.pauli.grouping import MeasurementGroup
from hadronvqe.pauli.strings import PauliString, parity
from hadronvqe.pauli.sums import PauliSum
from hadronvqe.simulator.noise import NoiseModel, basis_projector, noisy_expectation, rng_stream
from hadronvqe.simulator.statevector import StateVector, apply_circuit, apply_matrix


log = logging.getLogger(__name__)

_HALF = 1 / math.sqrt(2)
# rotations R with R^dag Z R equal to the measured letter
BASIS_ROTATIONS = {
    "X": np.array([[_HALF, _HALF], [-_HALF, _HALF]], dtype=complex),  # RY(-pi/2)
    "Y": np.array([[_HALF, -1j * _HALF], [-1j * _HALF, _HALF]], dtype=complex),  # RX(pi/2)
}


@dataclass(frozen=True)
class Program:
    """A circuit at fixed angles applied to a basis state."""

    circuit: Circuit
    theta: tuple[float, ...]
    initial: int = 0

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    def run(self, noise: NoiseModel | None = None, rng: np.random.Generator | None = None) -> StateVector:
        start = StateVector.basis_state(self.circuit.n_qubits, self.initial)
        return apply_circuit(start, self.circuit, self.theta, noise, rng)


@dataclass(frozen=True)
class MeasurementRecord:
    group: MeasurementGroup
    group_index: int
    shots: int
    counts: dict[int, int] = field(default_factory=dict)
    fold: int = 1
    rotated: bool = False

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ParameterError(f"counts add up to {sum(self.counts.values())}, not {self.shots}")

    def distribution(self, n_qubits: int) -> np.ndarray:
        out = np.zeros(1 << n_qubits)
        for outcome, count in self.counts.items():
            out[outcome] = count
        return out / self.shots

    def to_json(self) -> str:
        n = self.group.basis.n_qubits
        return json.dumps({
            "group": self.group_index,
            "basis": self.group.basis.label,
            "members": [s.label for s in self.group.members],
            "shots": self.shots,
            "fold": self.fold,
            "rotated": self.rotated,
            "counts": {
                "".join(str(o >> q & 1) for q in range(n)): c for o, c in sorted(self.counts.items())
            },
        })


def rotate_to_basis(state: StateVector, basis: PauliString) -> StateVector:
    """Turns every X or Y of the basis into a Z measurement."""

    out = state.copy()
    for q in basis.qubits():
        letter = basis.letter(q)
        if letter in BASIS_ROTATIONS:
            out.amplitudes = apply_matrix(out.amplitudes, out.n_qubits, BASIS_ROTATIONS[letter], (q,))
    return out


def _draw(
    probabilities: np.ndarray,
    shots: int,
    n_qubits: int,
    noise: NoiseModel | None,
    rng: np.random.Generator,
) -> np.ndarray:
    probabilities = np.clip(probabilities, 0, None)
    outcomes = rng.choice(probabilities.size, size=shots, p=probabilities / probabilities.sum())
    if noise is not None and noise.readout is not None:
        from_zero, from_one = noise.flip_probabilities(n_qubits)
        bits = (outcomes[:, None] >> np.arange(n_qubits)) & 1
        chance = np.where(bits == 1, from_one, from_zero)
        flips = rng.random(bits.shape) < chance
        outcomes = outcomes ^ (flips.astype(np.int64) << np.arange(n_qubits)).sum(axis=1)
    return outcomes


def _blocks(shots: int) -> list[int]:
    size = SimulatorConfig.shot_block
    return [min(size, shots - start) for start in range(0, shots, size)]


def sample_groups(
    source: StateVector | Program,
    groups: Sequence[MeasurementGroup],
    shots: int,
    noise: NoiseModel | None = None,
    seed: int = 0,
    fold: int = 1,
) -> list[MeasurementRecord]:
    """Measures every group in its own basis.

    Shots come in blocks, each with its own random stream keyed by
    (seed, group, fold, block). Under depolarizing noise a Program is run
    as a fresh trajectory for every block.
    """

    if shots <= 0:
        raise ParameterError(f"shots must be positive, got {shots}")
    trajectories = noise is not None and noise.depolarizing > 0
    if trajectories and not isinstance(source, Program):
        raise ParameterError("depolarizing noise needs the circuit, not a state")
    n = source.n_qubits

    fixed = None
    if not trajectories:
        fixed = source.run() if isinstance(source, Program) else source

    records = []
    for index, group in enumerate(groups):
        if group.basis.n_qubits != n:
            raise DimensionError(f"{group.basis.n_qubits}-qubit group for {n} qubits")
        settled = None if fixed is None else rotate_to_basis(fixed, group.basis).probabilities()
        outcomes = []
        for block, size in enumerate(_blocks(shots)):
            if trajectories:
                state = source.run(noise, rng_stream(seed, "trajectory", index, fold, block))
                probabilities = rotate_to_basis(state, group.basis).probabilities()
            else:
                probabilities = settled
            rng = rng_stream(seed, "shots", index, fold, block)
            outcomes.append(_draw(probabilities, size, n, noise, rng))
        values, counts = np.unique(np.concatenate(outcomes), return_counts=True)
        records.append(MeasurementRecord(
            group,
            index,
            shots,
            {int(v): int(c) for v, c in zip(values, counts)},
            fold,
            any(letter in "XY" for letter in group.basis.label),
        ))
    log.debug("sampled %d groups with %d shots each", len(records), shots)
    return records


def parity_values(outcomes: np.ndarray, string: PauliString) -> np.ndarray:
    return 1.0 - 2.0 * parity(outcomes & string.support)


@dataclass(frozen=True)
class Estimate:
    values: dict[PauliString, float]
    energy: float
    standard_error: float


def string_estimates(records: Iterable[MeasurementRecord], strings: Sequence[PauliString]) -> np.ndarray:
    """Expectation of every string from the first record whose group holds it."""

    records = list(records)
    out = np.empty(len(strings))
    for k, string in enumerate(strings):
        if string.is_identity:
            out[k] = 1.0
            continue
        record = next((r for r in records if string in r.group), None)
        if record is None:
            raise ParameterError(f"{string.label} was not measured")
        outcomes = np.fromiter(record.counts, dtype=np.int64)
        counts = np.fromiter(record.counts.values(), dtype=float)
        out[k] = float(counts @ parity_values(outcomes, string)) / record.shots
    return out


def estimate_expectations(records: Sequence[MeasurementRecord], h: PauliSum) -> Estimate:
    """Reconstructs every string of h from its group's samples.

    The standard error adds the variance of each group's per-shot energy
    contribution, groups being independent.
    """

    strings = h.strings
    values = string_estimates(records, strings)
    energy = float(np.dot(h.coefficients, values))

    variance = 0.0
    weights = dict(zip(strings, h.coefficients))
    for record in records:
        members = [s for s in record.group.members if s in weights]
        if not members:
            continue
        outcomes = np.fromiter(record.counts, dtype=np.int64)
        counts = np.fromiter(record.counts.values(), dtype=float)
        per_shot = sum(weights[s] * parity_values(outcomes, s) for s in members)
        mean = counts @ per_shot / record.shots
        spread = counts @ (per_shot - mean) ** 2 / max(record.shots - 1, 1)
        variance += spread / record.shots
    return Estimate(dict(zip(strings, values)), energy, math.sqrt(variance))


def overlap_probability(
    circuit: Circuit,
    theta: Sequence[float],
    theta_ref: Sequence[float],
    initial: int = 0,
    shots: int | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> float:
    """Probability of reading |initial> after U(theta)^dag U(theta_ref)|initial>."""

    overlap = circuit.bind(theta_ref).then(circuit.bind(theta).inverse())
    program = Program(overlap, (), initial)

    if shots is None:
        if noise is not None and noise.depolarizing > 0:
            projector = basis_projector(circuit.n_qubits, initial)
            return float(np.clip(noisy_expectation(overlap, (), initial, projector, noise), 0.0, 1.0))
        return float(program.run().probabilities()[initial])

    if shots <= 0:
        raise ParameterError(f"shots must be positive, got {shots}")
    trajectories = noise is not None and noise.depolarizing > 0
    fixed = None if trajectories else program.run().probabilities()
    hits = 0
    for block, size in enumerate(_blocks(shots)):
        if trajectories:
            probabilities = program.run(noise, rng_stream(seed, "trajectory", 0, 1, block)).probabilities()
        else:
            probabilities = fixed
        outcomes = _draw(probabilities, size, circuit.n_qubits, noise, rng_stream(seed, "shots", 0, 1, block))
        hits += int(np.count_nonzero(outcomes == initial))
    return hits / shots
