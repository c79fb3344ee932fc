"""Expectation values of a fixed list of Pauli strings at given angles."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.errors import ParameterError
from hadronvqe.model.hamiltonian import CoefficientBlocks
from hadronvqe.pauli.grouping import MeasurementGroup, group_strings
from hadronvqe.pauli.strings import PauliString
from hadronvqe.pauli.sums import PauliSum
from hadronvqe.simulator.mitigation import mitigated_record_values
from hadronvqe.simulator.noise import ConvexError, NoiseModel, noisy_expectation
from hadronvqe.simulator.sampling import Program, overlap_probability, sample_groups, string_estimates
from hadronvqe.simulator.statevector import prepare


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementPlan:
    """The strings measured for a problem and their measurement groups."""

    n_qubits: int
    strings: tuple[PauliString, ...]
    groups: tuple[MeasurementGroup, ...]

    @classmethod
    def from_blocks(cls, *blocks: CoefficientBlocks) -> MeasurementPlan:
        if not blocks:
            raise ParameterError("a plan needs at least one Hamiltonian")
        n = blocks[0].n_qubits
        if any(b.n_qubits != n for b in blocks):
            raise ParameterError("joint plans need Hamiltonians on the same qubits")
        strings = sorted(set().union(*(b.strings for b in blocks)), key=lambda s: s.sort_key)
        return cls(n, tuple(strings), tuple(group_strings(strings)))

    def __len__(self) -> int:
        return len(self.strings)


def _evaluation_seed(seed: int, theta: np.ndarray) -> int:
    """Seed derived from the angles so repeated points draw the same shots."""

    words = np.round(np.mod(theta, 2 * np.pi) * 1e6).astype(np.uint64)
    return int(np.random.SeedSequence([int(seed), *map(int, words)]).generate_state(1)[0])


class ExactEstimator:
    """Exact expectations, optionally under depolarizing noise."""

    mode = "exact"

    def __init__(
        self,
        circuit: Circuit,
        initial: int,
        plan: MeasurementPlan,
        noise: NoiseModel | None = None,
        convex_error: ConvexError | None = None,
    ):
        self.circuit = circuit
        self.initial = initial
        self.plan = plan
        self.noise = noise
        self.convex_error = convex_error

    @property
    def strings(self) -> tuple[PauliString, ...]:
        return self.plan.strings

    def __call__(self, theta: Sequence[float]) -> np.ndarray:
        if self.noise is not None and self.noise.depolarizing > 0:
            values = np.array([
                noisy_expectation(self.circuit, theta, self.initial, PauliSum(self.plan.n_qubits, {s: 1.0}), self.noise)
                for s in self.strings
            ])
        else:
            values = prepare(self.circuit, theta, self.initial).expectations(self.strings)
        if self.convex_error is not None:
            values = self.convex_error.apply(self.strings, values)
        return values

    def overlap(self, theta: Sequence[float], theta_ref: Sequence[float]) -> float:
        return overlap_probability(self.circuit, theta, theta_ref, self.initial, None, self.noise)


class SampledEstimator:
    """Shot estimates from the plan's measurement groups.

    Every evaluation draws from streams seeded by (seed, theta), so the
    same point always yields the same records.
    """

    mode = "sampled"

    def __init__(
        self,
        circuit: Circuit,
        initial: int,
        plan: MeasurementPlan,
        shots: int,
        noise: NoiseModel | None = None,
        seed: int = 0,
        mitigate_readout: bool = False,
        convex_error: ConvexError | None = None,
    ):
        if shots <= 0:
            raise ParameterError(f"shots must be positive, got {shots}")
        self.circuit = circuit
        self.initial = initial
        self.plan = plan
        self.shots = shots
        self.noise = noise
        self.seed = seed
        self.mitigate_readout = mitigate_readout and noise is not None and noise.readout is not None
        self.convex_error = convex_error
        self.last_records = []

    @property
    def strings(self) -> tuple[PauliString, ...]:
        return self.plan.strings

    def __call__(self, theta: Sequence[float]) -> np.ndarray:
        theta = self.circuit.check_theta(theta)
        program = Program(self.circuit, tuple(theta), self.initial)
        seed = _evaluation_seed(self.seed, theta)
        records = sample_groups(program, self.plan.groups, self.shots, self.noise, seed)
        self.last_records = records
        if self.mitigate_readout:
            values = mitigated_record_values(records, self.strings, self.noise.readout[:self.plan.n_qubits])
        else:
            values = string_estimates(records, self.strings)
        if self.convex_error is not None:
            values = self.convex_error.apply(self.strings, values)
        return values

    def overlap(self, theta: Sequence[float], theta_ref: Sequence[float]) -> float:
        theta = self.circuit.check_theta(theta)
        seed = _evaluation_seed(self.seed + 1, theta)
        return overlap_probability(self.circuit, theta, theta_ref, self.initial, self.shots, self.noise, seed)


def make_estimator(
    mode: str,
    circuit: Circuit,
    initial: int,
    plan: MeasurementPlan,
    shots: int | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
    convex_error: ConvexError | None = None,
) -> ExactEstimator | SampledEstimator:
    if mode == "exact":
        return ExactEstimator(circuit, initial, plan, noise, convex_error)
    if mode == "sampled":
        if shots is None:
            raise ParameterError("sampled mode needs a shot count")
        mitigate = noise is not None and noise.readout is not None
        return SampledEstimator(circuit, initial, plan, shots, noise, seed, mitigate, convex_error)
    raise ParameterError(f"unknown estimator mode {mode!r}")
