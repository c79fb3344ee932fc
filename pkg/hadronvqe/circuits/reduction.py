"""Moving static gates into the Hamiltonian and dropping idle qubits.

With U(theta) = U_s U'(theta) the expectation of H equals that of
U_s^dag H U_s in U'(theta)|psi0>. Qubits U' never touches keep their
input value and are projected out of the conjugated Hamiltonian.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from hadronvqe.circuits.ansatz import Ansatz
from hadronvqe.circuits.circuit import Circuit
from hadronvqe.circuits.gates import GateKind
from hadronvqe.errors import CircuitContractError, ParameterError
from hadronvqe.model.hamiltonian import CoefficientBlocks
from hadronvqe.pauli.conjugation import conjugate, project_fixed_qubits
from hadronvqe.pauli.strings import compress
from hadronvqe.pauli.sums import PauliSum


log = logging.getLogger(__name__)


def conjugate_hamiltonian_by_tail(h: PauliSum, tail: Circuit, limit: int | None = None) -> PauliSum:
    """U_s^dag h U_s for a parameter-free tail."""

    if not tail.is_static:
        raise ParameterError("the tail carries symbolic angles")
    for gate in reversed(tail.gates):
        h = conjugate(h, gate, limit)
    log.debug("tail of %d gates leaves %d terms", len(tail), len(h))
    return h


def absorb_static_head(circuit: Circuit, initial: int) -> tuple[Circuit, int]:
    """Folds leading uncontrolled X gates into the input basis state."""

    start = 0
    for gate in circuit.gates:
        if gate.kind is not GateKind.X:
            break
        initial ^= 1 << (gate.target - 1)
        start += 1
    return Circuit(circuit.n_qubits, circuit.gates[start:], circuit.n_params), initial


def reduce_inactive_qubits(
    variational: Circuit,
    h_effective: PauliSum,
    initial: int,
    inactive: Iterable[int] | None = None,
) -> tuple[Circuit, PauliSum, dict[int, int]]:
    """Removes the qubits the circuit leaves untouched.

    Returns the circuit re-indexed onto the active qubits, the
    Hamiltonian with the inactive qubits fixed at their input values,
    and that assignment {qubit: bit}.
    """

    n = variational.n_qubits
    if h_effective.n_qubits != n:
        raise CircuitContractError(f"{h_effective.n_qubits}-qubit Hamiltonian for a {n}-qubit circuit")

    touched = set(variational.active_qubits())
    if inactive is None:
        inactive = [q for q in range(1, n + 1) if q not in touched]
    inactive = sorted(set(inactive))
    straddling = touched.intersection(inactive)
    if straddling:
        raise CircuitContractError(f"gates act on the inactive qubits {sorted(straddling)}")

    fixed = {q: initial >> (q - 1) & 1 for q in inactive}
    active = [q for q in range(1, n + 1) if q not in fixed]
    reduced = variational.remap({q: i for i, q in enumerate(active, start=1)}, len(active))
    h_reduced = project_fixed_qubits(h_effective, fixed)
    log.debug("reduced %d qubits to %d, %d terms", n, len(active), len(h_reduced))
    return reduced, h_reduced, fixed


@dataclass(frozen=True)
class ReducedProblem:
    """A circuit and Hamiltonian weights living on the active qubits only."""

    circuit: Circuit
    initial: int
    active: tuple[int, ...]
    fixed: dict[int, int] = field(default_factory=dict)
    blocks: CoefficientBlocks | None = None

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits


def reduce_problem(ansatz: Ansatz, blocks: CoefficientBlocks, limit: int | None = None) -> ReducedProblem:
    """Split, conjugate and project the three Hamiltonian parts for an ansatz."""

    variational, tail = ansatz.circuit.split_static_tail()
    variational, initial = absorb_static_head(variational, ansatz.initial)

    effective = blocks.transform(lambda part: conjugate_hamiltonian_by_tail(part, tail, limit))
    circuit, _, fixed = reduce_inactive_qubits(
        variational, PauliSum.identity(variational.n_qubits), initial
    )
    reduced_blocks = effective.transform(lambda part: project_fixed_qubits(part, fixed))

    active = tuple(q for q in range(1, variational.n_qubits + 1) if q not in fixed)
    reduced_initial = compress(initial, [q - 1 for q in active])
    log.info(
        "%s: %d static gates moved into H, %d of %d qubits active, %d strings",
        ansatz.name, len(tail), len(active), variational.n_qubits, len(reduced_blocks.strings),
    )
    return ReducedProblem(circuit, reduced_initial, active, fixed, reduced_blocks)
