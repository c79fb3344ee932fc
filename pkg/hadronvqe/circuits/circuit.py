from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from hadronvqe.circuits.gates import Gate, GateKind, ParamRef
from hadronvqe.errors import CircuitContractError, DimensionError, ParameterError


@dataclass(frozen=True)
class Circuit:
    """Ordered gates on n_qubits qubits with n_params symbolic slots.

    Gates apply left to right, `gates[0]` first.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_params: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        slots = [g.param.slot for g in self.gates if g.is_parametric]
        if self.n_params < 0:
            object.__setattr__(self, "n_params", max(slots, default=-1) + 1)
        if any(not 0 <= s < self.n_params for s in slots):
            raise CircuitContractError(f"slot outside 0..{self.n_params - 1}")
        for gate in self.gates:
            if max(gate.qubits) > self.n_qubits:
                raise CircuitContractError(f"{gate.kind.value} on {gate.qubits} in a {self.n_qubits}-qubit circuit")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def is_static(self) -> bool:
        return not any(g.is_parametric for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.cnot_count for g in self.gates)

    def check_theta(self, theta: Sequence[float]) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.n_params:
            raise DimensionError(f"{theta.size} angles for a circuit with {self.n_params} parameters")
        if not np.all(np.isfinite(theta)):
            raise ParameterError("non-finite angle")
        return theta

    def inverse(self) -> Circuit:
        """Reversed gates with every rotation angle negated."""

        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)), self.n_params)

    def split_static_tail(self) -> tuple[Circuit, Circuit]:
        """Splits off the longest parameter-free suffix.

        Returns (variational, tail) with tail applied after variational.
        """

        cut = len(self.gates)
        while cut and not self.gates[cut - 1].is_parametric:
            cut -= 1
        return (
            Circuit(self.n_qubits, self.gates[:cut], self.n_params),
            Circuit(self.n_qubits, self.gates[cut:], 0),
        )

    def bind(self, theta: Sequence[float]) -> Circuit:
        theta = self.check_theta(theta)
        return Circuit(self.n_qubits, tuple(g.bind(theta) for g in self.gates), 0)

    def then(self, other: Circuit) -> Circuit:
        """This circuit followed by other, slots are shared."""

        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"cannot append a {other.n_qubits}-qubit circuit to {self.n_qubits} qubits")
        return Circuit(self.n_qubits, self.gates + other.gates, max(self.n_params, other.n_params))

    def active_qubits(self) -> tuple[int, ...]:
        return tuple(sorted({q for g in self.gates for q in g.qubits}))

    def remap(self, mapping: dict[int, int], n_qubits: int) -> Circuit:
        """Re-indexes every gate qubit through mapping."""

        try:
            gates = tuple(Gate(g.kind, tuple(mapping[q] for q in g.qubits), g.param, g.polarity) for g in self.gates)
        except KeyError as error:
            raise CircuitContractError(f"qubit {error.args[0]} has no image") from None
        return Circuit(n_qubits, gates, self.n_params)

    def slot_frequencies(self) -> list[float | None]:
        """Angular frequency of the cost in each slot.

        A slot driving a single gate gives a cost of the form
        A + B cos(w t) + C sin(w t), w = |scale| for RY and CRY and
        2 |scale| for PSWAP. Slots shared by several gates get None.
        """

        found: dict[int, list[float]] = {}
        for gate in self.gates:
            if not gate.is_parametric:
                continue
            factor = 2.0 if gate.kind is GateKind.PSWAP else 1.0
            found.setdefault(gate.param.slot, []).append(factor * abs(gate.param.scale))
        return [found[s][0] if len(found.get(s, ())) == 1 else None for s in range(self.n_params)]

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, record: dict) -> Circuit:
        try:
            gates = tuple(Gate.from_dict(r) for r in record["gates"])
            return cls(int(record["n_qubits"]), gates, int(record.get("n_params", -1)))
        except (KeyError, TypeError) as error:
            raise CircuitContractError(f"malformed circuit record: {error}") from error

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def concatenate(circuits: Iterable[Circuit]) -> Circuit:
    circuits = list(circuits)
    if not circuits:
        raise CircuitContractError("nothing to concatenate")
    out = circuits[0]
    for circuit in circuits[1:]:
        out = out.then(circuit)
    return out


def wrap_angles(theta: Sequence[float]) -> np.ndarray:
    """Angles folded into [0, 2 pi)."""

    return np.mod(np.asarray(theta, dtype=float), 2 * math.pi)


def slot(index: int, scale: float = 1.0) -> ParamRef:
    return ParamRef(index, scale)
