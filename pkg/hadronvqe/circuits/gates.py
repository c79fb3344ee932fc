from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from hadronvqe.errors import CircuitContractError, ParameterError


class GateKind(str, Enum):
    X = "X"
    RY = "RY"
    CRY = "CRY"
    CNOT = "CNOT"
    SWAP = "SWAP"
    TOFFOLI = "TOFFOLI"
    PSWAP = "PSWAP"


ROTATIONS = frozenset({GateKind.RY, GateKind.CRY, GateKind.PSWAP})
CONTROLLED = frozenset({GateKind.CRY, GateKind.CNOT, GateKind.TOFFOLI})


@dataclass(frozen=True)
class ParamRef:
    """A symbolic angle, (-1 if negated) * scale * theta[slot]."""

    slot: int
    scale: float = 1.0
    negated: bool = False

    def resolve(self, theta: Sequence[float]) -> float:
        value = self.scale * theta[self.slot]
        return -value if self.negated else value

    def inverse(self) -> ParamRef:
        return replace(self, negated=not self.negated)


@dataclass(frozen=True)
class Gate:
    """One gate of a circuit.

    Qubits are 1-based. Controlled kinds list their controls first and
    the target last; `polarity` holds the bit value that activates each
    control (1 is |down>, the filled control, 0 the open one).
    """

    kind: GateKind
    qubits: tuple[int, ...]
    param: float | ParamRef | None = None
    polarity: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

        if len(set(self.qubits)) != len(self.qubits) or min(self.qubits, default=1) < 1:
            raise CircuitContractError(f"invalid qubits {self.qubits} for {self.kind.value}")

        arity = {
            GateKind.X: 1, GateKind.RY: 1, GateKind.SWAP: 2, GateKind.PSWAP: 2, GateKind.CNOT: 2,
        }
        if self.kind in arity and len(self.qubits) != arity[self.kind]:
            raise CircuitContractError(f"{self.kind.value} acts on {arity[self.kind]} qubit(s)")
        if self.kind is GateKind.TOFFOLI and len(self.qubits) < 3:
            raise CircuitContractError("TOFFOLI needs at least two controls")
        if self.kind is GateKind.CRY and len(self.qubits) < 2:
            raise CircuitContractError("CRY needs at least one control")

        if (self.kind in ROTATIONS) != (self.param is not None):
            raise CircuitContractError(f"{self.kind.value} parameter mismatch")
        if isinstance(self.param, (int, float)) and not math.isfinite(self.param):
            raise ParameterError(f"non-finite angle on {self.kind.value}")

        if self.kind in CONTROLLED:
            polarity = self.polarity or (1,) * (len(self.qubits) - 1)
            if len(polarity) != len(self.qubits) - 1 or set(polarity) - {0, 1}:
                raise CircuitContractError(f"bad control polarity {polarity}")
            object.__setattr__(self, "polarity", tuple(polarity))
        elif self.polarity:
            raise CircuitContractError(f"{self.kind.value} takes no controls")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1] if self.kind in CONTROLLED else ()

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def is_parametric(self) -> bool:
        return isinstance(self.param, ParamRef)

    def angle(self, theta: Sequence[float] = ()) -> float | None:
        if self.param is None:
            return None
        if isinstance(self.param, ParamRef):
            return self.param.resolve(theta)
        return float(self.param)

    def bind(self, theta: Sequence[float]) -> Gate:
        if not self.is_parametric:
            return self
        return replace(self, param=self.angle(theta))

    def inverse(self) -> Gate:
        if self.kind not in ROTATIONS:
            return self
        if isinstance(self.param, ParamRef):
            return replace(self, param=self.param.inverse())
        return replace(self, param=-self.param)

    @property
    def cnot_count(self) -> int:
        """CNOT-equivalent two-qubit cost used by the noise model."""

        n_controls = len(self.controls)
        if self.kind is GateKind.CNOT:
            return 1
        if self.kind is GateKind.SWAP:
            return 3
        if self.kind is GateKind.TOFFOLI:
            return 6 * (n_controls - 1)
        if self.kind is GateKind.CRY:
            return 2 * n_controls
        if self.kind is GateKind.PSWAP:
            return 2
        return 0

    def noise_pairs(self) -> list[tuple[int, int]]:
        """Qubit pair hit by the depolarizing channel after each CNOT equivalent."""

        if self.kind in (GateKind.SWAP, GateKind.PSWAP):
            return [self.qubits] * self.cnot_count
        controls = self.controls
        return [(controls[i % len(controls)], self.target) for i in range(self.cnot_count)]

    def matrix(self, theta: Sequence[float] = ()) -> np.ndarray:
        """Unitary on the gate's qubits, local bit j belongs to qubits[j]."""

        angle = self.angle(theta)
        if self.kind is GateKind.X:
            return PAULI_X.astype(complex)
        if self.kind is GateKind.RY:
            return ry_matrix(angle).astype(complex)
        if self.kind is GateKind.SWAP:
            return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        if self.kind is GateKind.PSWAP:
            return pswap_matrix(angle).astype(complex)
        base = ry_matrix(angle) if self.kind is GateKind.CRY else PAULI_X
        return controlled(base, self.polarity).astype(complex)

    def to_dict(self) -> dict:
        record = {"kind": self.kind.value, "qubits": list(self.qubits), "polarity": list(self.polarity)}
        if isinstance(self.param, ParamRef):
            record["param"] = {"slot": self.param.slot, "scale": self.param.scale, "negated": self.param.negated}
        elif self.param is not None:
            record["param"] = {"fixed": float(self.param)}
        return record

    @classmethod
    def from_dict(cls, record: dict) -> Gate:
        param = record.get("param")
        if param is not None:
            if "fixed" in param:
                param = float(param["fixed"])
            else:
                param = ParamRef(int(param["slot"]), float(param.get("scale", 1.0)), bool(param.get("negated", False)))
        return cls(GateKind(record["kind"]), tuple(record["qubits"]), param, tuple(record.get("polarity", ())))


PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def ry_matrix(angle: float) -> np.ndarray:
    """exp(-i angle Y / 2), basis order (|up>, |down>)."""

    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def pswap_matrix(angle: float) -> np.ndarray:
    """Givens rotation on span{|up down>, |down up>}, a full swap at pi/2."""

    c, s = math.cos(angle), math.sin(angle)
    matrix = np.eye(4)
    # local index 2 is |up down> (first qubit up), index 1 is |down up>
    matrix[2, 2], matrix[1, 2] = c, s
    matrix[2, 1], matrix[1, 1] = -s, c
    return matrix


def controlled(base: np.ndarray, polarity: Sequence[int]) -> np.ndarray:
    """Applies base on the last local bit when every control bit matches its polarity."""

    n_controls = len(polarity)
    target = n_controls
    dim = 1 << (n_controls + 1)
    matrix = np.eye(dim, dtype=base.dtype)
    active = sum(bit << j for j, bit in enumerate(polarity))
    pair = [active, active | (1 << target)]
    matrix[np.ix_(pair, pair)] = base
    return matrix


def x(qubit: int) -> Gate:
    return Gate(GateKind.X, (qubit,))


def ry(qubit: int, param: float | ParamRef) -> Gate:
    return Gate(GateKind.RY, (qubit,), param)


def cnot(control: int, target: int, polarity: int = 1) -> Gate:
    return Gate(GateKind.CNOT, (control, target), polarity=(polarity,))


def swap(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, (a, b))


def pswap(a: int, b: int, param: float | ParamRef) -> Gate:
    return Gate(GateKind.PSWAP, (a, b), param)


def multi_x(controls: Sequence[int], target: int, polarity: Sequence[int] | None = None) -> Gate:
    """X on target with any number of controls, CNOT for one, TOFFOLI beyond."""

    polarity = tuple(polarity) if polarity is not None else (1,) * len(controls)
    if not controls:
        return x(target)
    kind = GateKind.CNOT if len(controls) == 1 else GateKind.TOFFOLI
    return Gate(kind, (*controls, target), polarity=polarity)


def multi_ry(
    controls: Sequence[int],
    target: int,
    param: float | ParamRef,
    polarity: Sequence[int] | None = None,
) -> Gate:
    polarity = tuple(polarity) if polarity is not None else (1,) * len(controls)
    if not controls:
        return ry(target, param)
    return Gate(GateKind.CRY, (*controls, target), param, polarity)
