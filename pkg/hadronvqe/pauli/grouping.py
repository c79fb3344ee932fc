from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from hadronvqe.pauli.strings import PauliString, qubitwise_compatible
from hadronvqe.pauli.sums import PauliSum


@dataclass(frozen=True)
class MeasurementGroup:
    """Qubit-wise compatible strings read out from one measurement setting.

    `basis` is the union of the members, it fixes the axis measured on
    every qubit of its support. Qubits outside the support are free.
    """

    members: tuple[PauliString, ...]
    basis: PauliString

    @property
    def representative(self) -> PauliString:
        return min(self.members, key=lambda s: (-s.weight, s.sort_key))

    @property
    def basis_assignment(self) -> tuple[str, ...]:
        return tuple(
            "free" if letter == "I" else letter for letter in self.basis.label
        )

    def __contains__(self, string: PauliString) -> bool:
        return string in self.members


def group_strings(strings: Iterable[PauliString]) -> list[MeasurementGroup]:
    """Greedy grouping, largest support first, each string seeded into the
    first compatible group else a new one. The identity forms no group.
    """

    ordered = sorted(
        {s for s in strings if not s.is_identity},
        key=lambda s: (-s.weight, s.sort_key),
    )

    bases: list[PauliString] = []
    members: list[list[PauliString]] = []
    for string in ordered:
        for index, basis in enumerate(bases):
            if qubitwise_compatible(basis, string):
                bases[index] = PauliString(basis.n_qubits, basis.x | string.x, basis.z | string.z)
                members[index].append(string)
                break
        else:
            bases.append(string)
            members.append([string])

    return [MeasurementGroup(tuple(m), b) for m, b in zip(members, bases)]


def group_for_measurement(h: PauliSum) -> list[MeasurementGroup]:
    return group_strings(h.strings)
