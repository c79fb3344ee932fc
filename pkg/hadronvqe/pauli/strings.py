from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from hadronvqe.errors import DimensionError, ParameterError


# i ** k for the phase exponent k (mod 4)
PHASES = (1, 1j, -1, -1j)

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {letter: bits for bits, letter in _LETTERS.items()}


def parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of every entry of an unsigned integer array."""

    folded = np.asarray(values, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        folded ^= folded >> np.uint64(shift)
    return (folded & np.uint64(1)).astype(np.int64)


@dataclass(frozen=True, order=False)
class PauliString:
    """Tensor product of single-qubit Pauli operators in symplectic form.

    Qubit q (1-based) is bit q - 1 of both masks. A set x bit is an X
    component, a set z bit a Z component and both together a Y. The
    operator is the Hermitian product i^(x.z) X^x Z^z on every qubit.
    """

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise DimensionError(f"negative qubit count {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"masks exceed {self.n_qubits} qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Builds a string from a word over {I, X, Y, Z}, qubit 1 leftmost."""

        x = z = 0
        for position, letter in enumerate(label.upper()):
            try:
                xbit, zbit = _BITS[letter]
            except KeyError:
                raise ParameterError(f"invalid Pauli letter {letter!r} in {label!r}") from None
            x |= xbit << position
            z |= zbit << position
        return cls(len(label), x, z)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str]) -> PauliString:
        """Builds a string from a sparse {qubit: letter} map, qubits 1-based."""

        x = z = 0
        for qubit, letter in ops.items():
            if not 1 <= qubit <= n_qubits:
                raise DimensionError(f"qubit {qubit} outside 1..{n_qubits}")
            xbit, zbit = _BITS[letter.upper()]
            x |= xbit << (qubit - 1)
            z |= zbit << (qubit - 1)
        return cls(n_qubits, x, z)

    @property
    def label(self) -> str:
        return "".join(
            _LETTERS[(self.x >> q & 1, self.z >> q & 1)] for q in range(self.n_qubits)
        )

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    @property
    def n_y(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x == 0

    @property
    def sort_key(self) -> tuple[int, int]:
        return self.z, self.x

    def letter(self, qubit: int) -> str:
        return _LETTERS[(self.x >> (qubit - 1) & 1, self.z >> (qubit - 1) & 1)]

    def qubits(self) -> list[int]:
        return [q + 1 for q in range(self.n_qubits) if self.support >> q & 1]

    def action(self, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Returns (targets, phases) with P|b> = phase |target> for every b."""

        basis = np.asarray(basis, dtype=np.int64)
        signs = 1 - 2 * parity(basis & self.z)
        return basis ^ self.x, PHASES[self.n_y % 4] * signs

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        columns = np.arange(dim)
        rows, phases = self.action(columns)
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[rows, columns] = phases
        return matrix

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _check(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits}-qubit string combined with {b.n_qubits}-qubit string")


def multiply_exponent(a: PauliString, b: PauliString) -> tuple[PauliString, int]:
    """Product a.b = i^k c, returned as (c, k mod 4)."""

    _check(a, b)
    ya, xa, za = a.x & a.z, a.x & ~a.z, a.z & ~a.x
    xb_only, zb_only, yb = b.x & ~b.z, b.z & ~b.x, b.x & b.z

    k = (
        (ya & zb_only).bit_count() - (ya & xb_only).bit_count()
        + (xa & yb).bit_count() - (xa & zb_only).bit_count()
        + (za & xb_only).bit_count() - (za & yb).bit_count()
    )
    return PauliString(a.n_qubits, a.x ^ b.x, a.z ^ b.z), k % 4


def multiply(a: PauliString, b: PauliString) -> tuple[PauliString, complex]:
    """Pauli group product, a.b = phase * c with phase in {1, -1, i, -i}."""

    product, k = multiply_exponent(a, b)
    return product, PHASES[k]


def commutes(a: PauliString, b: PauliString) -> bool:
    _check(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


def qubitwise_compatible(a: PauliString, b: PauliString) -> bool:
    """True when on every qubit the factors agree or one of them is the identity."""

    _check(a, b)
    differs = (a.x ^ b.x) | (a.z ^ b.z)
    return differs & a.support & b.support == 0


def compress(mask: int, kept: Iterable[int]) -> int:
    """Re-indexes the bits of mask at the kept 0-based positions onto 0, 1, ..."""

    out = 0
    for new, old in enumerate(kept):
        out |= (mask >> old & 1) << new
    return out


def expand(mask: int, positions: Iterable[int]) -> int:
    """Inverse of compress, places bit j of mask at positions[j]."""

    out = 0
    for j, position in enumerate(positions):
        out |= (mask >> j & 1) << position
    return out
