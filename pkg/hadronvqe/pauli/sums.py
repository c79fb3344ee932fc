from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from hadronvqe.config import PauliConfig
from hadronvqe.errors import DimensionError, HermiticityError, ParameterError
from hadronvqe.pauli.strings import PauliString, multiply_exponent, PHASES


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PauliTerm:
    string: PauliString
    coefficient: float

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ParameterError(f"non-finite coefficient on {self.string.label}")


def _tolerance(tolerance: float | None) -> float:
    return PauliConfig.drop_tolerance if tolerance is None else tolerance


def accumulate(n_qubits: int, pairs: Iterable[tuple[PauliString, complex]]) -> dict[PauliString, complex]:
    """Sums coefficients of repeated strings."""

    out: dict[PauliString, complex] = {}
    for string, coefficient in pairs:
        if string.n_qubits != n_qubits:
            raise DimensionError(f"{string.n_qubits}-qubit string in a {n_qubits}-qubit sum")
        out[string] = out.get(string, 0) + coefficient
    return out


class PauliSum:
    """Real-weighted sum of Pauli strings in canonical form.

    Terms are merged, coefficients below the drop tolerance removed, and
    the remaining terms kept in lexicographic (z, x) order.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[PauliString, float] | Iterable[tuple[PauliString, float]] = (),
        tolerance: float | None = None,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged = accumulate(n_qubits, items)
        cutoff = _tolerance(tolerance)

        canonical = {}
        for string in sorted(merged, key=lambda s: s.sort_key):
            coefficient = merged[string]
            if isinstance(coefficient, complex):
                if abs(coefficient.imag) > cutoff:
                    raise HermiticityError(f"complex coefficient {coefficient} on {string.label}")
                coefficient = coefficient.real
            coefficient = float(coefficient)
            if not math.isfinite(coefficient):
                raise ParameterError(f"non-finite coefficient on {string.label}")
            if abs(coefficient) > cutoff:
                canonical[string] = coefficient

        self.n_qubits = n_qubits
        self._terms = canonical

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[PauliTerm]) -> PauliSum:
        return cls(n_qubits, ((t.string, t.coefficient) for t in terms))

    @classmethod
    def from_labels(cls, terms: Mapping[str, float]) -> PauliSum:
        strings = [(PauliString.from_label(label), c) for label, c in terms.items()]
        if not strings:
            raise ParameterError("cannot infer the qubit count of an empty sum")
        return cls(strings[0][0].n_qubits, strings)

    @classmethod
    def from_complex(
        cls,
        n_qubits: int,
        terms: Mapping[PauliString, complex],
        tolerance: float | None = None,
    ) -> PauliSum:
        """Builds a sum from complex coefficients whose imaginary parts must cancel."""

        return cls(n_qubits, {s: complex(c) for s, c in terms.items()}, tolerance)

    @classmethod
    def identity(cls, n_qubits: int, coefficient: float = 1.0) -> PauliSum:
        return cls(n_qubits, {PauliString.identity(n_qubits): coefficient})

    @property
    def terms(self) -> dict[PauliString, float]:
        return dict(self._terms)

    @property
    def strings(self) -> tuple[PauliString, ...]:
        return tuple(self._terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.fromiter(self._terms.values(), dtype=float, count=len(self._terms))

    @property
    def identity_coefficient(self) -> float:
        return self._terms.get(PauliString.identity(self.n_qubits), 0.0)

    def coefficient(self, string: PauliString) -> float:
        return self._terms.get(string, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return (PauliTerm(s, c) for s, c in self._terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_qubits, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"PauliSum({self.n_qubits} qubits, {len(self)} terms)"

    def _check(self, other: PauliSum) -> None:
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"{self.n_qubits}-qubit sum combined with {other.n_qubits}-qubit sum")

    def __add__(self, other: PauliSum) -> PauliSum:
        self._check(other)
        return PauliSum(self.n_qubits, list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> PauliSum:
        return PauliSum(self.n_qubits, {s: scalar * c for s, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> PauliSum:
        return -1.0 * self

    def allclose(self, other: PauliSum, atol: float = 1e-12) -> bool:
        self._check(other)
        strings = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(s) - other.coefficient(s)) <= atol for s in strings)

    def product(self, other: PauliSum) -> dict[PauliString, complex]:
        """Operator product self.other with complex coefficients."""

        self._check(other)
        pairs = []
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                string, k = multiply_exponent(a, b)
                pairs.append((string, PHASES[k] * ca * cb))
        return accumulate(self.n_qubits, pairs)

    def hermitian_product(self, other: PauliSum) -> PauliSum:
        """self.other for operators whose product is Hermitian, e.g. a square."""

        return PauliSum.from_complex(self.n_qubits, self.product(other))

    def commutator(self, other: PauliSum, tolerance: float | None = None) -> dict[PauliString, complex]:
        """[self, other] as a map from string to (purely imaginary) coefficient."""

        cutoff = _tolerance(tolerance)
        forward = self.product(other)
        backward = other.product(self)
        out = {}
        for string in sorted(set(forward) | set(backward), key=lambda s: s.sort_key):
            value = forward.get(string, 0) - backward.get(string, 0)
            if abs(value) > cutoff:
                out[string] = complex(value)
        return out

    def commutes_with(self, other: PauliSum, tolerance: float | None = None) -> bool:
        return not self.commutator(other, tolerance)

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Returns H|psi>."""

        state = np.asarray(state, dtype=complex)
        if state.shape != (1 << self.n_qubits,):
            raise DimensionError(f"state of shape {state.shape} for {self.n_qubits} qubits")
        basis = np.arange(state.size)
        out = np.zeros_like(state)
        for string, coefficient in self._terms.items():
            targets, phases = string.action(basis)
            out[targets] += coefficient * phases * state
        return out

    def expectation(self, state: np.ndarray) -> float:
        return float(np.vdot(state, self.apply(state)).real)

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        columns = np.arange(dim)
        matrix = np.zeros((dim, dim), dtype=complex)
        for string, coefficient in self._terms.items():
            rows, phases = string.action(columns)
            matrix[rows, columns] += coefficient * phases
        return _maybe_real(matrix)

    def sector_matrix(self, basis: np.ndarray) -> np.ndarray:
        """Matrix of the operator restricted to span{|b> : b in basis}, basis sorted."""

        basis = np.asarray(basis, dtype=np.int64)
        dim = basis.size
        columns = np.arange(dim)
        matrix = np.zeros((dim, dim), dtype=complex)
        for string, coefficient in self._terms.items():
            targets, phases = string.action(basis)
            rows = np.searchsorted(basis, targets)
            inside = rows < dim
            inside[inside] = basis[rows[inside]] == targets[inside]
            matrix[rows[inside], columns[inside]] += coefficient * phases[inside]
        return _maybe_real(matrix)

    def map_strings(self, n_qubits: int, fn) -> PauliSum:
        """Applies fn(string) -> (string, sign) or None to every term."""

        pairs = []
        for string, coefficient in self._terms.items():
            mapped = fn(string)
            if mapped is not None:
                new, sign = mapped
                pairs.append((new, sign * coefficient))
        return PauliSum(n_qubits, pairs)

    def to_text(self) -> str:
        return "".join(f"{c:.17g} {s.label}\n" for s, c in self._terms.items())

    @classmethod
    def from_text(cls, text: str) -> PauliSum:
        pairs = []
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                coefficient, label = line.split()
                pairs.append((PauliString.from_label(label), float(coefficient)))
            except ValueError as error:
                raise ParameterError(f"line {number}: cannot parse {line!r}") from error
        if not pairs:
            raise ParameterError("no terms found")
        return cls(pairs[0][0].n_qubits, pairs)

    def to_json(self) -> str:
        payload = {
            "n_qubits": self.n_qubits,
            "terms": [[s.label, c] for s, c in self._terms.items()],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> PauliSum:
        payload = json.loads(text)
        return cls(
            payload["n_qubits"],
            [(PauliString.from_label(label), float(c)) for label, c in payload["terms"]],
        )


def _maybe_real(matrix: np.ndarray) -> np.ndarray:
    if np.abs(matrix.imag).max(initial=0.0) <= PauliConfig.drop_tolerance:
        return matrix.real.copy()
    return matrix


def pauli_expectations(state: np.ndarray, strings: Iterable[PauliString]) -> np.ndarray:
    """Vector of <psi|P|psi> for every string, in order."""

    state = np.asarray(state, dtype=complex)
    basis = np.arange(state.size)
    values = []
    for string in strings:
        if string.is_identity:
            values.append(float(np.vdot(state, state).real))
            continue
        targets, phases = string.action(basis)
        values.append(float(np.vdot(state[targets], phases * state).real))
    return np.asarray(values, dtype=float)
