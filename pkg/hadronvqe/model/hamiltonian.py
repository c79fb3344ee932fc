from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

from hadronvqe.errors import ParameterError
from hadronvqe.pauli.strings import PauliString
from hadronvqe.pauli.sums import PauliSum, accumulate
from hadronvqe.utils.decorators import requires_even_sites


log = logging.getLogger(__name__)

# single-qubit operators as complex combinations of Pauli letters
LADDER = {
    "+": {"X": 0.5, "Y": 0.5j},
    "-": {"X": 0.5, "Y": -0.5j},
    "Z": {"Z": 1.0},
    "X": {"X": 1.0},
    "Y": {"Y": 1.0},
}


@dataclass(frozen=True)
class LatticeParams:
    n_sites: int
    m_tilde: float
    x: float

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2:
            raise ParameterError(f"the number of sites must be even and >= 2, got {self.n_sites}")
        if not math.isfinite(self.m_tilde) or self.m_tilde < 0:
            raise ParameterError(f"m_tilde must be >= 0, got {self.m_tilde}")
        if not math.isfinite(self.x) or self.x <= 0:
            raise ParameterError(f"x must be > 0, got {self.x}")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites


def expand_product(n_qubits: int, ops: Mapping[int, str]) -> dict[PauliString, complex]:
    """Expands a product of single-qubit operators {qubit: '+', '-', 'X', 'Y', 'Z'}."""

    terms = {(0, 0): 1.0 + 0j}
    for qubit, op in ops.items():
        bit = 1 << (qubit - 1)
        expanded = {}
        for (x, z), c in terms.items():
            for letter, weight in LADDER[op].items():
                lx = x | (bit if letter in "XY" else 0)
                lz = z | (bit if letter in "YZ" else 0)
                expanded[(lx, lz)] = expanded.get((lx, lz), 0) + c * weight
        terms = expanded
    return {PauliString(n_qubits, x, z): c for (x, z), c in terms.items()}


def with_conjugate(terms: Mapping[PauliString, complex]) -> dict[PauliString, complex]:
    """O + O^dag for O given in the Hermitian Pauli basis."""

    return {s: c + c.conjugate() for s, c in terms.items()}


def _sum(n_qubits: int, parts: Iterable[tuple[Mapping[PauliString, complex], float]]) -> PauliSum:
    pairs = []
    for terms, weight in parts:
        pairs.extend((s, weight * c) for s, c in terms.items())
    return PauliSum.from_complex(n_qubits, accumulate(n_qubits, pairs))


@requires_even_sites
def build_mass_term(n_sites: int) -> PauliSum:
    """sum_n ((-1)^n / 2)(Z_{2n-1} + Z_{2n}) + N."""

    n = 2 * n_sites
    pairs = [(PauliString.identity(n), float(n_sites))]
    for site in range(1, n_sites + 1):
        for qubit in (2 * site - 1, 2 * site):
            pairs.append((PauliString.from_ops(n, {qubit: "Z"}), (-1) ** site / 2))
    return PauliSum(n, pairs)


@requires_even_sites
def build_kinetic_term(n_sites: int) -> PauliSum:
    """-(1/2) sum over the 2(N-1) hops of sigma+ Z sigma- + h.c."""

    n = 2 * n_sites
    hops = []
    for first in range(1, n - 1):
        hop = expand_product(n, {first: "+", first + 1: "Z", first + 2: "-"})
        hops.append((with_conjugate(hop), -0.5))
    return _sum(n, hops)


@requires_even_sites
def build_electric_term(n_sites: int) -> PauliSum:
    n = 2 * n_sites
    identity = PauliString.identity(n)
    parts = []

    for site in range(1, n_sites):
        zz = PauliString.from_ops(n, {2 * site - 1: "Z", 2 * site: "Z"})
        parts.append(({identity: 1.0, zz: -1.0}, 3 / 16 * (n_sites - site)))

    for site in range(1, n_sites - 1):
        for other in range(site + 1, n_sites):
            weight = n_sites - other
            for a, sa in ((2 * site - 1, 1), (2 * site, -1)):
                for b, sb in ((2 * other - 1, 1), (2 * other, -1)):
                    string = PauliString.from_ops(n, {a: "Z", b: "Z"})
                    parts.append(({string: float(sa * sb)}, weight / 16))

            flip = expand_product(
                n, {2 * site - 1: "+", 2 * site: "-", 2 * other: "+", 2 * other - 1: "-"}
            )
            parts.append((with_conjugate(flip), weight / 2))

    return _sum(n, parts)


@requires_even_sites
def charge_operators(n_sites: int) -> tuple[PauliSum, PauliSum, PauliSum]:
    """Total non-Abelian charges (Q^x, Q^y, Q^z)."""

    n = 2 * n_sites
    qx, qy, qz = [], [], []
    for site in range(1, n_sites + 1):
        a, b = 2 * site - 1, 2 * site
        qx.append((with_conjugate(expand_product(n, {a: "+", b: "-"})), 0.5))
        lowering = expand_product(n, {a: "-", b: "+"})
        # i/2 (O - O^dag)
        qy.append(({s: c - c.conjugate() for s, c in lowering.items()}, 0.5j))
        qz.append(({PauliString.from_ops(n, {a: "Z"}): 1.0, PauliString.from_ops(n, {b: "Z"}): -1.0}, 0.25))
    return _sum(n, qx), _sum(n, qy), _sum(n, qz)


@requires_even_sites
def baryon_number_operator(n_sites: int) -> PauliSum:
    n = 2 * n_sites
    return PauliSum(n, [(PauliString.from_ops(n, {q: "Z"}), 0.25) for q in range(1, n + 1)])


@requires_even_sites
def casimir_operator(n_sites: int) -> PauliSum:
    """Q^2 = sum_a (Q^a)^2 of the total charges."""

    qx, qy, qz = charge_operators(n_sites)
    return qx.hermitian_product(qx) + qy.hermitian_product(qy) + qz.hermitian_product(qz)


@dataclass(frozen=True)
class CoefficientBlocks:
    """Strings shared by the three parts of the Hamiltonian and their weights.

    The coefficient of string k at (m_tilde, x) is
    m_tilde * mass[k] + electric[k] / x + kinetic[k].
    """

    n_qubits: int
    strings: tuple[PauliString, ...]
    mass: np.ndarray
    electric: np.ndarray
    kinetic: np.ndarray

    @classmethod
    def from_sums(cls, mass: PauliSum, electric: PauliSum, kinetic: PauliSum) -> CoefficientBlocks:
        strings = sorted(set(mass.strings) | set(electric.strings) | set(kinetic.strings), key=lambda s: s.sort_key)
        return cls(
            mass.n_qubits,
            tuple(strings),
            np.array([mass.coefficient(s) for s in strings]),
            np.array([electric.coefficient(s) for s in strings]),
            np.array([kinetic.coefficient(s) for s in strings]),
        )

    def coefficients(self, m_tilde: float, x: float) -> np.ndarray:
        if x <= 0:
            raise ParameterError(f"x must be > 0, got {x}")
        return m_tilde * self.mass + self.electric / x + self.kinetic

    def hamiltonian(self, m_tilde: float, x: float) -> PauliSum:
        return PauliSum(self.n_qubits, zip(self.strings, self.coefficients(m_tilde, x)))

    def sums(self) -> tuple[PauliSum, PauliSum, PauliSum]:
        return tuple(
            PauliSum(self.n_qubits, zip(self.strings, block))
            for block in (self.mass, self.electric, self.kinetic)
        )

    def transform(self, fn: Callable[[PauliSum], PauliSum]) -> CoefficientBlocks:
        """Applies a linear map to each part separately."""

        return CoefficientBlocks.from_sums(*(fn(block) for block in self.sums()))

    def align(self, strings: Iterable[PauliString]) -> CoefficientBlocks:
        """Re-expresses the weights on a superset of strings."""

        strings = tuple(strings)
        index = {s: i for i, s in enumerate(self.strings)}
        missing = set(index) - set(strings)
        if missing:
            raise ParameterError(f"{len(missing)} strings missing from the target list")

        def pick(block: np.ndarray) -> np.ndarray:
            return np.array([block[index[s]] if s in index else 0.0 for s in strings])

        return CoefficientBlocks(self.n_qubits, strings, pick(self.mass), pick(self.electric), pick(self.kinetic))

    def electric_norm_bound(self) -> float:
        return float(np.abs(self.electric).sum())


@dataclass(frozen=True)
class ModelOperators:
    n_sites: int
    h_mass: PauliSum
    h_kinetic: PauliSum
    h_electric: PauliSum
    q_x: PauliSum
    q_y: PauliSum
    q_z: PauliSum
    b_op: PauliSum

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites

    @property
    def blocks(self) -> CoefficientBlocks:
        return CoefficientBlocks.from_sums(self.h_mass, self.h_electric, self.h_kinetic)

    def weights(self, m_tilde: float, x: float) -> tuple[tuple[PauliString, ...], np.ndarray]:
        blocks = self.blocks
        return blocks.strings, blocks.coefficients(m_tilde, x)


@lru_cache(maxsize=16)
def model_operators(n_sites: int) -> ModelOperators:
    qx, qy, qz = charge_operators(n_sites)
    operators = ModelOperators(
        n_sites,
        build_mass_term(n_sites),
        build_kinetic_term(n_sites),
        build_electric_term(n_sites),
        qx, qy, qz,
        baryon_number_operator(n_sites),
    )
    log.debug(
        "N=%d model: %d mass, %d kinetic, %d electric terms",
        n_sites, len(operators.h_mass), len(operators.h_kinetic), len(operators.h_electric),
    )
    return operators


def build_hamiltonian(params: LatticeParams) -> PauliSum:
    """m_tilde H_m + H_el / x + H_kin in canonical form."""

    return model_operators(params.n_sites).blocks.hamiltonian(params.m_tilde, params.x)


class TermCount(NamedTuple):
    actual: int
    formula: int
    merged: int


@requires_even_sites
def pauli_term_count(n_sites: int) -> TermCount:
    """Number of Pauli strings of the Hamiltonian next to 6N^2 - 11N + 9.

    `merged` counts the canonical expansion with a single identity,
    `actual` counts the identity once for each part carrying a constant
    (mass and electric), which is the bookkeeping the formula follows.
    """

    operators = model_operators(n_sites)
    parts = (operators.h_mass, operators.h_electric, operators.h_kinetic)
    non_identity = set().union(*(set(s for s in p.strings if not s.is_identity) for p in parts))
    constants = sum(1 for p in parts if p.identity_coefficient != 0)
    merged = len(non_identity) + (1 if constants else 0)
    return TermCount(len(non_identity) + constants, 6 * n_sites ** 2 - 11 * n_sites + 9, merged)
