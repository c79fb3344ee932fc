from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.circuits.gates import ParamRef, pswap
from hadronvqe.circuits.synthesis import StatePreparer, complete_orthogonal
from hadronvqe.errors import CircuitContractError, ParameterError
from hadronvqe.exact.sectors import SectorSpec
from hadronvqe.exact.singlets import N4_B1_TABLE, singlet_vectors
from hadronvqe.model.states import from_spins, strong_coupling_state
from hadronvqe.utils.decorators import requires_even_sites


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ansatz:
    """A parametrised circuit with the basis state it is applied to."""

    name: str
    circuit: Circuit
    initial: int
    sector: SectorSpec
    singlet: bool = False

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    @property
    def n_params(self) -> int:
        return self.circuit.n_params


def hyperspherical_amplitudes(theta: Sequence[float], n_states: int = 10) -> np.ndarray:
    """a_n = sin(t_1) ... sin(t_{n-1}) cos(t_n), the last one a product of sines."""

    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != n_states - 1:
        raise ParameterError(f"{n_states} amplitudes need {n_states - 1} angles, got {theta.size}")
    sines = np.concatenate(([1.0], np.cumprod(np.sin(theta))))
    return sines * np.concatenate((np.cos(theta), [1.0]))


def ansatz_n4_baryon_general() -> Ansatz:
    """Nine-parameter circuit over the ten colour singlets of N = 4, B = 1.

    The chain spreads |s1> over the ten primary states with hyperspherical
    weights, the six static blocks then turn each paired primary into its
    singlet (|s> - |s'>) / sqrt(2).
    """

    primaries = [from_spins(primary) for _, primary, _ in N4_B1_TABLE]
    preparer = StatePreparer(8, initial=0)
    preparer.move(0, primaries[0])
    preparer.chain(primaries)
    for _, primary, partner in N4_B1_TABLE:
        if partner is not None:
            preparer.givens(from_spins(primary), from_spins(partner), -math.pi / 4)
    circuit = preparer.circuit(n_params=len(primaries) - 1)
    log.debug("N=4 baryon circuit: %d gates, %d CNOT equivalents", len(circuit), circuit.cnot_count)
    return Ansatz("n4_baryon_general", circuit, 0, SectorSpec(1, singlet_only=True), singlet=True)


def _elements(states: Sequence[int], pairing: Sequence[tuple[int, int]] | None) -> list[tuple[int, int | None]]:
    if len(set(states)) != len(states):
        raise CircuitContractError("states must be distinct")
    partners: dict[int, int] = {}
    used: set[int] = set()
    for first, second in pairing or ():
        for index in (first, second):
            if not 0 <= index < len(states):
                raise CircuitContractError(f"pairing index {index} outside 0..{len(states) - 1}")
        if first == second or first in used or second in used:
            raise CircuitContractError(f"overlapping pairing at ({first}, {second})")
        used.update((first, second))
        partners[first] = second

    secondary = set(partners.values())
    return [
        (states[i], states[partners[i]] if i in partners else None)
        for i in range(len(states))
        if i not in secondary
    ]


def ansatz_basis_superposition(
    n_qubits: int,
    states: Sequence[int],
    pairing: Sequence[tuple[int, int]] | None = None,
    sector: SectorSpec | None = None,
    name: str = "basis_superposition",
) -> Ansatz:
    """Hyperspherical superposition of basis states and singlet pairs.

    `pairing` holds index pairs (i, j) into states combined as
    (|s_i> - |s_j>) / sqrt(2), the other states enter alone. The circuit
    has one parameter less than there are elements and starts from the
    first element's primary state.
    """

    elements = _elements(states, pairing)
    if not elements:
        raise CircuitContractError("no states to superpose")
    primaries = [primary for primary, _ in elements]

    preparer = StatePreparer(n_qubits, initial=primaries[0])
    preparer.chain(primaries)
    for primary, partner in elements:
        if partner is not None:
            preparer.givens(primary, partner, -math.pi / 4)
    circuit = preparer.circuit(n_params=len(elements) - 1)
    return Ansatz(name, circuit, primaries[0], sector or SectorSpec(), singlet=False)


def ansatz_vector_superposition(
    n_qubits: int,
    vectors: Sequence[Mapping[int, float]],
    primaries: Sequence[int] | None = None,
    sector: SectorSpec | None = None,
    name: str = "vector_superposition",
) -> Ansatz:
    """Hyperspherical superposition of arbitrary orthonormal real vectors.

    A chain spreads the amplitude over one primary state per vector, then
    a static orthogonal map sends each primary onto its vector.
    """

    if not vectors:
        raise CircuitContractError("no vectors to superpose")
    if primaries is None:
        primaries, taken = [], set()
        for vector in vectors:
            free = [b for b in sorted(vector) if vector[b] != 0 and b not in taken]
            if not free:
                raise CircuitContractError("cannot pick distinct primary states")
            primaries.append(free[0])
            taken.add(free[0])
    primaries = list(primaries)
    if len(set(primaries)) != len(primaries) or len(primaries) != len(vectors):
        raise CircuitContractError("need one distinct primary state per vector")

    span = sorted(set(primaries).union(*(set(v) for v in vectors)))
    index = {b: i for i, b in enumerate(span)}
    columns = np.zeros((len(span), len(vectors)))
    for k, vector in enumerate(vectors):
        for b, amplitude in vector.items():
            columns[index[b], k] = amplitude
    matrix = complete_orthogonal(columns, [index[p] for p in primaries])

    preparer = StatePreparer(n_qubits, initial=primaries[0])
    preparer.chain(primaries)
    preparer.orthogonal(span, matrix)
    circuit = preparer.circuit(n_params=len(vectors) - 1)
    log.debug("%s: %d vectors over %d states, %d gates", name, len(vectors), len(span), len(circuit))
    return Ansatz(name, circuit, primaries[0], sector or SectorSpec(), singlet=False)


@requires_even_sites
def singlet_sector_ansatz(n_sites: int, baryon_number: int, max_particles: int | None = None) -> Ansatz:
    """Superposition of the colour singlets of a sector, optionally cut in particle number."""

    basis = singlet_vectors(n_sites, baryon_number)
    if max_particles is not None:
        basis = basis.restrict(max_particles)
    if not len(basis):
        raise ParameterError(f"no singlets for N={n_sites}, B={baryon_number}, max_particles={max_particles}")

    vectors = [basis.element(i) for i in range(len(basis))]
    ansatz = ansatz_vector_superposition(
        2 * n_sites,
        vectors,
        primaries=basis.primaries,
        sector=SectorSpec(baryon_number, singlet_only=True),
        name=f"singlets_N{n_sites}_B{baryon_number}",
    )
    return Ansatz(ansatz.name, ansatz.circuit, ansatz.initial, ansatz.sector, singlet=True)


@requires_even_sites
def ansatz_brickwork(n_sites: int, layers: int, baryon_number: int = 1) -> Ansatz:
    """Layers of PSWAP gates on neighbouring qubits, ascending within a layer."""

    if layers < 1:
        raise ParameterError(f"layers must be >= 1, got {layers}")
    n = 2 * n_sites
    gates = [
        pswap(j, j + 1, ParamRef(layer * (n - 1) + j - 1))
        for layer in range(layers)
        for j in range(1, n)
    ]
    circuit = Circuit(n, tuple(gates), layers * (n - 1))
    return Ansatz(
        f"brickwork_N{n_sites}_L{layers}",
        circuit,
        strong_coupling_state(n_sites, baryon_number),
        SectorSpec(baryon_number),
    )
