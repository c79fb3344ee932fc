from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from hadronvqe.config import SolverConfig
from hadronvqe.exact.sectors import SectorSpec, sector_basis
from hadronvqe.model.hamiltonian import casimir_operator
from hadronvqe.model.states import cell, from_spins, particle_number
from hadronvqe.utils.decorators import requires_even_sites


log = logging.getLogger(__name__)

# Basis states of the N = 4, B = 1 sector with Q^z = 0, qubit 1 leftmost.
# Rows with a partner form the singlet (|s> - |s'>) / sqrt(2).
N4_B1_TABLE = (
    ("s1", "↑↑↑↑↑↑↓↓", None),
    ("s2", "↑↑↑↑↓↓↑↑", None),
    ("s3", "↑↑↓↓↑↑↑↑", None),
    ("s4", "↓↓↑↑↑↑↑↑", None),
    ("s5", "↑↓↓↑↑↑↑↑", "↓↑↑↓↑↑↑↑"),
    ("s6", "↑↓↑↑↓↑↑↑", "↓↑↑↑↑↓↑↑"),
    ("s7", "↑↓↑↑↑↑↓↑", "↓↑↑↑↑↑↑↓"),
    ("s8", "↑↑↑↑↑↓↓↑", "↑↑↑↑↓↑↑↓"),
    ("s9", "↑↑↑↓↑↑↓↑", "↑↑↓↑↑↑↑↓"),
    ("s10", "↑↑↑↓↓↑↑↑", "↑↑↓↑↑↓↑↑"),
)


@dataclass(frozen=True)
class SingletBasis:
    """Orthonormal colour-singlet states written over a sector basis.

    `vectors[i]` holds the amplitudes of element i on `basis`, and
    `pairing[i]` lists the basis states it combines, primary state first.
    """

    n_sites: int
    baryon_number: int
    basis: np.ndarray
    vectors: np.ndarray
    pairing: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites

    @property
    def primaries(self) -> tuple[int, ...]:
        return tuple(group[0] for group in self.pairing)

    def element(self, i: int) -> dict[int, float]:
        row = self.vectors[i]
        return {int(b): float(a) for b, a in zip(self.basis, row) if a != 0}

    def full_vectors(self) -> np.ndarray:
        out = np.zeros((len(self), 1 << self.n_qubits))
        out[:, self.basis] = self.vectors
        return out

    def restrict(self, max_particles: int) -> SingletBasis:
        """Keeps the elements whose every state has at most max_particles excitations."""

        keep = [
            i for i, group in enumerate(self.pairing)
            if all(particle_number(self.n_sites, b) <= max_particles for b in group)
        ]
        return SingletBasis(
            self.n_sites,
            self.baryon_number,
            self.basis,
            self.vectors[keep],
            tuple(self.pairing[i] for i in keep),
            tuple(self.labels[i] for i in keep) if self.labels else (),
        )


def singlet_basis_n4_b1() -> SingletBasis:
    """The ten singlets of the N = 4, B = 1 sector in table order."""

    basis = sector_basis(4, SectorSpec(1))
    position = {int(b): i for i, b in enumerate(basis)}
    vectors = np.zeros((len(N4_B1_TABLE), basis.size))
    pairing = []
    for row, (_, primary, partner) in enumerate(N4_B1_TABLE):
        first = from_spins(primary)
        if partner is None:
            vectors[row, position[first]] = 1.0
            pairing.append((first,))
        else:
            second = from_spins(partner)
            vectors[row, position[first]] = 1 / math.sqrt(2)
            vectors[row, position[second]] = -1 / math.sqrt(2)
            pairing.append((first, second))
    return SingletBasis(4, 1, basis, vectors, tuple(pairing), tuple(label for label, _, _ in N4_B1_TABLE))


def _pattern(index: int, n_sites: int) -> tuple[str, ...]:
    out = []
    for site in range(1, n_sites + 1):
        first, second = cell(index, site)
        out.append("a" if first != second else ("uu" if first == 0 else "dd"))
    return tuple(out)


@requires_even_sites
@lru_cache(maxsize=32)
def singlet_vectors(n_sites: int, baryon_number: int) -> SingletBasis:
    """Singlet basis of any sector.

    States are grouped by their pattern of parallel and antiparallel
    cells, the antiparallel cells of a group carry spin-1/2 colour
    charges and the group's singlets are the null space of Q^2 on it.
    Within a group the null space is orthonormalised from the projections
    of the basis states in ascending order, so every element has a
    positive amplitude on its primary (smallest) state.
    """

    tolerance = SolverConfig.null_tolerance
    basis = sector_basis(n_sites, SectorSpec(baryon_number))
    casimir = casimir_operator(n_sites).sector_matrix(basis)

    groups: dict[tuple[str, ...], list[int]] = {}
    for i, b in enumerate(basis):
        groups.setdefault(_pattern(int(b), n_sites), []).append(i)

    vectors, pairing = [], []
    for members in sorted(groups.values(), key=lambda m: m[0]):
        block = casimir[np.ix_(members, members)]
        values, modes = scipy.linalg.eigh(block)
        null = modes[:, values < tolerance]
        if null.shape[1] == 0:
            continue
        projector = null @ null.T

        accepted: list[np.ndarray] = []
        for local in range(len(members)):
            candidate = projector[:, local].copy()
            for previous in accepted:
                candidate -= (previous @ candidate) * previous
            norm = np.linalg.norm(candidate)
            if norm < 1e-8:
                continue
            candidate /= norm
            if candidate[local] < 0:
                candidate = -candidate
            candidate[np.abs(candidate) < 1e-14] = 0.0
            accepted.append(candidate)

            full = np.zeros(basis.size)
            full[members] = candidate
            vectors.append(full)
            support = [int(basis[members[j]]) for j in np.flatnonzero(candidate)]
            primary = int(basis[members[local]])
            pairing.append((primary, *[b for b in support if b != primary]))
            if len(accepted) == null.shape[1]:
                break

    log.debug("N=%d B=%d: %d singlets in a %d-state sector", n_sites, baryon_number, len(vectors), basis.size)
    matrix = np.array(vectors) if vectors else np.zeros((0, basis.size))
    return SingletBasis(n_sites, baryon_number, basis, matrix, tuple(pairing))
