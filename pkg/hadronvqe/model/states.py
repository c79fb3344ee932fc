"""Computational basis states of the qubit model.

Qubit q is bit q - 1 of a basis index, bit 0 is spin up and bit 1 spin
down. Cell n holds the qubits 2n - 1 and 2n.
"""
from __future__ import annotations

import numpy as np

from hadronvqe.errors import ParameterError
from hadronvqe.utils.decorators import requires_even_sites

UP, DOWN = 0, 1

_ARROWS = {"0": UP, "1": DOWN, "u": UP, "d": DOWN, "↑": UP, "↓": DOWN}


def from_spins(spins: str) -> int:
    """Index of a spin word such as '↑↑↓↓' or 'uudd', qubit 1 leftmost."""

    index = 0
    for position, spin in enumerate(spins):
        try:
            index |= _ARROWS[spin] << position
        except KeyError:
            raise ParameterError(f"invalid spin {spin!r} in {spins!r}") from None
    return index


def to_spins(index: int, n_qubits: int) -> str:
    return "".join("↓" if index >> q & 1 else "↑" for q in range(n_qubits))


def cell(index: int, site: int) -> tuple[int, int]:
    return index >> (2 * site - 2) & 1, index >> (2 * site - 1) & 1


@requires_even_sites
def vacuum_state(n_sites: int) -> int:
    """Bare vacuum, odd cells up-up and even cells down-down."""

    index = 0
    for site in range(2, n_sites + 1, 2):
        index |= 0b11 << (2 * site - 2)
    return index


@requires_even_sites
def strong_coupling_state(n_sites: int, baryon_number: int = 0) -> int:
    """Ground state at x -> 0 in the sector with the given baryon number.

    B > 0 turns the last B even cells up-up, B < 0 turns the last |B|
    odd cells down-down.
    """

    half = n_sites // 2
    if not isinstance(baryon_number, (int, np.integer)) or abs(baryon_number) > half:
        raise ParameterError(f"baryon number must be an integer in [-{half}, {half}], got {baryon_number!r}")

    index = vacuum_state(n_sites)
    parity = 0 if baryon_number > 0 else 1
    sites = [s for s in range(n_sites, 0, -1) if s % 2 == parity][:abs(baryon_number)]
    for site in sites:
        index ^= 0b11 << (2 * site - 2)
    return index


@requires_even_sites
def particle_number(n_sites: int, index: int) -> int:
    """Particles plus antiparticles, the spins differing from the bare vacuum."""

    return (index ^ vacuum_state(n_sites)).bit_count()


def magnetization(index: int, n_qubits: int) -> int:
    return n_qubits - 2 * index.bit_count()
