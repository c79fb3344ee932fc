from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hadronvqe.errors import ParameterError
from hadronvqe.utils.decorators import requires_even_sites


@dataclass(frozen=True)
class SectorSpec:
    """Symmetry sector selector.

    baryon_number fixes the total magnetization to 4B, qz_zero keeps equal
    numbers of up-down and down-up cells, singlet_only further restricts
    to states annihilated by all three total charges.
    """

    baryon_number: int = 0
    qz_zero: bool = True
    singlet_only: bool = False

    def __post_init__(self):
        if int(self.baryon_number) != self.baryon_number:
            raise ParameterError(f"baryon number must be an integer, got {self.baryon_number}")
        if self.singlet_only and not self.qz_zero:
            object.__setattr__(self, "qz_zero", True)

    @classmethod
    def parse(cls, text: str, singlet_only: bool = False) -> SectorSpec:
        """Reads 'B=1' or '1'."""

        value = text.split("=", 1)[-1].strip()
        try:
            return cls(int(value), True, singlet_only)
        except ValueError:
            raise ParameterError(f"invalid sector {text!r}") from None


def _popcount(values: np.ndarray) -> np.ndarray:
    counts = np.zeros(values.shape, dtype=np.int64)
    work = values.copy()
    while work.any():
        counts += work & 1
        work >>= 1
    return counts


def cell_counts(n_sites: int, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Numbers of up-down and down-up cells of every basis state."""

    up_down = np.zeros(basis.shape, dtype=np.int64)
    down_up = np.zeros(basis.shape, dtype=np.int64)
    for site in range(1, n_sites + 1):
        first = basis >> (2 * site - 2) & 1
        second = basis >> (2 * site - 1) & 1
        up_down += (first == 0) & (second == 1)
        down_up += (first == 1) & (second == 0)
    return up_down, down_up


@requires_even_sites
def sector_basis(n_sites: int, spec: SectorSpec) -> np.ndarray:
    """Sorted basis indices of the sector, empty when the sector is."""

    n = 2 * n_sites
    half = n_sites // 2
    if abs(spec.baryon_number) > half:
        return np.zeros(0, dtype=np.int64)

    basis = np.arange(1 << n, dtype=np.int64)
    magnetization = n - 2 * _popcount(basis)
    keep = magnetization == 4 * spec.baryon_number
    if spec.qz_zero:
        up_down, down_up = cell_counts(n_sites, basis)
        keep &= up_down == down_up
    return basis[keep]

