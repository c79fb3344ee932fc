from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from hadronvqe.config import SolverConfig
from hadronvqe.errors import CapacityError, ParameterError, SolverError
from hadronvqe.exact.sectors import SectorSpec, sector_basis
from hadronvqe.exact.singlets import singlet_vectors
from hadronvqe.model.hamiltonian import LatticeParams, build_hamiltonian


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenpairs of the Hamiltonian inside one sector.

    `states[:, i]` is eigenvector i written on the computational `basis`.
    """

    energies: np.ndarray
    states: np.ndarray
    basis: np.ndarray
    sector: SectorSpec
    params: LatticeParams
    sector_dim: int

    def full_state(self, i: int = 0) -> np.ndarray:
        out = np.zeros(1 << self.params.n_qubits)
        out[self.basis] = self.states[:, i]
        return out


def fix_phase(vector: np.ndarray, tolerance: float = 1e-12) -> np.ndarray:
    """Makes the first non-negligible amplitude positive."""

    nonzero = np.flatnonzero(np.abs(vector) > tolerance)
    if nonzero.size and vector[nonzero[0]] < 0:
        return -vector
    return vector


def _check_capacity(params: LatticeParams, dim: int) -> None:
    if params.n_qubits > SolverConfig.max_qubits:
        raise CapacityError(f"{params.n_qubits} qubits exceed the dense limit of {SolverConfig.max_qubits}")
    if dim > SolverConfig.max_dense_dim:
        raise CapacityError(f"sector dimension {dim} exceeds the dense limit of {SolverConfig.max_dense_dim}")


def check_residual(residual: float, scale: float, label: str) -> None:
    """Raises unless max_i |H v_i - E_i v_i| stays within the tolerance times |H|."""

    if residual > SolverConfig.residual_tolerance * max(scale, 1.0):
        tolerance = SolverConfig.residual_tolerance
        raise SolverError(f"{label}: eigenpair residual {residual:.3g} exceeds {tolerance:g} * |H|")


def eigensolve_sector(params: LatticeParams, spec: SectorSpec, k: int = 1) -> SpectrumResult:
    """Lowest k eigenpairs of H restricted to the sector."""

    basis = sector_basis(params.n_sites, spec)
    if basis.size == 0:
        raise ParameterError(f"sector {spec} is empty for N={params.n_sites}")
    _check_capacity(params, basis.size)

    operator = build_hamiltonian(params)
    hamiltonian = operator.sector_matrix(basis)
    if spec.singlet_only:
        singlets = singlet_vectors(params.n_sites, spec.baryon_number)
        transform = singlets.vectors.T
        matrix = transform.T @ hamiltonian @ transform
    else:
        transform = None
        matrix = hamiltonian

    dim = matrix.shape[0]
    _check_capacity(params, dim)
    if not 1 <= k <= dim:
        raise ParameterError(f"k={k} outside 1..{dim} for sector {spec}")

    values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, k - 1])
    if transform is not None:
        vectors = transform @ vectors
    vectors = np.column_stack([fix_phase(vectors[:, i]) for i in range(k)])

    residual = np.linalg.norm(hamiltonian @ vectors - vectors * values, axis=0).max()
    log.debug("N=%d %s: dim %d, residual %.3g", params.n_sites, spec, dim, residual)
    check_residual(residual, np.abs(operator.coefficients).sum(), f"N={params.n_sites} {spec}")
    return SpectrumResult(values, vectors, basis, spec, params, dim)


@dataclass(frozen=True)
class HadronMasses:
    params: LatticeParams
    e_vacuum: float
    e_meson: float
    e_baryon: float
    m_baryon: float
    m_meson: float
    ratio: float | None
    flagged: bool = False
    notes: tuple[str, ...] = field(default=())

    def row(self) -> dict:
        return {
            "N": self.params.n_sites,
            "m_tilde": self.params.m_tilde,
            "x": self.params.x,
            "E_v": self.e_vacuum,
            "E_b": self.e_baryon,
            "E_m": self.e_meson,
            "M_b": self.m_baryon,
            "M_m": self.m_meson,
            "r": self.ratio,
        }


def hadron_masses(params: LatticeParams, tolerance: float = 1e-9) -> HadronMasses:
    """Baryon and meson masses from the colour-singlet sectors."""

    vacuum = eigensolve_sector(params, SectorSpec(0, singlet_only=True), k=2)
    baryon = eigensolve_sector(params, SectorSpec(1, singlet_only=True), k=1)

    e_v, e_m = (float(e) for e in vacuum.energies[:2])
    e_b = float(baryon.energies[0])
    m_b, m_m = e_b - e_v, e_m - e_v

    notes = []
    if abs(m_b) <= tolerance:
        notes.append("vanishing baryon mass")
    if abs(m_m) <= tolerance:
        notes.append("degenerate vacuum")
    ratio = None if abs(m_b) <= tolerance else m_m / m_b
    if notes:
        log.warning("N=%d m=%g x=%g flagged: %s", params.n_sites, params.m_tilde, params.x, ", ".join(notes))
    return HadronMasses(params, e_v, e_m, e_b, m_b, m_m, ratio, bool(notes), tuple(notes))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


def ratio_scan(
    n_sites: Sequence[int],
    m_tildes: Sequence[float],
    xs: Sequence[float],
) -> list[HadronMasses]:
    """Hadron masses over the (N, m_tilde, x) grid, in that nesting order."""

    rows = []
    for n in n_sites:
        for m_tilde in m_tildes:
            for x in xs:
                rows.append(hadron_masses(LatticeParams(int(n), float(m_tilde), float(x))))
        log.info("N=%d: %d grid points solved", n, len(m_tildes) * len(xs))
    return rows
