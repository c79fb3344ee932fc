from hadronvqe.exact.sectors import SectorSpec, sector_basis
from hadronvqe.exact.singlets import SingletBasis, singlet_basis_n4_b1, singlet_vectors
from hadronvqe.exact.solver import HadronMasses, SpectrumResult, eigensolve_sector, fidelity, hadron_masses, ratio_scan

__all__ = [
    "HadronMasses",
    "SectorSpec",
    "SingletBasis",
    "SpectrumResult",
    "eigensolve_sector",
    "fidelity",
    "hadron_masses",
    "ratio_scan",
    "sector_basis",
    "singlet_basis_n4_b1",
    "singlet_vectors",
]
