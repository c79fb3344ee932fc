from hadronvqe.model.hamiltonian import (
    CoefficientBlocks,
    LatticeParams,
    ModelOperators,
    TermCount,
    baryon_number_operator,
    build_electric_term,
    build_hamiltonian,
    build_kinetic_term,
    build_mass_term,
    casimir_operator,
    charge_operators,
    model_operators,
    pauli_term_count,
)
from hadronvqe.model.states import particle_number, strong_coupling_state, vacuum_state

__all__ = [
    "CoefficientBlocks",
    "LatticeParams",
    "ModelOperators",
    "TermCount",
    "baryon_number_operator",
    "build_electric_term",
    "build_hamiltonian",
    "build_kinetic_term",
    "build_mass_term",
    "casimir_operator",
    "charge_operators",
    "model_operators",
    "particle_number",
    "pauli_term_count",
    "strong_coupling_state",
    "vacuum_state",
]
