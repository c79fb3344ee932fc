import numpy as np
import pytest

from hadronvqe.errors import ParameterError
from hadronvqe.model import (
    LatticeParams,
    baryon_number_operator,
    build_hamiltonian,
    casimir_operator,
    charge_operators,
    model_operators,
    particle_number,
    pauli_term_count,
    strong_coupling_state,
    vacuum_state,
)
from hadronvqe.model.states import from_spins, magnetization, to_spins


SIGMA = {
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
}


def operator(n_qubits: int, ops: dict) -> np.ndarray:
    """Dense product of single-qubit operators, qubit 1 the least significant bit."""

    out = np.eye(1)
    for qubit in range(n_qubits, 0, -1):
        out = np.kron(out, SIGMA[ops[qubit]] if qubit in ops else np.eye(2))
    return out


def naive_hamiltonian(n_sites: int, m_tilde: float, x: float) -> np.ndarray:
    """Term-by-term dense construction of m H_m + H_el / x + H_kin."""

    n = 2 * n_sites
    identity = np.eye(1 << n)

    mass = n_sites * identity
    for site in range(1, n_sites + 1):
        for q in (2 * site - 1, 2 * site):
            mass = mass + (-1) ** site / 2 * operator(n, {q: "Z"})

    kinetic = np.zeros_like(identity, dtype=complex)
    for q in range(1, n - 1):
        hop = operator(n, {q: "+", q + 1: "Z", q + 2: "-"})
        kinetic += -0.5 * (hop + hop.conj().T)

    electric = np.zeros_like(identity, dtype=complex)
    for site in range(1, n_sites):
        a, b = 2 * site - 1, 2 * site
        electric += 3 / 16 * (n_sites - site) * (identity - operator(n, {a: "Z", b: "Z"}))
    for site in range(1, n_sites - 1):
        for other in range(site + 1, n_sites):
            weight = n_sites - other
            d1 = operator(n, {2 * site - 1: "Z"}) - operator(n, {2 * site: "Z"})
            d2 = operator(n, {2 * other - 1: "Z"}) - operator(n, {2 * other: "Z"})
            electric += weight / 16 * d1 @ d2
            flip = operator(n, {2 * site - 1: "+", 2 * site: "-", 2 * other - 1: "-", 2 * other: "+"})
            electric += weight / 2 * (flip + flip.conj().T)

    return m_tilde * mass + electric / x + kinetic


@pytest.mark.parametrize("n_sites", [2, 4])
@pytest.mark.parametrize("m_tilde,x", [(1.0, 1.0), (0.5, 2.0), (3.0, 0.25)])
def test_hamiltonian_matches_naive_expansion(n_sites, m_tilde, x):
    h = build_hamiltonian(LatticeParams(n_sites, m_tilde, x))
    assert np.allclose(h.to_matrix(), naive_hamiltonian(n_sites, m_tilde, x), atol=1e-12)


def test_kinetic_coefficient_is_a_quarter():
    kinetic = model_operators(2).h_kinetic
    assert set(np.round(np.abs(kinetic.coefficients), 12)) == {0.25}
    assert len(kinetic) == 4


@pytest.mark.parametrize("n_sites", [2, 4, 6, 8])
@pytest.mark.parametrize("m_tilde,x", [(1.0, 1.0), (0.1, 5.0), (10.0, 0.2)])
def test_strong_coupling_vacuum_has_zero_energy(n_sites, m_tilde, x):
    h = build_hamiltonian(LatticeParams(n_sites, m_tilde, x))
    index = vacuum_state(n_sites)
    diagonal = sum(c for s, c in h.terms.items() if s.is_diagonal and (s.z & index).bit_count() % 2 == 0)
    diagonal -= sum(c for s, c in h.terms.items() if s.is_diagonal and (s.z & index).bit_count() % 2 == 1)
    assert diagonal == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n_sites", [2, 4])
def test_hamiltonian_conserves_charges_and_baryon_number(n_sites):
    h = build_hamiltonian(LatticeParams(n_sites, 1.3, 0.7))
    for charge in (*charge_operators(n_sites), baryon_number_operator(n_sites)):
        assert h.commutes_with(charge, tolerance=1e-12)


def test_symmetries_hold_on_states_for_six_sites(rng):
    h = build_hamiltonian(LatticeParams(6, 1.0, 2.0))
    for _ in range(3):
        state = rng.normal(size=1 << 12) + 1j * rng.normal(size=1 << 12)
        for charge in (*charge_operators(6), baryon_number_operator(6)):
            difference = h.apply(charge.apply(state)) - charge.apply(h.apply(state))
            assert np.abs(difference).max() < 1e-9


@pytest.mark.parametrize("n_sites", [2, 4])
def test_charges_obey_su2_algebra(n_sites):
    qx, qy, qz = (q.to_matrix() for q in charge_operators(n_sites))
    assert np.allclose(qx @ qy - qy @ qx, 1j * qz)
    assert np.allclose(qy @ qz - qz @ qy, 1j * qx)


def test_casimir_is_sum_of_squares():
    qx, qy, qz = (q.to_matrix() for q in charge_operators(2))
    assert np.allclose(casimir_operator(2).to_matrix(), qx @ qx + qy @ qy + qz @ qz)


@pytest.mark.parametrize("n_sites", [2, 4, 6, 8])
def test_term_count_formula(n_sites):
    count = pauli_term_count(n_sites)
    assert count.formula == 6 * n_sites ** 2 - 11 * n_sites + 9
    assert count.actual == count.formula
    assert count.merged == count.formula - 1
    assert count.merged == len(build_hamiltonian(LatticeParams(n_sites, 1.0, 1.0)))


def test_term_count_for_four_sites():
    assert pauli_term_count(4).formula == 61


def test_weights_match_hamiltonian():
    operators = model_operators(4)
    strings, weights = operators.weights(0.7, 1.9)
    h = build_hamiltonian(LatticeParams(4, 0.7, 1.9))
    rebuilt = {s: w for s, w in zip(strings, weights) if abs(w) > 1e-12}
    assert rebuilt.keys() == h.terms.keys()
    for string, coefficient in h.terms.items():
        assert rebuilt[string] == pytest.approx(coefficient, abs=1e-14)


def test_blocks_are_linear_in_couplings():
    blocks = model_operators(2).blocks
    a = blocks.coefficients(1.0, 2.0)
    b = blocks.coefficients(3.0, 2.0)
    assert np.allclose(b - a, 2.0 * blocks.mass)
    with pytest.raises(ParameterError):
        blocks.coefficients(1.0, 0.0)


def test_spin_words():
    assert from_spins("↑↓") == 0b10
    assert from_spins("uudd") == from_spins("↑↑↓↓") == 0b1100
    assert to_spins(0b1100, 4) == "↑↑↓↓"
    with pytest.raises(ParameterError):
        from_spins("u?")


def test_reference_states():
    assert vacuum_state(2) == from_spins("↑↑↓↓")
    assert vacuum_state(4) == from_spins("↑↑↓↓↑↑↓↓")
    assert strong_coupling_state(2, 1) == from_spins("↑↑↑↑")
    assert strong_coupling_state(2, -1) == from_spins("↓↓↓↓")
    assert strong_coupling_state(4, 1) == from_spins("↑↑↓↓↑↑↑↑")
    assert magnetization(strong_coupling_state(4, 1), 8) == 4


def test_particle_number():
    assert particle_number(4, vacuum_state(4)) == 0
    assert particle_number(4, strong_coupling_state(4, 1)) == 2
    assert particle_number(2, from_spins("↑↓↓↑")) == 2


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        LatticeParams(3, 1.0, 1.0)
    with pytest.raises(ParameterError):
        LatticeParams(4, 1.0, 0.0)
    with pytest.raises(ParameterError):
        LatticeParams(4, -1.0, 1.0)
    with pytest.raises(ParameterError):
        model_operators(5)
    with pytest.raises(ParameterError):
        strong_coupling_state(4, 3)
