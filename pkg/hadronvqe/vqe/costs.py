from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from hadronvqe.circuits.ansatz import Ansatz
from hadronvqe.config import VQEConfig
from hadronvqe.errors import OutOfDomainError, ParameterError
from hadronvqe.model.hamiltonian import CoefficientBlocks
from hadronvqe.pauli.sums import PauliSum
from hadronvqe.vqe.cache import EvaluationCache, reweight_cache
from hadronvqe.vqe.estimators import ExactEstimator, MeasurementPlan, SampledEstimator


log = logging.getLogger(__name__)


def blocks_of(h: PauliSum) -> CoefficientBlocks:
    """A fixed Hamiltonian as coefficient blocks, weight 1 on the kinetic slot."""

    zero = PauliSum(h.n_qubits)
    return CoefficientBlocks.from_sums(zero, zero, h)


class EnergyObjective:
    """Energy of an estimator's state at one (m_tilde, x).

    Every evaluation lands in the cache and the energy is always read back
    through cache reweighting, so fresh and reweighted values coincide.
    """

    def __init__(
        self,
        estimator: ExactEstimator | SampledEstimator,
        blocks: CoefficientBlocks,
        m_tilde: float = 0.0,
        x: float = 1.0,
        cache: EvaluationCache | None = None,
    ):
        self.estimator = estimator
        self.blocks = blocks
        self.m_tilde = m_tilde
        self.x = x
        self.cache = cache if cache is not None else EvaluationCache()
        self.evaluations = 0

    @property
    def n_params(self) -> int:
        return self.estimator.circuit.n_params

    def at(self, m_tilde: float, x: float) -> EnergyObjective:
        """Same estimator and cache at other couplings."""

        return EnergyObjective(self.estimator, self.blocks, m_tilde, x, self.cache)

    def expectations(self, theta: Sequence[float]) -> np.ndarray:
        entry = self.cache.lookup(theta)
        if entry is None:
            values = self.estimator(theta)
            self.evaluations += 1
            entry = self.cache.store(theta, self.estimator.strings, values, {"mode": self.estimator.mode})
        return entry.values_for(self.estimator.strings)

    def energy(self, theta: Sequence[float]) -> float:
        self.expectations(theta)
        return reweight_cache(self.cache, theta, self.blocks, self.m_tilde, self.x)

    def overlap(self, theta: Sequence[float], theta_ref: Sequence[float]) -> float:
        return self.estimator.overlap(theta, theta_ref)


class GroundCost:
    def __init__(self, objective: EnergyObjective):
        self.objective = objective

    @property
    def n_params(self) -> int:
        return self.objective.n_params

    def __call__(self, theta: Sequence[float]) -> float:
        return self.objective.energy(theta)


def default_beta(n_sites: int, m_tilde: float, x: float, blocks: CoefficientBlocks) -> float:
    """Twice a bound on the spectral width of the mass and electric parts."""

    return 2 * (m_tilde * n_sites + blocks.electric_norm_bound() / x)


class PenaltyCost:
    """E(theta) + beta |<psi(theta)|psi(theta_ref)>|.

    The overlap magnitude is the square root of the measured return
    probability, power "square" uses the probability itself.
    """

    def __init__(
        self,
        objective: EnergyObjective,
        theta_ref: Sequence[float],
        beta: float,
        power: str | None = None,
    ):
        if beta <= 0:
            raise ParameterError(f"beta must be positive, got {beta}")
        power = power or VQEConfig.penalty_power
        if power not in ("sqrt", "square"):
            raise ParameterError(f"unknown penalty power {power!r}")
        self.objective = objective
        self.theta_ref = np.asarray(theta_ref, dtype=float)
        self.beta = beta
        self.power = power

    @property
    def n_params(self) -> int:
        return self.objective.n_params

    def __call__(self, theta: Sequence[float]) -> float:
        probability = self.objective.overlap(theta, self.theta_ref)
        weight = math.sqrt(max(probability, 0.0)) if self.power == "sqrt" else probability
        return self.objective.energy(theta) + self.beta * weight


class GramSchmidtCost:
    """(E(theta) - E_ref P) / (1 - P) with P the return probability to the reference state."""

    def __init__(
        self,
        objective: EnergyObjective,
        theta_ref: Sequence[float],
        e_ref: float,
        guard: float | None = None,
    ):
        self.objective = objective
        self.theta_ref = np.asarray(theta_ref, dtype=float)
        self.e_ref = e_ref
        self.guard = VQEConfig.gs_guard if guard is None else guard

    @property
    def n_params(self) -> int:
        return self.objective.n_params

    def __call__(self, theta: Sequence[float]) -> float:
        probability = self.objective.overlap(theta, self.theta_ref)
        return gram_schmidt_value(self.objective.energy(theta), probability, self.e_ref, self.guard)


def gram_schmidt_value(energy: float, probability: float, e_ref: float, guard: float | None = None) -> float:
    guard = VQEConfig.gs_guard if guard is None else guard
    if probability >= 1 - guard:
        raise OutOfDomainError(f"overlap probability {probability:.9f} within {guard} of one")
    return (energy - e_ref * probability) / (1 - probability)


def _objective(h: PauliSum, ansatz: Ansatz, estimator=None) -> EnergyObjective:
    blocks = blocks_of(h)
    if estimator is None:
        estimator = ExactEstimator(ansatz.circuit, ansatz.initial, MeasurementPlan.from_blocks(blocks))
    return EnergyObjective(estimator, blocks.align(estimator.strings))


def cost_ground(theta: Sequence[float], h: PauliSum, ansatz: Ansatz, estimator=None) -> float:
    return GroundCost(_objective(h, ansatz, estimator))(theta)


def cost_excited_penalty(
    theta: Sequence[float],
    h: PauliSum,
    theta_ref: Sequence[float],
    beta: float,
    ansatz: Ansatz,
    estimator=None,
    power: str | None = None,
) -> float:
    return PenaltyCost(_objective(h, ansatz, estimator), theta_ref, beta, power)(theta)


def cost_excited_gram_schmidt(
    theta: Sequence[float],
    h: PauliSum,
    theta_ref: Sequence[float],
    e_ref: float,
    ansatz: Ansatz,
    estimator=None,
    guard: float | None = None,
) -> float:
    return GramSchmidtCost(_objective(h, ansatz, estimator), theta_ref, e_ref, guard)(theta)
