"""End-to-end hadron mass runs built from ansatz, estimator, cost and optimizer."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hadronvqe.circuits.ansatz import Ansatz, ansatz_brickwork, ansatz_n4_baryon_general, singlet_sector_ansatz
from hadronvqe.circuits.reduction import ReducedProblem, reduce_problem
from hadronvqe.config import VQEConfig
from hadronvqe.errors import ParameterError
from hadronvqe.model.hamiltonian import CoefficientBlocks, model_operators
from hadronvqe.simulator.mitigation import zne_cnot_folding
from hadronvqe.simulator.noise import ConvexError, NoiseModel
from hadronvqe.vqe.cache import best_cached
from hadronvqe.vqe.costs import EnergyObjective, GramSchmidtCost, GroundCost, PenaltyCost, default_beta
from hadronvqe.vqe.estimators import MeasurementPlan, make_estimator
from hadronvqe.vqe.optimizer import OptimizerConfig, VQEResult, optimize, optimize_sequential


log = logging.getLogger(__name__)

# evaluations granted per parameter when the configured budget is smaller
BUDGET_PER_PARAM = 200


@dataclass(frozen=True)
class BaryonRow:
    n_sites: int
    m_tilde: float
    x: float
    e_vacuum: float
    e_baryon: float
    evaluations: int
    theta_vacuum: tuple[float, ...] = ()
    theta_baryon: tuple[float, ...] = ()

    @property
    def m_baryon(self) -> float:
        return self.e_baryon - self.e_vacuum

    def row(self) -> dict:
        return {
            "N": self.n_sites,
            "m_tilde": self.m_tilde,
            "x": self.x,
            "E_v": self.e_vacuum,
            "E_b": self.e_baryon,
            "M_b": self.m_baryon,
            "evals_used": self.evaluations,
        }


@dataclass(frozen=True)
class MesonRow:
    n_sites: int
    m_tilde: float
    x: float
    method: str
    e_vacuum: float
    e_meson: float
    overlap_final: float
    evaluations: int
    flagged: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def m_meson(self) -> float:
        return self.e_meson - self.e_vacuum

    def row(self) -> dict:
        return {
            "N": self.n_sites,
            "m_tilde": self.m_tilde,
            "x": self.x,
            "method": self.method,
            "E_v": self.e_vacuum,
            "E_m": self.e_meson,
            "M_m": self.m_meson,
            "overlap_final": self.overlap_final,
            "evals_used": self.evaluations,
            "flagged": self.flagged,
        }


@dataclass
class _Sector:
    """An ansatz prepared for estimation, possibly on a reduced register."""

    ansatz: Ansatz
    problem: ReducedProblem
    objective: EnergyObjective | None = None
    theta: np.ndarray | None = None

    @property
    def n_params(self) -> int:
        return self.problem.circuit.n_params


def _prepare(ansatz: Ansatz, blocks: CoefficientBlocks, reduce: bool) -> _Sector:
    if reduce:
        problem = reduce_problem(ansatz, blocks)
    else:
        n = ansatz.n_qubits
        problem = ReducedProblem(ansatz.circuit, ansatz.initial, tuple(range(1, n + 1)), {}, blocks)
    return _Sector(ansatz, problem)


def _attach_estimators(
    sectors: Sequence[_Sector],
    mode: str,
    shots: int | None,
    noise: NoiseModel | None,
    seed: int,
    convex_error: ConvexError | None,
) -> None:
    """One measurement plan over the union of strings when the sectors share a register."""

    joint = len({s.problem.active for s in sectors}) == 1
    if joint:
        plans = [MeasurementPlan.from_blocks(*(s.problem.blocks for s in sectors))] * len(sectors)
    else:
        log.debug("sectors reduce onto different qubits, measuring them separately")
        plans = [MeasurementPlan.from_blocks(s.problem.blocks) for s in sectors]

    for offset, (sector, plan) in enumerate(zip(sectors, plans)):
        problem = sector.problem
        estimator = make_estimator(
            mode, problem.circuit, problem.initial, plan, shots, noise, seed + offset, convex_error
        )
        sector.objective = EnergyObjective(estimator, problem.blocks.align(plan.strings))


def _config_for(config: OptimizerConfig, n_params: int) -> OptimizerConfig:
    return config.replace(budget=max(config.budget, BUDGET_PER_PARAM * n_params))


def _minimise(
    sector: _Sector,
    m_tilde: float,
    x: float,
    config: OptimizerConfig,
) -> VQEResult:
    objective = sector.objective.at(m_tilde, x)
    warm = [theta for _, theta in best_cached(objective.cache, objective.blocks, m_tilde, x, count=3)]
    if sector.theta is not None:
        warm.insert(0, sector.theta)
    result = optimize(
        GroundCost(objective),
        sector.n_params,
        _config_for(config, sector.n_params),
        warm_start=warm,
        frequencies=sector.problem.circuit.slot_frequencies(),
    )
    sector.theta = result.best_theta
    return result


def _revisit(sector: _Sector, m_tilde: float, x: float, value: float, theta: np.ndarray) -> tuple[float, np.ndarray]:
    """Best of the run's own optimum and every point cached since."""

    objective = sector.objective
    best = best_cached(objective.cache, objective.blocks, m_tilde, x, count=1)
    if best and best[0][0] < value:
        return best[0]
    return value, theta


def run_baryon_mass(
    n_sites: int,
    m_tilde: float,
    x_grid: Sequence[float],
    mode: str = "exact",
    shots: int | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
    reduce: bool = True,
    convex_error: ConvexError | None = None,
    config: OptimizerConfig | None = None,
    max_particles: int | None = None,
) -> list[BaryonRow]:
    """M_b = E_b - E_v along x from ground runs in the B = 0 and B = 1 singlet sectors.

    Both sectors are estimated against one measurement plan. Each x starts
    from the previous optimum and the best cached points reweighted to the
    new couplings; after the sweep every x is revisited through the cache.
    """

    if not x_grid:
        raise ParameterError("empty x grid")
    config = config or OptimizerConfig(seed=seed)
    blocks = model_operators(n_sites).blocks

    vacuum = _prepare(singlet_sector_ansatz(n_sites, 0, max_particles), blocks, reduce)
    if n_sites == 4 and max_particles is None:
        baryon_ansatz = ansatz_n4_baryon_general()
    else:
        baryon_ansatz = singlet_sector_ansatz(n_sites, 1, max_particles)
    baryon = _prepare(baryon_ansatz, blocks, reduce)
    _attach_estimators((vacuum, baryon), mode, shots, noise, seed, convex_error)

    found = []
    for x in x_grid:
        v = _minimise(vacuum, m_tilde, x, config)
        b = _minimise(baryon, m_tilde, x, config)
        found.append((x, v, b))
        log.info("x=%g: E_v=%.10g E_b=%.10g M_b=%.10g", x, v.best_value, b.best_value, b.best_value - v.best_value)

    rows = []
    for x, v, b in found:
        e_v, theta_v = _revisit(vacuum, m_tilde, x, v.best_value, v.best_theta)
        e_b, theta_b = _revisit(baryon, m_tilde, x, b.best_value, b.best_theta)
        rows.append(BaryonRow(
            n_sites, m_tilde, x, e_v, e_b,
            v.evaluations + b.evaluations,
            tuple(np.asarray(theta_v, dtype=float)),
            tuple(np.asarray(theta_b, dtype=float)),
        ))
    return rows


def run_meson_mass(
    n_sites: int,
    m_tilde: float,
    x_grid: Sequence[float],
    method: str = "penalty",
    mode: str = "exact",
    shots: int | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
    beta: float | None = None,
    config: OptimizerConfig | None = None,
) -> list[MesonRow]:
    """M_m = E_m - E_v in the B = 0 singlet sector.

    Per x: I. ground run for theta_v and E_v, II. overlap circuit checked
    at theta_v, III. excited run with the penalty or Gram-Schmidt cost,
    IV. the difference.
    """

    if method not in ("penalty", "gram_schmidt"):
        raise ParameterError(f"unknown excited-state method {method!r}")
    if not x_grid:
        raise ParameterError("empty x grid")
    config = config or OptimizerConfig(seed=seed)
    blocks = model_operators(n_sites).blocks

    # the overlap circuit needs the whole register
    sector = _prepare(singlet_sector_ansatz(n_sites, 0), blocks, reduce=False)
    _attach_estimators((sector,), mode, shots, noise, seed, None)

    rows = []
    for x in x_grid:
        ground = _minimise(sector, m_tilde, x, config)
        theta_v, e_v = ground.best_theta, ground.best_value
        log.info("step I, x=%g: E_v=%.10g after %d evaluations", x, e_v, ground.evaluations)

        objective = sector.objective.at(m_tilde, x)
        return_probability = objective.overlap(theta_v, theta_v)
        log.info("step II, x=%g: overlap circuit at theta_v returns %.6f", x, return_probability)

        if method == "penalty":
            weight = beta if beta is not None else default_beta(n_sites, m_tilde, x, objective.blocks)
            cost = PenaltyCost(objective, theta_v, weight)
        else:
            cost = GramSchmidtCost(objective, theta_v, e_v)
        excited = optimize(cost, sector.n_params, _config_for(config, sector.n_params))

        notes = []
        if not math.isfinite(excited.best_value):
            notes.append("overlap guard tripped everywhere")
            e_m = math.nan
        elif method == "penalty":
            e_m = objective.energy(excited.best_theta)
        else:
            e_m = excited.best_value
        overlap = objective.overlap(excited.best_theta, theta_v)
        log.info("step III, x=%g: E_m=%.10g, final overlap %.3g", x, e_m, overlap)
        if overlap > 0.01:
            notes.append(f"excited state overlaps the vacuum with probability {overlap:.3g}")
        if notes:
            log.warning("x=%g flagged: %s", x, "; ".join(notes))

        row = MesonRow(
            n_sites, m_tilde, x, method, e_v, e_m, overlap,
            ground.evaluations + excited.evaluations, bool(notes), tuple(notes),
        )
        log.info("step IV, x=%g: M_m=%.10g", x, row.m_meson)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class BrickworkResult:
    n_sites: int
    m_tilde: float
    x: float
    e_vacuum: float
    e_baryon: float
    evaluations: int

    @property
    def m_baryon(self) -> float:
        return self.e_baryon - self.e_vacuum

    def row(self) -> dict:
        return {
            "N": self.n_sites,
            "m_tilde": self.m_tilde,
            "x": self.x,
            "E_v": self.e_vacuum,
            "E_b": self.e_baryon,
            "M_b": self.m_baryon,
            "evals_used": self.evaluations,
        }


def run_brickwork_baryon(
    n_sites: int,
    m_tilde: float,
    x: float,
    layers_vacuum: int | None = None,
    layers_baryon: int | None = None,
    budget: int | None = None,
    seed: int = 0,
) -> BrickworkResult:
    """Vacuum and baryon energies from PSWAP brickwork circuits, exact estimator.

    The parameter count is far beyond the surrogate's reach, so each
    sector is minimised by single-slot sinusoid sweeps.
    """

    layers_vacuum = layers_vacuum or VQEConfig.brickwork_layers_b0
    layers_baryon = layers_baryon or VQEConfig.brickwork_layers_b1
    blocks = model_operators(n_sites).blocks

    energies, evaluations = [], 0
    for offset, (baryon_number, layers) in enumerate(((0, layers_vacuum), (1, layers_baryon))):
        sector = _prepare(ansatz_brickwork(n_sites, layers, baryon_number), blocks, reduce=False)
        _attach_estimators((sector,), "exact", None, None, seed, None)
        objective = sector.objective.at(m_tilde, x)
        result = optimize_sequential(
            GroundCost(objective),
            sector.problem.circuit.slot_frequencies(),
            budget=budget,
            seed=seed + offset,
        )
        energies.append(result.best_value)
        evaluations += result.evaluations
        log.info(
            "N=%d B=%d brickwork, %d layers: E=%.10g after %d evaluations (%s)",
            n_sites, baryon_number, layers, result.best_value, result.evaluations, result.stop_reason,
        )

    return BrickworkResult(n_sites, m_tilde, x, energies[0], energies[1], evaluations)


@dataclass(frozen=True)
class NoiseStudy:
    n_sites: int
    m_tilde: float
    x: float
    depolarizing: float
    ideal: float
    folds: tuple[int, ...]
    fold_values: tuple[float, ...]
    extrapolated: float
    convex_probability: float
    mass_ideal: float
    mass_convex: float

    def row(self) -> dict:
        out = {
            "N": self.n_sites,
            "m_tilde": self.m_tilde,
            "x": self.x,
            "p_depolarizing": self.depolarizing,
            "E_ideal": self.ideal,
            "E_zne": self.extrapolated,
        }
        for fold, value in zip(self.folds, self.fold_values):
            out[f"E_fold{fold}"] = value
        out["p_convex"] = self.convex_probability
        out["M_b_ideal"] = self.mass_ideal
        out["M_b_convex"] = self.mass_convex
        return out


def noise_study(
    n_sites: int,
    m_tilde: float,
    x: float,
    depolarizing: float = 0.01,
    folds: Sequence[int] = (1, 3, 5),
    shots: int | None = None,
    convex_probability: float = 0.1,
    seed: int = 0,
    config: OptimizerConfig | None = None,
) -> NoiseStudy:
    """CNOT-folding extrapolation of the vacuum energy and the convex error on M_b.

    The vacuum is optimised noiselessly, then its energy is re-evaluated
    at growing fold factors under two-qubit depolarizing noise. The baryon
    mass is recomputed with a convex error mixed into every expectation.
    """

    config = config or OptimizerConfig(seed=seed)
    clean = run_baryon_mass(n_sites, m_tilde, [x], reduce=False, config=config)[0]

    vacuum = singlet_sector_ansatz(n_sites, 0)
    h = model_operators(n_sites).blocks.hamiltonian(m_tilde, x)
    noise = NoiseModel.uniform(vacuum.n_qubits, depolarizing=depolarizing, seed=seed)
    zne = zne_cnot_folding(vacuum.circuit, clean.theta_vacuum, h, noise, folds, shots, vacuum.initial)
    log.info("ideal %.10g, folds %s, extrapolated %.10g", clean.e_vacuum, zne.values, zne.extrapolated)

    noisy = _convex_mass(n_sites, m_tilde, x, clean, ConvexError(convex_probability))
    log.info("M_b %.10g ideal, %.10g with convex error p=%g", clean.m_baryon, noisy, convex_probability)
    return NoiseStudy(
        n_sites, m_tilde, x, depolarizing, clean.e_vacuum,
        zne.folds, zne.values, zne.extrapolated,
        convex_probability, clean.m_baryon, noisy,
    )


def _convex_mass(n_sites: int, m_tilde: float, x: float, clean: BaryonRow, error: ConvexError) -> float:
    """E_b - E_v at the clean optima with the error mixed into every expectation."""

    blocks = model_operators(n_sites).blocks
    vacuum = _prepare(singlet_sector_ansatz(n_sites, 0), blocks, reduce=False)
    baryon_ansatz = ansatz_n4_baryon_general() if n_sites == 4 else singlet_sector_ansatz(n_sites, 1)
    baryon = _prepare(baryon_ansatz, blocks, reduce=False)
    _attach_estimators((vacuum, baryon), "exact", None, None, 0, error)
    e_v = vacuum.objective.at(m_tilde, x).energy(clean.theta_vacuum)
    e_b = baryon.objective.at(m_tilde, x).energy(clean.theta_baryon)
    return e_b - e_v
