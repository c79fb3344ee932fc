from hadronvqe.vqe.cache import CacheEntry, EvaluationCache, best_cached, reweight_cache
from hadronvqe.vqe.costs import (
    EnergyObjective,
    GramSchmidtCost,
    GroundCost,
    PenaltyCost,
    cost_excited_gram_schmidt,
    cost_excited_penalty,
    cost_ground,
)
from hadronvqe.vqe.estimators import ExactEstimator, MeasurementPlan, SampledEstimator, make_estimator
from hadronvqe.vqe.optimizer import OptimizerConfig, TraceEntry, VQEResult, optimize, optimize_sequential
from hadronvqe.vqe.protocols import noise_study, run_baryon_mass, run_brickwork_baryon, run_meson_mass

__all__ = [
    "CacheEntry",
    "EnergyObjective",
    "EvaluationCache",
    "ExactEstimator",
    "GramSchmidtCost",
    "GroundCost",
    "MeasurementPlan",
    "OptimizerConfig",
    "PenaltyCost",
    "SampledEstimator",
    "TraceEntry",
    "VQEResult",
    "best_cached",
    "cost_excited_gram_schmidt",
    "cost_excited_penalty",
    "cost_ground",
    "make_estimator",
    "noise_study",
    "optimize",
    "optimize_sequential",
    "reweight_cache",
    "run_baryon_mass",
    "run_brickwork_baryon",
    "run_meson_mass",
]
