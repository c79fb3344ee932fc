from hadronvqe.simulator.statevector import StateVector, apply_circuit, expectation_exact, prepare
from hadronvqe.simulator.noise import ConvexError, NoiseModel, calibration_matrices, fold_cnots, noisy_expectation
from hadronvqe.simulator.sampling import (
    Estimate,
    MeasurementRecord,
    Program,
    estimate_expectations,
    overlap_probability,
    sample_groups,
)
from hadronvqe.simulator.mitigation import ZNEResult, readout_mitigate, zne_cnot_folding

__all__ = [
    "ConvexError",
    "Estimate",
    "MeasurementRecord",
    "NoiseModel",
    "Program",
    "StateVector",
    "ZNEResult",
    "apply_circuit",
    "calibration_matrices",
    "estimate_expectations",
    "expectation_exact",
    "fold_cnots",
    "noisy_expectation",
    "overlap_probability",
    "prepare",
    "readout_mitigate",
    "sample_groups",
    "zne_cnot_folding",
]
