from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.errors import ParameterError, SingularMatrixError
from hadronvqe.pauli.grouping import group_for_measurement
from hadronvqe.pauli.strings import PauliString
from hadronvqe.pauli.sums import PauliSum
from hadronvqe.simulator.noise import NoiseModel, fold_cnots, noisy_expectation
from hadronvqe.simulator.sampling import MeasurementRecord, Program, estimate_expectations, parity_values, sample_groups


log = logging.getLogger(__name__)


def _as_distribution(observed: np.ndarray | Mapping[int, int], n_qubits: int) -> np.ndarray:
    if isinstance(observed, Mapping):
        out = np.zeros(1 << n_qubits)
        for outcome, count in observed.items():
            out[outcome] = count
    else:
        out = np.asarray(observed, dtype=float).reshape(-1).copy()
    if out.size != 1 << n_qubits:
        raise ParameterError(f"distribution of size {out.size} for {n_qubits} qubits")
    total = out.sum()
    if total <= 0:
        raise ParameterError("empty distribution")
    return out / total


def readout_mitigate(observed: np.ndarray | Mapping[int, int], matrices: Sequence[np.ndarray]) -> np.ndarray:
    """True-probability estimate from observed counts or probabilities.

    Applies the tensor product of the inverted per-qubit confusion
    matrices, then clips negative entries and renormalises.
    """

    n = len(matrices)
    probabilities = _as_distribution(observed, n)

    tensor = probabilities.reshape((2,) * n)
    for q, matrix in enumerate(matrices, start=1):
        matrix = np.asarray(matrix, dtype=float)
        if abs(np.linalg.det(matrix)) < 1e-12:
            raise SingularMatrixError(f"confusion matrix of qubit {q} is singular")
        axis = n - q
        tensor = np.moveaxis(np.tensordot(np.linalg.inv(matrix), tensor, axes=([1], [axis])), 0, axis)

    corrected = tensor.reshape(-1)
    negative = -corrected[corrected < 0].sum()
    if negative > 1e-12:
        log.warning("readout inversion clipped %.3g of negative probability", negative)
    corrected = np.clip(corrected, 0, None)
    return corrected / corrected.sum()


def mitigated_record_values(
    records: Sequence[MeasurementRecord],
    strings: Sequence[PauliString],
    matrices: Sequence[np.ndarray],
) -> np.ndarray:
    """String expectations from readout-corrected group distributions."""

    n = len(matrices)
    corrected = {r.group_index: readout_mitigate(r.counts, matrices) for r in records}
    outcomes = np.arange(1 << n)
    out = np.empty(len(strings))
    for k, string in enumerate(strings):
        if string.is_identity:
            out[k] = 1.0
            continue
        record = next((r for r in records if string in r.group), None)
        if record is None:
            raise ParameterError(f"{string.label} was not measured")
        out[k] = float(corrected[record.group_index] @ parity_values(outcomes, string))
    return out


@dataclass(frozen=True)
class ZNEResult:
    folds: tuple[int, ...]
    values: tuple[float, ...]
    extrapolated: float
    slope: float


def zne_cnot_folding(
    circuit: Circuit,
    theta: Sequence[float],
    observable: PauliSum,
    noise: NoiseModel,
    folds: Sequence[int] = (1, 3, 5),
    shots: int | None = None,
    initial: int = 0,
) -> ZNEResult:
    """Linear zero-noise extrapolation over CNOT fold factors.

    Without shots every fold is evaluated exactly under the depolarizing
    channel, otherwise from sampled groups. The unweighted least-squares
    line through (fold, value) is read off at fold 0.
    """

    folds = tuple(int(f) for f in folds)
    if len(set(folds)) < 2:
        raise ParameterError("extrapolation needs at least two distinct folds")

    groups = group_for_measurement(observable) if shots is not None else ()
    values = []
    for fold in folds:
        folded = fold_cnots(circuit, fold)
        if shots is None:
            value = noisy_expectation(folded, theta, initial, observable, noise)
        else:
            program = Program(folded, tuple(theta), initial)
            records = sample_groups(program, groups, shots, noise, noise.seed, fold)
            value = estimate_expectations(records, observable).energy
        log.debug("fold %d: %.12g", fold, value)
        values.append(value)

    slope, intercept = np.polyfit(np.array(folds, dtype=float), np.array(values), deg=1)
    return ZNEResult(folds, tuple(values), float(intercept), float(slope))
