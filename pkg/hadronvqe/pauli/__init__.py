from hadronvqe.pauli.strings import PauliString, commutes, multiply, qubitwise_compatible
from hadronvqe.pauli.sums import PauliSum, PauliTerm, pauli_expectations
from hadronvqe.pauli.grouping import MeasurementGroup, group_for_measurement, group_strings

__all__ = [
    "MeasurementGroup",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "commutes",
    "group_for_measurement",
    "group_strings",
    "multiply",
    "pauli_expectations",
    "qubitwise_compatible",
]
