"""Exact and variational simulation of a 1D SU(2) lattice gauge theory on qubits."""

__version__ = "0.1.0"
