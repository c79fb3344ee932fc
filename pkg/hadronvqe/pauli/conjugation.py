from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy import sparse

from hadronvqe.circuits.gates import Gate, GateKind
from hadronvqe.config import PauliConfig
from hadronvqe.errors import ConjugationLimitError, DimensionError, ParameterError, UnsupportedGateError
from hadronvqe.pauli.strings import PHASES, PauliString, compress, expand, multiply_exponent
from hadronvqe.pauli.sums import PauliSum, PauliTerm, accumulate


log = logging.getLogger(__name__)

_QUARTER = math.pi / 2


def _quarter_turns(angle: float) -> int | None:
    turns = angle / _QUARTER
    nearest = round(turns)
    if abs(turns - nearest) > 1e-12:
        return None
    return nearest % 4


def is_clifford(gate: Gate) -> bool:
    if gate.kind in (GateKind.X, GateKind.CNOT, GateKind.SWAP):
        return True
    if gate.kind is GateKind.RY and not gate.is_parametric:
        return _quarter_turns(gate.angle()) is not None
    return False


def _generator_images(gate: Gate, n_qubits: int) -> dict[tuple[str, int], tuple[PauliString, int]]:
    """Heisenberg images g^dag G g of the generators X_q and Z_q that the gate changes.

    Values are (string, sign) pairs, generators missing from the map are invariant.
    """

    def single(q: int, letter: str) -> PauliString:
        return PauliString.from_ops(n_qubits, {q: letter})

    images = {}
    if gate.kind is GateKind.X:
        (q,) = gate.qubits
        images[("Z", q)] = (single(q, "Z"), -1)
    elif gate.kind is GateKind.SWAP:
        a, b = gate.qubits
        for letter in "XZ":
            images[(letter, a)] = (single(b, letter), 1)
            images[(letter, b)] = (single(a, letter), 1)
    elif gate.kind is GateKind.CNOT:
        c, t = gate.qubits
        images[("X", c)] = (PauliString.from_ops(n_qubits, {c: "X", t: "X"}), 1)
        images[("Z", t)] = (PauliString.from_ops(n_qubits, {c: "Z", t: "Z"}), 1)
    elif gate.kind is GateKind.RY:
        (q,) = gate.qubits
        turns = _quarter_turns(gate.angle())
        # g^dag Z g = cos Z - sin X and g^dag X g = cos X + sin Z
        z_image = {0: ("Z", 1), 1: ("X", -1), 2: ("Z", -1), 3: ("X", 1)}[turns]
        x_image = {0: ("X", 1), 1: ("Z", 1), 2: ("X", -1), 3: ("Z", -1)}[turns]
        images[("Z", q)] = (single(q, z_image[0]), z_image[1])
        images[("X", q)] = (single(q, x_image[0]), x_image[1])
    return images


def _conjugate_string(string: PauliString, images: Mapping) -> tuple[PauliString, int]:
    """Image of a string under a Clifford given its generator images."""

    n = string.n_qubits
    touched = {q for _, q in images}
    rest_mask = sum(1 << (q - 1) for q in touched)
    result = PauliString(n, string.x & ~rest_mask, string.z & ~rest_mask)
    exponent = 0

    for q in sorted(touched):
        bit = 1 << (q - 1)
        xq, zq = bool(string.x & bit), bool(string.z & bit)
        if xq and zq:
            # Y = i X Z
            exponent += 1
        for letter, present in (("X", xq), ("Z", zq)):
            if not present:
                continue
            image, sign = images.get((letter, q), (PauliString.from_ops(n, {q: letter}), 1))
            result, k = multiply_exponent(result, image)
            exponent += k + (2 if sign < 0 else 0)

    exponent %= 4
    if exponent % 2:
        raise UnsupportedGateError(f"non-Hermitian image of {string.label}")
    return result, 1 - exponent


def _open_control_flips(gate: Gate) -> list[Gate]:
    return [Gate(GateKind.X, (q,)) for q, bit in zip(gate.controls, gate.polarity) if bit == 0]


def conjugate_clifford(term: PauliTerm, gate: Gate) -> PauliTerm:
    """Returns g^dag t g for a Clifford gate as a single signed term."""

    if gate.is_parametric:
        raise ParameterError("cannot conjugate by a gate with a symbolic angle")
    if not is_clifford(gate):
        raise UnsupportedGateError(f"{gate.kind.value} is not a supported Clifford gate")

    n = term.string.n_qubits
    if max(gate.qubits) > n:
        raise DimensionError(f"gate on qubits {gate.qubits} for a {n}-qubit term")

    flips = _open_control_flips(gate)
    active = Gate(gate.kind, gate.qubits, gate.param) if flips else gate

    string, sign = term.string, 1
    for step in [*flips, active, *flips]:
        string, s = _conjugate_string(string, _generator_images(step, n))
        sign *= s
    return PauliTerm(string, sign * term.coefficient)


def _walsh_hadamard(vector: np.ndarray, n_bits: int) -> np.ndarray:
    """out[z] = sum_b (-1)^popcount(b & z) vector[b]."""

    if n_bits == 0:
        return vector.copy()
    work = vector.reshape((2,) * n_bits)
    for axis in range(n_bits):
        low, high = np.take(work, 0, axis=axis), np.take(work, 1, axis=axis)
        work = np.stack((low + high, low - high), axis=axis)
    return work.reshape(-1)


def pauli_decompose(matrix, n_bits: int, tolerance: float | None = None) -> dict[tuple[int, int], complex]:
    """Pauli coefficients {(x, z): c} of a (possibly sparse) 2^n x 2^n matrix.

    Uses c(x, z) = 2^-n (-i)^|x&z| sum_b (-1)^|b&z| M[b^x, b], one
    Walsh-Hadamard transform per x mask present in the matrix.
    """

    cutoff = PauliConfig.drop_tolerance if tolerance is None else tolerance
    dim = 1 << n_bits
    coo = sparse.coo_matrix(matrix)

    by_mask: dict[int, np.ndarray] = {}
    for row, col, value in zip(coo.row, coo.col, coo.data):
        mask = int(row) ^ int(col)
        if mask not in by_mask:
            by_mask[mask] = np.zeros(dim, dtype=complex)
        by_mask[mask][col] += value

    out = {}
    zs = np.arange(dim)
    for mask, column in by_mask.items():
        transformed = _walsh_hadamard(column, n_bits) / dim
        for z in zs[np.abs(transformed) > cutoff]:
            z = int(z)
            coefficient = PHASES[(-(mask & z).bit_count()) % 4] * transformed[z]
            if abs(coefficient) > cutoff:
                out[(mask, z)] = complex(coefficient)
    return out


@lru_cache(maxsize=4096)
def _local_image(gate: Gate, x: int, z: int) -> tuple[tuple[int, int, complex], ...]:
    s = len(gate.qubits)
    unitary = sparse.csr_matrix(gate.matrix())
    columns = np.arange(1 << s)
    rows, phases = PauliString(s, x, z).action(columns)
    local = sparse.csr_matrix((phases, (rows, columns)), shape=(1 << s, 1 << s))
    image = unitary.conj().T @ local @ unitary
    return tuple((lx, lz, c) for (lx, lz), c in pauli_decompose(image, s).items())


def conjugate_general(h: PauliSum, gate: Gate, limit: int | None = None) -> PauliSum:
    """Returns g^dag h g expanded in Pauli strings for any fixed gate."""

    if gate.is_parametric:
        raise ParameterError("cannot conjugate by a gate with a symbolic angle")
    if max(gate.qubits) > h.n_qubits:
        raise DimensionError(f"gate on qubits {gate.qubits} for a {h.n_qubits}-qubit sum")

    limit = PauliConfig.conjugation_term_limit if limit is None else limit
    positions = [q - 1 for q in gate.qubits]
    gate_mask = sum(1 << p for p in positions)

    pairs = []
    for string, coefficient in h.terms.items():
        if not string.support & gate_mask:
            pairs.append((string, coefficient))
            continue
        outer_x, outer_z = string.x & ~gate_mask, string.z & ~gate_mask
        local = _local_image(gate, compress(string.x, positions), compress(string.z, positions))
        for lx, lz, c in local:
            image = PauliString(h.n_qubits, outer_x | expand(lx, positions), outer_z | expand(lz, positions))
            pairs.append((image, coefficient * c))
        if len(pairs) > limit:
            raise ConjugationLimitError(f"conjugation by {gate.kind.value} exceeded {limit} terms")

    merged = accumulate(h.n_qubits, pairs)
    result = PauliSum.from_complex(h.n_qubits, merged)
    log.debug("conjugated %d terms by %s on %s into %d terms", len(h), gate.kind.value, gate.qubits, len(result))
    return result


def conjugate(h: PauliSum, gate: Gate, limit: int | None = None) -> PauliSum:
    """g^dag h g, termwise through the Clifford rules when they apply."""

    if is_clifford(gate):
        return PauliSum.from_terms(h.n_qubits, (conjugate_clifford(t, gate) for t in h))
    return conjugate_general(h, gate, limit)


def project_fixed_qubits(h: PauliSum, assignment: Mapping[int, int]) -> PauliSum:
    """Expectation over fixed qubits, assignment maps qubit -> bit (0 up, 1 down).

    Terms with X or Y on a fixed qubit vanish, Z contributes the sign of
    the fixed spin, the remaining qubits are re-indexed in order.
    """

    fixed_mask = 0
    fixed_bits = 0
    for qubit, bit in assignment.items():
        if not 1 <= qubit <= h.n_qubits:
            raise DimensionError(f"qubit {qubit} outside 1..{h.n_qubits}")
        fixed_mask |= 1 << (qubit - 1)
        fixed_bits |= (int(bit) & 1) << (qubit - 1)

    kept = [q for q in range(h.n_qubits) if not fixed_mask >> q & 1]

    def project(string: PauliString):
        if string.x & fixed_mask:
            return None
        sign = -1 if (string.z & fixed_bits).bit_count() % 2 else 1
        return PauliString(len(kept), compress(string.x, kept), compress(string.z, kept)), sign

    return h.map_strings(len(kept), project)
