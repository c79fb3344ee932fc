"""Two-level rotations between computational basis states.

A StatePreparer follows the set of basis states that can carry amplitude
(the populated states) and emits gates acting on exactly one pair of
basis states: every gate is controlled on the fewest qubits telling its
source state apart from all other populated states.
"""
from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from hadronvqe.circuits.circuit import Circuit
from hadronvqe.circuits.gates import Gate, ParamRef, multi_ry, multi_x
from hadronvqe.errors import CircuitContractError, ParameterError


log = logging.getLogger(__name__)

Angle = float | ParamRef


def _negated(angle: Angle) -> Angle:
    return angle.inverse() if isinstance(angle, ParamRef) else -angle


def _scaled(angle: Angle, factor: float) -> Angle:
    if isinstance(angle, ParamRef):
        return replace(angle, scale=angle.scale * factor)
    return factor * angle


class StatePreparer:
    def __init__(self, n_qubits: int, initial: int = 0):
        if not 0 <= initial < 1 << n_qubits:
            raise ParameterError(f"initial state {initial} outside {n_qubits} qubits")
        self.n_qubits = n_qubits
        self.initial = initial
        self.gates: list[Gate] = []
        self._populated = {initial}

    @property
    def populated(self) -> frozenset[int]:
        return frozenset(self._populated)

    def circuit(self, n_params: int = -1) -> Circuit:
        return Circuit(self.n_qubits, tuple(self.gates), n_params)

    def _controls(self, anchor: int, target_bit: int, ignore: Iterable[int] = ()) -> tuple[list[int], list[int]]:
        """Greedy set cover of the populated states by bits where they differ from anchor."""

        ignore = set(ignore)
        others = [v for v in self._populated if v != anchor and v not in ignore]
        if any(v ^ anchor == 1 << target_bit for v in others):
            raise CircuitContractError(f"state {anchor} has a populated partner on qubit {target_bit + 1}")

        candidates = [b for b in range(self.n_qubits) if b != target_bit]
        chosen = []
        while others:
            best = max(candidates, key=lambda b: (sum((v ^ anchor) >> b & 1 for v in others), -b))
            chosen.append(best)
            candidates.remove(best)
            others = [v for v in others if not (v ^ anchor) >> best & 1]
        chosen.sort()
        return [b + 1 for b in chosen], [anchor >> b & 1 for b in chosen]

    def _flip(self, state: int, bit: int) -> int:
        controls, polarity = self._controls(state, bit)
        self.gates.append(multi_x(controls, bit + 1, polarity))
        moved = state ^ (1 << bit)
        self._populated.discard(state)
        self._populated.add(moved)
        return moved

    def _route(self, start: int, goal: int) -> list[int] | None:
        """Bit flips leading from start to goal over unpopulated states."""

        if goal in self._populated:
            return None
        seen = {start}

        def search(state: int, path: list[int]) -> list[int] | None:
            if state == goal:
                return path
            for bit in range(self.n_qubits):
                if not (state ^ goal) >> bit & 1:
                    continue
                step = state ^ (1 << bit)
                if step in seen or step in self._populated:
                    continue
                seen.add(step)
                found = search(step, path + [bit])
                if found is not None:
                    return found
            return None

        return search(start, [])

    def _rotate(self, u: int, pivot: int, angle: Angle) -> None:
        partner = u ^ (1 << pivot)
        controls, polarity = self._controls(u, pivot, ignore=(partner,))
        # RY sends |0> to cos|0> + sin|1> and |1> to cos|1> - sin|0>
        sign = -1.0 if u >> pivot & 1 else 1.0
        self.gates.append(multi_ry(controls, pivot + 1, _scaled(angle, 2 * sign), polarity))
        self._populated.add(partner)

    def move(self, start: int, goal: int) -> None:
        """Moves the amplitude of a populated state onto an unpopulated one."""

        if start not in self._populated:
            raise CircuitContractError(f"state {start} carries no amplitude")
        if start == goal:
            return
        route = self._route(start, goal)
        if route is None:
            raise CircuitContractError(f"no free route from {start} to {goal}")
        for bit in route:
            start = self._flip(start, bit)

    def givens(self, u: int, w: int, angle: Angle) -> None:
        """Rotation |u> -> cos a |u> + sin a |w>, |w> -> cos a |w> - sin a |u>."""

        if u == w:
            raise CircuitContractError("a rotation needs two distinct states")
        if u not in self._populated and w not in self._populated:
            return
        if u not in self._populated:
            self.givens(w, u, _negated(angle))
            return

        w_populated = w in self._populated
        for pivot in range(self.n_qubits):
            if not (u ^ w) >> pivot & 1:
                continue
            partner = u ^ (1 << pivot)
            if partner != w and partner in self._populated:
                continue

            if w_populated:
                route = [] if partner == w else self._route(w, partner)
                if route is None:
                    continue
                moved = w
                for bit in route:
                    moved = self._flip(moved, bit)
                self._rotate(u, pivot, angle)
                for bit in reversed(route):
                    moved = self._flip(moved, bit)
                return

            route = self._route(partner, w) if partner != w else []
            if route is None:
                continue
            self._rotate(u, pivot, angle)
            moved = partner
            for bit in route:
                moved = self._flip(moved, bit)
            return

        raise CircuitContractError(f"no free pivot between states {u} and {w}")

    def flip_sign(self, u: int) -> None:
        """Multiplies the amplitude of |u> by -1."""

        if u not in self._populated:
            return
        for pivot in range(self.n_qubits):
            partner = u ^ (1 << pivot)
            if partner in self._populated:
                continue
            controls, polarity = self._controls(u, pivot)
            self.gates.append(multi_ry(controls, pivot + 1, 2 * math.pi, polarity))
            return
        raise CircuitContractError(f"every neighbour of state {u} is populated")

    def chain(self, states: Sequence[int], first_slot: int = 0) -> None:
        """Hyperspherical chain, slot first_slot + k rotates states[k] into states[k + 1]."""

        for k in range(len(states) - 1):
            self.givens(states[k], states[k + 1], ParamRef(first_slot + k))

    def orthogonal(self, states: Sequence[int], matrix: np.ndarray) -> None:
        """Applies a real orthogonal matrix on span{|s> : s in states}.

        The matrix is reduced to signs by Givens rotations, the circuit
        applies the signs first and then the rotations in reverse.
        Rotations between states that carry no amplitude are skipped.
        """

        matrix = np.array(matrix, dtype=float)
        m = len(states)
        if matrix.shape != (m, m) or not np.allclose(matrix.T @ matrix, np.eye(m), atol=1e-10):
            raise ParameterError("expected a square orthogonal matrix")

        rotations = []
        work = matrix.copy()
        for column in range(m):
            for row in range(m - 1, column, -1):
                a, b = work[column, column], work[row, column]
                if abs(b) < 1e-14:
                    continue
                r = math.hypot(a, b)
                c, s = a / r, b / r
                upper, lower = work[column].copy(), work[row].copy()
                work[column] = c * upper + s * lower
                work[row] = -s * upper + c * lower
                rotations.append((column, row, math.atan2(s, c)))

        for i, sign in enumerate(np.sign(np.diag(work))):
            if sign < 0:
                self.flip_sign(states[i])
        for i, j, angle in reversed(rotations):
            if abs(angle) > 1e-14:
                self.givens(states[i], states[j], angle)


def complete_orthogonal(columns: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Orthogonal matrix with the given orthonormal columns placed at positions."""

    columns = np.asarray(columns, dtype=float)
    m, k = columns.shape
    if not np.allclose(columns.T @ columns, np.eye(k), atol=1e-10):
        raise ParameterError("vectors are not orthonormal")
    complement = scipy.linalg.null_space(columns.T) if k < m else np.zeros((m, 0))
    out = np.zeros((m, m))
    out[:, list(positions)] = columns
    rest = [i for i in range(m) if i not in set(positions)]
    out[:, rest] = complement
    return out
