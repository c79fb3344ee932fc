from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from hadronvqe.config import OptimizerDefaults
from hadronvqe.errors import CacheMissError
from hadronvqe.model.hamiltonian import CoefficientBlocks
from hadronvqe.pauli.strings import PauliString


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheEntry:
    theta: np.ndarray
    strings: tuple[PauliString, ...]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def values_for(self, strings: Sequence[PauliString]) -> np.ndarray:
        index = {s: i for i, s in enumerate(self.strings)}
        missing = [s.label for s in strings if s not in index]
        if missing:
            raise CacheMissError(f"{len(missing)} strings not cached, e.g. {missing[0]}")
        return self.values[[index[s] for s in strings]]


class EvaluationCache:
    """Pauli expectations keyed by the quantised angles modulo 2 pi.

    Storing the same key twice keeps the last entry.
    """

    def __init__(self, quantum: float | None = None):
        self.quantum = OptimizerDefaults.cache_quantum if quantum is None else quantum
        self._period = round(2 * math.pi / self.quantum)
        self._entries: dict[tuple[int, ...], CacheEntry] = {}
        self._lock = threading.Lock()

    def key(self, theta: Sequence[float]) -> tuple[int, ...]:
        steps = np.round(np.mod(np.asarray(theta, dtype=float), 2 * math.pi) / self.quantum).astype(np.int64)
        return tuple(int(s) % self._period for s in steps)

    def store(
        self,
        theta: Sequence[float],
        strings: Sequence[PauliString],
        values: np.ndarray,
        metadata: dict | None = None,
    ) -> CacheEntry:
        entry = CacheEntry(
            np.array(theta, dtype=float),
            tuple(strings),
            np.array(values, dtype=float),
            dict(metadata or {}),
        )
        with self._lock:
            self._entries[self.key(theta)] = entry
        return entry

    def lookup(self, theta: Sequence[float]) -> CacheEntry | None:
        with self._lock:
            return self._entries.get(self.key(theta))

    def __contains__(self, theta) -> bool:
        return self.lookup(theta) is not None

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[CacheEntry]:
        with self._lock:
            entries = list(self._entries.values())
        return iter(entries)


def reweight_cache(
    cache: EvaluationCache,
    theta: Sequence[float],
    blocks: CoefficientBlocks,
    m_tilde: float,
    x: float,
) -> float:
    """Energy at (m_tilde, x) from the stored expectations only."""

    entry = cache.lookup(theta)
    if entry is None:
        raise CacheMissError(f"no evaluation stored at theta={list(np.round(theta, 6))}")
    values = entry.values_for(blocks.strings)
    return float(np.dot(blocks.coefficients(m_tilde, x), values))


def best_cached(
    cache: EvaluationCache,
    blocks: CoefficientBlocks,
    m_tilde: float,
    x: float,
    count: int = 1,
) -> list[tuple[float, np.ndarray]]:
    """Lowest reweighted energies over every cached point, (energy, theta) pairs."""

    scored = []
    for entry in cache:
        try:
            values = entry.values_for(blocks.strings)
        except CacheMissError:
            continue
        scored.append((float(np.dot(blocks.coefficients(m_tilde, x), values)), entry.theta))
    scored.sort(key=lambda pair: pair[0])
    return scored[:count]
