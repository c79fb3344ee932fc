"""Derivative-free minimisation over periodic angles.

`optimize` alternates a Gaussian-process surrogate proposing points by
expected improvement with a compass mesh around the incumbent whose step
halves whenever no neighbour improves. `optimize_sequential` sweeps one
slot at a time through the exact sinusoidal dependence of the cost on it.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
import scipy.optimize
from scipy.stats import norm, qmc
from sklearn.exceptions import ConvergenceWarning
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import RBF, ConstantKernel, WhiteKernel

from hadronvqe.config import OptimizerDefaults, VQEConfig
from hadronvqe.errors import OutOfDomainError, ParameterError
from hadronvqe.simulator.noise import rng_stream


log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class OptimizerConfig:
    budget: int = field(default_factory=lambda: OptimizerDefaults.budget)
    max_params: int = field(default_factory=lambda: OptimizerDefaults.max_params)
    stagnation_tol: float = field(default_factory=lambda: OptimizerDefaults.stagnation_tol)
    stagnation_rounds: int = field(default_factory=lambda: OptimizerDefaults.stagnation_rounds)
    initial_step: float = field(default_factory=lambda: OptimizerDefaults.initial_step)
    min_step: float = field(default_factory=lambda: OptimizerDefaults.min_step)
    length_scale: float = field(default_factory=lambda: OptimizerDefaults.length_scale)
    xi: float = field(default_factory=lambda: OptimizerDefaults.xi)
    candidates: int = field(default_factory=lambda: OptimizerDefaults.candidates)
    surrogate_window: int = field(default_factory=lambda: OptimizerDefaults.surrogate_window)
    surrogate_batch: int = field(default_factory=lambda: OptimizerDefaults.surrogate_batch)
    polish: bool = field(default_factory=lambda: OptimizerDefaults.polish)
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ParameterError(f"budget must be >= 1, got {self.budget}")
        if self.stagnation_rounds < 1:
            raise ParameterError("stagnation_rounds must be >= 1")

    def replace(self, **changes) -> OptimizerConfig:
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ParameterError(f"unknown optimizer settings {sorted(unknown)}")
        values = {name: getattr(self, name) for name in known}
        values.update(changes)
        return OptimizerConfig(**values)


@dataclass(frozen=True)
class TraceEntry:
    theta: tuple[float, ...]
    value: float
    source: str


@dataclass
class VQEResult:
    best_theta: np.ndarray
    best_value: float
    trace: list[TraceEntry]
    stop_reason: str = ""
    energies: dict[float, float] = field(default_factory=dict)

    @property
    def evaluations(self) -> int:
        return len(self.trace)

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate([t.value for t in self.trace]) if self.trace else np.zeros(0)


class _BudgetExhausted(Exception):
    pass


class _Run:
    """Book-keeping shared by the search phases."""

    def __init__(self, cost: Callable, n_params: int, budget: int):
        self.cost = cost
        self.n_params = n_params
        self.budget = budget
        self.trace: list[TraceEntry] = []
        self.seen: dict[tuple, float] = {}
        self.best_theta = np.zeros(n_params)
        self.best_value = math.inf

    @property
    def remaining(self) -> int:
        return self.budget - len(self.trace)

    def evaluate(self, theta: np.ndarray, source: str) -> float:
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        key = tuple(np.round(theta, 12))
        if key in self.seen:
            return self.seen[key]
        if self.remaining <= 0:
            raise _BudgetExhausted
        try:
            value = float(self.cost(theta))
        except OutOfDomainError as error:
            log.warning("%s point out of domain: %s", source, error)
            value = math.inf
        self.seen[key] = value
        self.trace.append(TraceEntry(tuple(theta), value, source))
        if value < self.best_value:
            self.best_value, self.best_theta = value, theta
        return value

    def finite_points(self) -> tuple[np.ndarray, np.ndarray]:
        entries = [t for t in self.trace if math.isfinite(t.value)]
        return np.array([t.theta for t in entries]), np.array([t.value for t in entries])


def initial_design(n_params: int, budget: int, seed: int) -> np.ndarray:
    """Corners of {0, pi}^d for small d, a Latin hypercube otherwise."""

    if n_params <= 4:
        grid = np.array(np.meshgrid(*[[0.0, math.pi]] * n_params, indexing="ij")).reshape(n_params, -1).T
        return grid
    count = max(2, min(2 * n_params + 2, budget // 4))
    sampler = qmc.LatinHypercube(d=n_params, seed=rng_stream(seed, "design"))
    return TWO_PI * sampler.random(count)


def _features(theta: np.ndarray) -> np.ndarray:
    return np.hstack((np.cos(theta), np.sin(theta)))


def expected_improvement(mean: np.ndarray, std: np.ndarray, best: float, xi: float) -> np.ndarray:
    std = np.maximum(std, 1e-12)
    improvement = best - mean - xi
    z = improvement / std
    return improvement * norm.cdf(z) + std * norm.pdf(z)


def _surrogate_step(run: _Run, config: OptimizerConfig, step: float, round_index: int) -> None:
    points, values = run.finite_points()
    if len(values) < 2:
        return
    order = np.argsort(values)[: config.surrogate_window]
    points, values = points[order], values[order]

    kernel = ConstantKernel(1.0) * RBF(length_scale=config.length_scale) + WhiteKernel(1e-6, (1e-10, 1e-1))
    model = GaussianProcessRegressor(kernel=kernel, normalize_y=True, random_state=config.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        model.fit(_features(points), values)

    rng = rng_stream(config.seed, "surrogate", round_index)
    half = config.candidates // 2
    local = run.best_theta + rng.normal(scale=max(step, 1e-3), size=(half, run.n_params))
    wide = rng.uniform(0, TWO_PI, size=(config.candidates - half, run.n_params))
    candidates = np.mod(np.vstack((local, wide)), TWO_PI)

    mean, std = model.predict(_features(candidates), return_std=True)
    scores = expected_improvement(mean, std, float(values[0]), config.xi)
    for index in np.argsort(-scores)[: config.surrogate_batch]:
        run.evaluate(candidates[index], "surrogate")


def _mesh_step(run: _Run, step: float) -> bool:
    """Compass poll around the incumbent, True when it moved."""

    centre, value = run.best_theta.copy(), run.best_value
    for axis in range(run.n_params):
        for sign in (1.0, -1.0):
            trial = centre.copy()
            trial[axis] += sign * step
            run.evaluate(trial, "mesh")
    return run.best_value < value


def _polish(run: _Run, frequencies: Sequence[float | None] | None) -> None:
    if frequencies is not None and all(f is not None for f in frequencies):
        previous = math.inf
        while run.best_value < previous - 1e-13:
            previous = run.best_value
            _sinusoid_sweep(run, frequencies, "polish")
        return

    def wrapped(theta):
        return run.evaluate(theta, "polish")

    scipy.optimize.minimize(
        wrapped,
        run.best_theta,
        method="Nelder-Mead",
        options={"maxfev": run.remaining, "xatol": 1e-9, "fatol": 1e-13},
    )


def optimize(
    cost: Callable[[np.ndarray], float],
    n_params: int,
    config: OptimizerConfig | None = None,
    warm_start: Sequence[Sequence[float]] = (),
    frequencies: Sequence[float | None] | None = None,
) -> VQEResult:
    """Minimises cost over [0, 2 pi)^n_params within the evaluation budget."""

    config = config or OptimizerConfig()
    if n_params > config.max_params:
        raise ParameterError(f"{n_params} parameters exceed the limit of {config.max_params}")

    run = _Run(cost, n_params, config.budget)
    if n_params == 0:
        run.evaluate(np.zeros(0), "mesh")
        return VQEResult(run.best_theta, run.best_value, run.trace, "no parameters")

    design = initial_design(n_params, config.budget, config.seed)
    if config.budget < len(design):
        raise ParameterError(f"budget {config.budget} below the initial mesh of {len(design)} points")

    reason = "budget"
    try:
        for theta in warm_start:
            run.evaluate(np.asarray(theta, dtype=float), "cache")
        for theta in design:
            run.evaluate(theta, "mesh")

        step = config.initial_step
        stale = 0
        round_index = 0
        while True:
            before = run.best_value
            _surrogate_step(run, config, step, round_index)
            if not _mesh_step(run, step):
                step /= 2
            round_index += 1

            stale = stale + 1 if before - run.best_value <= config.stagnation_tol else 0
            if stale >= config.stagnation_rounds:
                reason = "stagnation"
                break
            if step < config.min_step:
                reason = "mesh converged"
                break

        if config.polish and run.remaining > 0:
            _polish(run, frequencies)
    except _BudgetExhausted:
        pass

    log.debug("optimize: %d evaluations, best %.12g, stopped on %s", len(run.trace), run.best_value, reason)
    return VQEResult(run.best_theta, run.best_value, run.trace, reason)


def fit_sinusoid(f0: float, f_plus: float, f_minus: float) -> tuple[float, float]:
    """Minimiser and minimum of A + B cos u + C sin u from u = 0, +pi/2, -pi/2."""

    a = (f_plus + f_minus) / 2
    c = (f_plus - f_minus) / 2
    b = f0 - a
    return math.atan2(-c, -b), a - math.hypot(b, c)


def _sinusoid_sweep(run: _Run, frequencies: Sequence[float], source: str) -> None:
    for axis, omega in enumerate(frequencies):
        centre = run.best_theta.copy()
        f0 = run.evaluate(centre, source)
        shift = math.pi / (2 * omega)
        values = []
        for sign in (1.0, -1.0):
            trial = centre.copy()
            trial[axis] += sign * shift
            values.append(run.evaluate(trial, source))
        u, _ = fit_sinusoid(f0, *values)
        if abs(u) > 1e-15:
            trial = centre.copy()
            trial[axis] += u / omega
            run.evaluate(trial, source)


def optimize_sequential(
    cost: Callable[[np.ndarray], float],
    frequencies: Sequence[float | None],
    theta0: Sequence[float] | None = None,
    budget: int | None = None,
    tol: float | None = None,
    seed: int = 0,
) -> VQEResult:
    """Coordinate sweeps fitting the cost's sinusoid in one slot at a time."""

    if any(f is None or f <= 0 for f in frequencies):
        raise ParameterError("every slot needs a single positive frequency")
    n_params = len(frequencies)
    budget = VQEConfig.sweep_budget if budget is None else budget
    tol = OptimizerDefaults.stagnation_tol if tol is None else tol

    run = _Run(cost, n_params, budget)
    if theta0 is None:
        theta0 = rng_stream(seed, "design").normal(scale=0.1, size=n_params)
    reason = "budget"
    try:
        run.evaluate(np.asarray(theta0, dtype=float), "mesh")
        sweep = 0
        while True:
            before = run.best_value
            _sinusoid_sweep(run, frequencies, "mesh")
            sweep += 1
            log.debug("sweep %d: %.12g", sweep, run.best_value)
            if before - run.best_value <= tol:
                reason = "stagnation"
                break
    except _BudgetExhausted:
        pass
    return VQEResult(run.best_theta, run.best_value, run.trace, reason)
