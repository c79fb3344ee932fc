"""Named experiments writing deterministic tables and a run manifest."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Mapping

import yaml

from hadronvqe import __version__
from hadronvqe.config import OutputConfig, SimulatorConfig
from hadronvqe.errors import ConfigError, ParameterError
from hadronvqe.exact.solver import hadron_masses
from hadronvqe.model.hamiltonian import LatticeParams, model_operators, pauli_term_count
from hadronvqe.simulator.noise import NoiseModel
from hadronvqe.utils.utils import parse_grid, write_json, write_table
from hadronvqe.vqe.optimizer import OptimizerConfig
from hadronvqe.vqe.protocols import noise_study, run_baryon_mass, run_brickwork_baryon, run_meson_mass


log = logging.getLogger(__name__)

EXPERIMENTS = (
    "baryon_mass",
    "meson_mass",
    "ratio_contour",
    "n6_brickwork",
    "noise_study",
    "model_dump",
    "ed_scan",
)


def _values(value: Any) -> tuple:
    if isinstance(value, str):
        return tuple(parse_grid(value))
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    output: str
    n_sites: tuple[int, ...] = (4,)
    m_tilde: tuple[float, ...] = (1.0,)
    x: tuple[float, ...] = (1.0,)
    mode: str = "exact"
    shots: int | None = None
    seed: int | None = None
    depolarizing: float = 0.0
    readout_flip: float = 0.0
    method: str = "penalty"
    beta: float | None = None
    folds: tuple[int, ...] = (1, 3, 5)
    convex_probability: float = 0.1
    layers_b0: int | None = None
    layers_b1: int | None = None
    budget: int | None = None
    reduce: bool = True
    workers: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}, expected one of {', '.join(EXPERIMENTS)}")
        for name in ("n_sites", "m_tilde", "x"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must hold at least one value")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be exact or sampled, got {self.mode!r}")
        if self.mode == "sampled" and self.seed is None:
            raise ConfigError("sampled mode needs an explicit seed")
        if not 0 <= self.depolarizing < 1:
            raise ConfigError(f"depolarizing must lie in [0, 1), got {self.depolarizing}")
        if self.experiment == "noise_study" and self.depolarizing == 0:
            raise ConfigError("noise_study needs a positive depolarizing probability")
        if not self.output:
            raise ConfigError("an output path is required")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        """Builds a config from a flat mapping, grids given as lists or `start:stop:step`."""

        known = {f.name for f in fields(cls)}
        nested = [k for k, v in data.items() if isinstance(v, Mapping)]
        if nested:
            raise ConfigError(f"experiment configs are flat, {nested[0]!r} is nested")
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown experiment settings {unknown}")
        values = dict(data)
        for name, cast in (("n_sites", int), ("m_tilde", float), ("x", float), ("folds", int)):
            if name in values:
                try:
                    values[name] = tuple(cast(v) for v in _values(values[name]))
                except (TypeError, ValueError):
                    raise ConfigError(f"invalid {name}: {values[name]!r}") from None
        try:
            return cls(**values)
        except TypeError as error:
            raise ConfigError(str(error)) from None

    @classmethod
    def from_file(cls, path: Path, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
        with open(path, "r") as config_file:
            data = yaml.safe_load(config_file) or {}
        if not isinstance(data, Mapping):
            raise ConfigError(f"{path} does not hold a mapping")
        data.update(overrides or {})
        return cls.from_mapping(data)

    @property
    def seed_value(self) -> int:
        return 0 if self.seed is None else self.seed

    def noise(self, n_qubits: int) -> NoiseModel | None:
        if not self.depolarizing and not self.readout_flip:
            return None
        return NoiseModel.uniform(n_qubits, self.depolarizing, self.readout_flip, self.seed_value)

    def optimizer(self) -> OptimizerConfig:
        config = OptimizerConfig(seed=self.seed_value)
        return config.replace(budget=self.budget) if self.budget else config

    def shot_count(self) -> int | None:
        if self.mode == "exact":
            return None
        return self.shots or SimulatorConfig.shots

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def _baryon_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    rows = run_baryon_mass(
        n, m_tilde, config.x, config.mode, config.shot_count(), config.noise(2 * n),
        config.seed_value, config.reduce, None, config.optimizer(),
    )
    return [r.row() for r in rows]


def _meson_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    rows = run_meson_mass(
        n, m_tilde, config.x, config.method, config.mode, config.shot_count(), config.noise(2 * n),
        config.seed_value, config.beta, config.optimizer(),
    )
    return [r.row() for r in rows]


def _ratio_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    rows = []
    for x in config.x:
        masses = hadron_masses(LatticeParams(n, m_tilde, x))
        rows.append({**masses.row(), "flagged": masses.flagged})
    return rows


def _brickwork_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    rows = []
    for x in config.x:
        result = run_brickwork_baryon(
            n, m_tilde, x, config.layers_b0, config.layers_b1, config.budget, config.seed_value
        )
        exact = hadron_masses(LatticeParams(n, m_tilde, x))
        rows.append({
            **result.row(),
            "M_b_exact": exact.m_baryon,
            "relative_error": abs(result.m_baryon - exact.m_baryon) / exact.m_baryon,
        })
    return rows


def _noise_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    return [
        noise_study(
            n, m_tilde, x, config.depolarizing, config.folds, config.shot_count(),
            config.convex_probability, config.seed_value, config.optimizer(),
        ).row()
        for x in config.x
    ]


def _model_rows(config: ExperimentConfig, point: tuple[int, float]) -> list[dict]:
    n, m_tilde = point
    rows = []
    count = pauli_term_count(n)
    for x in config.x:
        h = model_operators(n).blocks.hamiltonian(m_tilde, x)
        for term in h:
            rows.append({
                "N": n,
                "m_tilde": m_tilde,
                "x": x,
                "string": term.string.label,
                "coefficient": term.coefficient,
                "terms_actual": count.actual,
                "terms_formula": count.formula,
            })
    return rows


TASKS: dict[str, Callable[[ExperimentConfig, tuple[int, float]], list[dict]]] = {
    "baryon_mass": _baryon_rows,
    "meson_mass": _meson_rows,
    "ratio_contour": _ratio_rows,
    "ed_scan": _ratio_rows,
    "n6_brickwork": _brickwork_rows,
    "noise_study": _noise_rows,
    "model_dump": _model_rows,
}


def _run_point(args: tuple[ExperimentConfig, tuple[int, float]]) -> list[dict]:
    config, point = args
    return TASKS[config.experiment](config, point)


def collect_rows(config: ExperimentConfig) -> list[dict]:
    """Rows for every (N, m_tilde) point, in grid order whatever the worker count."""

    points = [(n, m) for n in config.n_sites for m in config.m_tilde]
    workers = config.workers or OutputConfig.workers
    jobs = [(config, point) for point in points]
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, jobs))
    else:
        chunks = [_run_point(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Runs the experiment and writes its table, JSON mirror and manifest.

    Nothing is written unless every row was computed.
    """

    log.info("running %s over %d grid points", config.experiment, len(config.n_sites) * len(config.m_tilde))
    rows = collect_rows(config)
    if not rows:
        raise ParameterError(f"{config.experiment} produced no rows")

    table, mirror = write_table(Path(config.output), rows)
    manifest = write_json(table.with_name(f"{table.stem}.manifest.json"), {
        "experiment": config.experiment,
        "version": __version__,
        "config": config.to_dict(),
        "seed": config.seed_value,
        "rows": len(rows),
        "files": [table.name, mirror.name],
    })
    log.info("wrote %d rows to %s", len(rows), table)
    return [table, mirror, manifest]
