import logging
import os
from pathlib import Path

import dotenv
import yaml

from hadronvqe.errors import ConfigError


log = logging.getLogger(__name__)

dotenv.load_dotenv()


def _load_env(loader: yaml.Loader, node: yaml.Node) -> str | None:
    """A constructor for loading ENV YAML tags

    A default can follow the variable name after a colon.

    Usage in the YAML config:

        # Key is the config key
        app:
            key: !ENV "VARIABLE"
            other: !ENV "VARIABLE:default"
    """

    config_value = loader.construct_scalar(node)
    name, _, default = config_value.partition(":")
    return os.getenv(name, default or None)


yaml.SafeLoader.add_constructor("!ENV", _load_env)


def _config_path() -> Path:
    """Picks the configuration file, a `user-config.yml` in the working
    directory wins over `config.yml`.
    """

    for candidate in (Path("user-config.yml"), Path("config.yml")):
        if candidate.exists():
            if candidate.name == "user-config.yml":
                log.info("`user-config.yml` file found, loading user configurations.")
            return candidate

    # Fall back to the configuration shipped next to the package
    return Path(__file__).resolve().parent.parent / "config.yml"


def load_config(path: Path | None = None) -> dict:
    with open(path or _config_path(), "r") as config_file:
        return yaml.safe_load(config_file) or {}


CONFIG = load_config()


def _cast(value, annotation):
    if annotation is bool and isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if annotation in (int, float, str, bool) and value is not None:
        return annotation(value)
    return value


class ConfigGen(type):
    """A metaclass for accessing configuration by accessing
    class attributes.

    key specifies the YAML key, values are cast to the annotated type.

    Example:
        # config.yml

        solver: <--- key
            max_qubits: 16


        # config.py

        class SolverConfig(metaclass=ConfigGen):
            key = "solver"

            max_qubits: int

        # anywhere

        from hadronvqe.config import SolverConfig

        if n_qubits > SolverConfig.max_qubits:
            ...
    """

    def __getattr__(cls, name: str):
        """This method will get invoked in the child class
        when you try to get an attribute from the child class
        """

        if name.startswith("__"):
            raise AttributeError(name)

        name = name.lower()
        try:
            value = CONFIG[cls.key][name]
        except KeyError:
            log.error("%s.%s was not found in the config file. Did you set it up correctly?", cls.key, name)
            raise ConfigError(f"missing configuration key {cls.key}.{name}") from None

        annotation = cls.__dict__.get("__annotations__", {}).get(name)
        try:
            return _cast(value, annotation)
        except (TypeError, ValueError) as error:
            raise ConfigError(f"{cls.key}.{name} = {value!r} is not a valid {annotation.__name__}") from error


class PauliConfig(metaclass=ConfigGen):
    key = "pauli"

    drop_tolerance: float
    conjugation_term_limit: int


class SolverConfig(metaclass=ConfigGen):
    key = "solver"

    max_qubits: int
    max_dense_dim: int
    null_tolerance: float
    residual_tolerance: float


class SimulatorConfig(metaclass=ConfigGen):
    key = "simulator"

    shots: int
    shot_block: int
    norm_tolerance: float


class OptimizerDefaults(metaclass=ConfigGen):
    key = "optimizer"

    budget: int
    max_params: int
    stagnation_tol: float
    stagnation_rounds: int
    initial_step: float
    min_step: float
    length_scale: float
    xi: float
    candidates: int
    surrogate_window: int
    surrogate_batch: int
    cache_quantum: float
    polish: bool


class VQEConfig(metaclass=ConfigGen):
    key = "vqe"

    gs_guard: float
    penalty_power: str
    brickwork_layers_b0: int
    brickwork_layers_b1: int
    sweep_budget: int


class OutputConfig(metaclass=ConfigGen):
    key = "output"

    float_digits: int
    workers: int


class LoggingConfig(metaclass=ConfigGen):
    key = "logging"

    level: str
