import argparse
import importlib
import logging
import os
import sys
import traceback
from pathlib import Path
from typing import Sequence

from hadronvqe import __version__
from hadronvqe.config import LoggingConfig
from hadronvqe.errors import (
    CacheMissError,
    CapacityError,
    CircuitContractError,
    ConfigError,
    ConjugationLimitError,
    DimensionError,
    HermiticityError,
    OutOfDomainError,
    ParameterError,
    SingularMatrixError,
    SolverError,
    UnsupportedGateError,
)


log = logging.getLogger(__name__)

error_map = {
    ParameterError: "Invalid parameter: {error}",
    ConfigError: "Configuration problem: {error}",
    CapacityError: "Problem too large: {error}",
    DimensionError: "Dimension mismatch: {error}",
    CircuitContractError: "Circuit rejected: {error}",
    UnsupportedGateError: "Unsupported gate: {error}",
    ConjugationLimitError: "Conjugation aborted: {error}",
    CacheMissError: "Cache miss: {error}",
    OutOfDomainError: "Cost undefined: {error}",
    SingularMatrixError: "Calibration failed: {error}",
    SolverError: "Eigensolve failed: {error}",
    HermiticityError: "Non-Hermitian operator: {error}",
    FileNotFoundError: "File not found: {error.filename}",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadronvqe",
        description="Hadron masses of the 1D SU(2) lattice gauge theory, exactly and variationally.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    # Load every command module inside the commands folder
    for module in sorted(os.listdir(Path(__file__).parent / "commands")):
        if module[-3:] == ".py" and not module.startswith("_"):
            importlib.import_module(f"hadronvqe.commands.{module[:-3]}").setup(subparsers)

    return parser


def setup_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(LoggingConfig.level).upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        args.func(args)
    except Exception as error:
        message = next((m for kind, m in error_map.items() if isinstance(error, kind)), None)
        if message is None:
            log.error(
                "An error occurred in %s:\n%s",
                args.command,
                "".join(traceback.format_exception(None, error, error.__traceback__)),
            )
            return 1
        print(message.format(error=error), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
