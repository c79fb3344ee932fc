import argparse
import sys
from typing import Any

from hadronvqe.experiments import ExperimentConfig, collect_rows, run_experiment
from hadronvqe.utils.utils import parse_grid, table_text


def grid(text: str) -> list[float]:
    return parse_grid(text)


def int_grid(text: str) -> list[int]:
    values = parse_grid(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


def add_lattice_arguments(parser: argparse.ArgumentParser, many: bool = False) -> None:
    if many:
        parser.add_argument("--n", type=int_grid, default=[4], help="site counts, ex: 2,4")
        parser.add_argument("--mtilde", type=grid, default=[1.0], help="m_tilde values or start:stop:step")
        parser.add_argument("--x-grid", type=grid, default=[1.0], help="x values or start:stop:step")
    else:
        parser.add_argument("--n", type=int, default=4, help="number of sites (even)")
        parser.add_argument("--mtilde", type=float, default=1.0)
        parser.add_argument("--x", type=float, default=1.0)


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    parser.add_argument("--shots", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--p", dest="depolarizing", type=float, default=0.0, help="two-qubit depolarizing probability")
    parser.add_argument("--readout", dest="readout_flip", type=float, default=0.0, help="readout flip probability")
    parser.add_argument("--budget", type=int, default=None, help="evaluation budget per optimisation")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None, help="CSV path, a JSON mirror and manifest are written next to it")


def experiment(args: argparse.Namespace, name: str, **settings: Any) -> None:
    """Runs a named experiment, to files with --out and to stdout otherwise."""

    config = ExperimentConfig(name, args.out or "-", **settings)
    if args.out:
        for path in run_experiment(config):
            print(path)
    else:
        sys.stdout.write(table_text(collect_rows(config)))
