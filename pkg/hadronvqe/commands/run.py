import argparse
from pathlib import Path

from hadronvqe.experiments import ExperimentConfig, run_experiment
from hadronvqe.utils.utils import parse_assignments


def run(args: argparse.Namespace) -> None:
    config = ExperimentConfig.from_file(Path(args.config), parse_assignments(args.set))
    for path in run_experiment(config):
        print(path)


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="run a named experiment from a flat YAML file")
    parser.add_argument("config", help="experiment file, ex: experiment: baryon_mass")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a setting")
    parser.set_defaults(func=run)
