import argparse
import sys

from hadronvqe.commands._common import add_lattice_arguments
from hadronvqe.model.hamiltonian import LatticeParams, build_hamiltonian, pauli_term_count


def dump(args: argparse.Namespace) -> None:
    h = build_hamiltonian(LatticeParams(args.n, args.mtilde, args.x))
    sys.stdout.write(h.to_json() + "\n" if args.format == "json" else h.to_text())


def count(args: argparse.Namespace) -> None:
    print("N,actual,formula,merged")
    for n in range(2, args.n_max + 1, 2):
        terms = pauli_term_count(n)
        print(f"{n},{terms.actual},{terms.formula},{terms.merged}")


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("model", help="the qubit Hamiltonian")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    dump_parser = commands.add_parser("dump", help="canonical Pauli expansion, one `coefficient string` per line")
    add_lattice_arguments(dump_parser)
    dump_parser.add_argument("--format", choices=("text", "json"), default="text")
    dump_parser.set_defaults(func=dump)

    count_parser = commands.add_parser("count", help="Pauli term counts next to 6N^2 - 11N + 9")
    count_parser.add_argument("--n-max", type=int, default=8)
    count_parser.set_defaults(func=count)
