import argparse
import json

from hadronvqe.commands._common import add_lattice_arguments, experiment
from hadronvqe.exact.sectors import SectorSpec
from hadronvqe.exact.solver import eigensolve_sector
from hadronvqe.model.hamiltonian import LatticeParams


def solve(args: argparse.Namespace) -> None:
    spec = SectorSpec.parse(args.sector, singlet_only=args.singlet)
    result = eigensolve_sector(LatticeParams(args.n, args.mtilde, args.x), spec, args.k)
    print(json.dumps({
        "N": args.n,
        "m_tilde": args.mtilde,
        "x": args.x,
        "sector": {"baryon_number": spec.baryon_number, "singlet_only": spec.singlet_only},
        "energies": [float(e) for e in result.energies],
        "sector_dim": result.sector_dim,
    }))


def scan(args: argparse.Namespace) -> None:
    experiment(
        args, "ed_scan",
        n_sites=tuple(args.n), m_tilde=tuple(args.mtilde), x=tuple(args.x_grid), workers=args.workers,
    )


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ed", help="exact diagonalization inside symmetry sectors")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    solve_parser = commands.add_parser("solve", help="lowest eigenvalues of one sector")
    add_lattice_arguments(solve_parser)
    solve_parser.add_argument("--sector", default="B=0", help="baryon number, ex: B=1")
    solve_parser.add_argument("--singlet", action="store_true", help="keep colour singlets only")
    solve_parser.add_argument("--k", type=int, default=1)
    solve_parser.set_defaults(func=solve)

    scan_parser = commands.add_parser("scan", help="hadron masses over a grid")
    add_lattice_arguments(scan_parser, many=True)
    scan_parser.add_argument("--workers", type=int, default=None)
    scan_parser.add_argument("--out", default=None)
    scan_parser.set_defaults(func=scan)
