import argparse

from hadronvqe.commands._common import experiment, grid, int_grid


def ratio(args: argparse.Namespace) -> None:
    experiment(
        args, "ratio_contour",
        n_sites=tuple(args.n), m_tilde=tuple(args.m_grid), x=tuple(args.x_grid), workers=args.workers,
    )


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("scan", help="parameter scans of exact spectra")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    ratio_parser = commands.add_parser("ratio", help="mass ratio r = M_m / M_b over the (x, m_tilde) plane")
    ratio_parser.add_argument("--n", type=int_grid, default=[2, 4, 6])
    ratio_parser.add_argument("--x-grid", type=grid, default=grid("0.2:5:0.2"))
    ratio_parser.add_argument("--m-grid", type=grid, default=grid("0.5:10:0.5"))
    ratio_parser.add_argument("--workers", type=int, default=None)
    ratio_parser.add_argument("--out", default=None)
    ratio_parser.set_defaults(func=ratio)
