import argparse

from hadronvqe.commands._common import add_run_arguments, experiment, grid


def _settings(args: argparse.Namespace) -> dict:
    return {
        "n_sites": (args.n,),
        "m_tilde": (args.mtilde,),
        "x": tuple(args.x_grid),
        "mode": args.mode,
        "shots": args.shots,
        "seed": args.seed,
        "depolarizing": args.depolarizing,
        "readout_flip": args.readout_flip,
        "budget": args.budget,
        "workers": args.workers,
    }


def baryon(args: argparse.Namespace) -> None:
    experiment(args, "baryon_mass", reduce=not args.no_reduce, **_settings(args))


def meson(args: argparse.Namespace) -> None:
    method = "gram_schmidt" if args.method == "gs" else args.method
    experiment(args, "meson_mass", method=method, beta=args.beta, **_settings(args))


def brickwork(args: argparse.Namespace) -> None:
    experiment(args, "n6_brickwork", layers_b0=args.layers_b0, layers_b1=args.layers_b1, **_settings(args))


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("vqe", help="variational hadron masses")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    baryon_parser = commands.add_parser("baryon", help="M_b = E_b - E_v from the B = 0 and B = 1 singlet sectors")
    baryon_parser.add_argument("--n", type=int, default=4)
    baryon_parser.add_argument("--no-reduce", action="store_true", help="keep static gates and idle qubits")
    baryon_parser.set_defaults(func=baryon)

    meson_parser = commands.add_parser("meson", help="M_m = E_m - E_v from a ground and an excited run")
    meson_parser.add_argument("--n", type=int, default=2)
    meson_parser.add_argument("--method", choices=("penalty", "gs", "gram_schmidt"), default="penalty")
    meson_parser.add_argument("--beta", type=float, default=None, help="penalty weight, default from a gap bound")
    meson_parser.set_defaults(func=meson)

    brickwork_parser = commands.add_parser("brickwork", help="baryon mass from PSWAP brickwork circuits")
    brickwork_parser.add_argument("--n", type=int, default=6)
    brickwork_parser.add_argument("--layers-b0", type=int, default=None)
    brickwork_parser.add_argument("--layers-b1", type=int, default=None)
    brickwork_parser.set_defaults(func=brickwork)

    for sub in (baryon_parser, meson_parser, brickwork_parser):
        sub.add_argument("--mtilde", type=float, default=1.0)
        sub.add_argument("--x-grid", type=grid, default=[1.0], help="x values or start:stop:step")
        add_run_arguments(sub)
