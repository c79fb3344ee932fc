import argparse

from hadronvqe.commands._common import add_lattice_arguments, experiment, int_grid


def study(args: argparse.Namespace) -> None:
    experiment(
        args, "noise_study",
        n_sites=(args.n,), m_tilde=(args.mtilde,), x=(args.x,),
        mode="sampled" if args.shots else "exact",
        shots=args.shots, seed=args.seed,
        depolarizing=args.depolarizing, folds=tuple(args.folds),
        convex_probability=args.convex,
    )


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("noise", help="noise and mitigation studies")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    study_parser = commands.add_parser("study", help="CNOT-folding extrapolation and convex error on M_b")
    add_lattice_arguments(study_parser)
    study_parser.set_defaults(n=2)
    study_parser.add_argument("--p", dest="depolarizing", type=float, default=0.01)
    study_parser.add_argument("--folds", type=int_grid, default=[1, 3, 5])
    study_parser.add_argument("--convex", type=float, default=0.1, help="convex error probability")
    study_parser.add_argument("--shots", type=int, default=None, help="sample instead of exact expectations")
    study_parser.add_argument("--seed", type=int, default=0)
    study_parser.add_argument("--out", default=None)
    study_parser.set_defaults(func=study)
