import argparse
import json

from hadronvqe.circuits.ansatz import ansatz_brickwork, ansatz_n4_baryon_general, singlet_sector_ansatz
from hadronvqe.commands._common import add_lattice_arguments, grid
from hadronvqe.errors import ParameterError
from hadronvqe.model.hamiltonian import LatticeParams, build_hamiltonian
from hadronvqe.pauli.grouping import group_for_measurement
from hadronvqe.simulator.noise import NoiseModel, noisy_expectation
from hadronvqe.simulator.sampling import Program, estimate_expectations, sample_groups
from hadronvqe.simulator.statevector import prepare


def _ansatz(args: argparse.Namespace):
    if args.ansatz == "singlets":
        return singlet_sector_ansatz(args.n, args.sector)
    if args.ansatz == "n4_baryon":
        if args.n != 4:
            raise ParameterError("the general baryon circuit is built for N = 4")
        return ansatz_n4_baryon_general()
    return ansatz_brickwork(args.n, args.layers, args.sector)


def expectation(args: argparse.Namespace) -> None:
    ansatz = _ansatz(args)
    theta = args.theta if args.theta is not None else [0.0] * ansatz.n_params
    theta = ansatz.circuit.check_theta(theta)
    h = build_hamiltonian(LatticeParams(args.n, args.mtilde, args.x))

    noise = None
    if args.depolarizing or args.readout_flip:
        noise = NoiseModel.uniform(ansatz.n_qubits, args.depolarizing, args.readout_flip, args.seed)

    out = {"ansatz": ansatz.name, "n_params": ansatz.n_params, "theta": [float(t) for t in theta]}
    if args.shots:
        program = Program(ansatz.circuit, tuple(theta), ansatz.initial)
        records = sample_groups(program, group_for_measurement(h), args.shots, noise, args.seed)
        estimate = estimate_expectations(records, h)
        out.update(energy=estimate.energy, standard_error=estimate.standard_error, shots=args.shots)
    elif noise is not None and noise.depolarizing > 0:
        out["energy"] = noisy_expectation(ansatz.circuit, theta, ansatz.initial, h, noise)
    else:
        out["energy"] = prepare(ansatz.circuit, theta, ansatz.initial).expectation(h)
    print(json.dumps(out))


def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="evaluate an ansatz at fixed angles")
    commands = parser.add_subparsers(dest="action", metavar="action")
    commands.required = True

    expectation_parser = commands.add_parser("expectation", help="energy of an ansatz state")
    add_lattice_arguments(expectation_parser)
    expectation_parser.add_argument("--ansatz", choices=("singlets", "n4_baryon", "brickwork"), default="singlets")
    expectation_parser.add_argument("--sector", type=int, default=0, help="baryon number")
    expectation_parser.add_argument("--layers", type=int, default=1, help="brickwork layers")
    expectation_parser.add_argument("--theta", type=grid, default=None, help="comma separated angles")
    expectation_parser.add_argument("--shots", type=int, default=None)
    expectation_parser.add_argument("--seed", type=int, default=0)
    expectation_parser.add_argument("--p", dest="depolarizing", type=float, default=0.0)
    expectation_parser.add_argument("--readout", dest="readout_flip", type=float, default=0.0)
    expectation_parser.set_defaults(func=expectation)
