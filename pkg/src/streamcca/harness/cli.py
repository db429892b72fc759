"""Command-line entry point with ``gen`` and ``run`` subcommands.

Exit status is 0 on success, 2 on bad input and 3 on numerical failure.
"""

import argparse
import sys

from ..errors import CCAError, InputError, NumericalError, StreamExhaustedError
from .io import load_truth, save_dataset, save_truth
from .runner import ALGOS, RunConfig, run
from .synthetic import gen_synthetic

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def _rho_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of reals: {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="streamcca", description="Streaming CCA toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a synthetic dataset and its ground truth")
    gen.add_argument("--dx", type=int, required=True)
    gen.add_argument("--dy", type=int, required=True)
    gen.add_argument("--k-true", type=int, required=True)
    gen.add_argument("--rho", type=_rho_list, required=True, help="comma-separated correlations")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--cond-x", type=float, default=1.0)
    gen.add_argument("--cond-y", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output prefix")

    r = sub.add_parser("run", help="run a solver on a dataset")
    r.add_argument("--algo", choices=ALGOS, required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--truth")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--cap-rank", type=int)
    r.add_argument("--T", type=int, default=1)
    r.add_argument("--tau", type=int, help="auxiliary size; derived from --B and --truth if omitted")
    r.add_argument("--eta", choices=("theory", "sqrt"), default="theory")
    r.add_argument("--eta-c", type=float, default=0.1)
    r.add_argument("--lambda", dest="reg_lambda", type=float, default=0.0)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--eval-every", type=int, default=100)
    r.add_argument("--rounding-draws", type=int, default=10)
    r.add_argument("--whitener-cadence", type=int, default=1)
    r.add_argument("--B", type=float, help="declared bound on squared sample norms")
    r.add_argument("--no-timing", action="store_true", help="leave wall_ms empty")
    r.add_argument("--out", required=True, help="output prefix")
    return parser


def _gen(args):
    if len(args.rho) != args.k_true:
        raise InputError(f"--rho has {len(args.rho)} entries but --k-true is {args.k_true}")
    X, Y, truth = gen_synthetic(args.dx, args.dy, args.rho, args.n,
                                args.cond_x, args.cond_y, args.seed)
    save_dataset(f"{args.out}_data.txt", X, Y)
    save_truth(f"{args.out}_truth.txt", truth)


def _run(args):
    config = RunConfig(
        algo=args.algo, k=args.k, T=args.T, tau=args.tau, cap_rank=args.cap_rank,
        eta_mode=args.eta, eta_c=args.eta_c, reg_lambda=args.reg_lambda, seed=args.seed,
        eval_every=args.eval_every, rounding_draws=args.rounding_draws,
        whitener_cadence=args.whitener_cadence, B=args.B, record_time=not args.no_timing,
    )
    truth = load_truth(args.truth) if args.truth else None
    result = run(config, args.data, truth, out_prefix=args.out)
    final = result.summary["final"]
    print(" ".join(f"{k}={v}" for k, v in final.items() if v is not None))


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        (_gen if args.command == "gen" else _run)(args)
    except (InputError, StreamExhaustedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CCAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
