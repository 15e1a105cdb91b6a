"""Command-line driver.

``trielast study`` runs the convergence study and prints the table in
the usual column order (displacement error, order, stress error, order,
divergence error, order, space dimensions); ``trielast verify`` runs the
stability certification checks and emits a JSON report.
"""

import argparse
import json
import sys

from .analysis import run_study
from .solver import SolverError
from .verify import run_all


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="trielast",
        description="Mixed stress-displacement elasticity on triangular grids")
    sub = parser.add_subparsers(dest="command", required=True)

    study = sub.add_parser("study", help="convergence study on the unit square")
    study.add_argument("--k", type=int, choices=(3, 4, 5), required=True,
                       help="polynomial degree of the stress space")
    study.add_argument("--levels", type=int, default=4,
                       help="finest refinement level (1..6)")
    study.add_argument("--mu", type=float, default=0.5, help="shear modulus")
    study.add_argument("--lambda", dest="lam", type=float, default=1.0,
                       help="second Lame constant")
    study.add_argument("--format", choices=("text", "csv", "json"), default="text")
    study.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    study.add_argument("--dump-system", metavar="PATH",
                       help="write the finest-level system in Matrix Market format")

    verify = sub.add_parser("verify", help="run the stability certification checks")
    verify.add_argument("--k", type=int, choices=(3, 4, 5), required=True)
    verify.add_argument("--level", type=int, default=2, help="mesh level (1..3)")
    verify.add_argument("--out", metavar="PATH", help="write the JSON report here")
    verify.add_argument("--negative-control", choices=("conformity", "div-inclusion"),
                        help="corrupt the build; the run must then fail")
    return parser


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "study":
        if not 1 <= args.levels <= 6:
            parser.error("--levels must be between 1 and 6")
        try:
            table = run_study(args.k, args.levels, mu=args.mu, lam=args.lam,
                              dump_system=args.dump_system)
        except SolverError as exc:
            print("solver failure: {}".format(exc), file=sys.stderr)
            return 1
        except ValueError as exc:
            print("error: {}".format(exc), file=sys.stderr)
            return 1
        rendered = {"text": table.to_text, "csv": table.to_csv,
                    "json": table.to_json}[args.format]()
        _emit(rendered, args.out)
        return 0

    if args.command == "verify":
        if not 1 <= args.level <= 3:
            parser.error("--level must be between 1 and 3 (dense certification)")
        report = run_all(args.k, args.level, corrupt=args.negative_control)
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        if not report["passed"]:
            failing = [c["name"] for c in report["checks"] if not c["passed"]]
            print("verification failed: {}".format(", ".join(failing)), file=sys.stderr)
            return 1
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
