"""Command-line interface.

Subcommands: gd, rcd, pdhg-qeb, solve; common flags --tol, --seed,
--out, --format.  Exit codes: 0 certificate found (and verified),
1 infeasible, 2 inaccurate/unclassified, 64 usage or schema error.
The experimental primal-dual coordinate scenario is gated behind
``lyacert --experimental purecd``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .conic import SchemaError
from .scenarios import (
    GdConfig,
    PdhgQebConfig,
    PurecdConfig,
    RcdConfig,
    run_gd,
    run_generic,
    run_pdhg_qeb,
    run_purecd,
    run_rcd,
)
from .scenarios.common import EXIT_USAGE, ScenarioResult

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-6,
                   help="feasibility tolerance on the certificate margin")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the instance-sampling check")
    p.add_argument("--out", default=None, help="write the report here")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> _Parser:
    p = _Parser(prog="lyacert",
                description="Lyapunov certificates for first-order methods")
    p.add_argument("--experimental", choices=["purecd"], default=None,
                   help="enable an experimental scenario")
    sub = p.add_subparsers(dest="command")

    gd = sub.add_parser("gd", help="gradient descent on smooth convex f",
                        parents=[], add_help=True)
    gd.add_argument("--gamma", type=float, required=True)
    gd.add_argument("--L", type=float, default=1.0)
    gd.add_argument("--rate", type=float, default=None,
                    help="certify a linear rate rho instead of descent")
    gd.add_argument("--minmax", action="store_true",
                    help="report the min-max certification value")
    _add_common(gd)

    rcd = sub.add_parser("rcd", help="randomized coordinate descent")
    rcd.add_argument("--d", type=int, required=True)
    rcd.add_argument("--check-conjecture", action="store_true",
                     help="certify the fixed (d-1, d/2, d-2) inequality")
    _add_common(rcd)

    pd = sub.add_parser("pdhg-qeb",
                        help="PDHG linear rates under a quadratic error bound")
    pd.add_argument("--gamma-min", type=float, required=True)
    pd.add_argument("--gamma-max", type=float, required=True)
    pd.add_argument("--steps", type=int, required=True)
    pd.add_argument("--eta", type=float, required=True)
    pd.add_argument("--beta", type=float, default=1.0)
    pd.add_argument("--plot", default=None, metavar="FILE.svg")
    _add_common(pd)

    sv = sub.add_parser("solve", help="run on a JSON model or conic program")
    sv.add_argument("file")
    _add_common(sv)

    ex = sub.add_parser("purecd", help=argparse.SUPPRESS)
    ex.add_argument("--gamma", type=float, required=True)
    _add_common(ex)
    return p


def _render(res: ScenarioResult, fmt: str) -> str:
    d = res.to_json_dict()
    if fmt == "json":
        return json.dumps(d, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    rows = d.get("rows")
    if not rows:
        rows = [{k: v for k, v in d.items()
                 if not isinstance(v, (dict, list))}]
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in keys})
    return buf.getvalue()


def _dispatch(args: argparse.Namespace) -> ScenarioResult:
    if args.command == "gd":
        return run_gd(GdConfig(gamma=args.gamma, L=args.L, rate=args.rate,
                               minmax=args.minmax, tol=args.tol,
                               seed=args.seed))
    if args.command == "rcd":
        return run_rcd(RcdConfig(d=args.d,
                                 check_conjecture=args.check_conjecture,
                                 tol=args.tol, seed=args.seed))
    if args.command == "pdhg-qeb":
        return run_pdhg_qeb(PdhgQebConfig(
            gamma_min=args.gamma_min, gamma_max=args.gamma_max,
            steps=args.steps, eta=args.eta, beta=args.beta, tol=args.tol,
            seed=args.seed, plot=args.plot))
    if args.command == "solve":
        return run_generic(args.file, tol=args.tol, seed=args.seed)
    if args.command == "purecd":
        return run_purecd(PurecdConfig(gamma=args.gamma, tol=args.tol,
                                       seed=args.seed))
    raise SystemExit(EXIT_USAGE)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "purecd" and args.experimental != "purecd":
        print("lyacert: the purecd scenario requires --experimental purecd",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        res = _dispatch(args)
    except SchemaError as ex:
        print(f"lyacert: schema error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as ex:
        print(f"lyacert: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as ex:
        print(f"lyacert: invalid configuration: {ex}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(res, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return res.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
