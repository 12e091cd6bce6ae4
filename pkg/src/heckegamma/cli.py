"""Command-line front end.

Four subcommands, one JSON report each:

  explore      chamber census of a ball around the base chamber
  courtes      panel split histogram with the two-value law asserted
  gamma        generators of the truncated gallery-quotient group
  distinguish  fixed-space dimension of a module's contragredient

Exit codes: 0 success, 1 bad input, 2 structural invariant violated,
3 results truncated by a resource cap (partial report emitted).
"""

import argparse
import sys

from . import reports
from .errors import InvariantViolation


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="rank: chambers of SL(n)")
    p.add_argument("--q0", type=int, required=True, help="residue field size of the small field")
    p.add_argument("--radius", type=int, required=True, help="ball radius in the chamber graph")
    p.add_argument("--precision", type=int, default=None, help="series precision override")
    p.add_argument("--cap-chambers", type=int, default=5_000_000, metavar="N")
    p.add_argument("--cap-galleries", type=int, default=10_000, metavar="N")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out", default=None, metavar="PATH", help="report file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heckegamma",
        description="exact lattice-chain geometry over a ramified quadratic base",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("explore", "count chambers by distance to the base and to the fixed subbuilding"),
        ("courtes", "panel split histogram; nonzero exit if the two-value law breaks"),
        ("gamma", "harvest generators of the radius-truncated gallery group"),
        ("distinguish", "fixed-space dimension of a module under the truncated group"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        if name == "distinguish":
            p.add_argument(
                "--module",
                required=True,
                help="trivial | sign | random | path to a module JSON file",
            )
            p.add_argument("--seed", type=int, default=0, help="seed for --module random")
            p.add_argument(
                "--check-distribution",
                action="store_true",
                help="reconstruct each fixed vector and verify the local relation",
            )
    return ap


def _session_config(args: argparse.Namespace) -> dict:
    if args.radius < 0:
        raise ValueError("radius must be nonnegative")
    if args.precision is not None and args.precision < 2:
        raise ValueError("precision override must be at least 2")
    cfg = {
        "n": args.n,
        "q0": args.q0,
        "radius": args.radius,
        "precision": args.precision,
        "cap_chambers": args.cap_chambers,
        "cap_galleries": args.cap_galleries,
    }
    if args.command == "distinguish":
        cfg["module"] = args.module
        cfg["seed"] = args.seed
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _session_config(args)
        if args.command == "explore":
            report, code = reports.explore_report(cfg)
        elif args.command == "courtes":
            report, code = reports.courtes_report(cfg)
        elif args.command == "gamma":
            report, code = reports.gamma_report(cfg)
        else:
            mod = reports.resolve_module(cfg["module"], cfg["n"], cfg["q0"], cfg["seed"])
            report, code = reports.distinguish_report(
                cfg, mod, check=args.check_distribution
            )
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return reports.EXIT_VIOLATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    reports.emit(report, args.format, args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
