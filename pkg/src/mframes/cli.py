"""Command line entry point ``mframes``.

Exit codes: 0 pass, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .errors import DomainError, ParseError, ShapeError
from .harness.instances import PROFILES, random_instance
from .harness.io import canonical_dumps, load, loads, save
from .harness.suites import SUITE_NAMES, theorem_suite
from .harness.verify import report_text, verify_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mframes", description="Verify integral K-operator frames numerically.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a scenario file")
    p.add_argument("--scenario", required=True, metavar="FILE")
    p.add_argument("--tol-psd", type=_positive)
    p.add_argument("--tol-bound", type=_positive)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("paper-example", help="reproduce the bundled worked example")
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("suite", help="run a randomized suite")
    p.add_argument("name", choices=SUITE_NAMES)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-psd", type=_positive)
    p.add_argument("--tol-bound", type=_positive)
    p.add_argument("--tol-commute", type=_positive)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("gen", help="write a random scenario")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--profile", choices=PROFILES, default="generic")
    p.add_argument("--out", required=True, metavar="FILE")
    return parser


def _emit(report: dict, fmt: str, text_fn) -> None:
    print(canonical_dumps(report) if fmt == "json" else text_fn(report))


def _verify(sc, args) -> int:
    report = verify_scenario(sc, getattr(args, "tol_psd", None), getattr(args, "tol_bound", None))
    _emit(report, args.format, report_text)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return _verify(load(args.scenario), args)
        if args.command == "paper-example":
            text = resources.files("mframes.data").joinpath("paper_example.json").read_text()
            return _verify(loads(text), args)
        if args.command == "suite":
            if args.trials < 1:
                parser.error("--trials must be at least 1")
            tol = {k: v for k, v in (("psd", args.tol_psd), ("bound", args.tol_bound),
                                     ("commute", args.tol_commute)) if v is not None}
            report = theorem_suite(args.name, args.trials, args.seed, tol)
            _emit(report.to_json(), args.format, lambda _: report.summary())
            return EXIT_OK if report.ok else EXIT_FAIL
        if args.command == "gen":
            save(random_instance(args.seed, profile=args.profile), args.out)
            return EXIT_OK
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ParseError, ShapeError, DomainError, OSError) as exc:
        print(f"mframes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
