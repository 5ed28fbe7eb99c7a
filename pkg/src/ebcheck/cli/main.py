"""Command-line entry point.

Exit codes: 0 the analyses ran (FAILS verdicts included), 1 usage error,
2 problem-file parse error, 3 an analysis raised an error.
"""
import argparse
import sys
from pathlib import Path

from ..exceptions import ProblemParseError
from .builtins import BUILTIN_CASES
from .parser import parse
from .runner import Overrides, run

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="ebcheck", description="Verify local error bounds of nonsmooth inequalities.")
    ap.add_argument("--problem", type=Path, help="problem file to run")
    ap.add_argument("--case", choices=sorted(BUILTIN_CASES), help="run a builtin case without a file")
    ap.add_argument("--list-cases", action="store_true", help="list builtin cases and exit")
    ap.add_argument("--seed", type=int, help="random seed (overrides the file)")
    ap.add_argument("--budget", type=float, default=1.0, help="global sample multiplier")
    ap.add_argument("--tol", type=float, help="certificate tolerance")
    ap.add_argument("--out", type=Path, help="directory for CSV output")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_cases:
        for name in sorted(BUILTIN_CASES):
            print(name)
        return EXIT_OK
    if (args.problem is None) == (args.case is None):
        ap.error("give exactly one of --problem or --case")
    if args.budget <= 0:
        ap.error("--budget must be positive")
    if args.problem is not None:
        try:
            text = args.problem.read_text(encoding="utf-8")
        except OSError as exc:
            ap.error(f"cannot read problem file: {exc}")
    else:
        text = BUILTIN_CASES[args.case]()
    try:
        pf = parse(text)
    except ProblemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = run(pf, Overrides(seed=args.seed, budget=args.budget, tol=args.tol))
    sys.stdout.write(report.text())
    if args.out is not None:
        report.write_csv(args.out)
    for s in report.sections:
        if s.error:
            print(s.error, file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
