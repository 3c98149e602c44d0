"""Command line: ``wifn analyze --context C --protocol P [...]``.

Exit status: 0 increasing, 1 not increasing, 2 input error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analyzer import analyze, write_report
from .errors import WifnError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wifn", description="Static secrecy check by witness functions.")
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="check that a protocol is increasing")
    a.add_argument("--context", help="context file (defaults to the narration's uses-context)")
    a.add_argument("--protocol", required=True, help="narration file")
    a.add_argument("--roles", help="explicit generalized roles (skips generalization)")
    a.add_argument("--variant", choices=["max", "ek", "n"], default="max")
    a.add_argument("--theory", choices=["empty", "homomorphic"])
    a.add_argument("--format", choices=["text", "json"], default="text")
    a.add_argument("--out", help="write the report here instead of stdout")
    return parser


def _context_path(args) -> Path:
    if args.context:
        return Path(args.context)
    from .roles import load_narration_file

    ref = load_narration_file(args.protocol).context_ref
    if ref is None:
        raise WifnError("no --context given and the narration names none")
    return Path(args.protocol).parent / ref


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        report = analyze(_context_path(args), args.protocol, args.roles, args.variant, args.theory)
        write_report(report, args.format, args.out)
    except (WifnError, OSError) as e:
        print(f"wifn: error: {e}", file=sys.stderr)
        return 2
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
