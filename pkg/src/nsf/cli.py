"""Command line entry point: ``nsf <subcommand> ...``.

Every invocation writes JSON lines.  The first line is a run manifest; result
lines follow.  Exit status is 0 on success, 1 when a mathematical exception
was found (an unrepresentable n, a failed criterion, no gate witness), and 2
on usage errors.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .analytic_criterion import (
    CriterionParams,
    criterion_generic,
    criterion_grh,
    criterion_odd,
    optimize_A,
)
from .arith_core import factorize
from .errors import NSFError
from .grh_gate import gate
from .range_verifier import VERIFY_UPPER, VerifierConfig, verify_range
from .representations import R, T, deficit, exceptions, g, theta

EXIT_OK, EXIT_FOUND, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def _manifest(args: argparse.Namespace, started: str, finished: str | None) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    return {
        "subcommand": args.command,
        "parameters": params,
        "tool_version": __version__,
        "started": started,
        "finished": finished,
    }


def parse_n(text: str) -> tuple[int | None, float]:
    """``"123"`` -> (123, log 123); ``"log:61.6"`` -> (None, 61.6)."""
    if text.startswith("log:"):
        try:
            log_n = float(text[4:])
        except ValueError:
            raise UsageError(f"bad log value in {text!r}") from None
        if not math.isfinite(log_n) or log_n <= 0:
            raise UsageError("log n must be a positive finite number")
        return None, log_n
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--n expects an integer or log:<real>, got {text!r}") from None
    if n < 2:
        raise UsageError("--n must be >= 2")
    return n, math.log(n)


def _int(text: str) -> int:
    # accept 1e8-style shorthands for range endpoints
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
        return int(value)


# --------------------------------------------------------------------------
# subcommands; each returns (result lines, exit code)
# --------------------------------------------------------------------------

def cmd_count(args):
    n = args.n
    if n < 2:
        raise UsageError("--n must be >= 2")
    out = {"n": n}
    for what in args.what or ["T"]:
        if what == "T":
            out["T"] = T(n)
        elif what == "g":
            out["g"] = g(n)
        elif what == "R":
            out["R"] = R(n).value
        elif what == "theta":
            out["theta"] = theta(n).value
        elif what == "deficit":
            out["deficit"] = deficit(n)
    return [out], EXIT_OK


def cmd_exceptions(args):
    if not 1 <= args.start < args.end:
        raise UsageError("need 1 <= start < end")
    exc = exceptions(args.start, args.end)
    return [{"lo": args.start, "hi": args.end, "exceptions": exc}], EXIT_FOUND if exc else EXIT_OK


def cmd_criterion(args):
    n, log_n = parse_n(args.n)
    if not 0 < args.A < 0.5:
        raise UsageError("--A must lie in (0, 1/2)")
    if args.exact:
        if n is None:
            raise UsageError("--exact needs an integer --n (coprimality requires n itself)")
        factors = factorize(n)
        if args.mode == "odd":
            params = CriterionParams(args.A, args.c or 316, "bennett")
            res = criterion_generic(log_n, params, factors, "odd")
        else:
            params = CriterionParams(args.A, args.c or math.exp(args.A * log_n), "grh")
            res = criterion_generic(log_n, params, factors, "general", "prop2")
    elif args.mode == "odd":
        res = criterion_odd(log_n, args.A)
    else:
        res = criterion_grh(log_n, args.A)
    line = {"log_n": log_n, **res.to_json()}
    return [line], EXIT_OK if res.verdict else EXIT_FOUND


def cmd_optimize_a(args):
    _, log_n = parse_n(args.n)
    A, rhs = optimize_A(log_n, args.mode)
    return [{"mode": args.mode, "log_n": log_n, "A": A, "rhs": rhs}], EXIT_OK


def cmd_grh_gate(args):
    try:
        n = int(args.n)
    except ValueError:
        raise UsageError(f"--n expects an integer, got {args.n!r}") from None
    if n <= VERIFY_UPPER:
        raise UsageError(f"--n must exceed {VERIFY_UPPER}")
    w = gate(n)
    if w is None:
        return [{"n": n, "witness": None}], EXIT_FOUND
    return [{"n": n, "witness": w.to_json()}], EXIT_OK


def _threads(args) -> int:
    env = os.environ.get("NSF_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"NSF_THREADS must be an integer, got {env!r}") from None
    return args.threads


def run_verify(args, emit, started: str) -> int:
    start, end = args.start, args.end
    if args.full:
        start, end = 25, VERIFY_UPPER + 1
    if start is None or end is None:
        raise UsageError("verify needs --start and --end (or --full)")
    if not 24 < start < end:
        raise UsageError("need 24 < start < end")
    try:
        cfg = VerifierConfig(
            segment_width=args.segment_width, s1_bound=args.s1_bound,
            s2_bound=args.s2_bound, thread_count=_threads(args),
            cover_left_extension=not args.no_left_extension,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emit(_manifest(args, started, None))
    total = verify_range(start, end, cfg, checkpoint=args.checkpoint,
                         on_segment=lambda rep: emit(rep.to_json()))
    emit({**total.to_json(), "total": True, "finished": _now()})
    return EXIT_FOUND if total.exceptions else EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nsf", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify a range with the three-stage pipeline")
    p.add_argument("--start", type=_int, help="first n (inclusive, > 24)")
    p.add_argument("--end", type=_int, help="last n (exclusive)")
    p.add_argument("--full", action="store_true", help="verify all 24 < n <= 8e9")
    p.add_argument("--segment-width", type=_int, default=10**7)
    p.add_argument("--s1-bound", type=_int, default=10**5)
    p.add_argument("--s2-bound", type=_int, default=10**4)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-left-extension", action="store_true",
                   help="covering uses only primes inside each segment")
    p.add_argument("--checkpoint", help="JSONL file of finished segments (resumable)")
    p.add_argument("--output", help="write JSONL here instead of stdout")

    p = sub.add_parser("count", help="representation counts for one n")
    p.add_argument("--n", type=_int, required=True)
    p.add_argument("--what", action="append", choices=["T", "g", "R", "theta", "deficit"])
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("exceptions", help="brute-force list of unrepresentable n")
    p.add_argument("--start", type=_int, required=True)
    p.add_argument("--end", type=_int, required=True)
    p.set_defaults(func=cmd_exceptions)

    p = sub.add_parser("criterion", help="evaluate an explicit criterion")
    p.add_argument("--mode", choices=["odd", "grh"], required=True)
    p.add_argument("--n", required=True, help="integer or log:<real>")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--exact", action="store_true",
                   help="sum the error bound over coprime squarefree moduli instead of the closed form")
    p.add_argument("--c", type=float, help="modulus cutoff for --exact")
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("optimize-a", help="minimise the criterion over A")
    p.add_argument("--mode", choices=["odd", "grh"], required=True)
    p.add_argument("--n", required=True, help="integer or log:<real>")
    p.set_defaults(func=cmd_optimize_a)

    p = sub.add_parser("grh-gate", help="least-prime gate witness for 8e9 < n < q20#")
    p.add_argument("--n", required=True)
    p.set_defaults(func=cmd_grh_gate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    started = _now()
    try:
        if args.command == "verify":
            target = open(args.output, "w") if args.output else contextlib.nullcontext(sys.stdout)
            with target as fh:
                def emit(obj):
                    fh.write(json.dumps(obj) + "\n")
                    fh.flush()
                return run_verify(args, emit, started)
        lines, code = args.func(args)
    except (UsageError, NSFError, ValueError) as exc:
        print(f"nsf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(_manifest(args, started, _now())))
    for line in lines:
        print(json.dumps(line))
    return code


if __name__ == "__main__":
    sys.exit(main())
