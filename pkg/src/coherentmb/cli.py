"""Command line front end.

Subcommands:

* constant  - certified Markov constant (and mu enclosure) per degree;
* bounds    - the full lower/upper bound chain per degree;
* table     - closed-form bound table for the exponential-plus-mass pair;
* verify    - randomized inequality check plus extremal attainment;
* identities - structural identity suites.

Cases are written as positional tokens: a tag followed by key=value pairs,
with the degree given the same way, e.g.

    coherentmb constant laguerre-b M=1 n=20
    coherentmb bounds jacobi-a alpha=1 beta=1 xi=-2.5 n=5,10

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 numerical failure.  All output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import decimal
import json
import sys
from typing import Any, Sequence

from .coherent import CASE_TAGS, CoherentCase
from .errors import NumericalFailure, ValidationError
from .solver import bounds_report, laguerre_b_closed_bounds
from .verify import check_identities, check_inequality

__all__ = ["main"]

_KEY_TO_FIELD = {"alpha": "alpha", "beta": "beta", "gamma": "gamma", "xi": "xi", "M": "mass"}
_REFERENCE_MASSES = (1.0, 5.0, 10.0, 50.0)
_REFERENCE_DEGREES = (20, 50, 100, 500)
_RATIO_SLACK = 1e-8
_GAP_SLACK = 1e-7


def _parse_case_tokens(tokens: Sequence[str]) -> tuple[CoherentCase, list[int]]:
    """Turn ['laguerre-b', 'M=1', 'n=5,10'] into a case and degree list."""
    if not tokens:
        raise ValidationError("expected a case tag followed by key=value pairs")
    tag = tokens[0]
    if tag not in CASE_TAGS:
        raise ValidationError(f"unknown case tag {tag!r}; choose from {', '.join(CASE_TAGS)}")
    kwargs: dict[str, float] = {}
    degrees: list[int] = []
    for tok in tokens[1:]:
        key, sep, raw = tok.partition("=")
        if not sep or not key or not raw:
            raise ValidationError(f"malformed parameter token {tok!r}; expected key=value")
        if key == "n":
            degrees = _parse_degrees(raw)
        elif key in _KEY_TO_FIELD:
            field = _KEY_TO_FIELD[key]
            if field in kwargs:
                raise ValidationError(f"duplicate parameter {key!r}")
            try:
                kwargs[field] = float(raw)
            except ValueError:
                raise ValidationError(f"could not parse {tok!r} as a number") from None
        else:
            raise ValidationError(f"unknown parameter key {key!r}")
    case = CoherentCase(tag=tag, **kwargs)
    return case, degrees


def _parse_degrees(raw: str) -> list[int]:
    out = []
    for part in raw.split(","):
        try:
            value = int(part)
        except ValueError:
            raise ValidationError(f"degree {part!r} is not an integer") from None
        if value < 1:
            raise ValidationError(f"degree must be >= 1, got {value}")
        out.append(value)
    return out


def _require_degrees(degrees: list[int]) -> list[int]:
    if not degrees:
        raise ValidationError("no degree given; add an n=... token (e.g. n=10 or n=5,10)")
    return degrees


def _fmt(value: float, digits: int) -> str:
    """Fixed-point with the requested decimals, scientific when that would
    reduce a nonzero value to all zeros.

    Digits past the cutoff are dropped rather than rounded, so raising
    --digits always extends the previous output as a prefix.
    """
    if value != 0.0 and abs(value) < 10.0 ** (-digits):
        return f"{value:.{digits}e}"
    quantum = decimal.Decimal(1).scaleb(-digits)
    truncated = decimal.Decimal(value).quantize(quantum, rounding=decimal.ROUND_DOWN)
    return f"{truncated:.{digits}f}"


def _emit(args: argparse.Namespace, payload: dict[str, Any], pretty_lines: list[str], csv_lines: list[str]) -> None:
    if args.output == "json":
        print(json.dumps(payload, sort_keys=False))
    elif args.output == "csv":
        print("\n".join(csv_lines))
    else:
        print("\n".join(pretty_lines))


def _cmd_constant(args: argparse.Namespace) -> int:
    case, degrees = _parse_case_tokens(args.tokens)
    degrees = _require_degrees(degrees)
    d = args.digits
    results = []
    pretty = []
    csv_lines = ["case,n,mu,markov"]
    for n in degrees:
        rep = bounds_report(case, n, tol=args.tol, qd_rounds=args.qd_rounds)
        results.append(
            {
                "n": n,
                "mu_lo": rep.mu.lo,
                "mu_hi": rep.mu.hi,
                "markov_lo": rep.markov_constant.lo,
                "markov_hi": rep.markov_constant.hi,
            }
        )
        pretty.append(
            f"{case.describe()} n={n}  markov={_fmt(rep.markov_constant.mid, d)}  "
            f"mu={_fmt(rep.mu.mid, d)}"
        )
        csv_lines.append(
            f"{case.describe()},{n},{_fmt(rep.mu.mid, d)},{_fmt(rep.markov_constant.mid, d)}"
        )
    payload = {"schema": 1, "command": "constant", "case": case.describe(), "results": results}
    _emit(args, payload, pretty, csv_lines)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    case, degrees = _parse_case_tokens(args.tokens)
    degrees = _require_degrees(degrees)
    d = args.digits
    results = []
    pretty = []
    csv_lines = ["case,n,newton_x1,laguerre_x1,mu_lo,mu_hi,qd_last,markov_lo,markov_hi"]
    for n in degrees:
        rep = bounds_report(case, n, tol=args.tol, qd_rounds=args.qd_rounds)
        results.append(rep.to_json())
        qd_last = rep.qd_upper[-1][1]
        pretty.append(f"{case.describe()} n={n}")
        pretty.append(f"  newton lower      {_fmt(rep.newton_x1, d)}")
        pretty.append(f"  laguerre lower    {_fmt(rep.laguerre_x1, d)}")
        if rep.x1_closed is not None:
            pretty.append(f"  closed lower      {_fmt(rep.x1_closed, d)}")
        pretty.append(f"  mu enclosure      [{_fmt(rep.mu.lo, d)}, {_fmt(rep.mu.hi, d)}]")
        for rounds, value in rep.qd_upper:
            pretty.append(f"  qd upper (r={rounds})   {_fmt(value, d)}")
        pretty.append(
            f"  markov enclosure  [{_fmt(rep.markov_constant.lo, d)}, "
            f"{_fmt(rep.markov_constant.hi, d)}]"
        )
        csv_lines.append(
            ",".join(
                [
                    case.describe(),
                    str(n),
                    _fmt(rep.newton_x1, d),
                    _fmt(rep.laguerre_x1, d),
                    _fmt(rep.mu.lo, d),
                    _fmt(rep.mu.hi, d),
                    _fmt(qd_last, d),
                    _fmt(rep.markov_constant.lo, d),
                    _fmt(rep.markov_constant.hi, d),
                ]
            )
        )
    payload = {"schema": 1, "command": "bounds", "case": case.describe(), "results": results}
    _emit(args, payload, pretty, csv_lines)
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    masses: tuple[float, ...] = _REFERENCE_MASSES
    degrees: tuple[int, ...] = _REFERENCE_DEGREES
    if args.tokens and args.reference_table:
        raise ValidationError("--reference-table takes no M=/n= tokens")
    if args.tokens:
        masses_list: list[float] = []
        degrees_list: list[int] = []
        for tok in args.tokens:
            key, sep, raw = tok.partition("=")
            if not sep:
                raise ValidationError(f"malformed parameter token {tok!r}; expected key=value")
            if key == "M":
                for part in raw.split(","):
                    try:
                        m = float(part)
                    except ValueError:
                        raise ValidationError(f"mass {part!r} is not a number") from None
                    if m < 0.0:
                        raise ValidationError(f"mass must be >= 0, got {m}")
                    masses_list.append(m)
            elif key == "n":
                degrees_list = _parse_degrees(raw)
            else:
                raise ValidationError(f"unknown parameter key {key!r}")
        if masses_list:
            masses = tuple(masses_list)
        if degrees_list:
            degrees = tuple(degrees_list)
    d = args.digits
    header = ["M", "n", "x1_closed", "x1_tilde", "mu", "qd_upper"]
    rows = []
    pretty = ["  ".join(f"{h:>12s}" for h in header)]
    csv_lines = [",".join(header)]
    for m in masses:
        for n in degrees:
            case = CoherentCase.laguerre_b(m)
            rep = bounds_report(case, n, tol=args.tol, qd_rounds=args.qd_rounds)
            x1_closed, _, x_tilde, _ = laguerre_b_closed_bounds(m, n)
            qd_last = rep.qd_upper[-1][1]
            rows.append([m, n, x1_closed, x_tilde, rep.mu.mid, qd_last])
            cells = [f"{m:g}", str(n)] + [
                _fmt(v, d) for v in (x1_closed, x_tilde, rep.mu.mid, qd_last)
            ]
            pretty.append("  ".join(f"{c:>12s}" for c in cells))
            csv_lines.append(",".join(cells))
    payload = {"schema": 1, "command": "table", "columns": header, "rows": rows}
    _emit(args, payload, pretty, csv_lines)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    case, degrees = _parse_case_tokens(args.tokens)
    degrees = _require_degrees(degrees)
    d = args.digits
    reports = []
    pretty = []
    csv_lines = ["case,n,trials,seed,max_ratio,extremal_gap,pass"]
    all_ok = True
    for n in degrees:
        rep = check_inequality(case, n, trials=args.trials, rng_seed=args.seed)
        ok = rep.max_ratio <= 1.0 + _RATIO_SLACK and abs(rep.extremal_gap) <= _GAP_SLACK
        all_ok = all_ok and ok
        reports.append({**rep.to_json(), "pass": ok})
        status = "pass" if ok else "FAIL"
        pretty.append(
            f"{case.describe()} n={n} trials={args.trials} seed={args.seed}: "
            f"max_ratio={_fmt(rep.max_ratio, d)} extremal_gap={rep.extremal_gap:.3e} "
            f"[{status}]"
        )
        csv_lines.append(
            f"{case.describe()},{n},{args.trials},{args.seed},"
            f"{_fmt(rep.max_ratio, d)},{rep.extremal_gap:.3e},{status}"
        )
    payload = {"schema": 1, "command": "verify", "reports": reports, "pass": all_ok}
    _emit(args, payload, pretty, csv_lines)
    return 0 if all_ok else 1


def _cmd_identities(args: argparse.Namespace) -> int:
    rep = check_identities(depth=args.depth)
    ok = not rep.identity_failures
    payload = {
        "schema": 1,
        "command": "identities",
        "depth": args.depth,
        "checks": rep.trials,
        "failures": list(rep.identity_failures),
        "pass": ok,
    }
    status = "pass" if ok else "FAIL"
    pretty = [f"identities depth={args.depth}: {rep.trials} checks [{status}]"]
    pretty.extend(f"  {line}" for line in rep.identity_failures)
    csv_lines = ["depth,checks,failures,pass", f"{args.depth},{rep.trials},{len(rep.identity_failures)},{status}"]
    _emit(args, payload, pretty, csv_lines)
    return 0 if ok else 1


def _add_common(sub: argparse.ArgumentParser, *, tol: bool = True) -> None:
    sub.add_argument("--output", choices=("pretty", "csv", "json"), default="pretty",
                     help="output format (default: pretty)")
    sub.add_argument("--digits", type=int, default=9, metavar="D",
                     help="decimal places in pretty/csv output, at most 15 (default: 9)")
    if tol:
        sub.add_argument("--tol", type=float, default=1e-10, metavar="T",
                         help="relative width target for the mu enclosure (default: 1e-10)")
        sub.add_argument("--qd-rounds", type=int, default=2, metavar="R",
                         help="progressive qd rounds for the upper bounds (default: 2)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherentmb",
        description="Certified Markov constants for coherent pairs of measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constant", help="Markov constant and mu enclosure")
    p_const.add_argument("tokens", nargs="+", metavar="TOKEN",
                         help="case tag then key=value pairs incl. n=...")
    _add_common(p_const)
    p_const.set_defaults(func=_cmd_constant)

    p_bounds = sub.add_parser("bounds", help="full lower/upper bound chain")
    p_bounds.add_argument("tokens", nargs="+", metavar="TOKEN",
                          help="case tag then key=value pairs incl. n=...")
    _add_common(p_bounds)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_table = sub.add_parser("table", help="closed-form table for laguerre-b")
    p_table.add_argument("tokens", nargs="*", metavar="TOKEN",
                         help="optional M=... and n=... lists")
    p_table.add_argument("--reference-table", action="store_true",
                         help="use the canonical 16-cell mass/degree grid")
    _add_common(p_table)
    p_table.set_defaults(func=_cmd_table)

    p_verify = sub.add_parser("verify", help="randomized inequality verification")
    p_verify.add_argument("tokens", nargs="+", metavar="TOKEN",
                          help="case tag then key=value pairs incl. n=...")
    p_verify.add_argument("--trials", type=int, default=100, metavar="K",
                          help="random polynomials per degree (default: 100)")
    p_verify.add_argument("--seed", type=int, default=0, metavar="S",
                          help="RNG seed (default: 0)")
    _add_common(p_verify, tol=False)
    p_verify.set_defaults(func=_cmd_verify)

    p_ident = sub.add_parser("identities", help="structural identity suites")
    p_ident.add_argument("--depth", type=int, default=20, metavar="D",
                         help="maximum index in each suite, at most 20 (default: 20)")
    _add_common(p_ident, tol=False)
    p_ident.set_defaults(func=_cmd_identities)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not 1 <= args.digits <= 15:
        print("error: --digits must be between 1 and 15", file=sys.stderr)
        return 2
    if getattr(args, "qd_rounds", 1) < 0:
        print("error: --qd-rounds must be >= 0", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
