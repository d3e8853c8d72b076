"""Command-line front end: ``lgd <subcommand> [flags]``.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from typing import Sequence

from . import __version__
from .cm import (
    class_number,
    degree_table,
    gonality_threshold,
    is_odd_prime,
    min_degree,
    reduced_forms,
)
from .cohomology import h1, h1_star
from .matgroup import CartanParams, Mat2, cartan_normalizer, closure
from .verify import (
    smallest_nonsquare_unit,
    verify_closed_forms,
    verify_inert_lemma,
    verify_ramified_lemma,
    verify_reduce_to_C,
    verify_split_vanishing,
)

SCHEMA = "lgd/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLE_CAVEAT = (
    "minimum over maximal orders with p inert and the ramified field of discriminant -p or -4p; "
    "other ramified fields (see --all-ramified) and orders with p | f are not included"
)
WIDE_CAVEAT = (
    "minimum over maximal orders with p inert or ramified; orders with p | f are not included"
)


def _caveat(args) -> str:
    return WIDE_CAVEAT if args.all_ramified else TABLE_CAVEAT


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse's default also exits 2
        raise UsageError(message)


def parse_gens(text: str, m: int) -> list[Mat2]:
    """Parse ``a;b;c;d,a;b;c;d,...`` into matrices mod m."""
    gens = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(";")
        if len(parts) != 4:
            raise UsageError(f"matrix {chunk!r} needs four entries a;b;c;d")
        try:
            a, b, c, d = (int(x) for x in parts)
        except ValueError as exc:
            raise UsageError(f"non-integer entry in {chunk!r}") from exc
        g = Mat2.of(a, b, c, d, m)
        if not g.is_invertible():
            raise UsageError(f"matrix {chunk!r} is not invertible mod {m}")
        gens.append(g)
    return gens


def _prime(args) -> int:
    if args.p is None:
        raise UsageError("--p is required")
    if not is_odd_prime(args.p):
        raise UsageError(f"--p must be an odd prime, got {args.p}")
    return args.p


def _cmd_h1star(args) -> tuple[dict, int]:
    p = _prime(args)
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    m = p**n
    delta = (args.delta if args.delta is not None else smallest_nonsquare_unit(p)) % m
    if args.gens:
        G = closure(parse_gens(args.gens, m), m)
        source = "generators"
    else:
        G = cartan_normalizer(CartanParams(p, n, delta))
        source = "normalizer"
    full, star = h1(G), h1_star(G)
    body = {
        "p": p,
        "n": n,
        "delta": delta if source == "normalizer" else None,
        "group": source,
        "generators": [str(g) for g in G.generators],
        "order": G.order,
        "h1": full.divisors,
        "h1_star": star.divisors,
        "h1_star_trivial": star.is_trivial,
    }
    return body, EXIT_OK


def _cmd_verify(args) -> tuple[dict, int]:
    p = _prime(args)
    lemma = args.lemma
    budget = args.budget
    if args.n is not None and args.n < 1:
        raise UsageError("--n must be >= 1")
    if lemma == "split":
        report = verify_split_vanishing(p, args.n or 1, budget)
    elif lemma == "inert":
        report = verify_inert_lemma(p, 3 if budget is None else budget, args.n)
    elif lemma == "ramified":
        report = verify_ramified_lemma(p, 3 if budget is None else budget, args.n)
    elif lemma == "reduce-to-c":
        if args.delta is None:
            raise UsageError("verify reduce-to-c needs --delta")
        report = verify_reduce_to_C(p, args.n or 1, args.delta, budget)
    else:
        try:
            report = verify_closed_forms(p, args.delta, args.case)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    body = report.to_dict()
    return body, EXIT_OK if report.passed else EXIT_FAIL


def _cmd_min_degree(args) -> tuple[dict, int]:
    p = _prime(args)
    w = min_degree(p, args.scan_bound, args.all_ramified)
    body = w.to_dict()
    body["caveat"] = _caveat(args)
    return body, EXIT_OK


def _cmd_table(args) -> tuple[dict, int]:
    if args.p_max is None or args.p_max < 3:
        raise UsageError("--p-max must be >= 3")
    rows = [w.to_dict() for w in degree_table(args.p_max, args.scan_bound, args.all_ramified)]
    return {"p_max": args.p_max, "rows": rows, "caveat": _caveat(args)}, EXIT_OK


def _cmd_class_number(args) -> tuple[dict, int]:
    disc = args.disc
    if disc is None or disc >= 0 or disc % 4 not in (0, 1):
        raise UsageError("--disc must be a negative integer congruent to 0 or 1 mod 4")
    return {"disc": disc, "h": class_number(disc), "forms": [list(f) for f in reduced_forms(disc)]}, EXIT_OK


def _cmd_gonality(args) -> tuple[dict, int]:
    p = args.p
    if p is None or p < 2:
        raise UsageError("--p is required")
    value, passes = gonality_threshold(p)
    return {
        "p": p,
        "value": f"{value.numerator}/{value.denominator}",
        "value_float": round(float(value), 6),
        "target": p - 1,
        "passes": passes,
    }, EXIT_OK


COMMANDS = {
    "h1star": _cmd_h1star,
    "verify": _cmd_verify,
    "min-degree": _cmd_min_degree,
    "table": _cmd_table,
    "class-number": _cmd_class_number,
    "gonality": _cmd_gonality,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--no-meta", action="store_true", help="omit the timestamped metadata envelope")

    parser = _Parser(prog="lgd", description="Locally trivial H^1 of Cartan groups and CM degree tables.")
    parser.add_argument("--version", action="version", version=f"lgd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("h1star", parents=[common], help="H^1 and H^1_* of a subgroup of GL_2(Z/p^n)")
    h.add_argument("--p", type=int)
    h.add_argument("--n", type=int, default=1)
    h.add_argument("--delta", type=int)
    h.add_argument("--gens", help="generators as a;b;c;d,a;b;c;d (default: all of N_{delta,p^n})")

    v = sub.add_parser("verify", parents=[common], help="run a verification harness")
    v.add_argument("lemma", choices=("split", "inert", "ramified", "reduce-to-c", "closed-forms"))
    v.add_argument("--p", type=int)
    v.add_argument("--n", type=int, help="level (split, reduce-to-c) or highest enumerated level (inert, ramified)")
    v.add_argument("--delta", type=int)
    v.add_argument("--budget", type=int, help="max generators per enumerated subgroup; 0 skips part 1")
    v.add_argument("--case", choices=("inert", "ramified"), default="inert")

    md = sub.add_parser("min-degree", parents=[common], help="minimal degree d(p)")
    md.add_argument("--p", type=int)
    md.add_argument("--scan-bound", type=int)
    md.add_argument("--all-ramified", action="store_true", help="scan every ramified fundamental discriminant")

    t = sub.add_parser("table", parents=[common], help="d(p) for odd primes up to --p-max")
    t.add_argument("--p-max", type=int)
    t.add_argument("--scan-bound", type=int)
    t.add_argument("--all-ramified", action="store_true", help="scan every ramified fundamental discriminant")

    c = sub.add_parser("class-number", parents=[common], help="class number of a negative discriminant")
    c.add_argument("--disc", type=int)

    g = sub.add_parser("gonality", parents=[common], help="check 7(p^3 - p)/1600 >= p - 1")
    g.add_argument("--p", type=int)
    return parser


def render(body: dict, fmt: str = "json", meta: dict | None = None, command: str = "") -> str:
    if fmt == "json":
        out = {"schema": SCHEMA, **body}
        if meta is not None:
            out["meta"] = meta
        return json.dumps(out, sort_keys=True, indent=2) + "\n"
    return _render_text(body, command)


def _render_text(body: dict, command: str) -> str:
    if command == "table":
        cols = ("p", "d", "disc", "f", "case", "h", "u")
        rows = [[str(r[c]) for c in cols] for r in body["rows"]]
        widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
        lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in rows]
        lines.append(f"# {body['caveat']}")
        return "\n".join(lines) + "\n"
    lines = []
    for key in sorted(body):
        value = body[key]
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for item in value:
                lines.append("  " + "  ".join(f"{k}={item[k]}" for k in sorted(item)))
        elif isinstance(value, list) and value and key in ("failures", "notes"):
            lines.append(f"{key}:")
            lines.extend(f"  {x}" for x in value)
        else:
            lines.append(f"{key}: {json.dumps(value, sort_keys=True) if isinstance(value, (list, dict)) else value}")
    return "\n".join(lines) + "\n"


def dispatch(argv: Sequence[str] | None = None) -> tuple[str, int]:
    """Parse, run and render; returns (output, exit code)."""
    try:
        args = build_parser().parse_args(argv)
        start = time.perf_counter()
        body, code = COMMANDS[args.command](args)
    except UsageError as exc:
        return f"lgd: error: {exc}\n", EXIT_USAGE
    meta = None
    if not args.no_meta:
        meta = {
            "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "elapsed_s": round(time.perf_counter() - start, 3),
            "version": __version__,
        }
    return render(body, args.format, meta, args.command), code


def main(argv: Sequence[str] | None = None) -> int:
    out, code = dispatch(argv)
    stream = sys.stderr if code == EXIT_USAGE else sys.stdout
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
