"""Command-line front end.

Every subcommand writes one CSV table or one JSON object.  Exit status is
0 on success, 1 when a verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from gl2kloosterman import code, glgroup, kloosterman, moments
from gl2kloosterman.field import MAX_DEGREE, MIN_DEGREE, FieldError, field_table_rows, make_field
from gl2kloosterman.verify import DP_MAX_R, VERIFY_MAX_R, verify_all

GL_ENUM_MAX_R = 6


class UsageError(Exception):
    pass


def hexel(x: int | None) -> str:
    return "" if x is None else f"{x:#x}"


def parse_hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex value: {text!r}") from None


def _field(args):
    if not MIN_DEGREE <= args.r <= MAX_DEGREE:
        raise UsageError(f"--r must be in [{MIN_DEGREE}, {MAX_DEGREE}]")
    try:
        return make_field(args.r, args.modulus)
    except FieldError as exc:
        raise UsageError(str(exc)) from None


def _header(p) -> dict:
    return {"q": p.q, "r": p.r, "modulus": hexel(p.modulus)}


def _element(p, value: int, flag: str) -> int:
    if not 0 <= value < p.q:
        raise UsageError(f"{flag} {value:#x} is not an element of GF({p.q})")
    return value


class Output:
    """Collects one table (CSV) or one payload (JSON)."""

    def __init__(self, fmt: str):
        self.fmt = fmt

    def table(self, p, name: str, columns: list[str], rows: list[list], extra: dict | None = None) -> str:
        if self.fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            w.writerows(rows)
            return buf.getvalue()
        payload = _header(p)
        if extra:
            payload.update(extra)
        payload[name] = [dict(zip(columns, (_jsonable(v) for v in row))) for row in rows]
        return json.dumps(payload, indent=2) + "\n"


def _jsonable(v):
    # big integers travel as decimal strings
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return v


def cmd_field_table(args, out: Output):
    p = _field(args)
    rows = [[hexel(x), hexel(inv), t, lam] for x, inv, t, lam in field_table_rows(p)]
    return 0, out.table(p, "elements", ["value", "inverse", "trace", "lambda"], rows)


def cmd_kloosterman(args, out: Output):
    p = _field(args)
    if args.m < 1:
        raise UsageError("--m must be positive")
    if args.m > kloosterman.max_dimension(p.q):
        raise UsageError(f"m={args.m} exceeds the iteration cap for q={p.q}")
    if args.a is not None:
        a = _element(p, args.a, "--a")
        if a == 0:
            raise UsageError("--a must be nonzero")
        rows = [[hexel(a), kloosterman.kloosterman_m_sum(p, args.m, a)]]
    else:
        table = kloosterman.kloosterman_table(p, args.m)
        rows = [[hexel(a), v] for a, v in table.values.items()]
    return 0, out.table(p, "values", ["a", "K"], rows, {"m": args.m})


def cmd_census(args, out: Output):
    p = _field(args)
    census = kloosterman.value_census(p)
    if not args.check_class_number:
        rows = [[t, mult] for t, mult in census.multiplicity.items()]
        return 0, out.table(p, "census", ["t", "multiplicity"], rows)
    cmp_ = kloosterman.compare_census_with_class_numbers(census)
    rows = [[t, mult, h4, h1] for t, mult, h4, h1 in cmp_.rows]
    extra = {"matches_H_t2_minus_4q": cmp_.matches_4q, "matches_H_t2_minus_q": cmp_.matches_q}
    status = 0 if cmp_.matches_4q else 1
    return status, out.table(p, "census", ["t", "multiplicity", "H_t2_minus_4q", "H_t2_minus_q"],
                             rows, extra)


def cmd_glsum(args, out: Output):
    p = _field(args)
    a = _element(p, args.a, "--a")
    if a == 0:
        raise UsageError("--a must be nonzero")
    if args.method == "direct":
        if args.t != 2:
            raise UsageError("direct summation is implemented for t = 2 only")
        if p.r > GL_ENUM_MAX_R:
            raise UsageError(f"direct GL(2,q) enumeration needs r <= {GL_ENUM_MAX_R}")
        value = glgroup.gl2_kloosterman_direct(p, a)
    else:
        if not 0 <= args.t <= glgroup.MAX_RECURSION_T:
            raise UsageError(f"--t must be in [0, {glgroup.MAX_RECURSION_T}]")
        value = glgroup.gl_kloosterman_recursive(p, args.t, a)
    rows = [[args.t, hexel(a), args.method, value]]
    return 0, out.table(p, "glsum", ["t", "a", "method", "K_GL"], rows)


def cmd_nbeta(args, out: Output):
    p = _field(args)
    need_direct = args.method in ("direct", "both")
    if need_direct and p.r > GL_ENUM_MAX_R:
        raise UsageError(f"direct GL(2,q) enumeration needs r <= {GL_ENUM_MAX_R}")
    direct = glgroup.fiber_census_direct(p) if need_direct else None
    formula = (glgroup.fiber_census_formula(p, kloosterman.kloosterman_table(p, 1))
               if args.method in ("formula", "both") else None)
    if direct is not None and formula is not None and direct.counts != formula.counts:
        rows = [[hexel(b), d, f] for b, (d, f) in enumerate(zip(direct.counts, formula.counts))]
        return 1, out.table(p, "nbeta", ["beta", "n_direct", "n_formula"], rows)
    fib = direct if direct is not None else formula
    rows = [[hexel(b), n] for b, n in enumerate(fib.counts)]
    return 0, out.table(p, "nbeta", ["beta", "n"], rows, {"method": args.method})


def _code_context(p):
    return code.build_code_context(p, "formula")


def cmd_dual_weights(args, out: Output):
    p = _field(args)
    ctx = _code_context(p)
    k1 = kloosterman.kloosterman_table(p, 1)
    rows = [[hexel(a), k1[a] if a else "", code.dual_weight(ctx, k1, a)] for a in p.elements()]
    return 0, out.table(p, "dual_weights", ["a", "K", "weight"], rows)


def _cache_path(args, p, method: str, J: int | None) -> Path | None:
    if not args.cache_dir:
        return None
    tag = "full" if J is None else f"j{J}"
    return Path(args.cache_dir) / f"wd_r{p.r}_m{p.modulus:x}_{method}_{tag}.json"


def _weight_distribution(args, p, ctx, method: str, J: int | None) -> code.WeightDistribution:
    path = _cache_path(args, p, method, J)
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        return code.WeightDistribution(int(data["N"]), tuple(int(c) for c in data["freqs"]))
    if method == "dp":
        wd = code.weight_distribution_dp(ctx, J)
    else:
        wd = code.weight_distribution_transform(ctx, code.dual_weight_table(ctx), J,
                                                threads=args.threads)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"N": wd.N, "freqs": [str(c) for c in wd.freqs]}))
        os.replace(tmp, path)
    return wd


def _check_distribution_size(p, method: str, J: int | None) -> None:
    if method in ("dp", "both"):
        if p.r > DP_MAX_R:
            raise UsageError(f"DP weight distribution needs r <= {DP_MAX_R}")
        if p.r == DP_MAX_R and J is None:
            raise UsageError(f"full DP distribution at r={DP_MAX_R} is too large; pass --max-weight")
    if p.r > DP_MAX_R and J is None:
        raise UsageError(f"full distribution at r={p.r} is too large; pass --max-weight")


def cmd_weight_dist(args, out: Output):
    p = _field(args)
    J = args.max_weight
    _check_distribution_size(p, args.method, J)
    ctx = _code_context(p)
    methods = ["dp", "transform"] if args.method == "both" else [args.method]
    results = {m: _weight_distribution(args, p, ctx, m, J) for m in methods}
    status = 0
    if len(results) == 2 and results["dp"].freqs != results["transform"].freqs:
        status = 1
    wd = results[methods[0]]
    rows = [[j, c] for j, c in enumerate(wd.freqs)]
    extra = {"N": str(ctx.N), "method": args.method, "agree": status == 0}
    return status, out.table(p, "weight_distribution", ["j", "C_j"], rows, extra)


def cmd_moments(args, out: Output):
    p = _field(args)
    H = args.h_max
    if H < 1:
        raise UsageError("--h-max must be at least 1")
    rows = []
    status = 0
    direct2 = direct1 = rec2 = rec1 = None
    if args.mode in ("direct", "both"):
        k1 = kloosterman.kloosterman_table(p, 1)
        k2 = kloosterman.kloosterman_table(p, 2)
        direct2 = [kloosterman.power_moment(k2, h) for h in range(H + 1)]
        direct1 = [kloosterman.power_moment(k1, 2 * h) for h in range(H + 1)]
    if args.mode in ("recursive", "both"):
        ctx = _code_context(p)
        J = H if p.r > 3 else None
        wd = code.weight_distribution_transform(ctx, code.dual_weight_table(ctx), J,
                                                threads=args.threads)
        rec2 = moments.generate_moments(ctx, wd, H, "mk2")
        rec1 = moments.generate_moments(ctx, wd, H, "mk_even")
    if args.mode == "both" and (direct2 != rec2 or direct1 != rec1):
        status = 1
    mk2 = direct2 if direct2 is not None else rec2
    mk1 = direct1 if direct1 is not None else rec1
    for h in range(H + 1):
        rows.append([h, mk2[h], mk1[h]])
    extra = {"mode": args.mode, "agree": status == 0}
    return status, out.table(p, "moments", ["h", "MK_2^h", "MK^2h"], rows, extra)


def cmd_verify(args, out: Output):
    if not 2 <= args.r <= VERIFY_MAX_R:
        raise UsageError(f"verify needs 2 <= r <= {VERIFY_MAX_R}")
    if args.h_max < 1:
        raise UsageError("--h-max must be at least 1")
    try:
        rep = verify_all(args.r, args.h_max, args.modulus, threads=args.threads)
    except FieldError as exc:
        raise UsageError(str(exc)) from None
    timing = not args.no_timing
    if args.format == "json":
        text = json.dumps(rep.to_json(timing), indent=2) + "\n"
    else:
        text = rep.render(timing)
    return (0 if rep.passed else 1), text


COMMANDS = {
    "field-table": cmd_field_table,
    "kloosterman": cmd_kloosterman,
    "census": cmd_census,
    "glsum": cmd_glsum,
    "nbeta": cmd_nbeta,
    "dual-weights": cmd_dual_weights,
    "weight-dist": cmd_weight_dist,
    "moments": cmd_moments,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, required=True, help="field degree, q = 2^r")
    common.add_argument("--modulus", type=parse_hex, default=None,
                        help="irreducible modulus as hex bitmask (default: built-in table)")
    common.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="cap on worker threads")
    common.add_argument("--no-timing", action="store_true", help="omit elapsed-time fields")
    tabular = argparse.ArgumentParser(add_help=False, parents=[common])
    tabular.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(
        prog="gl2k", description="Kloosterman sums, C(GL(2,q)) and power moment recursions")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("field-table", parents=[tabular], help="element, inverse, trace, lambda")
    k = sub.add_parser("kloosterman", parents=[tabular], help="K_m(lam; a)")
    k.add_argument("--m", type=int, default=1)
    k.add_argument("--a", type=parse_hex, default=None, help="single argument (hex)")
    c = sub.add_parser("census", parents=[tabular], help="value census of K(lam; a)")
    c.add_argument("--check-class-number", action="store_true")
    g = sub.add_parser("glsum", parents=[tabular], help="Kloosterman sum over GL(t,q)")
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--a", type=parse_hex, required=True)
    g.add_argument("--method", choices=["direct", "recursive"], default="recursive")
    n = sub.add_parser("nbeta", parents=[tabular], help="fiber sizes n(beta)")
    n.add_argument("--method", choices=["direct", "formula", "both"], default="formula")
    sub.add_parser("dual-weights", parents=[tabular], help="weights of the dual codewords c(a)")
    w = sub.add_parser("weight-dist", parents=[tabular], help="weight distribution of C(GL(2,q))")
    w.add_argument("--method", choices=["dp", "transform", "both"], default="transform")
    w.add_argument("--max-weight", type=int, default=None, help="only C_0..C_J")
    w.add_argument("--cache-dir", default=None)
    m = sub.add_parser("moments", parents=[tabular], help="MK_2^h and MK^(2h)")
    m.add_argument("--h-max", type=int, required=True)
    m.add_argument("--mode", choices=["direct", "recursive", "both"], default="both")
    v = sub.add_parser("verify", parents=[common], help="run every identity check")
    v.add_argument("--h-max", type=int, default=10)
    v.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        status, text = COMMANDS[args.command](args, Output(args.format))
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
