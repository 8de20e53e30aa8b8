"""Command-line interface.

Exit codes: 0 success, 1 verification mismatch (or invalid tableau), 2 usage
or input error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import expect
from .core import STAT_FIELDS, Grid, parse, serialize, stats, validate
from .enumeration import (
    DEFAULT_CAP,
    StatAccumulator,
    enumerate_all,
    iter_tableaux,
    measure_identity_table,
    u_moment_brute,
)
from .errors import ParseError, ResourceCap, TableauError
from .pasep import PasepParams, PasepState, border_to_state, simulate, site_marginals, stationary
from .sample import METHODS, estimate, pooled

VERIFY_CHOICES = (
    "rows",
    "unrestricted",
    "diag_ones",
    "ss",
    "ww",
    "p_south",
    "p_ss",
    "p_ww",
    "p_g1",
    "u_moment",
    "measure_lemma",
    "binom_identity",
)
MEASURE_A = (1, 2, 3, 4)
U_MOMENT_A = (1, 2, 3, 4, 5)
BINOM_A = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2))


def frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class VerifyRow:
    n: int
    statistic: str
    k: int | None
    closed: Fraction
    brute: Fraction
    note: str = ""

    @property
    def match(self) -> bool:
        return self.closed == self.brute

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "statistic": self.statistic,
            "k": "" if self.k is None else self.k,
            "closed": frac(self.closed),
            "brute": frac(self.brute),
            "match": self.match,
            "decimal": f"{float(self.brute):.12g}",
            "note": self.note,
        }


def verify_rows(n_max: int, which=VERIFY_CHOICES, cap: int = DEFAULT_CAP, workers: int = 1) -> list[VerifyRow]:
    """Closed forms against enumeration for every n in 1..n_max."""
    if n_max > cap:
        raise ResourceCap(f"n_max = {n_max} exceeds the enumeration cap {cap}")
    which = set(which)
    unknown = which - set(VERIFY_CHOICES)
    if unknown:
        raise ValueError(f"unknown verification(s): {sorted(unknown)}")
    rows: list[VerifyRow] = []
    aggregates = [
        ("rows", "rows", expect.expected_rows, 1),
        ("unrestricted", "unrestricted", expect.expected_unrestricted, 1),
        ("diag_ones", "diagonal_ones", expect.expected_diag_ones, 1),
        ("ss", "ss_pairs", expect.expected_ss, 2),
        ("ww", "ww_pairs", expect.expected_ww, 2),
    ]
    positional = [
        ("p_south", "south", expect.p_south, 1),
        ("p_ss", "ss", expect.p_ss, 2),
        ("p_ww", "ww", expect.p_ww, 2),
        ("p_g1", "g1", expect.p_g1, 1),
    ]
    need_enum = which & {a[0] for a in aggregates} | which & {p[0] for p in positional}
    for n in range(1, n_max + 1):
        if need_enum:
            acc = StatAccumulator(n)
            enumerate_all(n, acc, cap=cap, workers=workers)
            for key, field, fn, low in aggregates:
                if key in which and n >= low:
                    rows.append(VerifyRow(n, key, None, fn(n), acc.mean(field)))
            for key, attr, fn, low in positional:
                if key not in which:
                    continue
                counts = getattr(acc, attr)
                for k in range(low, n + 1):
                    brute = Fraction(counts[k], acc.count)
                    note = ""
                    if key == "p_south":
                        alt = expect.p_south_proof_form(n, k)
                        verdict = "matches" if alt == brute else "differs"
                        note = f"(k+1) variant {frac(alt)} {verdict}"
                    rows.append(VerifyRow(n, key, k, fn(n, k), brute, note))
        if "u_moment" in which:
            for a in U_MOMENT_A:
                brute = u_moment_brute(n, a, cap=cap)
                gamma = expect.u_moment_gamma_form(n, a)
                verdict = "matches" if gamma == brute else "differs"
                rows.append(
                    VerifyRow(n, f"u_moment[a={a}]", None, expect.u_moment(n, a), brute,
                              f"gamma form {frac(gamma)} {verdict}")
                )
        if "measure_lemma" in which:
            for chk in measure_identity_table(n, MEASURE_A, cap=cap):
                rows.append(
                    VerifyRow(n, f"measure_lemma[a={chk.a},X={chk.statistic}]", None, chk.rhs, chk.lhs)
                )
        if "binom_identity" in which:
            for a in BINOM_A:
                chk = expect.binomial_identity_check(n, a)
                rows.append(VerifyRow(n, f"binom_identity[a={a}]", None, chk.rhs, chk.lhs))
    return rows


# -- output -------------------------------------------------------------------


def emit(records: list[dict], fmt: str, out, fieldnames=None) -> None:
    if fmt == "json":
        json.dump(records, out, indent=2, sort_keys=False)
        out.write("\n")
        return
    if fieldnames is None:
        fieldnames = list(records[0]) if records else []
    writer = csv.DictWriter(out, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _read_lines(path):
    if path in (None, "-"):
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


# -- subcommands --------------------------------------------------------------


def cmd_validate(args, out) -> int:
    records = []
    bad = 0
    for lineno, line in enumerate(_read_lines(args.input), start=1):
        text = line.strip()
        try:
            grid = Grid.from_text(text) if "[" in text else parse(text).grid
            report = validate(grid)
        except TableauError as exc:
            records.append({"line": lineno, "ok": False, "violations": str(exc)})
            bad += 1
            continue
        desc = "; ".join(
            f"row {v.row} col {v.column}: condition {v.condition} ({v.message})"
            for v in report.violations
        )
        records.append({"line": lineno, "ok": report.ok, "violations": desc})
        bad += not report.ok
    emit(records, args.format, out, ["line", "ok", "violations"])
    return 1 if bad else 0


def cmd_enumerate(args, out) -> int:
    count = 0
    dest, close = _open_out(args.out)
    try:
        for t in iter_tableaux(args.n, cap=args.cap):
            dest.write(serialize(t) + "\n")
            count += 1
    finally:
        if close:
            dest.close()
    msg = f"{count}\n"
    (sys.stdout if close else sys.stderr).write(msg)
    return 0


def cmd_stats(args, out) -> int:
    records = []
    totals = dict.fromkeys(STAT_FIELDS, 0)
    count = 0
    for lineno, line in enumerate(_read_lines(args.input), start=1):
        try:
            t = parse(line)
        except ParseError as exc:
            raise ParseError(str(exc), exc.position, lineno) from None
        except TableauError as exc:
            raise ParseError(str(exc), 0, lineno) from None
        rec = stats(t)
        row = {"tableau": serialize(t), "n": t.n, **rec.as_dict()}
        row["g_trace"] = " ".join("-" if g is None else str(g) for g in rec.g_trace)
        records.append(row)
        for f in STAT_FIELDS:
            totals[f] += getattr(rec, f)
        count += 1
    fields = ["tableau", "n", *STAT_FIELDS, "g_trace"]
    if count:
        footer = {"tableau": "mean", "n": "", "g_trace": ""}
        footer.update({f: frac(Fraction(totals[f], count)) for f in STAT_FIELDS})
        records.append(footer)
    emit(records, args.format, out, fields)
    return 0


def cmd_verify(args, out) -> int:
    which = VERIFY_CHOICES if not args.which else [w.strip() for w in args.which.split(",") if w.strip()]
    rows = verify_rows(args.n_max, which, cap=args.cap, workers=args.threads)
    emit([r.as_record() for r in rows], args.format, out,
         ["n", "statistic", "k", "closed", "brute", "match", "decimal", "note"])
    return 0 if all(r.match for r in rows) else 1


def cmd_sample(args, out) -> int:
    streams = max(args.threads, 1)
    per = [args.samples // streams + (i < args.samples % streams) for i in range(streams)]
    reports = [
        estimate(args.n, args.stat, per[i], args.seed, stream=i, method=args.method)
        for i in range(streams)
    ]
    rec = pooled(reports).as_record()
    rec["method"] = args.method
    if args.format == "json":
        json.dump(rec, out, indent=2)
        out.write("\n")
    else:
        emit([rec], "csv", out)
    return 0


def cmd_pasep_map(args, out) -> int:
    state = border_to_state(args.border.strip())
    out.write((state.bits if args.bits else str(state)) + "\n")
    return 0


def _params(args) -> PasepParams:
    return PasepParams(args.alpha, args.beta, args.q)


def cmd_pasep_stationary(args, out) -> int:
    m = args.sites
    pi = stationary(m, _params(args))
    marg = site_marginals(m, pi)
    if args.format == "json":
        payload = {
            "sites": m,
            "alpha": args.alpha,
            "beta": args.beta,
            "q": args.q,
            "stationary": {format(i, f"0{m}b"): float(p) for i, p in enumerate(pi)},
            "occupancy": [float(x) for x in marg],
        }
        json.dump(payload, out, indent=2)
        out.write("\n")
    else:
        emit([{"site": i + 1, "occupancy": repr(float(x))} for i, x in enumerate(marg)], "csv", out)
    return 0


def cmd_pasep_simulate(args, out) -> int:
    m = args.sites
    res = simulate(m, _params(args), args.horizon, args.seed)
    if args.format == "json":
        payload = {
            "sites": m,
            "horizon": args.horizon,
            "seed": args.seed,
            "events": res.events,
            "occupancy": [float(x) for x in res.occupancy],
            "std_error": [float(x) for x in res.std_error],
            "visits": {format(i, f"0{m}b"): int(v) for i, v in enumerate(res.visits)},
        }
        json.dump(payload, out, indent=2)
        out.write("\n")
    else:
        emit(
            [
                {"site": i + 1, "occupancy": repr(float(x)), "std_error": repr(float(e))}
                for i, (x, e) in enumerate(zip(res.occupancy, res.std_error))
            ],
            "csv",
            out,
        )
    return 0


def cmd_formulas(args, out) -> int:
    table = expect.FormulaTable.build(args.n)
    emit(table.records(), args.format, out,
         ["n", "statistic", "k", "numerator", "denominator", "decimal"])
    return 0


# -- parser -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, top: bool) -> None:
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    p.add_argument("--out", default=default(None), help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=default(0))
    p.add_argument("--threads", type=int, default=default(1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="btableau", description=__doc__.splitlines()[0])
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        _add_common(p, top=False)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check tableaux (canonical lines or bracket grids)")
    p.add_argument("input", nargs="?", default="-")

    p = add("enumerate", cmd_enumerate, "write every tableau of size n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = add("stats", cmd_stats, "per-tableau statistics with exact means")
    p.add_argument("input", nargs="?", default="-")

    p = add("verify", cmd_verify, "closed forms against exhaustive enumeration")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--which", default="", help="comma list from: " + ",".join(VERIFY_CHOICES))
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = add("sample", cmd_sample, "Monte Carlo estimate of a statistic")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--stat", choices=STAT_FIELDS, default="rows")
    p.add_argument("--method", choices=METHODS, default="weighted")

    p = add("formulas", cmd_formulas, "closed-form table for one n")
    p.add_argument("--n", type=int, required=True)

    p = add("pasep-map", cmd_pasep_map, "border string to doubled PASEP state")
    p.add_argument("border")
    p.add_argument("--bits", action="store_true", help="print 0/1 instead of symbols")

    for name, func, text in (
        ("pasep-stationary", cmd_pasep_stationary, "solve the stationary law and site densities"),
        ("pasep-simulate", cmd_pasep_simulate, "simulate and report time-averaged densities"),
    ):
        p = add(name, func, text)
        p.add_argument("--sites", type=int, required=True)
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--beta", type=float, default=1.0)
        p.add_argument("--q", type=float, default=0.0)
        if name == "pasep-simulate":
            p.add_argument("--horizon", type=float, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # enumerate streams records to --out itself
    if args.command == "enumerate":
        dest, close = sys.stdout, False
    else:
        dest, close = _open_out(args.out)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except ResourceCap as exc:
        print(f"btableau: {exc}", file=sys.stderr)
        return 3
    except (TableauError, ValueError, OSError) as exc:
        print(f"btableau: {exc}", file=sys.stderr)
        return 2
    dest.write(buf.getvalue())
    if close:
        dest.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
