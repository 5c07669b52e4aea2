"""Command-line surface: mechanical verification runs with readable reports.

Commands:

    dickson     --h H [--verify all|qd|qe]
    invariants  --group so:K|spin:K|gl:H|f4|file:PATH
                --domain f2|f3|q|zlocal:P --max-degree N [--series EXPR]
    ahss        --chart spin7|f4|toy-*|PATH [--window W] --vmax M
                [--max-total N] [--collapse]
    audit       --chart spin7 [--all] [--max-degree N]
    series      --expr EXPR --order N

Global flags: --out PATH (default stdout), --format table|records.  The
records format is one tab-separated line per fact: check-id, degree,
verdict, witness.  Exit status is 0 exactly when every requested
verification passes; outputs are deterministic.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Tuple

from . import ahss as ahss_mod
from . import builtin as builtin_mod
from . import dickson as dickson_mod
from . import restriction as restriction_mod
from .chart import load_chart
from .groups import GroupError, build_gl, build_weyl_f4, build_weyl_so, build_weyl_spin, load_action
from .invariants import poincare_series
from .poly import F2, F3, QQ, Domain, z_local
from .series import expand_series


class Report:
    """Accumulates table lines and record tuples plus a pass/fail flag."""

    def __init__(self):
        self.table: List[str] = []
        self.records: List[Tuple[str, str, str, str]] = []
        self.failures: List[str] = []

    def line(self, text: str = ""):
        self.table.append(text)

    def fact(self, check: str, degree, verdict: str, witness: str = "", ok: bool = True):
        self.records.append((check, str(degree), verdict, witness))
        if not ok:
            self.failures.append("%s @ %s: %s" % (check, degree, verdict))

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self, fmt: str) -> str:
        if fmt == "records":
            return "\n".join("\t".join(r) for r in self.records) + "\n"
        return "\n".join(self.table) + "\n"


def _parse_domain(text: str) -> Domain:
    text = text.lower()
    if text == "f2":
        return F2
    if text == "f3":
        return F3
    if text == "f5":
        from .poly import F5

        return F5
    if text == "q":
        return QQ
    if text == "z":
        from .poly import ZZ

        return ZZ
    if text.startswith("zlocal:"):
        return z_local(int(text.split(":", 1)[1]))
    raise ValueError("unknown domain %r" % text)


def _parse_group(text: str):
    if text == "f4":
        return build_weyl_f4()
    if text.startswith("so:"):
        return build_weyl_so(int(text.split(":", 1)[1]))
    if text.startswith("spin:"):
        return build_weyl_spin(int(text.split(":", 1)[1]))
    if text.startswith("gl:"):
        return build_gl(int(text.split(":", 1)[1]))
    if text.startswith("file:"):
        return load_action(text.split(":", 1)[1])
    raise GroupError("unknown group %r" % text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_dickson(args) -> Report:
    rep = Report()
    ctx = dickson_mod.build_dickson(args.h)
    if args.verify == "qd":
        result = dickson_mod.verify_milnor_on_d_classes(ctx)
    elif args.verify == "qe":
        result = dickson_mod.verify_milnor_on_top_class(ctx)
    else:
        result = dickson_mod.verify_all(ctx)
    rep.line("Dickson identities at h = %d" % args.h)
    for check in result.checks:
        verdict = "pass" if check.holds else "FAIL"
        rep.line("  %-28s %s" % (check.label, verdict))
        rep.fact("dickson.h%d" % args.h, 0, verdict, check.label, ok=check.holds)
    for note in result.notes:
        rep.line("  note: %s" % note)
    rep.line("result: %s" % ("pass" if result.passed else "FAIL"))
    return rep


def cmd_invariants(args) -> Report:
    rep = Report()
    action = _parse_group(args.group)
    domain = _parse_domain(args.domain)
    ranks = poincare_series(action, args.max_degree, domain)
    rep.line("Invariant ranks for %s over %s up to degree %d" % (action.name, domain, args.max_degree))
    rep.line("  degree  rank")
    for d, r in sorted(ranks.items()):
        rep.line("  %6d  %4d" % (d, r))
        rep.fact("invariants.%s.%s" % (args.group, args.domain), d, str(r))
    if args.series:
        want = expand_series(args.series, args.max_degree)
        bad = [d for d in ranks if ranks[d] != want[d]]
        for d in bad:
            rep.fact(
                "invariants.series", d,
                "mismatch: got %d want %d" % (ranks[d], want[d]), args.series, ok=False,
            )
        verdict = "match" if not bad else "MISMATCH at %s" % bad
        rep.line("series %s: %s" % (args.series, verdict))
        rep.fact("invariants.series", "all", "match" if not bad else "mismatch",
                 args.series, ok=not bad)
    return rep


def _load_chart_arg(name: str, window: Optional[int]):
    import os

    if os.path.exists(name):
        return load_chart(name), None
    bc = builtin_mod.get_builtin(name, window)
    return bc.chart, bc


def cmd_ahss(args) -> Report:
    rep = Report()
    chart, bc = _load_chart_arg(args.chart, args.window)
    result = ahss_mod.run_ahss(chart, args.vmax, args.max_total)
    rep.line(
        "AHss for chart %s (p=%d, window=%d, v_max=%d), totals <= %d"
        % (chart.name, chart.p, chart.window, args.vmax, result.max_total)
    )
    summary = ahss_mod.einfinity_summary(result)
    for total in sorted(summary):
        parts = []
        for vlbl, st in summary[total]:
            bits = []
            if st.free_rank:
                bits.append("free^%d" % st.free_rank)
            if st.torsion_rank:
                bits.append("(Z/%d)^%d" % (chart.p, st.torsion_rank))
            parts.append("%s: %s" % (vlbl, "+".join(bits)))
        rep.line("  E_inf total %2d: %s" % (total, "; ".join(parts)))
    if args.collapse:
        col = ahss_mod.collapse_to_chow(result)
        rep.line("collapse (free rank, %d-torsion rank) by total degree:" % chart.p)
        for n in range(0, result.max_total + 1):
            free, tors = col.per_degree.get(n, (0, 0))
            if free or tors:
                rep.line("  total %2d: free %d, torsion %d   [%s]" % (
                    n, free, tors, "; ".join(col.details.get(n, []))))
            rep.fact("ahss.collapse.%s" % chart.name, n, "%d,%d" % (free, tors))
        if bc is not None and "collapse_free" in bc.expected_series:
            free_want = expand_series(bc.expected_series["collapse_free"], result.max_total)
            tors_want = [0] * (result.max_total + 1)
            for part in bc.expected_series.get("collapse_torsion", "").split(";"):
                part = part.strip()
                if part:
                    tw = expand_series(part, result.max_total)
                    tors_want = [a + b for a, b in zip(tors_want, tw)]
            bad = [
                n
                for n in range(result.max_total + 1)
                if col.per_degree.get(n, (0, 0)) != (free_want[n], tors_want[n])
            ]
            verdict = "match" if not bad else "MISMATCH at %s" % bad
            rep.line("expected collapse series: %s" % verdict)
            rep.fact("ahss.collapse.expected", "all", verdict, ok=not bad)
    return rep


def cmd_audit(args) -> Report:
    rep = Report()
    if args.chart != "spin7":
        raise ValueError("audit currently covers the spin7 chart")
    max_degree = args.max_degree
    model = restriction_mod.build_spin7_model(window=max_degree)
    chart_window = max_degree + 16
    bc = builtin_mod.get_builtin("spin7", chart_window)
    ahss_result = ahss_mod.run_ahss(bc.chart, 3, max_degree)

    rep.line("Restriction audit for Spin(7), p = 2, degrees <= %d" % max_degree)

    audit = restriction_mod.rho_image_audit(model, model.ch_presentation)
    ok_scale = audit.max_scale_power <= 1
    ok_rank = audit.image_rank_by_degree == audit.invariant_rank_by_degree
    rep.line("image membership: every invariant is inside after scaling by at most 2^1: %s"
             % ("pass" if ok_scale else "FAIL"))
    rep.line("image spans have full rational rank in every degree: %s"
             % ("pass" if ok_rank else "FAIL"))
    for row in audit.rows:
        rep.fact("audit.image", row.degree, row.verdict, row.label,
                 ok=(row.verdict == "inside" or row.scale_power == 1))
    rep.fact("audit.image.rank", "all", "full" if ok_rank else "deficient", ok=ok_rank)

    cands = [
        ("c_2'", model.w4.scale(2)),
        ("c_4'", model.w8.scale(2)),
        ("c_4", model.w4 * model.w4),
    ]
    nil = restriction_mod.feshbach_nilpotence(model.ch_presentation, cands)
    for row in nil:
        expect_nil = row.label.endswith("'")
        ok = row.nilpotent == expect_nil and (row.exponent in (None, 2))
        rep.line("nilpotence of %-5s: %s  (%s)" % (
            row.label,
            "n = %d" % row.exponent if row.nilpotent else "none found",
            "pass" if ok else "FAIL"))
        rep.fact("audit.feshbach", row.label, str(row.exponent), ok=ok)

    crit_h = restriction_mod.surjectivity_criterion(model, model.h_presentation)
    crit_ch = restriction_mod.surjectivity_criterion(model, model.ch_presentation)
    ok_h = crit_h.injective
    ok_ch = (not crit_ch.injective) and crit_ch.first_failure == 4
    rep.line("injectivity criterion, cohomology side: %s" % ("pass" if ok_h else "FAIL"))
    rep.line("injectivity criterion, Chow side fails first at degree %s: %s"
             % (crit_ch.first_failure, "pass" if ok_ch else "FAIL"))
    rep.fact("audit.criterion.h", "all", "injective" if ok_h else "fails", ok=ok_h)
    rep.fact("audit.criterion.ch", crit_ch.first_failure or -1, "first failure", ok=ok_ch)

    data = restriction_mod.build_spin7_restriction(model)
    kernel_rows = restriction_mod.res_kernel(data, max_degree)
    want = expand_series("t^6/((1-t^8)(1-t^12)(1-t^16))", max_degree)
    ok_kernel = all(r.rank == want[r.degree] for r in kernel_rows)
    rep.line("restriction kernel matches the degree-6 torsion tower: %s"
             % ("pass" if ok_kernel else "FAIL"))
    for r in kernel_rows:
        rep.fact("audit.kernel", r.degree, str(r.rank), "; ".join(r.labels),
                 ok=(r.rank == want[r.degree]))
    combined = restriction_mod.res_kernel(data, max_degree, include_omega=True)
    ok_combined = all(r.rank == 0 for r in combined)
    rep.line("combined restriction (with the cobordism lift) is injective: %s"
             % ("pass" if ok_combined else "FAIL"))
    rep.fact("audit.kernel.combined", "all", "zero" if ok_combined else "nonzero",
             ok=ok_combined)

    det = restriction_mod.omega_detection_audit(model, ahss_result)
    rep.line("detection: 2e permanent %s, v_1 e permanent %s, e dies %s" % (
        det.permanent_2e, det.permanent_v1e, det.e_dies))
    rep.line("detection towers nonzero and injective mod 2: %s"
             % ("pass" if det.towers_nonzero and det.injective_mod_2 else "FAIL"))
    rep.fact("audit.detection", "all", "pass" if det.passed else "FAIL", ok=det.passed)

    rep.line("overall: %s" % ("pass" if rep.passed else "FAIL"))
    return rep


def cmd_series(args) -> Report:
    rep = Report()
    coeffs = expand_series(args.expr, args.order)
    rep.line("%s to order %d:" % (args.expr, args.order))
    rep.line("  " + " ".join(str(c) for c in coeffs))
    for n, c in enumerate(coeffs):
        rep.fact("series", n, str(c), args.expr)
    return rep


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylchow",
        description="exact verification of Weyl-invariant, Dickson, and BP-chart computations",
    )
    parser.add_argument("--out", help="write the report to this path")
    parser.add_argument("--format", choices=("table", "records"), default="table")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dickson", help="verify the Milnor identities on Dickson classes")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--verify", choices=("all", "qd", "qe"), default="all")
    p.set_defaults(func=cmd_dickson)

    p = sub.add_parser("invariants", help="per-degree invariant ranks of a Weyl-type action")
    p.add_argument("--group", required=True, help="so:K | spin:K | gl:H | f4 | file:PATH")
    p.add_argument("--domain", required=True, help="f2 | f3 | f5 | q | z | zlocal:P")
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--series", help="compare against this generating function")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("ahss", help="run the spectral sequence for a chart")
    p.add_argument("--chart", required=True, help="builtin name or file path")
    p.add_argument("--window", type=int, help="override the chart window (builtins)")
    p.add_argument("--vmax", type=int, required=True)
    p.add_argument("--max-total", type=int, help="report totals up to this degree")
    p.add_argument("--collapse", action="store_true", help="also collapse to Z_(p)")
    p.set_defaults(func=cmd_ahss)

    p = sub.add_parser("audit", help="restriction-map audits for a builtin chart")
    p.add_argument("--chart", default="spin7")
    p.add_argument("--all", action="store_true", help="run every audit (default)")
    p.add_argument("--max-degree", type=int, default=28)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("series", help="expand a rational generating function")
    p.add_argument("--expr", required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_series)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report: Report = args.func(args)
    except Exception as exc:  # surface one-line errors with a nonzero status
        print("error: %s" % exc, file=sys.stderr)
        return 2
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.passed:
        for failure in report.failures:
            print("failed: %s" % failure, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
