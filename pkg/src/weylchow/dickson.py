"""Dickson classes from the product of linear forms, and identity checks.

Over F_2[z, x_1..x_h] the product of the 2^h linear forms z + x, x ranging
over the span of the x_i, expands to

    e = z^(2^h) + d_{h-1} z^(2^(h-1)) + ... + d_0 z

with the Dickson classes d_i appearing as the coefficients.  The checks
confirm, exactly and clause by clause, how the closed-form Milnor
primitives act on the d_i and on e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional

from .poly import F2, AlgebraSignature, Generator, Polynomial
from .steenrod import milnor_q_closed


class DicksonError(Exception):
    pass


MAX_RANK = 4  # product of 16 linear forms in 5 variables is the largest case


@dataclass
class DicksonContext:
    h: int
    sig: AlgebraSignature
    e: Polynomial
    d: List[Polynomial]  # d[0] .. d[h-1]

    @property
    def z(self) -> Polynomial:
        return Polynomial.gen(self.sig, "z")


def build_dickson(h: int) -> DicksonContext:
    """Expand the product of linear forms and extract the Dickson classes.

    A z-power outside {2^i} in the expansion would falsify the classical
    identity and is treated as an internal error.
    """
    if not 1 <= h <= MAX_RANK:
        raise DicksonError("h must be between 1 and %d" % MAX_RANK)
    gens = [Generator("z", 1)] + [Generator("x%d" % (i + 1), 1) for i in range(h)]
    sig = AlgebraSignature(gens, F2)
    z = Polynomial.gen(sig, "z")
    e = Polynomial.one(sig)
    for coeffs in product((0, 1), repeat=h):
        form = z
        for i, c in enumerate(coeffs):
            if c:
                form = form + Polynomial.gen(sig, "x%d" % (i + 1))
        e = e * form
    # Slice by z-exponent.
    allowed = {2**i: i for i in range(h)}
    d: List[Optional[Polynomial]] = [None] * h
    for mono, coeff in e.terms.items():
        z_exp = mono[0]
        if z_exp == 2**h:
            continue
        if z_exp not in allowed:
            raise DicksonError("unexpected z-exponent %d in the expansion" % z_exp)
        i = allowed[z_exp]
        rest = (0,) + mono[1:]
        current = d[i] if d[i] is not None else Polynomial.zero(sig)
        d[i] = current + Polynomial.from_mono(sig, rest, coeff)
    for i in range(h):
        if d[i] is None:
            raise DicksonError("missing Dickson class d_%d" % i)
    return DicksonContext(h, sig, e, [di for di in d])  # type: ignore[misc]


# ---------------------------------------------------------------------------
# Identity reports
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    label: str
    holds: bool
    detail: str = ""


@dataclass
class DicksonReport:
    h: int
    checks: List[IdentityCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)

    def add(self, label: str, holds: bool, detail: str = ""):
        self.checks.append(IdentityCheck(label, holds, detail))


def verify_milnor_on_d_classes(ctx: DicksonContext) -> DicksonReport:
    """Check the Milnor action on the Dickson classes.

    Clauses: Q_{h-1} d_i = d_0 d_i for all i; Q_{j-1} d_j = d_0 for j >= 1;
    and Q_i d_j = 0 in the remaining range.  The vanishing clause is checked
    under the reading i < h-1 (with i != j-1); the report also records that
    extending the range to all i < 2h (spin-rank reading) fails at i = h-1,
    where the first clause takes over.
    """
    report = DicksonReport(ctx.h)
    h = ctx.h
    d = ctx.d
    for i in range(h):
        lhs = milnor_q_closed(h - 1, d[i])
        rhs = d[0] * d[i]
        report.add("Q_%d(d_%d) == d_0*d_%d" % (h - 1, i, i), lhs == rhs)
    for j in range(1, h):
        lhs = milnor_q_closed(j - 1, d[j])
        report.add("Q_%d(d_%d) == d_0" % (j - 1, j), lhs == d[0])
    for i in range(h - 1):
        for j in range(h):
            if i == j - 1:
                continue
            lhs = milnor_q_closed(i, d[j])
            report.add("Q_%d(d_%d) == 0" % (i, j), lhs.is_zero())
    # Probe the wider reading of the vanishing range (i up to the spin rank).
    wide_fail = None
    for j in range(h):
        if h - 1 == j - 1:
            continue
        if not milnor_q_closed(h - 1, d[j]).is_zero():
            wide_fail = (h - 1, j)
            break
    if wide_fail:
        report.notes.append(
            "vanishing clause holds for i < h-1; extending the range past h-1 fails first "
            "at Q_%d(d_%d), where the clause Q_%d(d_i) = d_0*d_i takes over"
            % (wide_fail[0], wide_fail[1], h - 1)
        )
    return report


def verify_milnor_on_top_class(ctx: DicksonContext) -> DicksonReport:
    """Check Q_{h-1} e = d_0 e and Q_k e = 0 for 0 <= k <= h-2."""
    report = DicksonReport(ctx.h)
    h = ctx.h
    lhs = milnor_q_closed(h - 1, ctx.e)
    report.add("Q_%d(e) == d_0*e" % (h - 1), lhs == ctx.d[0] * ctx.e)
    for k in range(h - 1):
        report.add("Q_%d(e) == 0" % k, milnor_q_closed(k, ctx.e).is_zero())
    return report


def verify_all(ctx: DicksonContext) -> DicksonReport:
    qd = verify_milnor_on_d_classes(ctx)
    qe = verify_milnor_on_top_class(ctx)
    merged = DicksonReport(ctx.h, qd.checks + qe.checks, qd.notes + qe.notes)
    return merged
