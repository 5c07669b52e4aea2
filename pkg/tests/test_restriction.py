import pytest

from weylchow.poly import F2, Polynomial, signature
from weylchow.restriction import (
    RingPresentation,
    build_spin7_restriction,
    feshbach_nilpotence,
    omega_detection_audit,
    res_kernel,
    rho_image_audit,
    surjectivity_criterion,
)
from weylchow.series import expand_series


def test_invariant_ring_generators(spin7_model):
    assert spin7_model.w4.degree() == 4
    assert spin7_model.w8.degree() == 8
    assert spin7_model.c6.degree() == 12
    want = expand_series("1/((1-t^4)(1-t^8)(1-t^12))", 28)
    assert all(spin7_model.invariants.rank(d) == want[d] for d in range(0, 29, 2))


def test_image_audit_divisibility_pattern(spin7_model):
    audit = rho_image_audit(spin7_model, spin7_model.ch_presentation)
    assert audit.max_scale_power == 1
    assert audit.image_rank_by_degree == audit.invariant_rank_by_degree
    by_degree = {}
    for row in audit.rows:
        by_degree.setdefault(row.degree, []).append(row)
    # degree 4: the single invariant (w_4) needs one factor of 2
    assert [r.verdict for r in by_degree[4]] == ["inside-after-scaling p^1"]
    # degree 8: one inside (w_4^2 = c_4), one 2-divided (w_8)
    assert sorted(r.verdict for r in by_degree[8]) == [
        "inside",
        "inside-after-scaling p^1",
    ]
    assert all(r.verdict == "inside" for r in by_degree[0])


def test_doctored_presentation_flagged(spin7_model):
    # dropping the 2 w_8 module generator starves degree 8
    pres = spin7_model.ch_presentation
    doctored = RingPresentation(
        "doctored",
        pres.subring_gens,
        [g for g in pres.module_gens if g[0] != "2w_8"],
    )
    audit = rho_image_audit(spin7_model, doctored, max_degree=12)
    assert audit.image_rank_by_degree[8] == 1
    assert audit.invariant_rank_by_degree[8] == 2


def test_feshbach_toy_exterior():
    sig = signature([("a", 1, True)], F2)
    a = Polynomial.gen(sig, "a")
    pres = RingPresentation("Z/2[a]/(a^2)", [], [("1", Polynomial.one(sig)), ("a", a)])
    rows = feshbach_nilpotence(pres, [("a", a)])
    assert rows[0].nilpotent and rows[0].exponent == 2


def test_feshbach_spin7(spin7_model):
    cands = [
        ("c_2'", spin7_model.w4.scale(2)),
        ("c_4", spin7_model.w4 * spin7_model.w4),
    ]
    rows = feshbach_nilpotence(spin7_model.ch_presentation, cands)
    assert rows[0].nilpotent and rows[0].exponent == 2
    assert not rows[1].nilpotent


def test_feshbach_consistency_property(spin7_model):
    """A nonzero nilpotent in the mod-2 presentation forces some invariant
    outside the image (the surjectivity obstruction)."""
    rows = feshbach_nilpotence(
        spin7_model.ch_presentation, [("c_2'", spin7_model.w4.scale(2))]
    )
    assert rows[0].nilpotent
    audit = rho_image_audit(spin7_model, spin7_model.ch_presentation)
    assert audit.outside_count() > 0


def test_surjectivity_criterion_sides(spin7_model):
    crit_h = surjectivity_criterion(spin7_model, spin7_model.h_presentation)
    assert crit_h.injective
    crit_ch = surjectivity_criterion(spin7_model, spin7_model.ch_presentation)
    assert not crit_ch.injective and crit_ch.first_failure == 4


def test_res_kernel_griffiths_pattern(spin7_model):
    data = build_spin7_restriction(spin7_model)
    rows = res_kernel(data)
    want = expand_series("t^6/((1-t^8)(1-t^12)(1-t^16))", 28)
    for row in rows:
        assert row.rank == want[row.degree], row.degree
    six = next(r for r in rows if r.degree == 6)
    assert six.labels == ["xi_3"]
    fourteen = next(r for r in rows if r.degree == 14)
    # c_7 itself restricts nontrivially; the kernel there is xi_3 * c_4
    assert fourteen.rank == 1
    assert all("c_7" not in lbl for lbl in fourteen.labels)


def test_res_kernel_rank_nullity(spin7_model):
    data = build_spin7_restriction(spin7_model)
    rows = res_kernel(data)
    for row in rows:
        entries = data.classes_by_degree.get(row.degree, [])
        tors = [c for c in entries if c.torsion]
        # mod-2 rank-nullity on the torsion side of the stacked system
        from weylchow import linalg
        from weylchow.poly import degree_slice

        a_monos = degree_slice(data.a_sig, row.degree)
        mat = [[int(c.a_image.terms.get(m, 0)) % 2 for c in tors] for m in a_monos]
        rank = linalg.rank_fp(mat, 2) if tors and a_monos else 0
        assert rank + row.rank == len(tors)


def test_combined_restriction_injective(spin7_model):
    data = build_spin7_restriction(spin7_model)
    rows = res_kernel(data, include_omega=True)
    assert all(r.rank == 0 for r in rows)


def test_omega_detection(spin7_model, spin7_ahss):
    rep = omega_detection_audit(spin7_model, spin7_ahss)
    assert rep.permanent_2e and rep.permanent_v1e and rep.e_dies
    assert rep.towers_nonzero and rep.injective_mod_2
    assert rep.passed


def test_image_module_closed_under_subring(spin7_model):
    """Multiplying module generators by subring generators stays inside."""
    from weylchow import linalg
    from weylchow.linalg import SubmoduleBasis, membership

    pres = spin7_model.ch_presentation
    for _, gen_m in pres.module_gens:
        for _, gen_s in pres.subring_gens:
            product = gen_m * gen_s
            degree = product.degree()
            if degree > spin7_model.window:
                continue
            inv = spin7_model.invariants.by_degree[degree]
            span_cols = [
                [int(x) for x in _coords(poly, inv.ambient)]
                for _, poly in pres.basis_in_degree(degree)
            ]
            span = SubmoduleBasis(
                spin7_model.domain, inv.ambient, linalg.hnf_basis(span_cols)
            )
            vec = [int(x) for x in _coords(product, inv.ambient)]
            assert membership(vec, span).inside


def _coords(poly, monos):
    index = {m: i for i, m in enumerate(monos)}
    vec = [0] * len(monos)
    for m, c in poly.terms.items():
        vec[index[m]] = c
    return vec
