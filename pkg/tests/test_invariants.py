import pytest

from weylchow import invariants as inv_mod
from weylchow.groups import GroupAction, build_gl, build_weyl_f4, build_weyl_so, build_weyl_spin, mat_identity
from weylchow.invariants import (
    algebra_generators,
    basis_polynomials,
    invariant_basis,
    poincare_series,
    subring_membership,
)
from weylchow.poly import F2, F3, QQ, ZZ, Polynomial, signature, z_local
from weylchow.series import expand_series


def test_s2pm_degree4_basis():
    action = build_weyl_so(2)
    basis = invariant_basis(action, 4, ZZ)
    polys = basis_polynomials(basis, action.signature(ZZ))
    assert len(polys) == 1
    assert str(polys[0]) == "t1^2 + t2^2"


def test_gl2_degree3_is_dickson_d0():
    action = build_gl(2)
    basis = invariant_basis(action, 3, F2)
    polys = basis_polynomials(basis, action.signature(F2))
    assert [str(p) for p in polys] == ["x1^2*x2 + x1*x2^2"]


def test_degree_zero_rank_one():
    assert invariant_basis(build_weyl_so(2), 0, ZZ).rank == 1


def test_trivial_action_even_ranks():
    action = GroupAction("trivial", ("t1",), 2, (mat_identity(1),))
    ranks = poincare_series(action, 8, ZZ)
    assert ranks == {0: 1, 2: 1, 4: 1, 6: 1, 8: 1}


def test_s3pm_pontryagin_series():
    want = expand_series("1/((1-t^4)(1-t^8)(1-t^12))", 24)
    got = poincare_series(build_weyl_so(3), 24, ZZ)
    assert all(got[d] == want[d] for d in range(0, 25, 2))


def test_spin3_series_matches_so3():
    want = expand_series("1/((1-t^4)(1-t^8)(1-t^12))", 20)
    got = poincare_series(build_weyl_spin(3), 20, z_local(2))
    assert all(got[d] == want[d] for d in range(0, 21, 2))


def test_gl_series_in_x_degree():
    for h in (2, 3):
        denom = "".join("(1-t^%d)" % (2**h - 2**i) for i in range(h))
        want = expand_series("1/(%s)" % denom, 14)
        got = poincare_series(build_gl(h), 14, F2)
        assert all(got[d] == want[d] for d in range(15))


def test_orbit_and_plain_paths_agree(monkeypatch):
    action = build_weyl_so(3)
    plain = {}
    monkeypatch.setattr(inv_mod, "_ORBIT_PATH_THRESHOLD", 10**9)
    for d in (4, 8, 12):
        plain[d] = invariant_basis(action, d, ZZ).vectors
    monkeypatch.setattr(inv_mod, "_ORBIT_PATH_THRESHOLD", 0)
    for d in (4, 8, 12):
        fast = invariant_basis(action, d, ZZ).vectors
        assert fast == plain[d]


def test_f4_rational_ranks_low_degrees():
    f4 = build_weyl_f4()
    got = [invariant_basis(f4, d, QQ).rank for d in (4, 8, 12)]
    want_series = expand_series("1/((1-t^4)(1-t^12)(1-t^16)(1-t^24))", 12)
    assert got == [want_series[4], want_series[8], want_series[12]] == [1, 1, 2]


def test_subring_membership_square():
    from weylchow.dickson import build_dickson

    ctx = build_dickson(2)
    inside, combo = subring_membership(ctx.d[0] * ctx.d[0], [ctx.d[0], ctx.d[1]])
    assert inside and combo == {(2, 0): 1}


def test_subring_membership_frobenius():
    from weylchow.dickson import build_dickson
    from weylchow.poly import parse

    ctx = build_dickson(2)
    f = parse("x1^4 + x1^2*x2^2 + x2^4", ctx.sig)
    inside, combo = subring_membership(f, [ctx.d[0], ctx.d[1]])
    assert inside
    assert combo == {(0, 2): 1}  # d_1^2 by the Frobenius


def test_subring_membership_outside():
    from weylchow.dickson import build_dickson
    from weylchow.poly import Polynomial

    ctx = build_dickson(2)
    x1 = Polynomial.gen(ctx.sig, "x1")
    inside, combo = subring_membership(x1, [ctx.d[0], ctx.d[1]])
    assert not inside and combo is None


def test_algebra_generators_spin3():
    gens = algebra_generators(build_weyl_spin(3), 16, z_local(2))
    assert [d for d, _ in gens] == [4, 8, 12]


def test_algebra_generators_so2():
    gens = algebra_generators(build_weyl_so(2), 12, ZZ)
    assert [d for d, _ in gens] == [4, 8]  # p_1 and p_2
