import random

import pytest

from weylchow.poly import (
    F2,
    F3,
    QQ,
    ZZ,
    Polynomial,
    PolyError,
    degree_slice,
    parse,
    signature,
    z_local,
)


def geners(sig, *names):
    return [Polynomial.gen(sig, n) for n in names]


def test_char2_addition_cancels():
    sig = signature([("x1", 1), ("x2", 1)], F2)
    x1, x2 = geners(sig, "x1", "x2")
    assert ((x1 + x2) + (x1 + x2)).is_zero()


def test_add_identity_and_disjoint_supports():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    t1, t2 = geners(sig, "t1", "t2")
    p1 = t1 * t1
    assert p1 + Polynomial.zero(sig) == p1
    assert str(t1 * t1 + t2 * t2) == "t1^2 + t2^2"


def test_binomial_over_z():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    t1, t2 = geners(sig, "t1", "t2")
    assert str((t1 + t2) * (t1 + t2)) == "t1^2 + 2*t1*t2 + t2^2"


def test_exterior_square_vanishes():
    sig = signature([("x9", 9, True), ("x26", 26)], F3)
    x9 = Polynomial.gen(sig, "x9")
    assert (x9 * x9).is_zero()


def test_koszul_sign_odd_generators():
    sig = signature([("a", 9, True), ("b", 21, True)], F3)
    a, b = geners(sig, "a", "b")
    assert a * b == (b * a).scale(-1)


def test_distribution_char2():
    sig = signature([("z", 1), ("x1", 1)], F2)
    z, x1 = geners(sig, "z", "x1")
    assert (z + x1) * z == z * z + x1 * z


def test_ring_axioms_random():
    rng = random.Random(7)
    sig = signature([("a", 2), ("b", 2), ("c", 4)], ZZ)

    def rand_poly():
        terms = {}
        for _ in range(rng.randint(1, 4)):
            mono = (rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 1))
            terms[mono] = rng.randint(-3, 3)
        return Polynomial(sig, terms)

    for _ in range(25):
        f, g, h = rand_poly(), rand_poly(), rand_poly()
        assert (f * g) * h == f * (g * h)
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h


def test_substitute_symmetry():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    t1, t2 = geners(sig, "t1", "t2")
    f = t1 * t1 + t2 * t2
    assert f.substitute({"t1": t2, "t2": t1}) == f


def test_substitute_sign_action():
    sig = signature([("t1", 2)], ZZ)
    t1 = Polynomial.gen(sig, "t1")
    assert t1.substitute({"t1": t1.scale(-1)}) == t1.scale(-1)


def test_substitute_swap_fixes_dickson_d0():
    sig = signature([("x1", 1), ("x2", 1)], F2)
    x1, x2 = geners(sig, "x1", "x2")
    d0 = x1 * x1 * x2 + x1 * x2 * x2
    assert d0.substitute({"x1": x2, "x2": x1}) == d0


def test_substitute_is_ring_homomorphism_random():
    rng = random.Random(13)
    sig = signature([("x1", 1), ("x2", 1), ("x3", 1)], F2)
    xs = geners(sig, "x1", "x2", "x3")
    images = {"x1": xs[1] + xs[2], "x2": xs[0], "x3": xs[0] + xs[1]}

    def rand_poly():
        terms = {}
        for _ in range(rng.randint(1, 5)):
            mono = tuple(rng.randint(0, 2) for _ in range(3))
            terms[mono] = 1
        return Polynomial(sig, terms)

    for _ in range(20):
        f, g = rand_poly(), rand_poly()
        lhs = (f * g).substitute(images)
        rhs = f.substitute(images) * g.substitute(images)
        assert lhs == rhs


def test_substitute_degree_mismatch_rejected():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    t1, t2 = geners(sig, "t1", "t2")
    with pytest.raises(PolyError):
        t1.substitute({"t1": t2 * t2})


def test_substitute_missing_image_rejected():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    t1, t2 = geners(sig, "t1", "t2")
    with pytest.raises(PolyError):
        (t1 * t2).substitute({"t1": t1})


def test_degree_slice_counts():
    sig = signature([("t1", 2), ("t2", 2)], ZZ)
    assert len(degree_slice(sig, 4)) == 3
    sig1 = signature([("x1", 1)], F2)
    assert degree_slice(sig1, 3) == [(3,)]


def test_degree_slice_exterior_bound():
    sig = signature([("x9", 9, True), ("x26", 26)], F3)
    assert degree_slice(sig, 35) == [(1, 1)]
    assert degree_slice(sig, 18) == []  # x9^2 is forbidden


def test_parse_two_terms():
    sig = signature([("w4", 4), ("c6", 12), ("w8", 8)], z_local(2))
    p = parse("w4^2*c6 + 2*w8", sig)
    assert len(p.terms) == 2
    assert p.coefficient((2, 1, 0)) == 1
    assert p.coefficient((0, 0, 1)) == 2


def test_parse_parenthesized_expansion():
    sig = signature([("z", 1), ("x1", 1), ("x2", 1)], F2)
    p = parse("z^4 + (x1^2+x1*x2+x2^2)*z^2", sig)
    z, x1, x2 = geners(sig, "z", "x1", "x2")
    expected = z**4 + (x1 * x1 + x1 * x2 + x2 * x2) * z * z
    assert p == expected


def test_parse_p_local_coefficient():
    # denominator must be coprime to p: 3/2 is 3-local but not 2-local
    sig3 = signature([("t1", 2)], z_local(3))
    p = parse("3/2*t1", sig3)
    assert str(p) == "3/2*t1"
    with pytest.raises(PolyError):
        parse("3/2*t1", signature([("t1", 2)], z_local(2)))


def test_p_local_denominator_rejected():
    from fractions import Fraction

    sig = signature([("t1", 2)], z_local(2))
    with pytest.raises(PolyError):
        Polynomial(sig, {(1,): Fraction(1, 2)})
    with pytest.raises(PolyError):
        parse("1/2*t1", sig)


def test_parse_round_trip():
    sig = signature([("w_4", 4), ("w_6", 6), ("w_7", 7), ("w_8", 8)], F2)
    texts = ["w_4^2*w_6 + w_7*w_8", "w_4 + w_6 + w_7^3", "1"]
    for text in texts:
        p = parse(text, sig)
        assert parse(str(p), sig) == p


def test_parse_errors_have_positions():
    sig = signature([("x1", 1)], F2)
    with pytest.raises(PolyError):
        parse("x1 + ", sig)
    with pytest.raises(PolyError):
        parse("y1", sig)


def test_exterior_requires_fp():
    with pytest.raises(PolyError):
        signature([("a", 3, True)], ZZ)


def test_odd_degree_needs_exterior_at_odd_p():
    with pytest.raises(PolyError):
        signature([("a", 9)], F3)
    # fine over F_2
    signature([("a", 9)], F2)
