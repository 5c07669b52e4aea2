import pytest

from weylchow.builtin import f4_chart, f4_expected_mod_p_dims, spin7_chart, toy_killing_chart
from weylchow.chart import ChartError, build_chart, parse_chart, serialize_chart
from weylchow.poly import parse


def test_spin7_q_data_matches_stated_facts(spin7_builtin):
    chart = spin7_builtin.chart
    sig = chart.sig
    assert chart.q_images[0]["w_6"] == parse("w_7", sig)
    assert chart.q_images[1]["w_4"] == parse("w_7", sig)
    assert chart.q_images[2]["w_8"] == parse("w_7*w_8", sig)
    # the composite fact: Q_3(w_7 w_8) = w_7^2 w_8^2
    from weylchow.chart import _derivation_specs
    from weylchow.poly import Polynomial
    from weylchow.steenrod import apply_derivation

    spec3 = _derivation_specs(chart)[3]
    lhs = apply_derivation(spec3, parse("w_7*w_8", sig))
    assert lhs == parse("w_7^2*w_8^2", sig)


def test_spin7_integral_slices(spin7_builtin):
    chart = spin7_builtin.chart
    sl7 = chart.integral_slice(7)
    assert len(sl7.free) == 0 and len(sl7.torsion) == 1  # w_7 is 2-torsion
    sl6 = chart.integral_slice(6)
    assert len(sl6.free) == 0 and len(sl6.torsion) == 0  # w_6 is a shadow
    sl8 = chart.integral_slice(8)
    assert len(sl8.free) == 2  # w_4^2 and w_8


def test_round_trips():
    for bc in (spin7_chart(window=20), f4_chart(window=40), toy_killing_chart()):
        text = serialize_chart(bc.chart)
        assert parse_chart(text) == bc.chart


def test_parse_rejects_malformed_section():
    with pytest.raises(ChartError):
        parse_chart("[chart\np = 2\n")


def test_parse_requires_header_fields():
    with pytest.raises(ChartError):
        parse_chart("[chart]\np = 2\n")


def test_validation_rejects_wrong_q_degree():
    # Q_0 must raise degree by exactly 1
    with pytest.raises(ChartError):
        build_chart(
            "bad", 2, 10, (("a", 2), ("b", 4)), {0: {"a": "b"}}
        )


def test_validation_rejects_nonsquarezero_q():
    with pytest.raises(ChartError):
        build_chart(
            "bad", 2, 10, (("a", 1), ("b", 2), ("c", 3)), {0: {"a": "b", "b": "c"}}
        )


def test_validation_rejects_wrong_torsion_tag():
    with pytest.raises(ChartError):
        build_chart(
            "bad", 2, 12, (("u", 8), ("b", 9)), {0: {"u": "b"}},
            torsion_tags={"u": 0, "b": 0},
        )


def test_alias_resolution(spin7_builtin):
    chart = spin7_builtin.chart
    mono = chart.resolve_name("e")
    assert chart.sig.mono_degree(mono) == 8
    with pytest.raises(ChartError):
        chart.resolve_name("nope")


def test_f4_dimensions_match_integral_bookkeeping(f4_builtin):
    chart = f4_builtin.chart
    expect = f4_expected_mod_p_dims(60)
    assert [chart.dim(n) for n in range(61)] == expect[:61]


def test_f4_product_rules_round_trip(f4_builtin):
    text = serialize_chart(f4_builtin.chart)
    assert "[products]" in text
    assert parse_chart(text) == f4_builtin.chart


def test_lazy_extension_beyond_window():
    bc = spin7_chart(window=20)
    chart = bc.chart
    # basis and matrices beyond the declared window are generated on demand
    assert chart.dim(24) > 0
    mat = chart.q_matrix(1, 22)
    assert len(mat) == chart.dim(25)
    # the declared data is untouched, so equality still holds
    assert parse_chart(serialize_chart(chart)) == chart


def test_chart_file_error_reports_line():
    bad = "[chart]\np = 2\nwindow = 8\n[classes]\nw 4\n"
    with pytest.raises(ChartError) as err:
        parse_chart(bad)
    assert "line 5" in str(err.value)
