import pytest

from weylchow.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_dickson_command(capsys):
    code, out, _ = run_cli(capsys, "dickson", "--h", "2", "--verify", "all")
    assert code == 0
    assert "result: pass" in out


def test_dickson_records_format(capsys):
    code, out, _ = run_cli(capsys, "--format", "records", "dickson", "--h", "1")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln]
    assert all(len(ln.split("\t")) == 4 for ln in lines)


def test_series_command(capsys):
    code, out, _ = run_cli(capsys, "series", "--expr", "1/((1-t^4))", "--order", "8")
    assert code == 0
    assert "1 0 0 0 1 0 0 0 1" in out


def test_invariants_match(capsys):
    code, out, _ = run_cli(
        capsys,
        "invariants", "--group", "so:2", "--domain", "z", "--max-degree", "12",
        "--series", "1/((1-t^4)(1-t^8))",
    )
    assert code == 0
    assert "match" in out


def test_invariants_mismatch_fails(capsys):
    code, out, err = run_cli(
        capsys,
        "invariants", "--group", "so:2", "--domain", "z", "--max-degree", "12",
        "--series", "1/((1-t^4))",
    )
    assert code == 1
    assert "failed" in err


def test_unknown_group_errors(capsys):
    code, _, err = run_cli(
        capsys, "invariants", "--group", "nope", "--domain", "z", "--max-degree", "4"
    )
    assert code == 2
    assert "error" in err


def test_ahss_toy_collapse(capsys):
    code, out, _ = run_cli(
        capsys, "ahss", "--chart", "toy-kill", "--vmax", "1", "--collapse"
    )
    assert code == 0
    assert "free: 2*a" in out


def test_ahss_chart_file(tmp_path, capsys):
    from weylchow.builtin import toy_killing_chart
    from weylchow.chart import serialize_chart

    path = tmp_path / "toy.chart"
    path.write_text(serialize_chart(toy_killing_chart().chart))
    code, out, _ = run_cli(capsys, "ahss", "--chart", str(path), "--vmax", "1")
    assert code == 0
    assert "E_inf" in out


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.txt"
    code, out, _ = run_cli(
        capsys, "--out", str(target), "series", "--expr", "1/((1-t^2))", "--order", "4"
    )
    assert code == 0
    assert out == ""
    assert "1 0 1 0 1" in target.read_text()


def test_invariants_action_file(tmp_path, capsys):
    from weylchow.groups import build_weyl_so, serialize_action

    path = tmp_path / "so2.action"
    path.write_text(serialize_action(build_weyl_so(2)))
    code, out, _ = run_cli(
        capsys,
        "invariants", "--group", "file:%s" % path, "--domain", "z", "--max-degree", "8",
    )
    assert code == 0
    assert "rank" in out
