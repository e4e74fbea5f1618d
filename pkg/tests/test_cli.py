import io
import json

import pytest
from numpy.testing import assert_allclose

from clampedtones import cli

import reference_values as ref


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_tone_json_round_trip():
    code, out, _ = call("tone", "--dim", "2", "--radius", "0.1", "--format", "json")
    assert code == 0
    [rec] = cli.parse_records(out, "tone")
    assert_allclose(rec["lambda"], float(ref.TABLE1[(2, "0.1")]), rtol=1e-9)
    assert rec["method"] == "Series2D"
    assert cli.render([rec], "json") == out


def test_tone_deterministic():
    argv = ("tone", "--dim", "3", "--radius", "0.7", "--format", "json")
    assert call(*argv)[1] == call(*argv)[1]


def test_euclidean_tone():
    code, out, _ = call("tone", "--dim", "2", "--kappa", "0", "--radius", "1", "--format", "json")
    assert code == 0
    [rec] = cli.parse_records(out, "tone")
    assert_allclose(rec["lambda"], float(ref.CROSS_ROOT["0"]), rtol=1e-9)


def test_csv_and_text(tmp_path):
    target = tmp_path / "t1.csv"
    code, out, _ = call("table1", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "n,radius,algebraic,asymptotic,abs_diff"
    assert len(lines) == 9
    code, out, _ = call("table1")
    assert code == 0 and "algebraic" in out.splitlines()[0]


def test_table2_approximate_column():
    code, out, _ = call("table2", "--format", "json")
    assert code == 0
    rows = cli.parse_records(out, "table2")
    assert [r["radius"] for r in rows] == [50.0, 100.0, 5000.0, 100000.0]
    for r in rows:
        assert_allclose(r["delta"], float(ref.TABLE2_DELTA[int(r["radius"])]), rtol=1e-6)
    assert_allclose(rows[2]["approximate_delta"], 1.9739e-7, atol=1e-11)


def test_twoball_and_scan():
    code, out, _ = call("twoball", "--dim", "3", "--alpha", "0", "--radius", "0.7", "--format", "json")
    assert code == 0
    [rec] = cli.parse_records(out, "twoball")
    assert_allclose(rec["lambda"], float(ref.TABLE1[(3, "0.7")]), rtol=1e-9)
    code, out, _ = call("scan", "--dim", "3", "--start", "0.5", "--stop", "1.0", "--steps", "3", "--format", "json")
    rows = cli.parse_records(out, "scan")
    assert [r["holds"] for r in rows] == [True, False, False]


def test_threshold_and_oracle():
    code, out, _ = call("threshold", "--dim", "3", "--format", "json")
    [rec] = cli.parse_records(out, "threshold")
    assert 0.7186 < rec["radius"] < 0.7187
    code, out, _ = call("oracle", "--dim", "3", "--radius", "0.7", "--grid", "256", "--format", "json")
    [rec] = cli.parse_records(out, "oracle")
    assert rec["rel_diff"] < 1e-2


@pytest.mark.parametrize("argv,code", [
    (("tone", "--dim", "2"), 1),
    (("tone", "--dim", "2", "--radius", "1", "--bogus"), 1),
    (("nosuch",), 1),
    (("tone", "--dim", "2", "--radius", "-1"), 2),
    (("tone", "--dim", "5", "--radius", "1"), 2),
    (("twoball", "--dim", "3", "--alpha", "5", "--total", "1"), 2),
])
def test_exit_codes(argv, code):
    got, out, err = call(*argv)
    assert got == code
    assert out == "" and err


def test_help_exits_zero(capsys):
    assert cli.run(["--help"]) == 0


def test_parse_rejects_wrong_schema():
    with pytest.raises(ValueError):
        cli.parse_records(json.dumps([{"n": "2"}]), "tone")
