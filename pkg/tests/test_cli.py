import json
import math

import pytest

from dirmoment import cli
from dirmoment.numerics import fmt_float

HEADER = "q,phi_star,moment,main_term,ratio,b_moment,c_moment,E_measured,wall_ms"


def run(capsys, *argv):
    rc = cli.main(list(argv))
    return rc, capsys.readouterr().out


def test_moment_json_parses(capsys):
    rc, out = run(capsys, "moment", "--q", "15")
    assert rc == 0
    doc = json.loads(out)
    assert doc["q"] == 15
    assert doc["phi_star"] == 3
    assert doc["fourth_moment"] > 0
    assert doc["ratio"] == doc["fourth_moment"] / doc["main_term"]
    assert "wall_ms" not in doc


def test_moment_timings_flag(capsys):
    rc, out = run(capsys, "moment", "--q", "5", "--timings")
    doc = json.loads(out)
    assert rc == 0
    assert set(doc["wall_ms"]) >= {"kernel", "tables", "transform"}


def test_moment_without_primitive_characters_warns(capsys):
    # q = 6 has no primitive characters: zero moment, warning, exit 0
    rc = cli.main(["moment", "--q", "6", "--json"])
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert rc == 0
    assert doc["phi_star"] == 0
    assert doc["fourth_moment"] == 0
    assert doc["warning"] == "no primitive characters"
    assert "no primitive characters" in captured.err


def test_value_reports_oracle(capsys):
    rc, out = run(capsys, "value", "--q", "5", "--char", "1")
    doc = json.loads(out)
    assert rc == 0
    assert doc["primitive"] is True
    assert doc["conductor"] == 5
    l_sq = doc["l_oracle"]["re"] ** 2 + doc["l_oracle"]["im"] ** 2
    assert abs(l_sq - doc["two_a"]) < 1e-10
    rc, out = run(capsys, "value", "--q", "5", "--char", "1", "--no-oracle")
    assert "l_oracle" not in json.loads(out)


def test_value_rejects_bad_index(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["value", "--q", "5", "--char", "7"])
    assert e.value.code == 2


def test_usage_error_is_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["moment"])  # missing --q
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["no-such-command"])
    assert e.value.code == 2


def test_scan_deterministic_across_threads(tmp_path, capsys):
    f1 = tmp_path / "a.csv"
    f2 = tmp_path / "b.csv"
    assert cli.main(["scan", "--qmin", "3", "--qmax", "10",
                     "--out", str(f1)]) == 0
    assert cli.main(["scan", "--qmin", "3", "--qmax", "10", "--threads", "4",
                     "--out", str(f2)]) == 0
    b1 = f1.read_bytes()
    assert b1 == f2.read_bytes()
    lines = b1.decode().strip().split("\n")
    assert lines[0] == HEADER
    assert len(lines) == 9
    # wall_ms column is pinned to zero unless --timings is given
    assert all(ln.rsplit(",", 1)[1] == "0" for ln in lines[1:])


def test_scan_row_values_roundtrip(tmp_path):
    f = tmp_path / "s.csv"
    cli.main(["scan", "--qmin", "5", "--qmax", "5", "--out", str(f)])
    row = f.read_text().strip().split("\n")[1].split(",")
    assert row[0] == "5" and row[1] == "3"
    moment, main = float(row[2]), float(row[3])
    assert float(row[4]) == moment / main
    # E_measured = b_moment - diagonal: finite and small at q = 5
    assert abs(float(row[7])) < 1.0


def test_kernel_table_csv(tmp_path):
    f = tmp_path / "k.csv"
    rc = cli.main(["kernel-table", "--xmin", "0.01", "--xmax", "4",
                   "--points", "7", "--out", str(f)])
    assert rc == 0
    lines = f.read_text().strip().split("\n")
    assert lines[0] == "x,W0,W1"
    assert len(lines) == 8
    for ln in lines[1:]:
        x, w0, w1 = (float(t) for t in ln.split(","))
        assert 0 < w0 < w1 <= 1.0001


def test_kernel_table_rejects_bad_grid():
    with pytest.raises(SystemExit) as e:
        cli.main(["kernel-table", "--xmin", "4", "--xmax", "2"])
    assert e.value.code == 2


def test_verify_identities_passes(tmp_path, capsys):
    f = tmp_path / "v.json"
    rc = cli.main(["verify-identities", "--qmax-lemma1", "20",
                   "--qmax-pairs", "10", "--qmax-gauss", "20",
                   "--out", str(f)])
    assert rc == 0
    doc = json.loads(f.read_text())
    assert doc["failures"] == []
    assert doc["checks"] > 500


def test_verify_identities_covers_all_families(tmp_path, capsys):
    f = tmp_path / "vi.json"
    rc = cli.main(["verify-identities", "--qmax-lemma1", "8",
                   "--qmax-pairs", "6", "--qmax-gauss", "8",
                   "--out", str(f)])
    out = capsys.readouterr().out
    assert rc == 0
    for family in ("primitive-sum identity", "parity pair-sum identity",
                   "gauss-sum modulus", "central-value oracle equation",
                   "diagonal reorganization equality"):
        assert family in out


def test_verify_bounds_passes(tmp_path, capsys):
    f = tmp_path / "b.json"
    rc = cli.main(["verify-bounds", "--qmax", "8", "--out", str(f)])
    assert rc == 0
    doc = json.loads(f.read_text())
    assert doc["failures"] == []


def test_verify_bounds_only_selector(tmp_path, capsys):
    f = tmp_path / "b3.json"
    rc = cli.main(["verify-bounds", "--only", "lemma3", "--out", str(f)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "quadruple-count boxes" in out
    assert "harmonic-sum" not in out
    assert json.loads(f.read_text())["checks"] == 5


def test_float_formatting_roundtrips():
    for v in (0.1, 1 / 3, math.pi, 1e-300, -2.5e17, 0.0):
        assert float(fmt_float(v)) == v
    assert fmt_float(float("nan")) == "nan"
    assert fmt_float(float("inf")) == "inf"
