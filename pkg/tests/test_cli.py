import json
import math

import pytest

from betalab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run_cli(capsys, *argv)
    return code, json.loads(out)


def test_count_full_shift(capsys):
    code, rep = run_json(capsys, "count", "--beta", "2", "--n", "5")
    assert code == 0
    assert rep["payload"]["count"] == 32
    assert rep["subcommand"] == "count"
    assert rep["schema_version"] == 1


def test_admissible_golden_digits(capsys):
    code, rep = run_json(capsys, "admissible", "--beta-digits", "10(10)",
                         "--word", "11")
    assert code == 0
    assert rep["payload"]["admissible"] is False


def test_expand_round_trip(capsys):
    code, rep = run_json(capsys, "expand", "--beta-poly", "1,-1,-1",
                         "--x", "3/10", "--n", "16")
    assert code == 0
    assert rep["checks"][0]["pass"]


def test_expansion_of_one_periodic_form(capsys):
    code, rep = run_json(capsys, "expansion-of-one", "--beta-digits",
                         "(201001)", "--n", "12")
    assert code == 0
    assert rep["payload"]["digits"] == "201001201001"
    # the finite string 201001 instead encodes the simple base beta(6),
    # whose quasi-greedy expansion is (201000)^inf
    code, rep = run_json(capsys, "expansion-of-one", "--beta-digits",
                         "201001", "--n", "12")
    assert code == 0
    assert rep["payload"]["periodic_form"] == "(201000)"


def test_malformed_beta_exits_2(capsys):
    code, _, err = run_cli(capsys, "count", "--beta", "x", "--n", "5")
    assert code == 2
    assert json.loads(err)["error"] == "usage"


def test_missing_beta_exits_2(capsys):
    code, _, _ = run_cli(capsys, "count", "--n", "5")
    assert code == 2


def test_csv_emit(capsys):
    code, out, _ = run_cli(capsys, "count", "--beta", "2", "--n", "6",
                           "--profile", "--emit", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",") == ["n", "count", "rate"]
    assert lines[1].startswith("1,2,")


def test_determinism(capsys):
    argv = ["irregular", "--beta-poly", "1,-1,-1", "--phi", "freq:1",
            "--alpha", "0.5,0", "--levels", "2", "--seed", "5"]
    code1, rep1 = run_json(capsys, *argv)
    code2, rep2 = run_json(capsys, *argv)
    assert code1 == code2 == 0
    rep1.pop("wall_time_s")
    rep2.pop("wall_time_s")
    assert rep1 == rep2


def test_separated_spanning(tmp_path, capsys):
    words = tmp_path / "Z.txt"
    words.write_text("".join(f"{a}{b}{c}\n" for a in "01" for b in "01"
                             for c in "01"))
    code, rep = run_json(capsys, "separated", "--words-file", str(words),
                         "--g", "const:1")
    assert code == 0
    assert rep["payload"]["size"] == 4
    code, rep = run_json(capsys, "spanning", "--words-file", str(words),
                         "--g", "const:1")
    assert rep["payload"]["size"] == 2


def test_bowen_and_boxdim(capsys):
    code, rep = run_json(capsys, "bowen", "--beta", "2", "--depth", "12")
    assert code == 0
    assert abs(rep["payload"]["estimate"] - math.log(2)) < 0.01
    code, rep = run_json(capsys, "boxdim", "--beta-poly", "1,-1,-1",
                         "--markov-n", "3", "--depth", "24",
                         "--depths", "24")
    assert code == 0
    assert rep["checks"][0]["pass"]


def test_schedule_and_pools(capsys):
    code, rep = run_json(capsys, "schedule", "--levels", "4")
    assert code == 0
    assert rep["checks"][0]["pass"]
    code, rep = run_json(capsys, "pools", "--beta-poly", "1,-1,-1",
                         "--phi", "freq:1", "--alpha", "0.5,0",
                         "--levels", "2")
    assert code == 0
    assert all(r["size"] > 0 for r in rep["payload"]["rows"])


def test_glued_family_and_edp(capsys):
    code, rep = run_json(capsys, "glued-family", "--beta", "2",
                         "--levels", "2", "--pool-size", "2",
                         "--multiplicity", "2")
    assert code == 0
    assert rep["payload"]["count"] == 16
    code, rep = run_json(capsys, "edp", "--beta", "2", "--levels", "2",
                         "--pool-size", "2", "--multiplicity", "2")
    assert code == 0
    assert rep["checks"][0]["pass"]


def test_exotic(capsys):
    code, rep = run_json(capsys, "exotic", "--levels", "2", "--N", "4,6",
                         "--nmax", "12")
    assert code == 0
    assert all(c["pass"] for c in rep["checks"])


def test_zvalues_and_repair(capsys):
    code, rep = run_json(capsys, "zvalues", "--beta-poly", "1,-1,-1",
                         "--n", "8")
    assert code == 0
    assert rep["payload"]["z"] == [0, 1] * 4
    code, rep = run_json(capsys, "repair", "--beta-poly", "1,-1,-1",
                         "--word", "101")
    assert rep["payload"]["repaired"] == "100"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _, _ = run_cli(capsys, "count", "--beta", "2", "--n", "4",
                         "--out", str(target))
    assert code == 0
    assert json.loads(target.read_text())["payload"]["count"] == 16
