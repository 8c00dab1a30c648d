import json

import pytest

from selfsim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["apply", "-g", "G", "b", "1,7"], "2,7"),
        (["apply", "-g", "G", "id", "3"], "3"),
        (["apply", "-g", "G", "abab-1a", "2"], "7"),
        (["order", "-g", "G", "ab"], "16"),
        (["reduce", "-g", "G", "a b b a a"], "a b-1"),
    ],
)
def test_examples(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == expected


def test_equal(capsys):
    assert run(capsys, "equal", "-g", "G", "bb", "b-1")[:2] == (0, "true\n")
    assert run(capsys, "equal", "-g", "G", "a", "b")[:2] == (1, "false\n")


def test_order_infinite_exits_1(capsys):
    code, out, _ = run(capsys, "order", "-g", "H", "ab'")
    assert code == 1 and out.startswith("infinite")


def test_order_json(capsys):
    code, out, _ = run(capsys, "order", "-g", "G", "ab", "--json")
    assert code == 0 and json.loads(out)["order"] == 16


def test_ball_csv(capsys, tmp_path):
    p = tmp_path / "out.csv"
    code, _, _ = run(capsys, "ball", "-g", "G", "-n", "8", "--csv", str(p))
    lines = p.read_text().splitlines()
    assert code == 0 and lines[0] == "n,ball_size" and len(lines) == 1 + 9


def test_ball_json(capsys):
    code, out, _ = run(capsys, "ball", "-g", "G", "-n", "5", "--json")
    doc = json.loads(out)
    assert doc["sizes"] == [1, 4, 8, 14, 22, 34] and "disclaimer" in doc["fit"]


def test_activity_and_classify(capsys):
    code, out, _ = run(capsys, "activity", "-g", "G", "b", "--level", "5")
    assert code == 0 and out.splitlines() == ["level,count", "1,2", "2,4", "3,8", "4,16", "5,32"]
    code, out, _ = run(capsys, "classify", "-g", "G", "b", "--json")
    (doc,) = json.loads(out)
    assert doc["classification"] == "exponential" and abs(doc["rate"] - 2) < 1e-6


def test_schreier(capsys, tmp_path):
    code, out, _ = run(capsys, "schreier", "-g", "G", "--level", "0", "--gens", "a,b")
    assert code == 0 and len(out.splitlines()) == 5
    p = tmp_path / "g.csv"
    run(capsys, "schreier", "-g", "G", "--level", "1", "--format", "edge-csv", "--gens", "a,b", "-o", str(p))
    assert len(p.read_text().splitlines()) == 17


def test_determinism(capsys):
    outs = {run(capsys, "schreier", "-g", "G", "--level", "2", "--format", "json")[1] for _ in range(2)}
    assert len(outs) == 1


def test_usage_errors(capsys):
    assert run(capsys, "apply", "-g", "G", "q", "1")[0] == 2
    assert run(capsys, "apply", "-g", "G", "a", "9")[0] == 2
    assert run(capsys, "order", "-g", "nope", "a")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["apply", "-g", "G"])
    assert exc.value.code == 2


def test_budget_exhaustion_never_passes(capsys):
    code, _, err = run(capsys, "equal", "-g", "grigorchuk-exp", "a' b a' d a' c a'", "id", "--budget", "4")
    assert code == 1 and "budget" in err


def test_group_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SELFSIM_GROUP", "grigorchuk")
    assert run(capsys, "apply", "d", "1,1")[1].strip() == "1,1"
    assert run(capsys, "apply", "d", "2,1")[1].strip() == "2,1"


def test_group_from_json_file(capsys, tmp_path):
    from selfsim import catalog

    p = tmp_path / "m.json"
    p.write_text(catalog.load("G").machine.to_json())
    assert run(capsys, "apply", "-g", str(p), "b", "1,7")[1].strip() == "2,7"


def test_verify_passing_checks(capsys):
    code, out, _ = run(capsys, "verify", "-g", "G", "--checks", "defining-data,schreier,relations,key-identity")
    assert code == 0 and out.count("PASS") == 4


def test_verify_reports_failures(capsys):
    code, out, _ = run(capsys, "verify", "-g", "G", "--checks", "section-onto")
    assert code == 1 and "slot 6" in out


def test_verify_grigorchuk_exp_activity(capsys):
    code, out, _ = run(capsys, "verify", "-g", "grigorchuk-exp", "--checks", "activity")
    assert code == 0 and "a': exponential" in out


def test_verify_report_file(capsys, tmp_path):
    p = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "-g", "G", "--checks", "contraction", "--max-a", "6", "--report", str(p))
    doc = json.loads(p.read_text())
    assert code == 0 and doc["violations"] == [] and abs(doc["max_ratio"] - 5 / 6) < 1e-12


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and [line.split()[0] for line in out.splitlines()] == ["G", "H", "grigorchuk", "grigorchuk-exp"]
