import io
import json

import numpy as np
import pytest

from contrastive_vc.cli import main


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


CYCLE = {"n": 4, "kind": "triplet", "class": {"variant": "lp", "p": 2, "d": 1},
         "queries": [[0, 1, 2], [0, 2, 3], [0, 1, 3]], "labels": [0, 0, 1]}


def test_realize_unsat(tmp_path):
    code, out, _ = run(["realize", "--input", write_json(tmp_path / "q.json", CYCLE)])
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["status"] == "UNSAT"
    assert doc["manifest"]["subcommand"] == "realize"
    assert len(doc["manifest"]["input_digests"]) == 1


def test_realize_requires_labels(tmp_path):
    data = {k: v for k, v in CYCLE.items() if k != "labels"}
    code, _, err = run(["realize", "--input", write_json(tmp_path / "q.json", data)])
    assert code == 2 and json.loads(err)["error"] == "validation_error"


def test_shatter(tmp_path):
    code, out, _ = run(["shatter", "--input", write_json(tmp_path / "q.json", CYCLE)])
    res = json.loads(out)["result"]
    assert code == 0 and res["shattered"] is False and res["refuter"] == [0, 0, 1]


def test_strict_unknown_exit(tmp_path):
    hard = dict(CYCLE, **{"class": {"variant": "lp", "p": 2, "d": 2}, "labels": [0, 0, 1]})
    path = write_json(tmp_path / "q.json", hard)
    code, out, _ = run(["realize", "--input", path, "--strict", "--restarts", "2"])
    assert json.loads(out)["result"]["status"] == "UNKNOWN"
    assert code == 3
    code, _, _ = run(["realize", "--input", path, "--restarts", "2"])
    assert code == 0


def test_vcdim_and_construct():
    code, out, _ = run(["vcdim", "--n", "4", "--class", "arbitrary", "--budget", "1"])
    assert code == 0 and json.loads(out)["result"]["size"] >= 3
    code, out, _ = run(["construct", "--family", "lp", "--n", "4", "--d", "2", "--p", "2", "--verify"])
    res = json.loads(out)["result"]
    assert res["queries"] == 2 and res["labelings_verified"] == 4


def test_bounds():
    code, out, _ = run(["bounds", "--setting", "arbitrary", "--n", "10"])
    assert code == 0 and json.loads(out)["result"]["vc_upper_crossover"] == 100


def test_wendel(tmp_path):
    code, out, _ = run(["wendel", "--dim", "2", "--m", "4", "--trials", "5000"])
    res = json.loads(out)["result"]
    assert code == 0 and res["bound"] == "1/2" and res["within_bound"]
    vec = write_json(tmp_path / "v.json", [[1, 0], [1, 0], [2, 0]])
    code, out, _ = run(["wendel", "--vectors", vec, "--trials", "1000"])
    assert json.loads(out)["result"]["within_bound"]
    code, _, err = run(["wendel", "--dim", "2"])
    assert code == 2


def test_jl_check(tmp_path):
    pts = np.random.default_rng(0).standard_normal((10, 20)).tolist()
    code, out, _ = run(["jl-check", "--points", write_json(tmp_path / "p.json", pts), "--beta", "0.5"])
    res = json.loads(out)["result"]
    assert code == 0 and res["d1"] == 139 and res["log_base"] == "e"


def test_simulate_writes_csv(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"n": 10, "m_train": 50, "m_test": 200, "steps": 20,
                                           "restarts": 1, "seeds": [0, 1]})
    csv_path = tmp_path / "out.csv"
    code, out, _ = run(["simulate", "--config", cfg, "--out", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    assert lines[1].startswith("seed,n,d_model")
    assert len(lines) == 4
    assert len(json.loads(out)["result"]["per_seed"]) == 2


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(["bounds", "--setting", "class", "--n", "9", "--out", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"]["vc_upper_crossover"] == 9


def test_missing_file_and_bad_json(tmp_path):
    code, _, err = run(["realize", "--input", str(tmp_path / "nope.json")])
    assert code == 2 and json.loads(err)["error"] == "file_not_found"
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(["realize", "--input", str(bad)])
    assert code == 2


def test_rejects_its_own_output(tmp_path):
    code, out, _ = run(["realize", "--input", write_json(tmp_path / "q.json", CYCLE)])
    piped = tmp_path / "report.json"
    piped.write_text(out)
    code, _, err = run(["shatter", "--input", str(piped)])
    assert code == 2 and "report" in json.loads(err)["message"]


def test_usage_errors():
    assert run(["bounds", "--setting", "nope", "--n", "5"])[0] == 2
    assert run([])[0] == 2
    code, _, err = run(["bounds", "--setting", "lp", "--n", "5"])
    assert code == 2 and json.loads(err)["error"] == "DomainError"


def test_threads_recorded_but_result_unchanged(tmp_path):
    path = write_json(tmp_path / "q.json", CYCLE)
    a = json.loads(run(["shatter", "--input", path, "--threads", "1"])[1])
    b = json.loads(run(["shatter", "--input", path, "--threads", "3"])[1])
    assert a["manifest"]["workers"] == 1 and b["manifest"]["workers"] == 3
    assert a["result"] == b["result"]
