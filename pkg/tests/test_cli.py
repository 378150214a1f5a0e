import json
import subprocess
import sys

import pytest

from wreath_lab.cli import run

STD = {"group": "cyclic 2", "alpha": [{"weight": 0.5, "irrep": "sign"}],
       "beta": [{"weight": 0.25, "irrep": "trivial"}], "tr0": "regular"}


@pytest.fixture
def std_file(tmp_path):
    path = tmp_path / "std.json"
    path.write_text(json.dumps(STD))
    return str(path)


def run_json(capsys, *argv):
    code = run([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_eval_example(capsys, std_file):
    code, doc = run_json(capsys, "eval", "--params", std_file, "--element", "(1 2 3)[1:g]",
                         "--element", "(1 2)", "--oracle")
    assert code == 0
    vals = [row["value"] for row in doc["result"]["values"]]
    assert vals == pytest.approx([-0.109375, 0.1875])
    assert all(c["pass"] for c in doc["checks"])
    assert {"name", "value", "tolerance", "pass"} <= set(doc["checks"][0])


def test_eval_text_output(capsys):
    assert run(["eval", "--preset", "z2-standard", "--element", "[1:g]"]) == 0
    out = capsys.readouterr().out
    assert "-0.25" in out and out.rstrip().endswith("ok")


@pytest.mark.parametrize("argv,field", [
    (["eval", "--element", "(1 2"], "--element"),
    (["eval", "--preset", "nope", "--element", "e"], "--preset"),
    (["eval", "--params", "/no/such.json", "--element", "e"], "--params"),
    (["verify", "--suite", "bogus"], "--suite"),
    (["cosets", "--g", "(1 2)"], "--g"),
    (["cosets", "--group", "S9", "--g", "e | e"], "--group"),
    (["type3", "--p", "0.5", "0.5", "0.5", "0.5"], "--p"),
    (["type3", "--p-json", "{bad"], "--p-json"),
    (["render", "--figure", "fig8-gamma", "--i", "7"], "--i"),
    (["realize", "--support", "9"], "--support"),
    (["eval", "--element", "e", "--tol", "oracle"], "--tol"),
])
def test_config_errors_exit_2(capsys, argv, field):
    assert run(argv) == 2
    assert field in capsys.readouterr().err


def test_usage_error_exit_2(capsys):
    assert run(["frobnicate"]) == 2
    assert run([]) == 2


def test_library_error_is_structured(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**STD, "alpha": [{"weight": 0.9, "irrep": "sign"}]}))
    assert run(["eval", "--params", str(bad), "--element", "e"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("wreath-lab: error:") and "Traceback" not in err


def test_realize_report(capsys):
    code, doc = run_json(capsys, "realize", "--preset", "s3-a", "--samples", "20", "--moments", "--n", "8")
    assert code == 0
    assert doc["result"]["max_abs_diff"] <= 1e-9
    assert [r["q"] for r in doc["result"]["moments"]] == [1, 2]


def test_verify_quick_single_suite(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "omega", "--quick", "--seed", "7")
    assert code == 0 and doc["result"]["suites"] == {"omega": True}


def test_verify_reports_failure(capsys):
    # the literal two-circle check fails, so the exit code is 1
    code, doc = run_json(capsys, "verify", "--suite", "cosets", "--quick")
    assert code == 1
    failed = [c["name"] for c in doc["checks"] if not c["pass"]]
    assert failed == ["cosets: Fig. 7 circle count"]


def test_tolerance_override(capsys):
    code, doc = run_json(capsys, "realize", "--preset", "z2-standard", "--samples", "5", "--moments",
                         "--n", "8", "--tol", "moment q=1=1e-9")
    assert code == 1
    c = next(c for c in doc["checks"] if c["name"] == "moment q=1 gap")
    assert c["tolerance"] == 1e-9 and not c["pass"]


def test_cosets_mult_and_dot(capsys, tmp_path):
    dot = tmp_path / "out.dot"
    g = "(1 2)[1:t12] | (2 3)"
    h = "(1 4)[2:c012] | e"
    code, doc = run_json(capsys, "cosets", "--op", "mult", "--n", "3", "--g", g, "--h", h, "--dot", str(dot))
    assert code == 0
    assert dot.read_text().startswith("digraph mult {")
    assert all(c["pass"] for c in doc["checks"])
    code, doc2 = run_json(capsys, "cosets", "--op", "involution", "--n", "2", "--g", g)
    assert code == 0


def test_type3_all(capsys):
    code, doc = run_json(capsys, "type3", "--p", "0.4", "0.1", "0.2", "0.3", "--n", "2")
    assert code == 0
    assert doc["result"]["cyclic"]["cyclic"] is True
    assert doc["result"]["centrality_witness"]["gap"] > 1e-6
    code, doc = run_json(capsys, "type3", "--p-json", '{"p": [[0.25, 0.25], [0.25, 0.25]]}', "--n", "1")
    assert code == 0 and doc["result"]["modular"].startswith("skipped")


@pytest.mark.parametrize("figure", ["fig5", "fig6", "fig7", "fig8-transposition", "fig8-gamma"])
def test_render(capsys, figure, tmp_path):
    dot = tmp_path / "f.dot"
    assert run(["render", "--figure", figure, "--dot", str(dot)]) == 0
    assert dot.read_text().startswith("digraph ")
    capsys.readouterr()


def test_deterministic_bytes(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4", "1"):
        monkeypatch.setenv("WREATH_LAB_THREADS", threads)
        path = tmp_path / f"r{len(outs)}.json"
        run(["realize", "--preset", "z3-b", "--samples", "30", "--seed", "11", "--format", "json",
             "--output", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        run(["render", "--figure", "fig7", "--seed", "5", "--format", "json", "--output", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("WREATH_LAB_THREADS", "many")
    assert run(["realize", "--samples", "2"]) == 2
    assert "WREATH_LAB_THREADS" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wreath_lab", "eval", "--element", "(1 2)"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1875" in proc.stdout


def test_empty_report_is_valid():
    from wreath_lab.cli import report
    doc = json.loads(report("verify", 0, {}, [], "json"))
    assert doc == {"checks": [], "command": "verify", "pass": True, "result": {}, "seed": 0}
    assert report("verify", 0, {}, []).endswith("ok\n")
