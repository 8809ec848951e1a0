import json
import subprocess
import sys

import pytest

from picgrp.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *args):
    code, out, _ = run(capsys, "--json", *args)
    return code, json.loads(out)


def test_pic_a(capsys):
    code, doc = run_json(capsys, "pic-a", "5")
    assert code == 0 and doc["schema"] == 1
    assert doc["payload"]["order"] == 2 and doc["payload"]["invariant_factors"] == [2]
    code, out, _ = run(capsys, "pic-a", "3")
    assert code == 0 and "= 1" in out


def test_usage_errors(capsys):
    assert run(capsys, "pic-a", "0")[0] == 2
    assert run(capsys, "normalize", "6", "1", "2")[0] == 2
    assert run(capsys, "normalize", "5", "5")[0] == 2
    assert run(capsys, "box", "5", "2")[0] == 2
    assert run(capsys, "pi0", "6", "2", "1")[0] == 2
    assert run(capsys, "pi0", "6", "3", "3")[0] == 2
    assert run(capsys, "verify", "--n-max", "0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--n-max", "3", "--suite", "nope"])
    assert exc.value.code == 2


def test_pic_sp(capsys):
    code, doc = run_json(capsys, "pic-sp", "5")
    assert doc["payload"]["description"] == "Z/2 x Z^2"
    assert doc["payload"]["certificate"]["surjective"]
    assert doc["payload"]["borel_smith_basis"]["5"] == {"1": 2, "5": 0}
    assert run_json(capsys, "pic-sp", "1")[1]["payload"]["description"] == "Z"
    assert run_json(capsys, "pic-sp", "12")[1]["payload"]["description"] == "Z/2 x Z^6"


def test_normalize_and_box(capsys):
    code, out, _ = run(capsys, "normalize", "7", "5")
    assert code == 0 and out.strip() == "2"
    code, doc = run_json(capsys, "box", "5", "2", "2", "--oracle")
    assert doc["payload"]["box"] == {"5": 4} and doc["payload"]["oracle_match"]


def test_pi0(capsys):
    code, doc = run_json(capsys, "pi0", "5", "5", "2")
    assert code == 0
    assert doc["payload"]["top_restrictions"] == {"5": 2}
    assert doc["payload"]["table"]["levels"]["5"]["restriction"]["5"] == [[2, 5]]
    code, out, _ = run(capsys, "pi0", "5", "5", "2")
    assert "R^5(x^5_1) = 2 x^1_1" in out


def test_units(capsys):
    code, doc = run_json(capsys, "units", "6")
    assert len(doc["payload"]["units"]) == 4


@pytest.mark.parametrize("args", [
    ("pic-a", "12"), ("pic-sp", "6"), ("normalize", "8", "1", "3", "5"), ("box", "4", "1", "3", "1", "3"),
    ("pi0", "6", "3", "2"), ("units", "5"), ("verify", "--n-max", "2", "--suite", "zmod"),
])
def test_json_roundtrip(capsys, args):
    code, out, _ = run(capsys, "--json", *args)
    doc = json.loads(out)
    assert json.loads(json.dumps(doc, sort_keys=True)) == doc
    assert doc["command"] == args[0] and doc["schema"] == 1


def test_verify(capsys):
    code, doc = run_json(capsys, "verify", "--n-max", "1", "--suite", "all")
    assert code == 0 and doc["payload"]["passed"]
    code, doc = run_json(capsys, "verify", "--n-max", "8", "--suite", "burnside")
    assert code == 0
    keys = [(c["n"], c["check"]) for c in doc["payload"]["checks"]]
    assert keys == sorted(keys)


def test_verify_failure_exit(capsys, monkeypatch):
    from picgrp import cli

    monkeypatch.setitem(cli.SUITE_CHECKS, "zmod", [lambda n: [("broken", n != 3)]])
    code, out, _ = run(capsys, "verify", "--n-max", "4", "--suite", "zmod")
    assert code == 1 and "falsified: n=3 check=broken" in out


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("PICGRP_THREADS", "2")
    code, doc = run_json(capsys, "verify", "--n-max", "6", "--suite", "mackey")
    assert code == 0 and doc["payload"]["passed"]
    monkeypatch.setenv("PICGRP_THREADS", "x")
    assert run(capsys, "verify", "--n-max", "2")[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "picgrp", "--json", "normalize", "7", "5"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["payload"]["normalized"] == {"7": 2}
