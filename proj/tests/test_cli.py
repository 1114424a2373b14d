import json
import os
import subprocess

import pytest

CLI = os.environ["YL_CLI"]


def run(*args):
    p = subprocess.run([CLI, *args], capture_output=True, text=True)
    return p.returncode, p.stdout


def flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(flatten(v, f"{prefix}.{k}" if prefix else k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}.{i}"))
    else:
        out[prefix] = obj
    return out


def render(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@pytest.mark.parametrize(
    "args",
    [
        ["newform", "validate", "bundled:11a"],
        ["newform", "oracle", "eta", "--name", "11a", "--M", "30"],
        ["yoshida", "check", "bundled:synth-f", "bundled:synth-g"],
        ["periods", "ratio-check", "--k", "9", "--parity", "odd"],
        ["lvalue", "detect", "--x", "0.25", "--eps", "1e-25", "--H", "100", "--tol", "1e-6"],
    ],
)
def test_json_and_tsv_agree(args):
    code, out = run(*args)
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    code, tsv = run("--format", "tsv", *args)
    assert code == 0
    rows = dict(line.split("\t", 1) for line in tsv.splitlines() if line)
    flat = flatten(doc)
    assert set(rows) == set(flat)
    for k, v in flat.items():
        if k != "config.format" and isinstance(v, (bool, int, str)):
            assert rows[k] == render(v), k


def test_failed_condition_exits_one():
    code, out = run("yoshida", "check", "bundled:delta", "bundled:11a")
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_usage_errors_exit_two():
    assert run("newform", "validate", "bundled:11a", "--no-such-flag")[0] == 2
    assert run("newform", "validate", "/nonexistent/record.json")[0] == 2
    assert run("--digits", "5", "newform", "validate", "bundled:11a")[0] == 2


def test_config_echoes_run():
    code, out = run("--digits", "40", "--pmax", "200", "--seed", "7", "newform", "validate", "bundled:delta")
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["digits"] == 40 and cfg["primes"] == [2, 200] and cfg["seed"] == 7
    assert cfg["inputs"] == ["bundled:delta"]
