"""End-to-end runs of every subcommand against golden JSON outputs.

Set TOMO_REGEN_GOLDEN=1 to rewrite the golden files after an intended change.
"""

import json
import math
import os
import subprocess
import sys

import pytest

from tomo.cli import COMMANDS, run

FIX = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDEN = os.path.join(FIX, "golden")

CASES = {
    "section": "section --body ball3.json --xi 0,0,1 --t 0,0.5",
    "section-profile": "section --body square.json --xi 0.6,0.8 --grid 8",
    "cutoff": "cutoff --body ellipsoid3.json --xi 1,2,2 --t=-0.5,0,0.4",
    "fourier-slice": "fourier-slice --body ball3.json --xi 0,0,1 --lambda 1,5",
    "invert": "invert --body ball3.json --x 0,0,0;3,0,0",
    "polyfit": "polyfit --body ball3.json --xi 0,0,1 --max-degree 4",
    "power-test": "power-test --body ellipse.json --m 2 --xi 1,0;0.6,0.8 --max-degree 4",
    "hilbert-values": "hilbert --body disk.json --xi 1,0 --t 0,0.5",
    "hilbert-test": "hilbert --body ellipse.json --xi 0.6,0.8 --max-degree 4",
    "derivatives": "derivatives --body ball3.json --xi 0,0,1 --k 2",
    "singularities-sqrt": "singularities --equation eq_sqrt.json",
    "singularities-rational": "singularities --equation eq_rational.json",
    "moments": "moments --body disk.json --k 2 --grid 8",
    "range-check": "range-check --body ellipse.json --k 3 --grid 18",
    "tangent-system": "tangent-system --body ellipse.json --xi 1,0",
    "recover-product": "recover-product --body ellipse.json --grid 18",
    "detect-ellipse": "detect-ellipsoid --body ellipse.json --grid 36",
    "detect-square": "detect-ellipsoid --body square.json --grid 36",
    "boundary-exponent": "boundary-exponent --body ellipse.json --xi 0.6,0.8",
    "stationary-phase": "stationary-phase --body ball3.json --xi 0,0,1",
    "harmonics-values": "harmonics --body ball3.json --t 0.2 --L 2 --grid 8",
    "harmonics-test": "harmonics --body ellipsoid3.json --L 2 --grid 16",
}


def argv(cmd: str, *extra: str) -> list[str]:
    out = []
    for tok in cmd.split():
        out.append(os.path.join(FIX, tok) if tok.endswith(".json") else tok)
    return out + list(extra)


def invoke(capsys, args) -> tuple[int, str, str]:
    code = run(args)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def close(a, b, path="$"):
    """Structural equality with a numeric tolerance for floats."""
    if isinstance(a, dict):
        assert isinstance(b, dict) and sorted(a) == sorted(b), path
        for k in a:
            close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert math.isclose(a, b, rel_tol=1e-8, abs_tol=1e-10), f"{path}: {a} != {b}"
    else:
        assert a == b, f"{path}: {a!r} != {b!r}"


def test_every_subcommand_covered():
    used = {c.split()[0] for c in CASES.values()}
    assert used == set(COMMANDS)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, err = invoke(capsys, argv(CASES[name], "--format", "json"))
    assert code == 0, err
    got = json.loads(out)
    path = os.path.join(GOLDEN, f"{name}.json")
    if os.environ.get("TOMO_REGEN_GOLDEN"):
        os.makedirs(GOLDEN, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(out)
    with open(path) as fh:
        close(got, json.load(fh))


@pytest.mark.parametrize("name", ["section", "detect-square", "moments", "harmonics-test"])
@pytest.mark.parametrize("fmt", ["text", "csv", "json"])
def test_byte_identical_reruns(name, fmt, capsys):
    first = invoke(capsys, argv(CASES[name], "--format", fmt))
    second = invoke(capsys, argv(CASES[name], "--format", fmt))
    assert first == second
    assert first[0] == 0 and first[1]


def test_threads_do_not_change_output(capsys, monkeypatch):
    cmd = "fourier-slice --body ellipsoid3.json --xi 1,2,2 --lambda 1,2,3,4,5,6"
    base = invoke(capsys, argv(cmd, "--format", "json"))
    monkeypatch.setenv("TOMO_THREADS", "4")
    assert invoke(capsys, argv(cmd, "--format", "json")) == base
    monkeypatch.setenv("TOMO_THREADS", "many")
    assert invoke(capsys, argv(CASES["section"]))[0] == 1


def test_section_value_text(capsys):
    code, out, _ = invoke(capsys, argv("section --body ball3.json --xi 0,0,1 --t 0"))
    assert code == 0
    assert float(out.strip()) == pytest.approx(math.pi, rel=1e-14)


def test_csv_has_header(capsys):
    code, out, _ = invoke(capsys, argv(CASES["cutoff"], "--format", "csv"))
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4
    assert "t" in lines[0].split(",")


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = invoke(capsys, argv(CASES["detect-ellipse"], "--format", "json", "--out", str(target)))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["verdict"] == "ellipsoid"


@pytest.mark.parametrize("expect, code", [("not-ellipsoid", 0), ("not ellipsoid", 0), ("ellipsoid", 2)])
def test_expect_exit_codes(expect, code, capsys):
    assert invoke(capsys, argv(CASES["detect-square"], "--expect", expect))[0] == code


def test_expect_without_verdict(capsys):
    code, _, err = invoke(capsys, argv(CASES["section"], "--expect", "polynomial"))
    assert code == 1 and "no verdict" in err


def test_malformed_spec_names_field(capsys):
    code, _, err = invoke(capsys, argv("section --body bad_shape.json --xi 1,0 --t 0"))
    assert code == 1
    assert "field 'shape'" in err


@pytest.mark.parametrize("args", [[], ["section"], ["nosuch"], ["section", "--bogus"],
                                  ["section", "--body", "ball3.json", "--xi", "1,0", "--t", "0"],
                                  ["section", "--body", "missing.json", "--t", "0"],
                                  ["section", "--body", "ball3.json", "--t", "zero"]])
def test_usage_errors_exit_1(args, capsys):
    args = [os.path.join(FIX, a) if a.endswith(".json") else a for a in args]
    try:
        code = run(args)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tomo.cli", *argv(CASES["detect-square"], "--expect", "ellipsoid")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "not-ellipsoid" in proc.stdout
