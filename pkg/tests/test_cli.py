import json
import subprocess
import sys


from orbitlimits.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_realize_json(capsys):
    code, out, _ = run(["realize", "--system", "D8"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["provenance"]["tool"] == "orbitlimits"
    assert data["report"]["n_classes"] == 8
    assert data["report"]["n_centric_classes"] == 4


def test_cohomology_csv(capsys):
    code, out, _ = run(["cohomology", "--system", "X27", "--jmax", "2", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# ") and lines[1].startswith("class,order")
    assert len(lines) == 2 + 11


def test_limits_constant(capsys):
    code, out, _ = run(["limits", "--system", "D8", "--functor", "constant"], capsys)
    assert code == 0
    assert json.loads(out)["report"]["dims"] == [1, 0, 0, 0]


def test_verify_in_range(capsys):
    code, out, _ = run(["verify", "--system", "S4", "--j", "0"], capsys)
    assert code == 0
    assert json.loads(out)["report"]["pass"]


def test_verify_out_of_range_needs_flag(capsys):
    code, _, err = run(["verify", "--system", "S4", "--j", "2"], capsys)
    assert code == 4
    assert "allow-out-of-range" in err
    code, out, _ = run(["verify", "--system", "S4", "--j", "2", "--allow-out-of-range"], capsys)
    assert "note" in json.loads(out)["report"]


def test_unknown_system(capsys):
    code, _, _ = run(["realize", "--system", "nope"], capsys)
    assert code == 4


def test_malformed_group_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text("{not json")
    code, _, _ = run(["realize", "--group-file", str(f), "--p", "2"], capsys)
    assert code == 4


def test_group_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"degree": 3, "generators": [[1, 2, 0], [1, 0, 2]], "p": 3}))
    code, out, _ = run(["realize", "--group-file", str(f)], capsys)
    assert code == 0
    assert json.loads(out)["report"]["S_order"] == 3


def test_lambda_and_stv(capsys):
    code, out, _ = run(["lambda", "--system", "S3", "--p", "2", "--module", "factor:1", "--mmax", "2"], capsys)
    assert code == 0
    assert json.loads(out)["report"]["dims"] in ([0, 1, 0], [0, 0, 0])
    code, out, _ = run(["stv", "--system", "S4", "--T", "0", "--j", "0"], capsys)
    assert code == 0


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["realize", "--system", "Q8", "--output", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text())["report"]["n_classes"] == 6


def test_timing_goes_to_stderr_only(capsys):
    _, a, err = run(["realize", "--system", "D8", "--timing", "--seed", "1"], capsys)
    _, b, _ = run(["realize", "--system", "D8", "--seed", "1"], capsys)
    assert a == b
    assert err


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "orbitlimits", "realize", "--system", "S3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["p"] == 3
