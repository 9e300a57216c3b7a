import json

import numpy as np
import pytest

from treepsdo.cli import main
from treepsdo.io import RunConfig, read_spectral, read_tree_function, write_tree_function

N3 = 22


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path / "out")])


def test_help_and_usage_errors(tmp_path, capsys):
    assert main(["--help"]) == 0
    assert "hs-check" in capsys.readouterr().out
    assert main([]) == 2
    assert main(["nope"]) == 2
    assert run(tmp_path, "transform", "--R", "3") == 2
    assert run(tmp_path, "suite", "--tol.roundtrip") == 2
    assert run(tmp_path, "suite", "--tol.roundtrip", "abc") == 2


def test_invalid_config_exit_code(tmp_path, capsys):
    assert run(tmp_path, "suite", "--q", "1") == 2
    assert "q must be >= 2" in capsys.readouterr().err
    assert run(tmp_path, "build", "--R", "3", "--D", "2") == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("q=2\nbogus=1\n")
    assert run(tmp_path, "build", "--config", str(cfg)) == 2


def test_build(tmp_path):
    out = tmp_path / "ball.json"
    assert run(tmp_path, "build", "--q", "3", "--R", "2", "--output", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["n_vertices"] == 17 and doc["n_cylinders"] == 12
    assert abs(doc["plancherel_mass"] - 1) < 1e-10


def test_transform_delta_root_and_zero(tmp_path):
    cfg = RunConfig(q=2, R=3)
    src, dst = tmp_path / "d.json", tmp_path / "d.csv"
    write_tree_function(src, np.eye(N3)[0], 2, 3)
    assert run(tmp_path, "transform", "--R", "3", "--input", str(src), "--output", str(dst)) == 0
    np.testing.assert_array_equal(read_spectral(dst, cfg, 12), 1)
    write_tree_function(src, np.zeros(N3), 2, 3)
    assert run(tmp_path, "transform", "--R", "3", "--input", str(src), "--output", str(dst)) == 0
    np.testing.assert_array_equal(read_spectral(dst, cfg, 12), 0)
    back = tmp_path / "back.json"
    assert run(tmp_path, "invert", "--R", "3", "--input", str(dst), "--output", str(back)) == 0
    np.testing.assert_array_equal(read_tree_function(back, 2, 3, N3), 0)


def test_transform_invert_roundtrip(tmp_path):
    f = tmp_path / "f.json"
    assert run(tmp_path, "sample", "--R", "3", "--output", str(f)) == 0
    F, g = tmp_path / "F.csv", tmp_path / "g.json"
    assert run(tmp_path, "transform", "--R", "3", "--input", str(f), "--output", str(F)) == 0
    assert run(tmp_path, "invert", "--R", "3", "--input", str(F), "--output", str(g)) == 0
    a, b = read_tree_function(f, 2, 3, N3), read_tree_function(g, 2, 3, N3)
    assert np.abs(a - b).max() <= 1e-8 * np.abs(a).max()


def test_mismatched_file_is_usage_error(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(tmp_path, "sample", "--R", "3", "--output", str(f))
    assert run(tmp_path, "transform", "--R", "4", "--input", str(f), "--output",
               str(tmp_path / "x.csv")) == 2
    assert "R=3" in capsys.readouterr().err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, extra in (("f", []), ("g", ["--index", "1"]),
                        ("d", ["--kind", "decomposition"]),
                        ("e", ["--kind", "decomposition", "--index", "1", "--terms", "2"])):
        paths[name] = tmp_path / f"{name}.json"
        assert run(tmp_path, "sample", "--R", "3", "--output", str(paths[name]), *extra) == 0
    return paths


def test_check_commands_pass(tmp_path, files):
    K = tmp_path / "K.csv"
    cases = [
        ("plancherel", "--f", files["f"], "--g", files["g"]),
        ("kernel", "--input", files["d"], "--output", K),
        ("hs-check", "--input", files["d"]),
        ("trace-check", "--input", files["d"]),
        ("adjoint-check", "--input", files["d"]),
        ("product-check", "--eta", files["e"], "--sigma", files["d"]),
        ("schatten", "--input", files["d"]),
        ("lp-report", "--input", files["d"], "--r", "3", "--p", "2", "--q-exp", "1"),
    ]
    for cmd, *rest in cases:
        assert run(tmp_path, cmd, "--R", "3", *map(str, rest)) == 0, cmd
        lines = (tmp_path / "out" / f"{cmd}.jsonl").read_text().splitlines()
        rec = json.loads(lines[0])
        assert rec["passed"] and rec["anchor"] and "residual" in rec and "tolerance" in rec
        assert (tmp_path / "out" / f"{cmd}.csv").exists()
    assert run(tmp_path, "schatten", "--R", "3", "--input", str(K)) == 0


def test_tolerance_override_fails_check(tmp_path, files, capsys):
    args = ["hs-check", "--R", "3", "--input", str(files["d"])]
    assert run(tmp_path, *args, "--tol.hilbert-schmidt", "0") == 1
    assert run(tmp_path, *args, "--tol.hilbert-schmidt=1e-3") == 0
    rec = json.loads((tmp_path / "out" / "hs-check.jsonl").read_text())
    assert rec["tolerance"] == 1e-3


def test_suite_coarse_grid_fails_roundtrip(tmp_path, capsys):
    assert run(tmp_path, "suite", "--R", "3", "--M", "8") == 1
    recs = [json.loads(l) for l in (tmp_path / "out" / "report.jsonl").read_text().splitlines()]
    rt = next(r for r in recs if r["name"] == "roundtrip")
    assert not rt["passed"] and rt["residual"] > rt["tolerance"]
    assert "failed: roundtrip" in capsys.readouterr().err


def test_suite_with_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q=2\nR=2\nM=128\nseed=7\n")
    assert run(tmp_path, "suite", "--config", str(cfg)) == 0
    csv = (tmp_path / "out" / "report.csv").read_text().splitlines()
    assert csv[0] == "name,anchor,residual,tolerance,passed,wall_time"
    assert len(csv) == 14
