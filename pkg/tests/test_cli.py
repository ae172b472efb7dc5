"""CLI contracts: output formats, exit codes, config precedence, manifests."""

import json
import math

import numpy as np
import pytest

from discavg.cli import main
from discavg.interpolation import symmetric_scheme
from discavg.jets import series_from_json_dict
from discavg.maps import henon_model, iterated_map
from discavg.interpolation import evaluate_field


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_weights_stdout_exact(capsys):
    code, out, _ = run(capsys, "weights", "--n0", "1", "--n", "2")
    assert code == 0
    assert out.strip() == "-1/2,0,1/2"


def test_weights_forward_table(capsys):
    code, out, _ = run(capsys, "weights", "--n0", "0", "--n", "2")
    assert code == 0
    assert out.strip() == "-3/2,2,-1/2"


def test_weights_validation_exit_2(capsys):
    code, _, err = run(capsys, "weights", "--n0", "3", "--n", "2")
    assert code == 2
    assert "n0 must satisfy 0 <= n0 <= n" in err


def test_missing_required_option_exit_2(capsys):
    code, _, err = run(capsys, "vfield", "--model", "henon")
    assert code == 2
    assert "--point" in err


def test_unknown_flag_exit_2_with_suggestion(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["weights", "--n0", "1", "--n", "2", "--ouy", "x"])
    assert exc.value.code == 2
    assert "did you mean --out?" in capsys.readouterr().err


def test_unknown_subcommand_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_vfield_matches_library(capsys):
    code, out, _ = run(
        capsys, "vfield", "--model", "henon", "--eps", "1e-3", "--scheme",
        "symmetric", "--m", "2", "--point", "0.1,0.2", "--base-iterate", "4",
    )
    assert code == 0
    got = np.array([float(t) for t in out.strip().split(",")])
    expected = evaluate_field(
        iterated_map(henon_model(eps=1e-3), 4), (0.1, 0.2), symmetric_scheme(2)
    )
    assert np.array_equal(got, expected)


def test_flow_error_csv_columns(capsys):
    code, out, _ = run(
        capsys, "flow-error", "--model", "exp_scalar", "--s", "0.1",
        "--scheme", "forward", "--m-range", "1:4", "--point", "1.0",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "m,error,integrator_estimate,flag"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "1" and first[3] in ("ok", "integrator-limited")


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n0=1\nn=2\n")
    code, out, _ = run(capsys, "weights", "--config", str(cfg))
    assert code == 0 and out.strip() == "-1/2,0,1/2"
    # flags override config
    code, out, _ = run(capsys, "weights", "--config", str(cfg), "--n0", "0")
    assert code == 0 and out.strip() == "-3/2,2,-1/2"


def test_config_unknown_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n0=1\nn=2\nbogus=3\n")
    code, _, err = run(capsys, "weights", "--config", str(cfg))
    assert code == 2 and "bogus" in err


def test_scan_csv_manifest_and_reproducibility(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = [
        "scan", "--model", "henon", "--eps", "1e-3", "--base-iterate", "4",
        "--xmin", "-1", "--xmax", "1", "--ymin", "-1", "--ymax", "1",
        "--res", "8", "--nmax", "4",
    ]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2), "--threads", "3"]) == 0
    capsys.readouterr()
    text1, text2 = out1.read_bytes(), out2.read_bytes()
    assert text1 == text2  # bit-identical across runs and thread counts
    assert text1.decode().splitlines()[0] == "x,y,opt_n,min_G,escaped"
    assert b"\r" not in text1
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "scan"
    assert manifest["parameters"]["res"] == 8
    assert "tool_version" in manifest and "timestamp" in manifest


def test_scan_json_companion_and_plot(tmp_path, capsys):
    out = tmp_path / "s.csv"
    meta = tmp_path / "s.json"
    png = tmp_path / "s.png"
    code = main([
        "scan", "--model", "henon", "--eps", "1e-3", "--base-iterate", "4",
        "--res", "6", "--nmax", "3", "--out", str(out),
        "--out-json", str(meta), "--plot", str(png),
    ])
    capsys.readouterr()
    assert code == 0
    data = json.loads(meta.read_text())
    assert data["resolution"] == 6 and data["n_max"] == 3
    assert data["non_escaped_cells"] + data["escaped_cells"] == 36
    assert png.stat().st_size > 0


def test_invariant_json_and_drift_from_file(tmp_path, capsys):
    inv = tmp_path / "h.json"
    code = main([
        "invariant", "--model", "henon", "--eps-symbolic", "--scheme",
        "symmetric", "--m", "1", "--base-iterate", "4",
        "--cap-xy", "8", "--cap-eps", "1", "--out", str(inv),
    ])
    capsys.readouterr()
    assert code == 0
    payload = json.loads(inv.read_text())
    assert payload["defect_valuations"] == {"pure": 9, "eps_linear": 7}
    series = series_from_json_dict(payload["hamiltonian_display"])
    from discavg.invariants import htilde2_reference

    assert series == htilde2_reference()

    code, out, err = run(
        capsys, "drift", "--model", "henon", "--eps", "1e-3",
        "--h", f"from-file:{inv}", "--point", "0.05,0", "--steps", "100",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,h,drift" and len(lines) == 102
    assert "max_drift" in err


def test_drift_builtin_reference(capsys):
    code, out, err = run(
        capsys, "drift", "--model", "henon", "--eps", "1e-3",
        "--h", "htilde2", "--point", "0,0", "--steps", "10",
    )
    assert code == 0
    drifts = [float(line.split(",")[2]) for line in out.splitlines()[1:]]
    assert drifts == [0.0] * 11  # fixed-point orbit conserves exactly


def test_orbit_escape_exit_3(capsys):
    code, out, err = run(
        capsys, "orbit", "--model", "henon", "--eps", "0", "--point", "5,5",
        "--steps", "200",
    )
    assert code == 3
    assert "escaped" in err


def test_repro_unknown_name_exit_2(capsys):
    code, _, err = run(capsys, "repro", "nope")
    assert code == 2
    assert "unknown repro suite" in err


def test_repro_thm1_passes(capsys):
    code, out, _ = run(capsys, "repro", "thm1-order")
    assert code == 0
    assert "[PASS]" in out and "[FAIL]" not in out
