"""Command-line interface: subcommands, exit codes, determinism."""

import json

import numpy as np
import pytest

from windhel.cli import fmt, run


def test_unknown_subcommand_is_usage_error(capsys):
    assert run(["frobnicate"]) == 1


def test_no_subcommand_is_usage_error(capsys):
    assert run([]) == 1


def test_missing_file_is_data_error(capsys):
    code = run(["helicity", "--field", "/nonexistent/path.wh3d"])
    assert code == 2
    assert "/nonexistent/path.wh3d" in capsys.readouterr().err


def test_make_field_and_helicity_both_forms(tmp_path, capsys):
    field = tmp_path / "tube.wh3d"
    assert run(["make-field", "--kind", "tube", "--n", "20", "--out", str(field)]) == 0
    capsys.readouterr()
    out_json = tmp_path / "rep.json"
    assert run(["helicity", "--field", str(field), "--form", "both",
                "--out", str(out_json)]) == 0
    lines = capsys.readouterr().out.splitlines()
    vals = {}
    for line in lines:
        parts = line.split()
        if parts and parts[0] in ("helicity_gauge", "helicity_pairwise"):
            vals[parts[0]] = float(parts[1])
    assert set(vals) == {"helicity_gauge", "helicity_pairwise"}
    a, b = vals["helicity_gauge"], vals["helicity_pairwise"]
    assert abs(a - b) <= 1e-12 * max(abs(a), abs(b))
    doc = json.loads(out_json.read_text())
    assert doc["artifact"]["name"] == "windhel"
    assert doc["total"] == pytest.approx(b, rel=1e-15)
    assert doc["reconstruction_abs_error"] <= 1e-12 * abs(b)


def test_arch_mutual_equal_angles_zero(capsys):
    # collinear, non-overlapping footprints: nu = rho = 0, H = 0
    assert run(["arch-mutual", "--a-pos", "0,0", "--a-neg", "1,0",
                "--b-pos", "2,0", "--b-neg", "3,0"]) == 0
    out = capsys.readouterr().out
    h = [line for line in out.splitlines() if line.startswith("H_mutual")][0]
    assert float(h.split()[1]) == 0.0


def test_arch_mutual_crossing_is_data_error(capsys):
    assert run(["arch-mutual", "--a-pos", "0,0", "--a-neg", "2,0",
                "--b-pos", "1,1", "--b-neg", "1,-1"]) == 2


def test_trace_winding_tube_mutual_pipeline(tmp_path, capsys):
    field = tmp_path / "helix.wh3d"
    assert run(["make-field", "--kind", "helix", "--n", "24", "--turns", "1",
                "--out", str(field)]) == 0
    curves = tmp_path / "axes.whcrv"
    assert run(["trace", "--field", str(field),
                "--seed", "0.45,0,0", "--seed=-0.45,0,0",
                "--out", str(curves)]) == 0
    capsys.readouterr()
    assert run(["winding", "--curves", str(curves)]) == 0
    out = capsys.readouterr().out
    l_line = [line for line in out.splitlines() if line.startswith("L ")][0]
    assert float(l_line.split()[1]) == pytest.approx(1.0, abs=5e-2)
    assert run(["tube-mutual", "--curves", str(curves),
                "--flux-i", "2.0", "--flux-j", "3.0"]) == 0
    out = capsys.readouterr().out
    h_line = [line for line in out.splitlines() if line.startswith("H_mutual")][0]
    assert float(h_line.split()[1]) == pytest.approx(6.0, rel=6e-2)


def test_label_and_masked_helicity(tmp_path, capsys):
    field = tmp_path / "dome.wh3d"
    assert run(["make-field", "--kind", "dome", "--n", "24", "--out", str(field)]) == 0
    mask = tmp_path / "dome.whmsk"
    assert run(["label", "--field", str(field), "--out", str(mask)]) == 0
    out = capsys.readouterr().out
    assert "2 regions" in out
    rep = tmp_path / "rep.json"
    assert run(["helicity", "--field", str(field), "--mask", str(mask),
                "--form", "pairwise", "--out", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert len(doc["self"]) == 2


def test_make_series_and_flux(tmp_path, capsys):
    series = tmp_path / "patches.whps"
    assert run(["make-series", "--n", "40", "--steps", "8", "--out", str(series)]) == 0
    capsys.readouterr()
    assert run(["flux", "--series", str(series)]) == 0
    out = capsys.readouterr().out
    total = [line for line in out.splitlines() if line.startswith("flux_total ")][0]
    accum = [line for line in out.splitlines()
             if line.startswith("flux_total_winding_accumulation")][0]
    assert float(total.split()[1]) == -float(accum.split()[1])
    assert float(total.split()[1]) == pytest.approx(-4.0, rel=5e-2)


def test_report_determinism(tmp_path, capsys):
    field = tmp_path / "tube.wh3d"
    run(["make-field", "--kind", "tube", "--n", "16", "--out", str(field)])
    reps = []
    for name in ("r1.json", "r2.json"):
        out_json = tmp_path / name
        assert run(["helicity", "--field", str(field), "--form", "pairwise",
                    "--out", str(out_json)]) == 0
        reps.append(out_json.read_bytes())
    capsys.readouterr()
    assert reps[0] == reps[1]


def test_config_file_defaults(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 12, "b0": 2.0}))
    field = tmp_path / "u.wh3d"
    assert run(["make-field", "--kind", "uniform", "--config", str(cfg),
                "--out", str(field)]) == 0
    from windhel import load_field
    f = load_field(field)
    assert f.grid.nx == 12
    assert (f.bz == 2.0).all()


def test_fmt_roundtrips_float64():
    rng = np.random.default_rng(0)
    for v in rng.normal(size=20) * 10.0**rng.integers(-12, 12, size=20):
        assert float(fmt(v)) == v


def test_flux_with_label_stack(tmp_path, capsys):
    import numpy as np
    from windhel import Grid3, RegionMask, rotating_patch_series, save_mask, save_series
    from windhel.flux import PlaneGrid

    plane = PlaneGrid(40, 40, 2 / 39, 2 / 39, (-1.0, -1.0))
    s = rotating_patch_series(1.0, 1.0, 0.9, 2 * np.pi, 1.0, 12, plane)
    series_path = tmp_path / "s.whps"
    save_series(s, series_path)
    stack_grid = Grid3(plane.nx, plane.ny, s.ntimes, plane.dx, plane.dy, 1.0,
                       (plane.origin[0], plane.origin[1], 0.0))
    stack_path = tmp_path / "labels.whmsk"
    save_mask(RegionMask(stack_grid, s.labels), stack_path)
    rep_path = tmp_path / "rep.json"
    assert run(["flux", "--series", str(series_path), "--labels", str(stack_path),
                "--out", str(rep_path)]) == 0
    doc = json.loads(rep_path.read_text())
    assert doc["self"]["1"] == pytest.approx(-1.0, rel=5e-2)
    assert doc["mutual"][1][2] == pytest.approx(-1.0, rel=5e-2)
    out = capsys.readouterr().out
    assert "flux_total" in out


def test_config_does_not_override_explicit_flag(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 12, "b0": 2.0}))
    field = tmp_path / "u.wh3d"
    assert run(["make-field", "--kind", "uniform", "--config", str(cfg),
                "--b0", "5.0", "--out", str(field)]) == 0
    from windhel import load_field
    f = load_field(field)
    assert f.grid.nx == 12       # from config
    assert (f.bz == 5.0).all()   # explicit flag wins


def test_winding_needs_two_curves(tmp_path, capsys):
    from windhel import Polyline3, save_curves
    one = tmp_path / "one.whcrv"
    save_curves([Polyline3(np.array([[0, 0, 0], [0, 0, 1.0]]))], one)
    assert run(["winding", "--curves", str(one)]) == 2
    assert "two curves" in capsys.readouterr().err


def test_negative_tolerance_is_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps-bz": -1.0}))
    assert run(["helicity", "--field", "x.wh3d", "--config", str(cfg)]) == 1
