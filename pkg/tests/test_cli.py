import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pcvi import io
from pcvi.cli import main
from pcvi.config import SCHEMA, load_config
from pcvi.errors import ConfigError

BEAM = {"d0_m": 1e-3, "ell": 2}


def prism_pcm(spin=0.5):
    return {
        "beam": dict(BEAM),
        "chain": [
            {"kind": "Beamsplitter", "z_m": 0.0},
            {"kind": "DovePrism", "z_m": 0.1, "spin_rate_rad_per_s": spin},
            {"kind": "PhaseConjugatingMirror", "z_m": 0.2},
        ],
    }


def prism_retro():
    cfg = prism_pcm()
    cfg["chain"][2]["kind"] = "Retroreflector"
    return cfg


def alternating(n, ell, spin, **extra):
    return {"beam": {"d0_m": 1e-3, "ell": ell},
            "chain": {"alternating": {"n_elements": n, "spin_rate_rad_per_s": spin}}, **extra}


def write(tmp_path, cfg, name="setup.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(*argv):
    return main([str(a) for a in argv])


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_simulate_single_prism(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--config", write(tmp_path, prism_pcm()), "--out", out) == 0
    segs = read_csv(out / "segments.csv")
    assert [float(s["delta_omega_rad_per_s"]) for s in segs] == [-4 * 2 * 0.5, 0.0]
    assert all(s["pattern_class"].startswith("Helical") for s in segs)
    totals = {r["quantity"]: r for r in read_csv(out / "totals.csv")}
    assert float(totals["net_delta_omega"]["value"]) == -4.0
    assert totals["net_delta_omega"]["unit"] == "rad/s"
    events = read_csv(out / "events.csv")
    assert len(events) == 3
    loads = read_csv(out / "loads.csv")
    assert float(loads[2]["force_z_N"]) == pytest.approx(2e-3 / 299792458.0)


def test_simulate_retroreflector(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--config", write(tmp_path, prism_retro()), "--out", out) == 0
    segs = read_csv(out / "segments.csv")
    assert all(float(s["delta_omega_rad_per_s"]) == 0 for s in segs)
    assert all(s["pattern_class"].startswith("Toroidal") for s in segs)


def test_simulate_long_alternating_chain(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--config", write(tmp_path, alternating(60, 6, 1e-3)), "--out", out) == 0
    m = manifest(out)
    assert abs(m["results"]["net_delta_omega_rad_per_s"]) == pytest.approx(1452e-3, rel=1e-12)
    assert m["results"]["alternations"] == 121
    assert len(read_csv(out / "segments.csv")) == 61


def test_frame_rate_applies_to_every_element(tmp_path):
    cfg = prism_pcm(spin=-2.0)
    cfg["frame_rate_rad_per_s"] = 1.0
    out = tmp_path / "o"
    assert run("simulate", "--config", write(tmp_path, cfg), "--out", out) == 0
    assert abs(manifest(out)["results"]["net_delta_omega_rad_per_s"]) == 6 * 2 * 1.0
    spins = [float(r["spin_rate_rad_per_s"]) for r in read_csv(out / "loads.csv")]
    assert spins == [0.0, -1.0, 1.0]


def test_csv_headers_carry_units(tmp_path):
    out = tmp_path / "o"
    run("simulate", "--config", write(tmp_path, prism_pcm()), "--out", out)
    raw = (out / "segments.csv").read_bytes()
    assert raw.count(b"\r\n") == 3
    header = raw.split(b"\r\n")[0].decode().split(",")
    for name in header:
        assert name in ("segment", "pattern_class") or any(
            name.endswith(u) for u in ("_m", "_rad_per_s", "_hbar")), name


def test_manifest_config_round_trip(tmp_path):
    cfg = alternating(3, 2, 0.25, exact_recoil=True)
    a, b = tmp_path / "a", tmp_path / "b"
    run("simulate", "--config", write(tmp_path, cfg), "--out", a)
    echoed = manifest(a)["config"]
    assert echoed["chain"]["alternating"]["spacing_m"] == 0.1
    assert echoed["beam"]["wavelength_m"] == 632.8e-9
    run("simulate", "--config", write(tmp_path, echoed, "echo.json"), "--out", b)
    assert manifest(b)["config"] == echoed
    for name in ("segments.csv", "events.csv", "loads.csv", "totals.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    for entry in manifest(a)["outputs"]:
        assert entry["sha256"] == io.sha256(a / entry["file"])


def test_render_helical_frames(tmp_path):
    cfg = alternating(1, 4, 0.3, grid={"nx": 128, "ny": 128, "n_frames": 8, "bits": 16})
    out = tmp_path / "o"
    assert run("render", "--config", write(tmp_path, cfg), "--out", out) == 0
    m = manifest(out)["results"]
    assert m["spot_count"] == 8 and not m["spots_flagged"]
    assert m["theta_dot_estimate_rad_per_s"] == pytest.approx(m["theta_dot_ledger_rad_per_s"], rel=0.01)
    frames = sorted(out.glob("frame_*.pgm"))
    assert len(frames) == 8
    img = io.read_pgm(frames[0])
    assert img.shape == (128, 128) and img.dtype == np.dtype(">u2") and img.max() > 60000
    spots = read_csv(out / "spots.csv")
    assert {r["frame"] for r in spots} == {str(k) for k in range(8)}
    assert sum(r["frame"] == "0" for r in spots) == 8


def test_render_frames_flag_and_segment(tmp_path):
    out = tmp_path / "o"
    assert run("render", "--config", write(tmp_path, prism_retro()), "--out", out, "--segment", 1, "--frames", 2) == 0
    m = manifest(out)["results"]
    assert m["spots"] == "not-applicable" and m["pattern_class"].startswith("Toroidal")
    assert len(list(out.glob("frame_*.pgm"))) == 2


def test_pgm_round_trip(tmp_path):
    img = np.linspace(0, 1, 32 * 16).reshape(16, 32)
    img[0, 0] = 10 / 255  # a whitespace byte right after the header
    p = io.write_pgm(tmp_path / "x.pgm", img, 1.0, 8)
    back = io.read_pgm(p)
    np.testing.assert_array_equal(back[::-1], np.rint(img * 255).astype(np.uint8))


def test_mc_statistics_and_reproducibility(tmp_path):
    cfg = alternating(0, 1, 0.3, mc={"n_photons": 200000, "seed": 7, "amplitude_ratio": 0.9})
    path = write(tmp_path, cfg)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert run("mc", "--config", path, "--out", a) == 0
    res = manifest(a)["results"]
    assert res["total_cross_window_coincidences"] == 0
    assert res["visibility"] == pytest.approx(2 * 0.9 / 1.81, abs=0.02)
    run("mc", "--config", path, "--out", b)
    assert (a / "events.csv").read_bytes() == (b / "events.csv").read_bytes()
    assert (a / "stats.csv").read_bytes() == (b / "stats.csv").read_bytes()
    run("mc", "--config", path, "--out", c, "--seed", 8)
    assert manifest(c)["seed"] == 8
    assert (a / "events.csv").read_bytes() != (c / "events.csv").read_bytes()
    stats = read_csv(a / "stats.csv")
    g2 = [r["value"] for r in stats if r["statistic"] == "g2_zero"]
    assert g2 and all(float(v) == 0 for v in g2)


def test_mc_custom_windows(tmp_path):
    windows = [{"id": 5, "theta_min_rad": 0, "theta_max_rad": math.pi, "r_min_m": 0, "r_max_m": 1},
               {"id": 6, "theta_min_rad": math.pi, "theta_max_rad": 2 * math.pi, "r_min_m": 0, "r_max_m": 1}]
    cfg = alternating(0, 1, 0.3, mc={"n_photons": 2000, "windows": windows})
    out = tmp_path / "o"
    assert run("mc", "--config", write(tmp_path, cfg), "--out", out) == 0
    ids = {r["detector_id"] for r in read_csv(out / "events.csv")}
    assert ids <= {"5", "-1", "6"} and "5" in ids


def test_solve_target(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("solve", "--target", 24, "--out", out) == 0
    res = manifest(out)["results"]
    assert res["solutions"] == [[4, 1]]
    assert [4, 1] in res["solutions_including_n0"] and [12, 0] in res["solutions_including_n0"]
    hour = [s for s in res["scenarios"] if s["ell"] == 4][0]
    assert abs(hour["transit_period_s"] - 3600) < 1e-9
    assert "3600.000000 s" in capsys.readouterr().out
    rows = read_csv(out / "scenario.csv")
    assert rows[0]["ell"] == "4"


def test_solve_direct_scenario(tmp_path):
    out = tmp_path / "o"
    assert run("solve", "--ell", 6, "--elements", 60, "--latitude", math.pi / 2, "--out", out) == 0
    sc = manifest(out)["results"]["scenarios"][0]
    assert sc["transit_period_s"] == "inf" and sc["alternations"] == 121
    assert "inf" in (out / "scenario.csv").read_text()


def test_exit_code_config_error(tmp_path, capsys):
    bad = prism_pcm()
    bad["chain"][1]["spin_rate_rad_per_s"] = "fast"
    assert run("simulate", "--config", write(tmp_path, bad), "--out", tmp_path / "o") == 2
    assert "chain/1/spin_rate_rad_per_s" in capsys.readouterr().err
    p = tmp_path / "broken.json"
    p.write_text('{"beam": ')
    assert run("simulate", "--config", p, "--out", tmp_path / "o") == 2
    assert run("simulate", "--config", tmp_path / "missing.json", "--out", tmp_path / "o") == 2
    assert run("solve", "--out", tmp_path / "o") == 2


def test_exit_code_physics_violation(tmp_path, capsys):
    cfg = prism_pcm(spin=1e16)  # shift exceeds the optical carrier
    assert run("simulate", "--config", write(tmp_path, cfg), "--out", tmp_path / "o") == 3
    assert run("render", "--config", write(tmp_path, prism_pcm(), "ok.json"), "--out", tmp_path / "o",
               "--segment", 9) == 3
    assert "physics contract" in capsys.readouterr().err


def test_exit_code_numerical_quality(tmp_path, capsys):
    cfg = alternating(0, 6, 0.1, grid={"nx": 16, "ny": 16, "extent_m": 5e-3})
    assert run("render", "--config", write(tmp_path, cfg), "--out", tmp_path / "o") == 4
    assert "grid too coarse" in capsys.readouterr().err


def test_loaded_config_matches_schema_defaults(tmp_path):
    cfg = load_config(write(tmp_path, prism_pcm()))
    assert cfg.power == SCHEMA["properties"]["beam"]["properties"]["power_W"]["default"]
    assert cfg.grid["nx"] == 256 and cfg.mc["seed"] == 0
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, {"beam": BEAM}, "nochain.json"))


def test_shipped_schema_matches_code():
    from pathlib import Path

    shipped = Path(__file__).resolve().parents[1] / "docs" / "config.schema.json"
    assert json.loads(shipped.read_text()) == json.loads(json.dumps(SCHEMA))


@pytest.mark.parametrize("name", ["single_prism.json", "retroreflector.json", "hour_scenario.json",
                                  "minute_scenario.json"])
def test_shipped_example_configs_load(name):
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "demos" / "configs" / name
    load_config(path)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pcvi.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "frame_rate_rad_per_s" in proc.stdout and "simulate" in proc.stdout
