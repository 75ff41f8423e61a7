"""Command-line front end: ``pcvi simulate | render | mc | solve``.

Exit codes: 0 success, 2 config error, 3 physics-contract violation,
4 numerical-quality rejection.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .chain import run_chain
from .config import load_config
from .constants import OMEGA_EARTH
from .errors import ConfigError, NumericalQualityError, PhysicsContractError
from .patterns import GridSpec, estimate_rotation_rate, find_spots, frame_times, render
from .sampler import ABOVE, BELOW, DetectorWindow, assign_windows, coincidences, four_windows, sample_events
from .scenario import DesignQuery, earth_scenario, solve_design
from .vortex import PatternKind, radial_peak

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NUMERIC = 0, 2, 3, 4

FRAME_RATE_HELP = (
    "frame_rate_rad_per_s in the setup file models a rotating vehicle: it is added to the "
    "spin rate of every element (spin rates in the file are relative to the vehicle)."
)


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finite(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args.out)
    ledger = run_chain(cfg.chain, cfg.exact_recoil)
    files = [
        io.write_segments_csv(ledger, out / "segments.csv"),
        io.write_events_csv(ledger, out / "events.csv", cfg.power),
        io.write_loads_csv(ledger, out / "loads.csv", cfg.power),
        io.write_totals_csv([
            ("net_delta_omega", ledger.net_delta_omega, "rad/s"),
            ("alternations", ledger.alternations, "count"),
            ("segments", len(ledger.segments), "count"),
        ], out / "totals.csv"),
    ]
    results = {"net_delta_omega_rad_per_s": ledger.net_delta_omega, "alternations": ledger.alternations}
    io.write_manifest(out, "simulate", cfg.resolved, files, results=results)
    print(f"net delta_omega = {ledger.net_delta_omega!r} rad/s, {ledger.alternations} OAM alternations")
    return EXIT_OK


def _segment(ledger, index):
    if not 0 <= index < len(ledger.segments):
        raise PhysicsContractError(f"segment {index} out of range (0..{len(ledger.segments) - 1})")
    return ledger.segments[index]


def cmd_render(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args.out)
    ledger = run_chain(cfg.chain, cfg.exact_recoil)
    seg = _segment(ledger, args.segment)
    geom = cfg.geometry
    g = cfg.grid
    ell = abs(seg.fwd.ell_z)
    z = g.get("z_m", 0.5 * (seg.z_min + seg.z_max))
    extent = g.get("extent_m", 3 * geom.d0 + 1.5 * radial_peak(ell, geom, z))
    n_frames = args.frames or g["n_frames"]
    fringes = seg.pattern.fringes
    if "frame_dt_s" in g:
        times = g["frame_dt_s"] * np.arange(n_frames)
    else:
        times = frame_times(seg.theta_dot, fringes, n_frames)
    grid = GridSpec(g["nx"], g["ny"], extent, (z,), tuple(times), g["projection"])
    fld = render(seg, geom, grid)
    vmax = float(fld.values.max())
    files = [io.write_pgm(out / f"frame_{k:04d}.pgm", fld.frame(k), vmax, g["bits"]) for k in range(n_frames)]
    results = {"segment": seg.index, "pattern_class": str(seg.pattern), "z_m": z,
               "frame_times_s": [float(t) for t in times], "theta_dot_ledger_rad_per_s": seg.theta_dot}
    if seg.pattern.kind is PatternKind.HELICAL:
        spots = [(k, find_spots(fld, t_index=k)) for k in range(n_frames)]
        files.append(io.write_spots_csv(spots, out / "spots.csv"))
        results["spot_count"] = spots[0][1].count
        results["spots_flagged"] = any(s.flagged for _, s in spots)
        if n_frames >= 3:
            results["theta_dot_estimate_rad_per_s"] = estimate_rotation_rate(fld)
    else:
        results["spots"] = "not-applicable"
    io.write_manifest(out, "render", cfg.resolved, files, results=results)
    print(f"rendered {n_frames} frame(s) of segment {seg.index} ({seg.pattern})")
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args.out)
    mc = cfg.mc
    seed = mc["seed"] if args.seed is None else args.seed
    ledger = run_chain(cfg.chain, cfg.exact_recoil)
    seg = _segment(ledger, mc["segment"])
    geom = cfg.geometry
    z = mc.get("z_m", 0.5 * (seg.z_min + seg.z_max))
    rec = sample_events(seg, geom, mc["n_photons"], seed, z_plane=z, rate=mc["rate_per_s"],
                        ratio=mc.get("amplitude_ratio"), which_way=mc["which_way"], split=mc["split"],
                        mean_photons=mc.get("mean_photons"))
    if "windows" in mc:
        windows = [DetectorWindow(w["id"], w["theta_min_rad"], w["theta_max_rad"], w["r_min_m"], w["r_max_m"],
                                  ABOVE if w["side"] == "above" else BELOW) for w in mc["windows"]]
    else:
        windows = four_windows(radial_peak(seg.fwd.ell_z, geom, z))
    stats = coincidences(rec, windows, mc["gate_s"])
    files = [
        io.write_events_record_csv(rec, assign_windows(rec, windows), out / "events.csv"),
        io.write_stats_csv(stats, out / "stats.csv"),
    ]
    results = {"events": len(rec), "visibility": stats.visibility,
               "total_cross_window_coincidences": int(sum(stats.coincidences.values()))}
    io.write_manifest(out, "mc", cfg.resolved, files, seed=seed, results=results)
    print(f"{len(rec)} events, visibility {stats.visibility:.4f}, "
          f"{results['total_cross_window_coincidences']} cross-window coincidences")
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = {}
    resolved = None
    if args.config:
        cfg = load_config(args.config)
        sc, resolved = cfg.scenario, cfg.resolved
    out = _outdir(args.out)
    phi = args.latitude if args.latitude is not None else sc.get("latitude_rad", 0.0)
    rate = args.frame_rate if args.frame_rate is not None else sc.get("frame_rate_rad_per_s", OMEGA_EARTH)
    target = args.target if args.target is not None else sc.get("target_multiplier")
    ell = args.ell if args.ell is not None else sc.get("ell")
    n_el = args.elements if args.elements is not None else sc.get("n_elements")
    ell_max = args.ell_max if args.ell_max is not None else sc.get("ell_max")
    n_max = args.n_max if args.n_max is not None else sc.get("n_max")
    n_min = args.n_min if args.n_min is not None else sc.get("n_min", 1)
    if target is None and ell is None:
        raise ConfigError("solve needs --target M or --ell L (with --elements N)")

    lines, rows, scenarios = [], [], []
    results = {}
    if target is not None:
        filtered = solve_design(DesignQuery(target, ell_max, n_max, n_min))
        everything = solve_design(DesignQuery(target, ell_max, n_max, 0))
        results["solutions"] = [list(s) for s in filtered]
        results["solutions_including_n0"] = [list(s) for s in everything]
        lines.append(f"target multiplier M = {target}: 4 l (N + 1/2) = M")
        lines.append(f"  solutions with N >= {n_min}: {filtered or 'none'}")
        lines.append(f"  solutions with N >= 0: {everything or 'none'}")
        scenarios += [(s, f"N>={n_min}") for s in filtered]
        scenarios += [(s, "N>=0") for s in everything if s not in filtered]
    if ell is not None:
        scenarios.append(((ell, n_el or 0), "direct"))
    for (l, n), tag in scenarios:
        res = earth_scenario(l, n, phi, rate)
        lines += ["", f"[{tag}]", res.report()]
        rows.append([l, n, tag, io._f(phi), io._f(rate), io._f(res.delta_omega), io._f(res.theta_dot),
                     res.spots, io._f(res.transit_period), res.alternations, io._f(res.cos_phi)])
        results.setdefault("scenarios", []).append({
            "ell": l, "n_elements": n, "filter": tag, "transit_period_s": _finite(res.transit_period),
            "delta_omega_rad_per_s": res.delta_omega, "alternations": res.alternations,
        })
    text = "\n".join(lines) + "\n"
    report = out / "scenario.txt"
    report.write_text(text)
    header = ["ell", "n_elements", "filter", "phi_rad", "frame_rate_rad_per_s", "delta_omega_rad_per_s",
              "theta_dot_rad_per_s", "spots", "transit_period_s", "alternations", "cos_phi"]
    files = [report, io._write(out / "scenario.csv", header, rows)]
    io.write_manifest(out, "solve", resolved, files, results=results)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pcvi", description="Phase-conjugating vortex interferometer simulator.",
                                epilog=FRAME_RATE_HELP)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="JSON setup file")
        sp.add_argument("--out", default="pcvi_out", help="output directory")

    s = sub.add_parser("simulate", help="run the chain ledger", epilog=FRAME_RATE_HELP)
    common(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("render", help="render a segment's interference frames", epilog=FRAME_RATE_HELP)
    common(s)
    s.add_argument("--segment", type=int, default=0, help="segment id (0 = entrance)")
    s.add_argument("--frames", type=int, help="number of frames")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("mc", help="Monte Carlo single-photon detection", epilog=FRAME_RATE_HELP)
    common(s)
    s.add_argument("--seed", type=int, help="override the setup file's seed (unsigned 64-bit)")
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("solve", help="design solver and Earth-rotation scenarios")
    common(s, config_required=False)
    s.add_argument("--target", type=int, help="target multiplier M = 4 l (N + 1/2)")
    s.add_argument("--latitude", type=float, help="angle between interferometer axis and rotation axis (rad)")
    s.add_argument("--frame-rate", type=float, help=f"frame rotation rate (rad/s, default {OMEGA_EARTH:.6e})")
    s.add_argument("--ell", type=int, help="charge for a direct scenario")
    s.add_argument("--elements", type=int, help="number N of OAM-alternating elements")
    s.add_argument("--ell-max", type=int, help="largest charge searched (default: exhaustive)")
    s.add_argument("--n-max", type=int, help="largest N searched (default: exhaustive)")
    s.add_argument("--n-min", type=int, help="smallest N accepted by the filtered design search (default 1)")
    s.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalQualityError as exc:
        print(f"numerical quality: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PhysicsContractError as exc:
        print(f"physics contract: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
