"""Writers for ledger/event/spot CSVs, PGM frames and the run manifest.

CSV headers carry unit suffixes; floats are written with ``repr`` so they
round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from pathlib import Path

import numpy as np

from . import __version__
from .mechanics import element_loads, event_torque


def _f(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _write(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)
    return path


SEGMENT_HEADER = [
    "segment", "z_min_m", "z_max_m", "omega_f_rad_per_s", "omega_b_rad_per_s",
    "shift_f_rad_per_s", "shift_b_rad_per_s", "ell_f_hbar", "ell_b_hbar",
    "delta_omega_rad_per_s", "pattern_class", "theta_dot_rad_per_s",
]

EVENT_HEADER = [
    "event", "element_index", "kind", "direction", "z_m", "ell_in_hbar", "ell_out_hbar",
    "omega_before_rad_per_s", "omega_after_rad_per_s", "spin_before_rad_per_s",
    "spin_after_rad_per_s", "d_omega_applied_rad_per_s", "d_omega_doppler_rad_per_s",
    "d_omega_recoil_rad_per_s", "d_omega_bias_rad_per_s", "angular_impulse_J_s", "torque_N_m",
]


def write_segments_csv(ledger, path):
    rows = []
    for s in ledger.segments:
        rows.append([
            s.index, _f(s.z_min), _f(s.z_max), _f(s.fwd.frequency), _f(s.bwd.frequency),
            _f(s.fwd.shift), _f(s.bwd.shift), s.fwd.ell_z, s.bwd.ell_z,
            _f(s.delta_omega), str(s.pattern), _f(s.theta_dot),
        ])
    return _write(path, SEGMENT_HEADER, rows)


def write_events_csv(ledger, path, power: float):
    from .constants import HBAR

    rows = []
    for k, ev in enumerate(ledger.events):
        rows.append([
            k, ev.element_index, ev.kind.value, ev.direction.value, _f(ev.z_pos), ev.ell_in, ev.ell_out,
            _f(ev.frequency_in), _f(ev.frequency_out), _f(ev.spin_before), _f(ev.spin_after),
            _f(ev.d_omega), _f(ev.d_omega_doppler), _f(ev.d_omega_recoil), _f(ev.d_omega_bias),
            _f(-HBAR * ev.d_ell), _f(event_torque(ev, power)),
        ])
    return _write(path, EVENT_HEADER, rows)


def write_loads_csv(ledger, path, power: float):
    loads = element_loads(ledger, power)
    rows = [
        [i, e.kind.value, _f(e.z_pos), _f(e.spin_rate), _f(ld.torque), _f(ld.force_z)]
        for i, (e, ld) in enumerate(zip(ledger.chain.elements, loads))
    ]
    header = ["element_index", "kind", "z_m", "spin_rate_rad_per_s", "torque_N_m", "force_z_N"]
    return _write(path, header, rows)


def write_totals_csv(rows, path):
    """``rows`` are (quantity, value, unit) triples."""
    return _write(path, ["quantity", "value", "unit"], [[q, _f(v) if isinstance(v, float) else v, u]
                                                         for q, v, u in rows])


def write_spots_csv(spots_per_frame, path):
    rows = []
    for frame, spots in spots_per_frame:
        for j, ((x, y), th) in enumerate(zip(spots.centroids, spots.angles)):
            rows.append([frame, j, _f(x), _f(y), _f(th)])
    return _write(path, ["frame", "spot", "x_m", "y_m", "theta_rad"], rows)


def write_events_record_csv(record, detector_ids, path):
    rows = zip(
        map(_f, record.x), map(_f, record.y), map(_f, record.z), map(_f, record.t),
        detector_ids.tolist(), record.helix_index.tolist(), record.emission.tolist(), record.side.tolist(),
    )
    header = ["x_m", "y_m", "z_m", "t_s", "detector_id", "helix_index", "emission", "side"]
    return _write(path, header, rows)


def write_stats_csv(stats, path):
    rows = [["count", str(w), "", c] for w, c in sorted(stats.counts.items())]
    for (a, b), n in sorted(stats.coincidences.items()):
        rows.append(["coincidences", str(a), str(b), n])
        g = stats.g2[(a, b)]
        rows.append(["g2_zero", str(a), str(b), "no-data" if g is None else _f(g)])
    rows.append(["visibility", "", "", _f(stats.visibility)])
    rows.append(["emissions", "", "", stats.n_emissions])
    return _write(path, ["statistic", "window_a", "window_b", "value"], rows)


def write_pgm(path, image: np.ndarray, vmax: float, bits: int = 8):
    """Binary PGM (P5); row 0 of ``image`` is the bottom (smallest y) of the picture."""
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    maxval = 255 if bits == 8 else 65535
    scaled = np.zeros_like(image) if vmax <= 0 else np.clip(image / vmax, 0, 1)
    data = np.rint(scaled[::-1] * maxval).astype(">u2" if bits == 16 else np.uint8)
    path = Path(path)
    h, w = data.shape
    with path.open("wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        fh.write(data.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    # exactly one whitespace byte separates maxval from the raster
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise ValueError("not a binary PGM")
    w, h, maxval = map(int, m.groups())
    dtype = np.uint8 if maxval < 256 else ">u2"
    return np.frombuffer(raw, dtype=dtype, count=w * h, offset=m.end()).reshape(h, w)


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_dir, command: str, config: dict | None, outputs, seed=None, results=None):
    out_dir = Path(out_dir)
    manifest = {
        "tool": "pcvi",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "results": results or {},
        "outputs": [
            {"file": Path(p).name, "sha256": sha256(p), "bytes": Path(p).stat().st_size} for p in outputs
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o)}")
