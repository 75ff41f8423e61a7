"""Monte Carlo single-photon detection for the vortex interferometer.

Positions are drawn exactly by rejection: the radial coordinate comes from
the ring density (r^2 is Gamma distributed), the azimuth is uniform, and the
fringe factor is accepted against its bound (1 + R)^2.  Work is cut into
fixed-size chunks, each with its own Philox stream spawned from the seed, so
the record does not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .errors import NumericalQualityError, PhysicsContractError
from .parallel import pmap
from .vortex import BeamGeometry, PatternKind, fringe_phase

CHUNK = 1 << 16
ABOVE, BELOW = 0, 1


@dataclass(frozen=True)
class DetectorWindow:
    id: int
    theta_min: float
    theta_max: float
    r_min: float
    r_max: float
    side: int = ABOVE

    def contains(self, r, theta, side) -> np.ndarray:
        width = (self.theta_max - self.theta_min) % (2 * math.pi) or 2 * math.pi
        rel = np.mod(theta - self.theta_min, 2 * math.pi)
        return (side == self.side) & (r >= self.r_min) & (r < self.r_max) & (rel < width)


@dataclass
class DetectionRecord:
    """Structure-of-arrays event list; one row per detected photon."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    t: np.ndarray
    side: np.ndarray
    emission: np.ndarray
    helix_index: np.ndarray  # -1 where not applicable
    toroidal_index: np.ndarray  # half-wavelength cell; meaningful only when has_toroidal
    pattern_theta: np.ndarray  # azimuth in the co-rotating pattern frame
    n_emissions: int
    fringes: int = 0
    has_toroidal: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.x.size

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    @property
    def theta(self) -> np.ndarray:
        return np.mod(np.arctan2(self.y, self.x), 2 * math.pi)

    def identical(self, other: "DetectionRecord") -> bool:
        names = ("x", "y", "z", "t", "side", "emission", "helix_index", "toroidal_index")
        return all(np.array_equal(getattr(self, n), getattr(other, n)) for n in names)


def assign_helix(theta, t, z, segment, geom: BeamGeometry) -> np.ndarray:
    """Index of the helical fringe whose lobe contains ``theta`` at time ``t``.

    Lobe ``j`` is centred where (l_f - l_b) theta + phase(z, t) = 2 pi j.
    Ties on nodal lines go to the lower index.
    """
    if segment.pattern.kind is not PatternKind.HELICAL:
        raise PhysicsContractError("helix assignment needs a helical segment")
    n = segment.fwd.ell_z - segment.bwd.ell_z
    x = (n * np.asarray(theta, dtype=float) + fringe_phase(segment.fwd, segment.bwd, geom, z, t)) / (2 * math.pi)
    return np.mod(np.ceil(x - 0.5), abs(n)).astype(np.int64)


def assign_toroidal(z, z_ref: float, wavelength: float) -> np.ndarray:
    """Half-wavelength cell index floor((z - z_ref) / (lambda / 2))."""
    return np.floor((np.asarray(z, dtype=float) - z_ref) / (0.5 * wavelength)).astype(np.int64)


def _child_seeds(seed: int, n_chunks: int):
    return np.random.SeedSequence(seed).spawn(n_chunks)


def sample_events(segment, geom: BeamGeometry, n_photons: int, seed: int, *,
                  z_plane: float | None = None, z_range: tuple | None = None,
                  rate: float = 1e6, ratio: float | None = None, which_way: bool = False,
                  split: float = 0.5, mean_photons: float | None = None,
                  efficiency_floor: float = 1e-3, workers=None) -> DetectionRecord:
    """Draw ``n_photons`` detection events from the segment's interference intensity.

    Parameters
    ----------
    z_plane, z_range : transverse plane (default: the segment midpoint) or, for
        volumetric sampling, an axial interval sampled uniformly.
    rate : mean emission rate (1/s); emission times are a Poisson process.
    ratio : backward/forward amplitude ratio (default: from the segment).
    which_way : drop the cross term (which-way information destroys fringes).
    split : probability the beamsplitter sends a photon to the upper side.
    mean_photons : None for a true single-photon source; otherwise photons per
        emission are Poisson distributed with this mean (attenuated laser).
    """
    if n_photons < 1:
        raise PhysicsContractError("n_photons must be at least 1")
    if seed is None:
        raise PhysicsContractError("an explicit seed is required")
    R = segment.amplitude_ratio if ratio is None else float(ratio)
    if not 0 <= R <= 1:
        raise PhysicsContractError("amplitude ratio must lie in [0, 1]")
    kind = segment.pattern.kind
    coherent = not which_way and R > 0 and kind is not PatternKind.UNIFORM
    if kind is PatternKind.UNIFORM:
        R = 0.0
    fwd, bwd = segment.fwd, segment.bwd
    n_az = fwd.ell_z - bwd.ell_z if kind is PatternKind.HELICAL else 0
    a = abs(fwd.ell_z)
    if z_range is None:
        zp = 0.5 * (segment.z_min + segment.z_max) if z_plane is None else float(z_plane)
        z_lo = z_hi = zp
    else:
        z_lo, z_hi = map(float, z_range)

    n_chunks = -(-n_photons // CHUNK)
    sizes = [min(CHUNK, n_photons - i * CHUNK) for i in range(n_chunks)]
    seeds = [s.spawn(2) for s in _child_seeds(seed, n_chunks)]

    # emission times first (sequential, cheap) so chunks can be sampled independently
    emission, times, n_emissions = [], [], 0
    t_offset = 0.0
    for size, (s_time, _) in zip(sizes, seeds):
        rng = np.random.Generator(np.random.Philox(s_time))
        if mean_photons is None:
            per = np.ones(size, dtype=np.int64)
        else:
            per = []
            total = 0
            while total < size:
                k = rng.poisson(mean_photons, size)
                per.append(k)
                total += int(k.sum())
            per = np.concatenate(per)
            cut = np.searchsorted(np.cumsum(per), size)
            per = per[: cut + 1].copy()
            per[-1] -= int(per.sum()) - size
        gaps = rng.exponential(1.0 / rate, per.size)
        t_em = t_offset + np.cumsum(gaps)
        t_offset = float(t_em[-1])
        emission.append(n_emissions + np.repeat(np.arange(per.size), per))
        times.append(np.repeat(t_em, per))
        n_emissions += per.size

    bound = (1.0 + R) ** 2

    def chunk(i):
        size = sizes[i]
        rng = np.random.Generator(np.random.Philox(seeds[i][1]))
        t = times[i]
        r = np.empty(size)
        th = np.empty(size)
        z = np.empty(size)
        side = np.empty(size, dtype=np.int8)
        pending = np.arange(size)
        proposed = 0
        while pending.size:
            m = pending.size
            proposed += m
            zc = rng.uniform(z_lo, z_hi, m) if z_hi > z_lo else np.full(m, z_lo)
            w2 = geom.width(zc) ** 2
            rc = np.sqrt(rng.gamma(a + 1, 0.5 * w2))
            tc = rng.uniform(0.0, 2 * math.pi, m)
            u = rng.random(m)
            sc = (rng.random(m) >= split).astype(np.int8)
            if coherent:
                phase = fringe_phase(fwd, bwd, geom, zc, t[pending]) + n_az * tc
                ok = u * bound < 1.0 + R**2 + 2.0 * R * np.cos(phase)
            else:
                ok = np.ones(m, dtype=bool)
            acc = pending[ok]
            r[acc], th[acc], z[acc], side[acc] = rc[ok], tc[ok], zc[ok], sc[ok]
            pending = pending[~ok]
            if proposed > 20 * size and size / proposed < efficiency_floor:
                raise NumericalQualityError(f"rejection efficiency {size / proposed:.2e} below floor")
        return r, th, z, side

    parts = pmap(chunk, range(n_chunks), workers)
    r = np.concatenate([p[0] for p in parts])
    th = np.concatenate([p[1] for p in parts])
    z = np.concatenate([p[2] for p in parts])
    side = np.concatenate([p[3] for p in parts])
    t = np.concatenate(times)
    em = np.concatenate(emission)

    if kind is PatternKind.HELICAL:
        helix = assign_helix(th, t, z, segment, geom)
        ptheta = np.mod(th + fringe_phase(fwd, bwd, geom, z, t) / n_az, 2 * math.pi)
    else:
        helix = np.full(th.size, -1, dtype=np.int64)
        ptheta = th
    volumetric = z_hi > z_lo and kind is PatternKind.TOROIDAL
    tor = assign_toroidal(z, geom.z_pc, geom.wavelength) if volumetric else np.zeros(th.size, dtype=np.int64)
    return DetectionRecord(
        x=r * np.cos(th), y=r * np.sin(th), z=z, t=t, side=side, emission=em,
        helix_index=helix, toroidal_index=tor, pattern_theta=ptheta,
        n_emissions=n_emissions, fringes=abs(n_az), has_toroidal=volumetric,
        meta={"seed": seed, "ratio": R, "which_way": which_way, "rate": rate},
    )


def assign_windows(record: DetectionRecord, windows: Sequence[DetectorWindow]) -> np.ndarray:
    """Detector id of each event, -1 if it lands in no window."""
    ids = np.full(len(record), -1, dtype=np.int64)
    r, th = record.r, record.theta
    for w in windows:
        hit = w.contains(r, th, record.side)
        if np.any(hit & (ids >= 0)):
            raise PhysicsContractError("detector windows must be pairwise disjoint")
        ids[hit] = w.id
    return ids


@dataclass
class CoincidenceStats:
    counts: dict  # window id -> detections
    coincidences: dict  # (id_a, id_b) -> coincident emissions
    g2: dict  # (id_a, id_b) -> g2(0) or None when a window is empty
    visibility: float
    n_emissions: int


def azimuthal_histogram(record: DetectionRecord, bins: int = 360) -> np.ndarray:
    return np.bincount((record.pattern_theta / (2 * math.pi) * bins).astype(np.int64) % bins,
                       minlength=bins)


def expected_azimuthal_counts(n: int, fringes: int, R: float, bins: int = 360) -> np.ndarray:
    """Expected bin counts of the normalized fringe profile (pattern frame)."""
    edges = 2 * math.pi * np.arange(bins + 1) / bins
    cross = 0.0
    if fringes:
        cross = 2 * R / fringes * np.diff(np.sin(fringes * edges))
    return n * (np.diff(edges) * (1 + R**2) + cross) / (2 * math.pi * (1 + R**2))


def visibility(record: DetectionRecord, bins: int = 360) -> float:
    h = azimuthal_histogram(record, bins).astype(float)
    return float((h.max() - h.min()) / (h.max() + h.min()))


def coincidences(record: DetectionRecord, windows: Sequence[DetectorWindow], gate: float,
                 bins: int = 360) -> CoincidenceStats:
    """Per-window counts, same-emission coincidences within ``gate`` and g2(0)."""
    ids = assign_windows(record, windows)
    counts = {w.id: int(np.count_nonzero(ids == w.id)) for w in windows}
    hit = ids >= 0
    em, t, wid = record.emission[hit], record.t[hit], ids[hit]
    coinc, g2 = {}, {}
    wins = sorted(w.id for w in windows)
    for i, a in enumerate(wins):
        for b in wins[i + 1:]:
            ea, eb = em[wid == a], em[wid == b]
            common = np.intersect1d(ea, eb)
            if common.size:
                ta = {e: tt for e, tt in zip(em[wid == a], t[wid == a])}
                tb = {e: tt for e, tt in zip(em[wid == b], t[wid == b])}
                n_ab = sum(1 for e in common if abs(ta[e] - tb[e]) <= gate)
            else:
                n_ab = 0
            coinc[(a, b)] = n_ab
            na, nb = counts[a], counts[b]
            g2[(a, b)] = n_ab * record.n_emissions / (na * nb) if na and nb else None
    return CoincidenceStats(counts, coinc, g2, visibility(record, bins), record.n_emissions)


def occupancy_chisquare(record: DetectionRecord):
    """Chi-square test of helix occupancies against uniform; returns (counts, p)."""
    if not record.fringes:
        raise PhysicsContractError("occupancy test needs a helical record")
    counts = np.bincount(record.helix_index, minlength=record.fringes)
    return counts, float(stats.chisquare(counts).pvalue)


def four_windows(ring_radius: float, half_width: float = 0.4) -> list:
    """Two detectors above and two below the beamsplitter, one per helix lobe (l = 1)."""
    r0, r1 = 0.5 * ring_radius, 1.5 * ring_radius
    out = []
    for side in (ABOVE, BELOW):
        for k, centre in enumerate((0.0, math.pi)):
            out.append(DetectorWindow(2 * side + k + 1, centre - half_width, centre + half_width, r0, r1, side))
    return out
