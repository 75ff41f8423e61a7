"""Grid rendering of interference fields, spot finding and rotation-rate estimation.

Rendering samples the closed-form intensities directly; there is no
numerical beam propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import NumericalQualityError, PhysicsContractError
from .parallel import pmap
from .vortex import BeamGeometry, PatternClass, PatternKind, intensity, radial_peak


@dataclass(frozen=True)
class GridSpec:
    """Transverse sampling grid.

    ``projection`` squashes the image y axis by cos(view angle) to mimic an
    oblique view through the entrance beamsplitter (spots on an ellipse).
    """

    nx: int = 256
    ny: int = 256
    extent: float = 3e-3
    z_planes: tuple = (0.0,)
    t_frames: tuple = (0.0,)
    projection: float = 1.0

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise PhysicsContractError("grid needs at least 16 samples per axis")
        if not self.extent > 0:
            raise PhysicsContractError("grid extent must be positive")
        if not 0 < self.projection <= 1:
            raise PhysicsContractError("projection factor must lie in (0, 1]")
        object.__setattr__(self, "z_planes", tuple(float(z) for z in np.atleast_1d(self.z_planes)))
        object.__setattr__(self, "t_frames", tuple(float(t) for t in np.atleast_1d(self.t_frames)))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.ny)

    @property
    def dx(self) -> float:
        return 2 * self.extent / (self.nx - 1)

    @property
    def dy(self) -> float:
        return 2 * self.extent / (self.ny - 1)

    def polar(self):
        """Physical (r, theta) of every pixel, shape (ny, nx)."""
        X, Y = np.meshgrid(self.x, self.y / self.projection)
        return np.hypot(X, Y), np.arctan2(Y, X)


@dataclass
class InterferenceField:
    values: np.ndarray  # (n_t, n_z, ny, nx), non-negative
    grid: GridSpec
    geometry: BeamGeometry
    pattern: PatternClass
    theta_dot: Optional[float] = None
    segment_index: Optional[int] = None
    meta: dict = field(default_factory=dict)

    @property
    def t_frames(self) -> np.ndarray:
        return np.asarray(self.grid.t_frames)

    @property
    def z_planes(self) -> np.ndarray:
        return np.asarray(self.grid.z_planes)

    def frame(self, t_index: int = 0, z_index: int = 0) -> np.ndarray:
        return self.values[t_index, z_index]

    def power(self, t_index: int = 0, z_index: int = 0) -> float:
        """Discrete transverse integral of one frame (physical area element)."""
        g = self.grid
        return float(self.frame(t_index, z_index).sum() * g.dx * g.dy / g.projection)


def check_nyquist(fringes: int, geom: BeamGeometry, grid: GridSpec) -> None:
    """Reject grids that under-sample 2|l| azimuthal fringes on the ring r = d0."""
    if fringes == 0:
        return
    pixel = max(grid.dx, grid.dy / grid.projection)
    samples = 2 * math.pi * geom.d0 / pixel
    if samples < 2 * fringes:
        raise NumericalQualityError(
            f"grid too coarse: {samples:.1f} samples around r=d0 for {fringes} azimuthal fringes "
            f"(need >= {2 * fringes}); increase nx/ny or reduce extent"
        )


def render(segment, geom: BeamGeometry, grid: GridSpec, scale: float = 1.0,
           ratio: float | None = None, workers=None) -> InterferenceField:
    """Sample the segment's interference intensity on ``grid``.

    ``ratio`` overrides the backward/forward amplitude ratio taken from the
    segment's states.
    """
    fwd, bwd = segment.fwd, segment.bwd
    R = segment.amplitude_ratio if ratio is None else ratio
    pattern = segment.pattern
    if pattern.kind is PatternKind.HELICAL:
        check_nyquist(pattern.fringes, geom, grid)
    r, theta = grid.polar()
    f_norm = fwd.evolve(amplitude=1.0)
    if pattern.kind is PatternKind.UNIFORM or R == 0:
        b_norm = bwd
        R = 0.0
    else:
        b_norm = bwd.evolve(amplitude=R)

    def one(tz):
        t, z = tz
        return intensity(f_norm, b_norm, geom, R, z, r, theta, t, scale * fwd.amplitude**2)

    jobs = [(t, z) for t in grid.t_frames for z in grid.z_planes]
    frames = pmap(one, jobs, workers)
    values = np.stack(frames).reshape(len(grid.t_frames), len(grid.z_planes), grid.ny, grid.nx)
    return InterferenceField(values, grid, geom, pattern, segment.theta_dot, segment.index)


def frame_times(theta_dot: float | None, fringes: int, n_frames: int, t0: float = 0.0,
                default_dt: float = 1.0) -> np.ndarray:
    """Frame times whose spacing rotates the pattern by pi/(8 l) = pi/(4 * fringes)."""
    if theta_dot is None or theta_dot == 0 or fringes == 0:
        dt = default_dt
    else:
        dt = math.pi / (4 * fringes) / abs(theta_dot)
    return t0 + dt * np.arange(n_frames)


def ring_profile(frame: np.ndarray, grid: GridSpec, radius: float, n_theta: int = 2048) -> np.ndarray:
    """Intensity sampled on a centred ring with cubic interpolation."""
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    xs = radius * np.cos(theta)
    ys = radius * np.sin(theta) * grid.projection
    cols = (xs + grid.extent) / grid.dx
    rows = (ys + grid.extent) / grid.dy
    return ndimage.map_coordinates(frame, [rows, cols], order=3, mode="nearest")


def _lag(a: np.ndarray, b: np.ndarray, max_lag: float) -> float:
    """Sub-sample lag L maximizing sum_j a_j b_{j+L}, restricted to |L| < max_lag."""
    n = a.size
    a = a - a.mean()
    b = b - b.mean()
    corr = np.fft.irfft(np.conj(np.fft.rfft(a)) * np.fft.rfft(b), n)
    lags = np.arange(n)
    lags[lags > n // 2] -= n
    window = np.abs(lags) < max_lag
    idx = np.flatnonzero(window)[np.argmax(corr[window])]
    c0, cm, cp = corr[idx], corr[(idx - 1) % n], corr[(idx + 1) % n]
    denom = cm - 2 * c0 + cp
    frac = 0.5 * (cm - cp) / denom if denom != 0 else 0.0
    return lags[idx] + frac


def estimate_rotation_rate(fld: InterferenceField, ring_radius: float | None = None,
                           z_index: int = 0, n_theta: int = 2048) -> float:
    """Signed pattern rotation rate from azimuthal cross-correlation of successive frames.

    The rate follows the fringe-argument convention of the analytic ledger:
    a rate w means I(theta, t + dt) = I(theta + w dt, t).
    """
    if fld.pattern.kind is not PatternKind.HELICAL:
        raise PhysicsContractError("rotation rate is defined for helical patterns only")
    t = fld.t_frames
    if t.size < 3:
        raise PhysicsContractError("need at least 3 frames")
    fringes = fld.pattern.fringes
    if ring_radius is None:
        ring_radius = radial_peak(fringes // 2, fld.geometry, float(fld.z_planes[z_index]))
    dtheta = 2 * math.pi / n_theta
    half_pitch = n_theta / (2 * fringes)
    profiles = [ring_profile(fld.frame(k, z_index), fld.grid, ring_radius, n_theta) for k in range(t.size)]
    shifts = []
    for k in range(t.size - 1):
        lag = _lag(profiles[k + 1], profiles[k], half_pitch)
        if abs(lag) >= 0.9 * half_pitch:
            raise NumericalQualityError(
                "inter-frame rotation approaches half a fringe pitch; rotation is aliased, "
                "shorten the frame spacing"
            )
        shifts.append(lag * dtheta)
    return float(np.sum(shifts) / (t[-1] - t[0]))


@dataclass
class SpotSet:
    centroids: np.ndarray  # (count, 2) image-plane (x, y)
    angles: np.ndarray  # physical azimuth of each spot, ascending
    expected: Optional[int] = None
    equidistant: bool = False

    @property
    def count(self) -> int:
        return len(self.angles)

    @property
    def flagged(self) -> bool:
        return self.expected is not None and self.count != self.expected


def find_spots(fld: InterferenceField, ring_radius: float | None = None, t_index: int = 0,
               z_index: int = 0, angle_tol: float = 0.05) -> SpotSet:
    """Locate the bright lobes of a helical pattern around a ring.

    Pixels in an annulus around ``ring_radius`` are compared with the azimuthal
    mean at their radius; each connected region of positive excess is a spot.
    """
    if fld.pattern.kind is not PatternKind.HELICAL:
        raise PhysicsContractError("spot finding applies to helical patterns only")
    g = fld.grid
    fringes = fld.pattern.fringes
    z = float(fld.z_planes[z_index])
    if ring_radius is None:
        ring_radius = radial_peak(fringes // 2, fld.geometry, z)
    frame = fld.frame(t_index, z_index)
    r, theta = g.polar()
    annulus = (r > 0.5 * ring_radius) & (r < 1.5 * ring_radius)
    nbins = 64
    rbin = np.clip(((r - 0.5 * ring_radius) / ring_radius * nbins).astype(int), 0, nbins - 1)
    counts = np.bincount(rbin[annulus], minlength=nbins)
    sums = np.bincount(rbin[annulus], weights=frame[annulus], minlength=nbins)
    mean = sums / np.maximum(counts, 1)
    excess = np.where(annulus, frame - mean[rbin], 0.0)
    labels, n = ndimage.label(excess > 0)
    if n == 0:
        return SpotSet(np.empty((0, 2)), np.empty(0), fringes)
    idx = np.arange(1, n + 1)
    sizes = ndimage.sum_labels(np.ones_like(frame), labels, idx)
    keep = idx[sizes >= 0.25 * sizes.max()]
    X, Y = np.meshgrid(g.x, g.y)
    w = np.clip(excess, 0, None)
    wsum = ndimage.sum_labels(w, labels, keep)
    cx = ndimage.sum_labels(w * X, labels, keep) / wsum
    cy = ndimage.sum_labels(w * Y, labels, keep) / wsum
    ang = np.mod(np.arctan2(cy / g.projection, cx), 2 * math.pi)
    order = np.argsort(ang)
    ang, cx, cy = ang[order], cx[order], cy[order]
    equidistant = False
    if ang.size >= 2:
        gaps = np.diff(np.append(ang, ang[0] + 2 * math.pi))
        equidistant = bool(np.max(np.abs(gaps - 2 * math.pi / ang.size)) < angle_tol)
    return SpotSet(np.column_stack([cx, cy]), ang, fringes, equidistant)
