"""Photon states, beam geometry and the analytic vortex field/intensity formulas.

Frequencies are split into a carrier ``omega`` and an accumulated Doppler
``shift``.  Rotational Doppler shifts in this problem are sub-Hz against a
~3e15 rad/s carrier, far below float64 resolution of the sum, so every
difference of frequencies is formed carrier-to-carrier and shift-to-shift.
For the same reason the time phase of a field is evaluated in a frame that
rotates at the geometry's reference carrier; that common factor drops out of
every intensity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import C, DEFAULT_WAVELENGTH
from .errors import PhysicsContractError


class Direction(enum.Enum):
    FORWARD = "ForwardZ"
    BACKWARD = "BackwardZ"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.FORWARD else -1


@dataclass(frozen=True)
class PhotonState:
    """Single-mode photon (or CW beam) state.

    Parameters
    ----------
    omega : float
        Carrier angular frequency (rad/s).
    ell_z : int
        Signed OAM projection on lab +Z in units of hbar.
    direction : Direction
    amplitude : float
        Field scale relative to the input beam.
    shift : float
        Accumulated rotational Doppler shift (rad/s); the photon frequency
        is ``omega + shift``.
    """

    omega: float
    ell_z: int
    direction: Direction = Direction.FORWARD
    amplitude: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if int(self.ell_z) != self.ell_z:
            raise PhysicsContractError(f"ell_z must be an integer, got {self.ell_z!r}")
        object.__setattr__(self, "ell_z", int(self.ell_z))
        if not self.omega > 0 or not self.omega + self.shift > 0:
            raise PhysicsContractError(
                f"photon frequency must stay positive (omega={self.omega}, shift={self.shift})"
            )
        if self.amplitude < 0:
            raise PhysicsContractError("amplitude must be non-negative")

    @property
    def frequency(self) -> float:
        return self.omega + self.shift

    @property
    def k(self) -> float:
        return self.frequency / C

    def evolve(self, **changes) -> "PhotonState":
        return replace(self, **changes)


@dataclass(frozen=True)
class BeamGeometry:
    """Vortex radius, carrier wavelength and phase-conjugate mirror position.

    The Rayleigh range ``z_r = k * d0**2`` is always derived, never stored.
    """

    d0: float
    wavelength: float = DEFAULT_WAVELENGTH
    z_pc: float = 0.0

    def __post_init__(self):
        if not self.d0 > 0:
            raise PhysicsContractError("d0 must be positive")
        if not self.wavelength > 0:
            raise PhysicsContractError("wavelength must be positive")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def omega(self) -> float:
        """Reference carrier angular frequency."""
        return C * self.k

    @property
    def z_r(self) -> float:
        return self.k * self.d0**2

    def width(self, z) -> np.ndarray:
        """Beam radius parameter at lab position ``z``."""
        zeta = (np.asarray(z, dtype=float) - self.z_pc) / self.z_r
        return self.d0 * np.sqrt(1.0 + zeta**2)

    def photon(self, ell_z: int, amplitude: float = 1.0) -> PhotonState:
        """Forward photon at the reference carrier."""
        return PhotonState(self.omega, ell_z, Direction.FORWARD, amplitude)


class PatternKind(enum.Enum):
    HELICAL = "Helical"
    TOROIDAL = "Toroidal"
    UNIFORM = "UniformNoCrossTerm"


@dataclass(frozen=True)
class PatternClass:
    kind: PatternKind
    fringes: int = 0  # 2|ell| azimuthal fringes for helical patterns

    def __str__(self) -> str:
        if self.kind is PatternKind.HELICAL:
            return f"Helical({self.fringes})"
        return self.kind.value


def classify_pattern(fwd: PhotonState, bwd: PhotonState) -> PatternClass:
    if abs(fwd.ell_z) != abs(bwd.ell_z):
        raise PhysicsContractError(
            f"counter-propagating states must share |ell| ({fwd.ell_z} vs {bwd.ell_z})"
        )
    if fwd.amplitude == 0 or bwd.amplitude == 0:
        return PatternClass(PatternKind.UNIFORM)
    if fwd.ell_z == bwd.ell_z:
        return PatternClass(PatternKind.TOROIDAL)
    return PatternClass(PatternKind.HELICAL, abs(fwd.ell_z - bwd.ell_z))


def delta_omega(fwd: PhotonState, bwd: PhotonState) -> float:
    """Frequency splitting omega_b - omega_f."""
    return (bwd.omega - fwd.omega) + (bwd.shift - fwd.shift)


def rotation_rate(fwd: PhotonState, bwd: PhotonState):
    """Pattern rotation rate delta_omega / (ell_f - ell_b), or None if not helical."""
    if classify_pattern(fwd, bwd).kind is not PatternKind.HELICAL:
        return None
    return delta_omega(fwd, bwd) / (fwd.ell_z - bwd.ell_z)


def radial_peak(ell: int, geom: BeamGeometry, z: float | None = None) -> float:
    """Radius of maximum intensity of the |ell| ring."""
    w = geom.d0 if z is None else float(geom.width(z))
    return w * math.sqrt(abs(ell) / 2.0)


def normalization(ell: int, geom: BeamGeometry) -> float:
    """2^(|l|+1) / (pi |l|! d0^2); makes the single-beam profile integrate to one."""
    a = abs(ell)
    return 2.0 ** (a + 1) / (math.pi * math.factorial(a) * geom.d0**2)


def envelope(ell: int, geom: BeamGeometry, z, r, scale: float = 1.0) -> np.ndarray:
    """Normalized single-beam intensity profile (unit transverse power times ``scale``).

    The ``(1 + zeta**2)**-|l|`` factor tracks the growth of the ring radius
    with distance and keeps the transverse power independent of ``z``.
    """
    a = abs(ell)
    zeta = (np.asarray(z, dtype=float) - geom.z_pc) / geom.z_r
    s = 1.0 + zeta**2
    rho2 = (np.asarray(r, dtype=float) / geom.d0) ** 2
    return scale * normalization(ell, geom) * rho2**a / s ** (a + 1) * np.exp(-2.0 * rho2 / s)


def lg_field(state: PhotonState, geom: BeamGeometry, z, r, theta, t) -> np.ndarray:
    """Complex Laguerre-Gaussian vortex envelope of ``state`` at (z, r, theta, t).

    Forward states carry ``exp(+ikz')``, backward ``exp(-ikz')`` with
    ``z' = z - z_pc``; the azimuthal phase is ``exp(i ell_z theta)``.
    """
    if np.any(np.asarray(r) < 0):
        raise PhysicsContractError("r must be non-negative")
    a = abs(state.ell_z)
    zp = np.asarray(z, dtype=float) - geom.z_pc
    zeta = zp / geom.z_r
    q = 1.0 + 1j * zeta
    rho = np.asarray(r, dtype=float) / geom.d0
    detuning = (state.omega - geom.omega) + state.shift
    phase = -detuning * np.asarray(t, dtype=float) + state.direction.sign * state.k * zp
    phase = phase + state.ell_z * np.asarray(theta, dtype=float)
    amp = state.amplitude * rho**a * (1.0 + zeta**2) ** (-a / 2.0) / q
    return amp * np.exp(-(rho**2) / q) * np.exp(1j * phase)


def fringe_phase(fwd: PhotonState, bwd: PhotonState, geom: BeamGeometry, z, t) -> np.ndarray:
    """Theta-independent part of the cross-term argument: dw*t + (k_f + k_b) z'."""
    zp = np.asarray(z, dtype=float) - geom.z_pc
    return delta_omega(fwd, bwd) * np.asarray(t, dtype=float) + (fwd.k + bwd.k) * zp


def _bracket(R, phase):
    return 1.0 + R**2 + 2.0 * R * np.cos(phase)


def _check_R(R):
    if not 0.0 <= R <= 1.0:
        raise PhysicsContractError(f"R must lie in [0, 1], got {R}")


def helical_intensity(fwd, bwd, geom, R, z, r, theta, t, scale=1.0):
    """Archimedean-screw intensity of a conjugate pair (ell_f = -ell_b).

    ``R`` is the backward/forward amplitude ratio; ``scale`` stands in for
    ``2 eps0 c |E_f|^2``.
    """
    if fwd.ell_z != -bwd.ell_z or fwd.ell_z == 0:
        raise PhysicsContractError(
            f"helical_intensity needs a conjugate pair, got ell_f={fwd.ell_z}, ell_b={bwd.ell_z}"
        )
    _check_R(R)
    phase = fringe_phase(fwd, bwd, geom, z, t) + (fwd.ell_z - bwd.ell_z) * np.asarray(theta, dtype=float)
    env = envelope(fwd.ell_z, geom, z, r, scale * fwd.amplitude**2)
    return env * _bracket(R, phase)


def toroidal_intensity(fwd, bwd, geom, R, z, r, theta, t, scale=1.0):
    """Stacked-ring intensity for equal OAM projections (theta-independent)."""
    if fwd.ell_z != bwd.ell_z:
        raise PhysicsContractError(
            f"toroidal_intensity needs equal projections, got ell_f={fwd.ell_z}, ell_b={bwd.ell_z}"
        )
    _check_R(R)
    phase = fringe_phase(fwd, bwd, geom, z, t)
    env = envelope(fwd.ell_z, geom, z, r, scale * fwd.amplitude**2)
    return env * _bracket(R, phase) * np.ones_like(np.asarray(theta, dtype=float))


def intensity(fwd, bwd, geom, R, z, r, theta, t, scale=1.0):
    """Dispatch to the helical, toroidal or incoherent form by pattern class."""
    kind = classify_pattern(fwd, bwd).kind
    if kind is PatternKind.HELICAL:
        return helical_intensity(fwd, bwd, geom, R, z, r, theta, t, scale)
    if kind is PatternKind.TOROIDAL and R > 0:
        return toroidal_intensity(fwd, bwd, geom, R, z, r, theta, t, scale)
    env = envelope(fwd.ell_z, geom, z, r, scale * fwd.amplitude**2)
    return env * (1.0 + R**2) * np.ones_like(np.asarray(theta, dtype=float))
