"""Rotation-sensing experiment design: integer (l, N) solver, Earth-rotation
transit timing, latitude dependence and coherence feasibility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C, DEFAULT_WAVELENGTH, OMEGA_EARTH
from .errors import PhysicsContractError

_COS_FLOOR = 4 * np.finfo(float).eps


def multiplier(ell: int, n_elements: int) -> int:
    """Shift multiplier 4 l (N + 1/2) = 2 l (2N + 1), exact in integers."""
    return 2 * ell * (2 * n_elements + 1)


@dataclass(frozen=True)
class DesignQuery:
    """Search for 4 l (N + 1/2) = target.

    Unset bounds default to the exhaustive ones, l <= target / 2 and
    N <= (target / 2 - 1) / 2, capped at 1e4.
    """

    target: int
    ell_max: int | None = None
    n_max: int | None = None
    n_min: int = 0

    def __post_init__(self):
        if int(self.target) != self.target or self.target < 1:
            raise PhysicsContractError("target multiplier must be a positive integer")
        if self.ell_max is None:
            object.__setattr__(self, "ell_max", max(1, min(self.target // 2, 10**4)))
        if self.n_max is None:
            object.__setattr__(self, "n_max", max(0, min((self.target // 2 - 1) // 2, 10**4)))
        if self.ell_max < 1 or self.n_max < 0 or self.n_min < 0:
            raise PhysicsContractError("search bounds must be non-negative (ell_max >= 1)")
        if max(self.ell_max, self.n_max) > 10**4:
            raise PhysicsContractError("search bounds are capped at 1e4")


def solve_design(query: DesignQuery) -> list:
    """All (ell, N) with 1 <= ell <= ell_max, n_min <= N <= n_max and 4 ell (N + 1/2) = target."""
    return [
        (ell, n)
        for ell in range(1, query.ell_max + 1)
        for n in range(query.n_min, query.n_max + 1)
        if multiplier(ell, n) == query.target
    ]


def axis_factor(phi: float) -> float:
    """cos(phi), with the rounding residue of cos(pi/2) snapped to zero."""
    c = math.cos(phi)
    return 0.0 if abs(c) < _COS_FLOOR else c


@dataclass(frozen=True)
class ScenarioResult:
    ell: int
    n_elements: int
    phi: float
    frame_rate: float
    delta_omega: float
    theta_dot: float
    spots: int
    transit_period: float  # inf when the pattern is static
    alternations: int
    cos_phi: float

    def report(self) -> str:
        period = "infinite (pattern static)" if math.isinf(self.transit_period) else f"{self.transit_period:.6f} s"
        return "\n".join([
            f"charge l                  : {self.ell}",
            f"OAM-alternating elements N: {self.n_elements}",
            f"axis angle phi            : {self.phi:.6f} rad (cos = {self.cos_phi:.6f})",
            f"frame rate                : {self.frame_rate:.6e} rad/s",
            f"net frequency shift       : {self.delta_omega:.6e} rad/s",
            f"pattern rotation rate     : {self.theta_dot:.6e} rad/s",
            f"spots                     : {self.spots}",
            f"spot transit period       : {period}",
            f"OAM alternations          : {self.alternations}",
        ])


def earth_scenario(ell: int, n_elements: int, phi: float = 0.0,
                   frame_rate: float = OMEGA_EARTH) -> ScenarioResult:
    """Shift, pattern rotation and spot transit period for a rotating interferometer.

    The transit period is the time for the next of the 2 l spots to reach a
    fixed detector window: (pi / l) / |theta_dot|.
    """
    if ell < 1:
        raise PhysicsContractError("ell must be at least 1")
    if n_elements < 0:
        raise PhysicsContractError("N must be non-negative")
    cphi = axis_factor(phi)
    dw = multiplier(ell, n_elements) * frame_rate * cphi
    theta_dot = dw / (2 * ell)
    period = math.inf if theta_dot == 0 else (math.pi / ell) / abs(theta_dot)
    return ScenarioResult(ell, n_elements, phi, frame_rate, dw, theta_dot, 2 * ell, period,
                          2 * n_elements + 1, cphi)


@dataclass(frozen=True)
class CoherenceSpec:
    linewidth: float  # rad/s
    path_difference: float = 0.0  # m

    def __post_init__(self):
        if not self.linewidth > 0:
            raise PhysicsContractError("linewidth must be positive")

    @property
    def coherence_length(self) -> float:
        return 2 * math.pi * C / self.linewidth

    def visibility(self, path_difference: float | None = None) -> float:
        """Triangular first-order visibility model, 1 at zero path mismatch."""
        d = self.path_difference if path_difference is None else path_difference
        return max(0.0, 1.0 - abs(d) / self.coherence_length)


@dataclass(frozen=True)
class CoherenceVerdict:
    feasible: bool
    margin: float
    coherence_length: float
    round_trip: float


def coherence_check(spec: CoherenceSpec, length: float) -> CoherenceVerdict:
    """Interference needs the coherence length to exceed the doubled interferometer length."""
    if length < 0:
        raise PhysicsContractError("interferometer length must be non-negative")
    lc = spec.coherence_length
    margin = math.inf if length == 0 else lc / (2 * length)
    return CoherenceVerdict(lc > 2 * length, margin, lc, 2 * length)


def pc_fringe_argument(path_difference: float, delta_omega: float, conjugated: bool,
                       wavelength: float = DEFAULT_WAVELENGTH) -> float:
    """Fringe phase of the two-arm term.

    Phase conjugation leaves only (dw / c) dL; an ordinary retroreflecting
    (Michelson) arm gives 2 k dL.
    """
    if conjugated:
        return delta_omega / C * path_difference
    return 2 * (2 * math.pi / wavelength) * path_difference
