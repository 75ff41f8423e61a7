"""Simulation of single-axis phase-conjugating vortex interferometers.

Photon states are pushed through a chain of rotating OAM-inverting elements
(:mod:`pcvi.chain`), the resulting interference patterns are rendered and
analysed (:mod:`pcvi.patterns`), single-photon detections are sampled
(:mod:`pcvi.sampler`) and rotation-sensing experiments are planned
(:mod:`pcvi.scenario`).
"""

__version__ = "0.1.0"

from .chain import (  # noqa: E402
    Chain,
    ElementKind,
    OpticalElement,
    Segment,
    SegmentLedger,
    alternating_chain,
    reflect_pcm,
    reflect_retro,
    run_chain,
    transmit_oam_inverter,
)
from .errors import ConfigError, NumericalQualityError, PCVIError, PhysicsContractError  # noqa: E402
from .vortex import (  # noqa: E402
    BeamGeometry,
    Direction,
    PatternClass,
    PatternKind,
    PhotonState,
    classify_pattern,
    helical_intensity,
    lg_field,
    toroidal_intensity,
)
