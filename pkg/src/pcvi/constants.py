"""Physical constants (SI) used throughout the package."""

import math

from scipy import constants as _sc

C = _sc.c  # m/s, exact
HBAR = _sc.hbar  # J s
EPS0 = _sc.epsilon_0  # F/m

#: Earth's rotation rate, taken as one revolution per 86400 s.
OMEGA_EARTH = 2.0 * math.pi / 86400.0

#: Default carrier wavelength (HeNe line).
DEFAULT_WAVELENGTH = 632.8e-9
