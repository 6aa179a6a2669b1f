"""Physical constants and reference values (SI units)."""

from scipy import constants as _sc

C0 = _sc.c  # 299 792 458 m/s, exact
HBAR = _sc.hbar
EPS0 = _sc.epsilon_0

# Cs D2 line, 6S1/2 -> 6P3/2 centroid.
# D. A. Steck, "Cesium D Line Data", rev. 2.2.1 (2019): 351.725 718 50(11) THz.
CS_D2_FREQUENCY = 351.72571850e12

# Dipole (half-width) decay rate of Cs D2 divided by 2*pi; Gamma/2pi = 5.234 MHz.
CS_D2_GAMMA_OVER_2PI = 2.6e6

REFERENCE_WAVELENGTH = 852.53e-9
REFERENCE_WAIST_DIAMETER = 500e-9
REFERENCE_WAIST_LENGTH = 5e-3
