"""Physical constants (SI) shared by every module.

Functions that need a constant take it as a keyword argument defaulting to
the value here, so tests can switch to natural units (``hbar=1``).
"""
import math

H = 6.62607015e-34  # J s, exact
HBAR = H / (2 * math.pi)
M_E = 9.1093837015e-31  # kg
C = 299792458.0  # m/s, exact
K_B = 1.380649e-23  # J/K, exact

# Electron Compton wavelength in the rounded form used by the measurement
# scheme (h / (m_e c) = 2.42631e-12 m). Back-scatter shift is 2 * LAMBDA_CE.
LAMBDA_CE = 2.4e-12  # m
LAMBDA_CE_CODATA = H / (M_E * C)
