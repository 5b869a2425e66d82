"""Physical constants and unit conversions.

Internal convention: every energy, frequency, and rate is an angular
wavenumber in cm^-1 with hbar = 1.  A rate of 1 ps^-1 equals
``RATE_PS_TO_CM`` cm^-1 (~5.3088), and the phase accumulated by a level
of energy E (cm^-1) over t femtoseconds is ``E * t * FS_TO_INTERNAL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# SI values; h, c, kB are exact by definition since the 2019 redefinition.
PLANCK_H = 6.62607015e-34            # J s
HBAR = PLANCK_H / (2.0 * math.pi)    # J s
SPEED_OF_LIGHT_M = 2.99792458e8      # m / s
SPEED_OF_LIGHT_CM = 2.99792458e10    # cm / s
BOLTZMANN = 1.380649e-23             # J / K
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
DEBYE = 1.0e-21 / SPEED_OF_LIGHT_M   # C m

KB_CM_PER_K = BOLTZMANN / (PLANCK_H * SPEED_OF_LIGHT_CM)            # ~0.69503 cm^-1/K
RATE_PS_TO_CM = 1.0 / (2.0 * math.pi * SPEED_OF_LIGHT_CM * 1.0e-12)  # ~5.30884
FS_TO_INTERNAL = 2.0 * math.pi * SPEED_OF_LIGHT_CM * 1.0e-15         # rad per (cm^-1 fs)

# Free-space spontaneous-emission rate in internal units:
#   A(omega, mu) = RADIATIVE_PREFACTOR * omega^3 * mu^2   [cm^-1]
# for omega in cm^-1 and mu in Debye.  This is omega_SI^3 mu_SI^2 /
# (3 pi eps0 hbar c^3), i.e. the textbook two-level emitter rate,
# converted from s^-1 to angular cm^-1.
RADIATIVE_PREFACTOR = (
    (8.0 * math.pi**2 / 3.0) * 1.0e6 * DEBYE**2 / (VACUUM_PERMITTIVITY * HBAR)
) / (2.0 * math.pi * SPEED_OF_LIGHT_CM)


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants bundled for metadata records and external checks."""

    kB_cm_per_K: float = KB_CM_PER_K
    rate_conversion: float = RATE_PS_TO_CM
    radiative_prefactor: float = RADIATIVE_PREFACTOR


CONSTANTS = PhysicalConstants()


def rate_from_time_ps(tau_ps: float) -> float:
    """Decay rate in cm^-1 for a lifetime given in picoseconds."""
    if math.isinf(tau_ps):
        return 0.0
    return RATE_PS_TO_CM / tau_ps


def rate_from_time_ns(tau_ns: float) -> float:
    """Decay rate in cm^-1 for a lifetime given in nanoseconds."""
    if math.isinf(tau_ns):
        return 0.0
    return RATE_PS_TO_CM / (tau_ns * 1.0e3)
