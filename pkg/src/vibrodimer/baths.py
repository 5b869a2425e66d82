"""Bath descriptors, spectral weights, and half-Fourier relaxation kernels.

Kernel sign convention (used consistently by the Redfield builder): the
argument of :func:`halfside_rate` is the system's energy change in the
elementary bath event, so

* ``omega > 0``  system moves up, bath quantum absorbed: W(w) n(w)
* ``omega < 0``  system moves down, quantum emitted: W(|w|) (n+1)

with ``W`` the spectral weight below and ``n`` the Bose occupation.  This
is the real part of the standard one-sided Fourier transform of the bath
correlation function C(t) = (1/pi) Int_0^inf dw W(w) [coth(bw/2) cos wt -
i sin wt]; a golden-rule population transfer rate is twice the kernel.
The Drude-Lorentz kernel tends to ``2 lambda kB T / gamma`` (the standard
overdamped pure-dephasing strength) at zero frequency; the radiation
kernel vanishes there (no pure dephasing from light).  The radiative
weight carries half the free-space spontaneous-rate prefactor so that an
excited two-level emitter with dipole mu decays at exactly the textbook
rate.  The principal-value (Lamb-shift) imaginary part is dropped; the
returned values are complex with zero imaginary part to make that
explicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import KB_CM_PER_K, RADIATIVE_PREFACTOR


@dataclass(frozen=True)
class DrudeLorentzBath:
    """Overdamped phonon continuum: weight 2*gamma*lambda*w/(w^2+gamma^2).

    ``lambda_reorg = 0`` is allowed and produces an identically zero kernel
    (used to switch a coupling channel off).
    """

    lambda_reorg: float   # reorganization energy (cm^-1)
    gamma_cut: float      # cutoff frequency (cm^-1)
    temperature: float    # K

    def __post_init__(self):
        if self.lambda_reorg < 0:
            raise ValueError("lambda_reorg must be non-negative")
        if self.gamma_cut <= 0:
            raise ValueError("gamma_cut must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class RadiationBath:
    """Blackbody radiation with the free-space w^3 weight.

    ``dipole_debye`` scales the weight by mu^2 so that the downward kernel
    at gap w equals half the spontaneous-emission rate of a two-level
    emitter with that dipole (times n+1).  The absorption/emission flags
    zero the corresponding kernel branch; they exist for current
    bookkeeping diagnostics, not for physical runs.
    """

    temperature: float
    dipole_debye: float = 1.0
    absorption: bool = True
    emission: bool = True

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.dipole_debye < 0:
            raise ValueError("dipole_debye must be non-negative")


Bath = DrudeLorentzBath | RadiationBath


def bose_occupation(omega, temperature: float):
    """Bose-Einstein occupation n(omega) for omega > 0 (cm^-1), T in K."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("bose_occupation requires omega > 0")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    x = omega / (KB_CM_PER_K * temperature)
    with np.errstate(over="ignore"):
        n = 1.0 / np.expm1(x)
    return n if n.ndim else float(n)


def spectral_weight(bath: Bath, omega):
    """Spectral weight W(omega) entering the kernels, for omega > 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("spectral_weight requires omega > 0")
    if isinstance(bath, DrudeLorentzBath):
        w = 2.0 * bath.gamma_cut * bath.lambda_reorg * omega / (omega**2 + bath.gamma_cut**2)
    elif isinstance(bath, RadiationBath):
        # folded radiative constant: half the spontaneous-rate prefactor,
        # since the emitter's population decay rate is twice the kernel
        w = 0.5 * RADIATIVE_PREFACTOR * bath.dipole_debye**2 * omega**3
    else:
        raise TypeError(f"unknown bath type {type(bath)!r}")
    return w if w.ndim else float(w)


def _occupation_factors(aw: np.ndarray, temperature: float, upward: np.ndarray):
    """n on upward branches, n+1 on downward ones, safely for aw -> 0+."""
    x = aw / (KB_CM_PER_K * temperature)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        up = 1.0 / np.expm1(x)          # n
        down = 1.0 / (-np.expm1(-x))    # n + 1
    return np.where(upward, up, down)


def halfside_rate(bath: Bath, omega):
    """Relaxation kernel at signed frequency omega; see module docstring."""
    omega = np.asarray(omega, dtype=float)
    aw = np.abs(omega)
    upward = omega > 0

    safe_aw = np.where(aw == 0.0, 1.0, aw)
    if isinstance(bath, DrudeLorentzBath):
        lam, gam, t = bath.lambda_reorg, bath.gamma_cut, bath.temperature
        # W(aw) * occupation, with the aw -> 0 limit 2*lam*kB*T/gam
        base = 2.0 * gam * lam * safe_aw / (safe_aw**2 + gam**2)
        occ = _occupation_factors(safe_aw, t, upward)
        val = np.where(omega == 0.0, 2.0 * lam * KB_CM_PER_K * t / gam, base * occ)
    elif isinstance(bath, RadiationBath):
        base = 0.5 * RADIATIVE_PREFACTOR * bath.dipole_debye**2 * safe_aw**3
        occ = _occupation_factors(safe_aw, bath.temperature, upward)
        val = np.where(omega == 0.0, 0.0, base * occ)
        if not bath.absorption:
            val = np.where(upward, 0.0, val)
        if not bath.emission:
            val = np.where(omega < 0, 0.0, val)
    else:
        raise TypeError(f"unknown bath type {type(bath)!r}")

    out = np.asarray(val, dtype=complex)
    return out if out.ndim else complex(out)
