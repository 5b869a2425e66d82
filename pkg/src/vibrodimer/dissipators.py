"""Lindblad decay channels: exciton recombination and reaction-center trapping.

Both collapse operators lower the electronic state to the shared ground
manifold with the vibrational quantum numbers untouched.  The trapping
channel additionally feeds a flux counter: the population harvested at
the reaction center is the time integral of tau_trap^-1 * rho_AA, which
keeps the generator trace-preserving and the steady state well defined
while still exposing the harvested population as an observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import EXC_A, EXC_D, HilbertSpace, site_operator
from .units import rate_from_time_ns, rate_from_time_ps

TAG_REC_A = "rec-A"
TAG_REC_D = "rec-D"
TAG_TRAP = "trap"


@dataclass(frozen=True)
class DecayParams:
    tau_rec_ns: float           # recombination time, same on both sites
    tau_trap_ps: float
    trap_enabled: bool = True

    def __post_init__(self):
        if not self.tau_rec_ns > 0:
            raise ValueError("tau_rec_ns must be positive")
        if self.trap_enabled and not self.tau_trap_ps > 0:
            raise ValueError("tau_trap_ps must be positive when trapping is enabled")

    @property
    def rec_rate(self) -> float:
        return rate_from_time_ns(self.tau_rec_ns)

    @property
    def trap_rate(self) -> float:
        if not self.trap_enabled:
            return 0.0
        return rate_from_time_ps(self.tau_trap_ps)


@dataclass(frozen=True)
class LindbladTerm:
    collapse: np.ndarray = field(repr=False)   # site basis
    rate: float = 0.0                          # cm^-1
    tag: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be non-negative")


def build_recombination(space: HilbertSpace, params: DecayParams) -> list[LindbladTerm]:
    """One collapse |g><eps_i| per site, shared recombination time."""
    if not space.include_ground:
        raise ValueError("recombination needs the electronic ground state in the basis")
    rate = params.rec_rate
    return [
        LindbladTerm(site_operator(space, "Lowering", EXC_A).mat.real, rate, TAG_REC_A),
        LindbladTerm(site_operator(space, "Lowering", EXC_D).mat.real, rate, TAG_REC_D),
    ]


def build_trapping(space: HilbertSpace, params: DecayParams) -> LindbladTerm | None:
    """Acceptor-side harvesting; None when trapping is disabled."""
    if not params.trap_enabled or params.trap_rate == 0.0:
        return None
    if not space.include_ground:
        raise ValueError("trapping needs the electronic ground state in the basis")
    return LindbladTerm(
        site_operator(space, "Lowering", EXC_A).mat.real, params.trap_rate, TAG_TRAP
    )
