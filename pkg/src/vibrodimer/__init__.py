"""Vibronic dimer transport under incoherent illumination.

Steady states and dynamics of a two-chromophore system with explicit
intramolecular modes, driven by a blackbody radiation bath, relaxed by
Drude-Lorentz phonon baths, and drained by recombination and
reaction-center trapping.
"""

from .baths import DrudeLorentzBath, RadiationBath, bose_occupation, halfside_rate, spectral_weight
from .dissipators import DecayParams, LindbladTerm, build_recombination, build_trapping
from .dynamics import PropagationSpec, StepInstabilityError, TimeSeries, propagate
from .model import (
    BasisState,
    DimerConfig,
    HilbertSpace,
    OperatorMatrix,
    SiteParams,
    build_basis,
    build_hamiltonian,
    diagonalize,
    manifold_eigensystem,
    site_operator,
)
from .ness import (
    DegenerateSteadyStateError,
    GeneratorBundle,
    NessResult,
    NonConvergenceError,
    YieldUndefinedError,
    assemble_liouvillian,
    build_generator_bundle,
    characterize_ness,
    compute_currents,
    compute_transport,
    solve_ness,
)
from .redfield import CouplingChannel, RedfieldTensor, apply_tensor, build_redfield_tensor
from .units import CONSTANTS

__version__ = "0.1.0"
