"""Full Liouvillian assembly, steady-state solver, and transport observables.

The generator collects the unitary part, the non-secular relaxation
tensors of every bath channel, and the Lindblad decay terms, all in the
manifold-resolved eigenbasis.  The steady state is obtained from a dense
LU solve with one row replaced by the trace constraint, polished by
fixed-point iterative refinement; refinement matters because the physical
currents are ~10 orders of magnitude below the Liouvillian norm and the
continuity bookkeeping is evaluated from residual-level quantities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.linalg import lu_factor, lu_solve

from .baths import DrudeLorentzBath, RadiationBath
from .dissipators import (
    TAG_REC_A,
    TAG_REC_D,
    TAG_TRAP,
    DecayParams,
    LindbladTerm,
    build_recombination,
    build_trapping,
)
from .model import (
    EXC_A,
    EXC_D,
    DimerConfig,
    Eigensystem,
    HilbertSpace,
    build_basis,
    build_hamiltonian,
    manifold_eigensystem,
    site_operator,
)
from .redfield import CouplingChannel, RedfieldTensor, build_redfield_tensor
from .superops import diag_functional, lindblad_super, vec

TAG_PB_ELEC_A = "PB-elec-A"
TAG_PB_ELEC_D = "PB-elec-D"
TAG_PB_VIB_A = "PB-vib-A"
TAG_PB_VIB_D = "PB-vib-D"
TAG_RB_ABS = "RB-abs"
TAG_RB_EMI = "RB-emi"


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one zero mode."""


class NonConvergenceError(RuntimeError):
    """The steady-state solve did not reach the residual tolerance."""


class YieldUndefinedError(RuntimeError):
    """Quantum yield requested with zero absorption current."""


class PositivityWarning(UserWarning):
    """Steady state has a negative eigenvalue beyond the monitor threshold."""


@dataclass
class GeneratorBundle:
    """Assembled pieces of the master-equation generator (one eigenbasis)."""

    dimer: DimerConfig
    space: HilbertSpace
    eig: Eigensystem
    unitary: np.ndarray = field(repr=False)
    redfield: dict[str, RedfieldTensor] = field(repr=False, default_factory=dict)
    lindblad: dict[str, tuple[LindbladTerm, np.ndarray]] = field(repr=False, default_factory=dict)
    decay: DecayParams | None = None
    light_enabled: bool = True
    _total: np.ndarray | None = field(repr=False, default=None)

    def total(self) -> np.ndarray:
        if self._total is None:
            out = self.unitary.astype(complex).copy()
            for tensor in self.redfield.values():
                out += tensor.matrix
            for _, sup in self.lindblad.values():
                out += sup
            self._total = out
        return self._total


def _radiation_channels(
    dimer: DimerConfig,
    space: HilbertSpace,
    bath: RadiationBath,
    both_sites: bool,
) -> list[CouplingChannel]:
    if both_sites:
        op = (
            dimer.acceptor.dipole * site_operator(space, "Dipole", EXC_A).mat.real
            + dimer.donor.dipole * site_operator(space, "Dipole", EXC_D).mat.real
        )
        bath = replace(bath, dipole_debye=1.0)
    else:
        op = site_operator(space, "Dipole", EXC_D).mat.real
        bath = replace(bath, dipole_debye=dimer.donor.dipole)
    return [CouplingChannel(op, bath, "RB")]


def build_generator_bundle(
    dimer: DimerConfig,
    *,
    lambda_e: float,
    lambda_v: float,
    gamma_cut: float = 100.0,
    temperature_phonon: float = 300.0,
    temperature_radiation: float = 5600.0,
    decay: DecayParams | None = None,
    light: bool = True,
    phonon: bool = True,
    recombination: bool = True,
    light_both_sites: bool = False,
    absorption: bool = True,
    emission: bool = True,
) -> GeneratorBundle:
    """Build every generator piece for one parameter point.

    The radiation tensor is built twice, once per occupation branch
    (absorption keeps only upward kernels, emission only downward ones),
    so the two current contributions stay separately addressable; their
    sum is the full radiation tensor.
    """
    space = build_basis(dimer)
    h = build_hamiltonian(dimer, space)
    eig = manifold_eigensystem(h)

    e = eig.energies
    unitary = np.diag(vec(-1j * (e[:, None] - e[None, :])))

    channels: list[CouplingChannel] = []
    if phonon:
        pb = lambda lam: DrudeLorentzBath(lam, gamma_cut, temperature_phonon)
        if lambda_e > 0:
            channels.append(CouplingChannel(
                site_operator(space, "Projector", EXC_A).mat.real, pb(lambda_e), TAG_PB_ELEC_A))
            channels.append(CouplingChannel(
                site_operator(space, "Projector", EXC_D).mat.real, pb(lambda_e), TAG_PB_ELEC_D))
        if lambda_v > 0 and dimer.n_vib > 1:
            channels.append(CouplingChannel(
                site_operator(space, "VibCoordinate", EXC_A).mat.real, pb(lambda_v), TAG_PB_VIB_A))
            channels.append(CouplingChannel(
                site_operator(space, "VibCoordinate", EXC_D).mat.real, pb(lambda_v), TAG_PB_VIB_D))

    if light:
        rb = RadiationBath(temperature_radiation, absorption=absorption, emission=emission)
        for ch in _radiation_channels(dimer, space, rb, light_both_sites):
            channels.append(replace(ch, bath=replace(ch.bath, emission=False), tag=TAG_RB_ABS))
            channels.append(replace(ch, bath=replace(ch.bath, absorption=False), tag=TAG_RB_EMI))

    redfield = build_redfield_tensor(channels, eig) if channels else {}

    lindblad: dict[str, tuple[LindbladTerm, np.ndarray]] = {}
    if decay is not None:
        terms = []
        if recombination:
            terms.extend(build_recombination(space, decay))
        trap = build_trapping(space, decay)
        if trap is not None:
            terms.append(trap)
        for term in terms:
            c_eig = eig.to_eigen(term.collapse)
            lindblad[term.tag] = (term, lindblad_super(c_eig, term.rate))

    return GeneratorBundle(
        dimer=dimer,
        space=space,
        eig=eig,
        unitary=unitary,
        redfield=redfield,
        lindblad=lindblad,
        decay=decay,
        light_enabled=light,
    )


def assemble_liouvillian(bundle: GeneratorBundle) -> np.ndarray:
    """Total generator acting on row-major vec(rho)."""
    return bundle.total()


def _refined_lu_solve(liouv: np.ndarray, max_refine: int = 5):
    """Trace-constrained LU solve with fixed-point iterative refinement.

    Returns (x, residual) with residual = max |L x| over the unmodified
    generator rows; refinement iterates until that stops improving.
    """
    n2 = liouv.shape[0]
    dim = round(n2**0.5)
    scale = np.abs(liouv).max()
    trace_row = diag_functional(np.ones(dim)).astype(complex) * scale
    a = liouv.copy()
    a[0, :] = trace_row
    b = np.zeros(n2, dtype=complex)
    b[0] = scale

    lu = lu_factor(a)
    x = lu_solve(lu, b)
    if not np.all(np.isfinite(x)):
        raise np.linalg.LinAlgError("trace-constrained solve produced non-finite values")

    def residual_of(y):
        return float(np.abs(liouv @ y).max())

    best_x, best_r = x, residual_of(x)
    for _ in range(max_refine):
        r = b - a @ best_x
        dx = lu_solve(lu, r)
        cand = best_x + dx
        cand_r = residual_of(cand)
        if not np.isfinite(cand_r) or cand_r >= best_r:
            break
        best_x, best_r = cand, cand_r
    return best_x, best_r


def _nullspace_solve(liouv: np.ndarray):
    """SVD fallback: extract the zero mode, detect degeneracy."""
    _, s, vh = np.linalg.svd(liouv)
    tol = max(s) * liouv.shape[0] * np.finfo(float).eps * 10
    null_count = int(np.sum(s < tol))
    if null_count == 0:
        raise NonConvergenceError("generator has no zero mode within tolerance")
    if null_count > 1:
        raise DegenerateSteadyStateError(
            f"steady state is not unique: {null_count} zero modes")
    x = vh[-1].conj()
    dim = round(liouv.shape[0] ** 0.5)
    tr = np.trace(x.reshape(dim, dim))
    if abs(tr) < 1e-8:
        raise NonConvergenceError("zero mode is traceless; no physical steady state")
    x = x / tr
    return x, float(np.abs(liouv @ x).max())


def solve_ness(liouv: np.ndarray, *, rel_tol: float = 1e-9):
    """Steady-state vector of the generator; trace one, Hermitian.

    Returns (rho, residual, method).  Raises NonConvergenceError when the
    scaled residual exceeds ``rel_tol``, DegenerateSteadyStateError when
    the zero mode is not unique.
    """
    scale = np.abs(liouv).max()
    method = "lu"
    try:
        with warnings.catch_warnings():
            # singular factorizations are handled by the SVD fallback
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            x, res = _refined_lu_solve(liouv)
        if res > rel_tol * scale:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        x, res = _nullspace_solve(liouv)
        method = "svd"
        if res > rel_tol * scale:
            raise NonConvergenceError(
                f"steady-state residual {res:.3e} above tolerance {rel_tol * scale:.3e}")

    dim = round(liouv.shape[0] ** 0.5)
    rho = x.reshape(dim, dim)
    herm_defect = np.abs(rho - rho.conj().T).max()
    if herm_defect > 1e-10 * max(np.abs(rho).max(), 1e-300):
        raise NonConvergenceError(f"steady state not Hermitian: defect {herm_defect:.3e}")
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return rho, res, method


@dataclass(frozen=True)
class Currents:
    J_abs: float
    J_emi: float
    J_rec: float
    J_trap: float
    eta: float
    continuity_residual: float


def _manifold_flow(bundle: GeneratorBundle, sup: np.ndarray, rho_eig: np.ndarray) -> float:
    """Net population flow into the single-excitation manifold, checked to
    be basis invariant (eigenbasis trace vs site-basis trace)."""
    x = (sup @ vec(rho_eig)).reshape(rho_eig.shape)
    flow_eig = float(np.sum(np.diag(x)[bundle.eig.excited].real))
    x_site = bundle.eig.to_site(x)
    idx = bundle.space.excited_indices()
    flow_site = float(np.sum(np.diag(x_site)[idx].real))
    agree_tol = 1e-10 * max(abs(flow_eig), np.abs(x).max(), 1e-300)
    if abs(flow_eig - flow_site) > agree_tol:
        raise RuntimeError(
            f"current is not basis invariant: {flow_eig!r} vs {flow_site!r}")
    return flow_eig


def compute_currents(rho_eig: np.ndarray, bundle: GeneratorBundle) -> Currents:
    """Channel currents (reported as magnitudes: absorption into the
    excited manifold, the rest out of it) and the quantum yield."""

    def redfield_flow(tag):
        if tag not in bundle.redfield:
            return 0.0
        return _manifold_flow(bundle, bundle.redfield[tag].matrix, rho_eig)

    def lindblad_flow(tag):
        if tag not in bundle.lindblad:
            return 0.0
        return _manifold_flow(bundle, bundle.lindblad[tag][1], rho_eig)

    j_abs = redfield_flow(TAG_RB_ABS)
    j_emi = -redfield_flow(TAG_RB_EMI)
    j_rec = -(lindblad_flow(TAG_REC_A) + lindblad_flow(TAG_REC_D))
    j_trap = -lindblad_flow(TAG_TRAP)

    if j_abs == 0.0:
        raise YieldUndefinedError("absorption current is zero; yield undefined")
    eta = j_trap / j_abs
    continuity = abs((j_emi + j_rec + j_trap) / j_abs - 1.0)
    return Currents(j_abs, j_emi, j_rec, j_trap, eta, continuity)


@dataclass(frozen=True)
class Transport:
    pop_A: float
    pop_D: float
    pop_G: float
    im_coherence: float
    flux: float


def compute_transport(rho_site: np.ndarray, space: HilbertSpace, coupling_v: float) -> Transport:
    """Site populations, the donor-acceptor coherence summed over pairs of
    identical vibrational quantum numbers, and the inter-site flux
    2 V Im[rho_DA]."""
    diag = np.diag(rho_site).real
    pop_a = float(np.sum(diag[space.block(EXC_A)]))
    pop_d = float(np.sum(diag[space.block(EXC_D)]))
    pop_g = float(np.sum(diag[space.block("G")])) if space.include_ground else 0.0
    im = 0.0
    for nu_d in range(space.n_vib):
        for nu_a in range(space.n_vib):
            im += rho_site[space.index(EXC_D, nu_a, nu_d), space.index(EXC_A, nu_a, nu_d)].imag
    return Transport(pop_a, pop_d, pop_g, float(im), float(2.0 * coupling_v * im))


@dataclass(frozen=True)
class NessResult:
    rho_eig: np.ndarray = field(repr=False)
    rho_site: np.ndarray = field(repr=False)
    J_abs: float = 0.0
    J_emi: float = 0.0
    J_rec: float = 0.0
    J_trap: float = 0.0
    eta: float = float("nan")
    continuity_residual: float = float("nan")
    pop_A: float = 0.0
    pop_D: float = 0.0
    pop_G: float = 0.0
    im_coherence: float = 0.0
    flux: float = 0.0
    min_eig: float = 0.0
    residual: float = 0.0
    method: str = "lu"


def characterize_ness(bundle: GeneratorBundle, *, rel_tol: float = 1e-9) -> NessResult:
    """Solve the steady state and evaluate every derived observable."""
    rho_eig, residual, method = solve_ness(bundle.total(), rel_tol=rel_tol)
    rho_site = bundle.eig.to_site(rho_eig)
    min_eig = float(np.linalg.eigvalsh(rho_site).min())
    if min_eig < -1e-6:
        warnings.warn(
            f"steady state has negative eigenvalue {min_eig:.3e}", PositivityWarning)

    if bundle.light_enabled:
        cur = compute_currents(rho_eig, bundle)
    else:
        cur = Currents(0.0, 0.0, 0.0, 0.0, float("nan"), float("nan"))
    tr = compute_transport(rho_site, bundle.space, bundle.dimer.coupling_v)
    return NessResult(
        rho_eig=rho_eig,
        rho_site=rho_site,
        J_abs=cur.J_abs,
        J_emi=cur.J_emi,
        J_rec=cur.J_rec,
        J_trap=cur.J_trap,
        eta=cur.eta,
        continuity_residual=cur.continuity_residual,
        pop_A=tr.pop_A,
        pop_D=tr.pop_D,
        pop_G=tr.pop_G,
        im_coherence=tr.im_coherence,
        flux=tr.flux,
        min_eig=min_eig,
        residual=residual,
        method=method,
    )
