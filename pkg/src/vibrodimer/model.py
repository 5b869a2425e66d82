"""Hilbert space, Hamiltonian, and site-local operators of the vibronic dimer.

Two chromophores (acceptor ``A``, donor ``D``), each a two-level electronic
system carrying one harmonic intramolecular mode truncated to ``n_vib``
levels.  The basis is restricted to the shared electronic ground state plus
the single-excitation manifold; basis ordering is electronic label major
(G, A, D), then the donor-mode quantum number, then the acceptor-mode one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GROUND = "G"
EXC_A = "A"
EXC_D = "D"

OPERATOR_KINDS = ("Projector", "Lowering", "VibCoordinate", "Dipole")


@dataclass(frozen=True)
class SiteParams:
    """One chromophore: electronic gap, local mode, and optical coupling."""

    epsilon: float          # electronic excitation energy (cm^-1)
    omega: float            # intramolecular vibrational frequency (cm^-1)
    huang_rhys: float       # dimensionless mode displacement strength
    dipole: float           # transition dipole magnitude (Debye)
    couples_to_light: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if self.huang_rhys < 0:
            raise ValueError("huang_rhys must be non-negative")
        if self.dipole < 0:
            raise ValueError("dipole must be non-negative")

    @property
    def vibronic_coupling(self) -> float:
        """Linear electron-vibration coupling omega * sqrt(huang_rhys)."""
        return self.omega * math.sqrt(self.huang_rhys)


@dataclass(frozen=True)
class DimerConfig:
    donor: SiteParams
    acceptor: SiteParams
    coupling_v: float       # electronic inter-site coupling (cm^-1)
    n_vib: int = 3
    include_ground: bool = True

    def __post_init__(self):
        if self.n_vib < 1:
            raise ValueError("n_vib must be at least 1")
        if not self.donor.epsilon > self.acceptor.epsilon:
            raise ValueError("donor excitation energy must exceed the acceptor one")


@dataclass(frozen=True)
class BasisState:
    elec: str   # one of GROUND, EXC_A, EXC_D
    nu_a: int   # acceptor-mode quantum number
    nu_d: int   # donor-mode quantum number


class HilbertSpace:
    """Ordered product basis of the dimer; immutable after construction."""

    def __init__(self, n_vib: int, include_ground: bool = True):
        self.n_vib = int(n_vib)
        self.include_ground = bool(include_ground)
        self.labels = ((GROUND,) if include_ground else ()) + (EXC_A, EXC_D)
        self.states = tuple(
            BasisState(elec, nu_a, nu_d)
            for elec in self.labels
            for nu_d in range(self.n_vib)
            for nu_a in range(self.n_vib)
        )
        self.dim = len(self.states)

    def index(self, elec: str, nu_a: int, nu_d: int) -> int:
        n = self.n_vib
        if elec not in self.labels:
            raise ValueError(f"unknown electronic label {elec!r}")
        if not (0 <= nu_a < n and 0 <= nu_d < n):
            raise ValueError("vibrational quantum number out of range")
        return self.labels.index(elec) * n * n + nu_d * n + nu_a

    def block(self, elec: str) -> slice:
        """Index slice of one electronic label's vibrational block."""
        n2 = self.n_vib * self.n_vib
        i = self.labels.index(elec)
        return slice(i * n2, (i + 1) * n2)

    def excited_indices(self) -> np.ndarray:
        """Indices of the single-excitation manifold (A and D blocks)."""
        return np.concatenate([
            np.arange(self.block(EXC_A).start, self.block(EXC_A).stop),
            np.arange(self.block(EXC_D).start, self.block(EXC_D).stop),
        ])

    def __eq__(self, other):
        return (
            isinstance(other, HilbertSpace)
            and self.n_vib == other.n_vib
            and self.include_ground == other.include_ground
        )

    def __repr__(self):
        return f"HilbertSpace(n_vib={self.n_vib}, include_ground={self.include_ground})"


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix together with the space it acts on."""

    space: HilbertSpace
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError("matrix shape does not match the Hilbert space")
        object.__setattr__(self, "mat", m)


def build_basis(config: DimerConfig) -> HilbertSpace:
    return HilbertSpace(config.n_vib, config.include_ground)


def _ladder_sum(n: int) -> np.ndarray:
    """Truncated (c^dag + c): sqrt(nu+1) on the first off-diagonals."""
    root = np.sqrt(np.arange(1, n))
    return np.diag(root, 1) + np.diag(root, -1)


def build_hamiltonian(config: DimerConfig, space: HilbertSpace | None = None) -> OperatorMatrix:
    """System Hamiltonian: site energies, inter-site coupling, harmonic
    mode energies, and the linear vibronic coupling acting on the excited
    site's own mode.  Vibrational quantum numbers are preserved by the
    inter-site coupling."""
    space = space if space is not None else build_basis(config)
    n = space.n_vib
    h = np.zeros((space.dim, space.dim))
    site = {EXC_A: config.acceptor, EXC_D: config.donor}

    for idx, st in enumerate(space.states):
        e = st.nu_a * config.acceptor.omega + st.nu_d * config.donor.omega
        if st.elec in site:
            e += site[st.elec].epsilon
        h[idx, idx] = e

    for nu_d in range(n):
        for nu_a in range(n):
            ia = space.index(EXC_A, nu_a, nu_d)
            idn = space.index(EXC_D, nu_a, nu_d)
            h[ia, idn] += config.coupling_v
            h[idn, ia] += config.coupling_v
            # vibronic term on the excited site's mode only
            if nu_a + 1 < n:
                g = config.acceptor.vibronic_coupling
                ja = space.index(EXC_A, nu_a + 1, nu_d)
                h[ja, ia] += g * math.sqrt(nu_a + 1)
                h[ia, ja] += g * math.sqrt(nu_a + 1)
            if nu_d + 1 < n:
                g = config.donor.vibronic_coupling
                jd = space.index(EXC_D, nu_a, nu_d + 1)
                h[jd, idn] += g * math.sqrt(nu_d + 1)
                h[idn, jd] += g * math.sqrt(nu_d + 1)

    return OperatorMatrix(space, h)


def site_operator(space: HilbertSpace, kind: str, site: str) -> OperatorMatrix:
    """Site-local coupling operators in the localized basis.

    Projector       |eps_i><eps_i| (diagonal on the site's excited block)
    Lowering        |g><eps_i| with both vibrational numbers preserved
    VibCoordinate   (c^dag + c) of the site's mode, on every electronic block
    Dipole          unit-magnitude |g><eps_i| + h.c.; callers scale by the
                    transition dipole of the site
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    if site not in (EXC_A, EXC_D):
        raise ValueError(f"unknown site {site!r}")
    n = space.n_vib
    out = np.zeros((space.dim, space.dim))

    if kind == "Projector":
        blk = space.block(site)
        out[np.arange(blk.start, blk.stop), np.arange(blk.start, blk.stop)] = 1.0
        return OperatorMatrix(space, out)

    if kind in ("Lowering", "Dipole"):
        if not space.include_ground:
            raise ValueError(f"{kind} operator needs the electronic ground state")
        for nu_d in range(n):
            for nu_a in range(n):
                g = space.index(GROUND, nu_a, nu_d)
                e = space.index(site, nu_a, nu_d)
                out[g, e] = 1.0
        if kind == "Dipole":
            out = out + out.T
        return OperatorMatrix(space, out)

    # VibCoordinate: ladder on this site's mode, identity on the rest
    lad = _ladder_sum(n)
    eye = np.eye(n)
    per_block = np.kron(eye, lad) if site == EXC_A else np.kron(lad, eye)
    for elec in space.labels:
        blk = space.block(elec)
        out[blk, blk] = per_block
    return OperatorMatrix(space, out)


def _as_matrix(h) -> np.ndarray:
    return h.mat if isinstance(h, OperatorMatrix) else np.asarray(h, dtype=complex)


def diagonalize(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Rejects inputs whose hermiticity defect exceeds 1e-10 relative.
    """
    m = _as_matrix(h)
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


@dataclass(frozen=True)
class Eigensystem:
    """Spectral data of the dimer Hamiltonian with exact manifold structure.

    ``vectors`` columns are real and never mix the ground manifold with the
    single-excitation manifold, so manifold projectors stay exactly sparse
    in the eigenbasis; ``excited`` flags each eigenstate's manifold.
    """

    space: HilbertSpace
    energies: np.ndarray        # (dim,), ascending
    vectors: np.ndarray         # (dim, dim), orthogonal, columns = eigenstates
    excited: np.ndarray         # (dim,) bool

    def to_eigen(self, op_site: np.ndarray) -> np.ndarray:
        return self.vectors.T @ op_site @ self.vectors

    def to_site(self, op_eig: np.ndarray) -> np.ndarray:
        return self.vectors @ op_eig @ self.vectors.T


def manifold_eigensystem(h: OperatorMatrix) -> Eigensystem:
    """Diagonalize per electronic manifold and merge with an ascending sort.

    The ground block is diagonal by construction; the single-excitation
    block is diagonalized on its own.  Keeping the eigenvector matrix
    exactly block-structured makes population flow through any channel
    that commutes with a manifold projector vanish to rounding, which the
    steady-state current bookkeeping relies on.
    """
    space = h.space
    m = h.mat
    if np.abs(m.imag).max() > 1e-12 * max(np.abs(m).max(), 1.0):
        raise ValueError("dimer Hamiltonian must be real")
    m = m.real
    dim = space.dim
    vectors = np.zeros((dim, dim))
    energies = np.empty(dim)
    excited = np.zeros(dim, dtype=bool)

    if space.include_ground:
        gblk = space.block(GROUND)
        gidx = np.arange(gblk.start, gblk.stop)
        energies[gblk] = np.diag(m)[gblk]
        vectors[gidx, gidx] = 1.0

    estart = space.block(EXC_A).start
    vals, vecs = np.linalg.eigh(m[estart:, estart:])
    energies[estart:] = vals
    vectors[estart:, estart:] = vecs
    excited[estart:] = True

    order = np.argsort(energies, kind="stable")
    return Eigensystem(space, energies[order], vectors[:, order], excited[order])
