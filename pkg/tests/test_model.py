import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibrodimer.model import (
    EXC_A,
    EXC_D,
    GROUND,
    DimerConfig,
    SiteParams,
    build_basis,
    build_hamiltonian,
    diagonalize,
    manifold_eigensystem,
    site_operator,
)
from tests.conftest import COUPLING_V, EPS_A, EPS_D, make_dimer


def test_basis_dimensions():
    assert build_basis(make_dimer(n_vib=3)).dim == 27
    assert build_basis(make_dimer(n_vib=1)).dim == 3
    cfg = make_dimer(n_vib=3)
    cfg = DimerConfig(donor=cfg.donor, acceptor=cfg.acceptor,
                      coupling_v=cfg.coupling_v, n_vib=3, include_ground=False)
    assert build_basis(cfg).dim == 18


def test_basis_ordering_is_label_major_then_donor_mode():
    space = build_basis(make_dimer(n_vib=2))
    labels = [(s.elec, s.nu_a, s.nu_d) for s in space.states]
    assert labels[:4] == [(GROUND, 0, 0), (GROUND, 1, 0), (GROUND, 0, 1), (GROUND, 1, 1)]
    assert labels[4][0] == EXC_A and labels[8][0] == EXC_D
    assert space.index(EXC_D, 1, 1) == space.dim - 1


@settings(max_examples=25, deadline=None)
@given(n_vib=st.integers(1, 4), include_ground=st.booleans())
def test_basis_is_deterministic(n_vib, include_ground):
    base = make_dimer(n_vib=n_vib)
    cfg = DimerConfig(donor=base.donor, acceptor=base.acceptor,
                      coupling_v=base.coupling_v, n_vib=n_vib,
                      include_ground=include_ground)
    a, b = build_basis(cfg), build_basis(cfg)
    assert a.states == b.states
    assert a.dim == len(a.states)


def test_site_params_validation():
    with pytest.raises(ValueError):
        SiteParams(epsilon=-1.0, omega=100.0, huang_rhys=0.1, dipole=1.0)
    with pytest.raises(ValueError):
        SiteParams(epsilon=100.0, omega=-1.0, huang_rhys=0.1, dipole=1.0)
    with pytest.raises(ValueError):
        SiteParams(epsilon=100.0, omega=1.0, huang_rhys=-0.1, dipole=1.0)
    donor = SiteParams(epsilon=100.0, omega=1.0, huang_rhys=0.0, dipole=1.0)
    acc = SiteParams(epsilon=200.0, omega=1.0, huang_rhys=0.0, dipole=1.0)
    with pytest.raises(ValueError):
        DimerConfig(donor=donor, acceptor=acc, coupling_v=1.0)


@settings(max_examples=30, deadline=None)
@given(
    omega=st.floats(0.0, 2000.0),
    s=st.floats(0.0, 0.5),
    v=st.floats(-300.0, 300.0),
    n_vib=st.integers(1, 4),
)
def test_hamiltonian_hermitian(omega, s, v, n_vib):
    h = build_hamiltonian(make_dimer(omega=omega, huang_rhys=s, n_vib=n_vib,
                                     coupling_v=v)).mat
    scale = max(np.abs(h).max(), 1.0)
    assert np.abs(h - h.conj().T).max() < 1e-12 * scale


def test_exciton_gap_electronic_limit():
    # S = 0, one vibrational level: bare electronic dimer
    h = build_hamiltonian(make_dimer(huang_rhys=0.0, n_vib=1))
    vals, _ = diagonalize(h)
    gap = vals[2] - vals[1]
    expected = math.sqrt((EPS_D - EPS_A) ** 2 + 4 * COUPLING_V**2)
    assert gap == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(1058.1, abs=0.1)


def test_two_by_two_block_closed_form():
    h = np.array([[0.0, 92.0], [92.0, 1042.0]])
    vals, vecs = diagonalize(h)
    gap = vals[1] - vals[0]
    assert gap == pytest.approx(math.sqrt(1042.0**2 + 4 * 92.0**2), rel=1e-12)
    assert np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h).max() < 1e-10


def test_vibronic_coupling_magnitude():
    site = SiteParams(epsilon=EPS_D, omega=1058.0, huang_rhys=0.0578, dipole=1.0)
    assert site.vibronic_coupling == pytest.approx(1058.0 * math.sqrt(0.0578), rel=1e-12)
    assert site.vibronic_coupling == pytest.approx(254.4, abs=0.1)
    # consistent with the round coupling value quoted for dynamics runs
    assert abs(site.vibronic_coupling - 250.0) / 250.0 < 0.02


def test_huang_rhys_zero_leaves_vibrational_ladders_uncoupled():
    cfg = make_dimer(huang_rhys=0.0, n_vib=3)
    space = build_basis(cfg)
    h = build_hamiltonian(cfg, space).mat.real
    for nu_d in range(3):
        for nu_a in range(3):
            i = space.index(EXC_A, nu_a, nu_d)
            if nu_a + 1 < 3:
                assert h[space.index(EXC_A, nu_a + 1, nu_d), i] == 0.0
            if nu_d + 1 < 3:
                assert h[space.index(EXC_D, nu_a, nu_d + 1), space.index(EXC_D, nu_a, nu_d)] == 0.0


def test_ground_block_energies_exact():
    cfg = make_dimer(omega=1058.0, n_vib=3)
    space = build_basis(cfg)
    es = manifold_eigensystem(build_hamiltonian(cfg, space))
    ground_energies = sorted(es.energies[~es.excited])
    expected = sorted(na * 1058.0 + nd * 1058.0 for na in range(3) for nd in range(3))
    assert ground_energies == expected


def test_projector_annihilates_other_site():
    space = build_basis(make_dimer(n_vib=3))
    proj = site_operator(space, "Projector", EXC_A).mat
    col = space.index(EXC_D, 1, 2)
    assert np.all(proj[:, col] == 0)
    assert proj[space.index(EXC_A, 1, 2), space.index(EXC_A, 1, 2)] == 1.0


def test_vib_coordinate_ladder_element():
    space = build_basis(make_dimer(n_vib=3))
    q = site_operator(space, "VibCoordinate", EXC_A).mat.real
    i = space.index(GROUND, 1, 0)
    j = space.index(GROUND, 2, 0)
    assert q[j, i] == pytest.approx(math.sqrt(2.0))
    # identity on the other mode and electronic label
    assert q[space.index(EXC_D, 0, 1), space.index(EXC_D, 1, 1)] == pytest.approx(1.0)
    assert q[space.index(GROUND, 0, 0), space.index(EXC_A, 1, 0)] == 0.0


def test_dipole_squared_is_identity_on_ground_block():
    space = build_basis(make_dimer(n_vib=3))
    mu = site_operator(space, "Dipole", EXC_D).mat.real
    sq = mu @ mu
    g = space.block(GROUND)
    assert np.allclose(sq[g, g], np.eye(9), atol=1e-14)


def test_site_operator_rejects_unknown():
    space = build_basis(make_dimer())
    with pytest.raises(ValueError):
        site_operator(space, "Momentum", EXC_A)
    with pytest.raises(ValueError):
        site_operator(space, "Projector", "X")


def test_lowering_requires_ground_block():
    cfg = make_dimer()
    cfg = DimerConfig(donor=cfg.donor, acceptor=cfg.acceptor,
                      coupling_v=cfg.coupling_v, n_vib=2, include_ground=False)
    space = build_basis(cfg)
    with pytest.raises(ValueError):
        site_operator(space, "Lowering", EXC_A)


def test_diagonalize_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.5, 2.0]])
    with pytest.raises(ValueError):
        diagonalize(m)


def test_diagonalize_diagonal_input():
    vals, vecs = diagonalize(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(vals, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]])


def test_diagonalize_reconstruction():
    h = build_hamiltonian(make_dimer()).mat
    vals, vecs = diagonalize(h)
    scale = np.abs(h).max()
    assert np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h).max() < 1e-10 * scale


def test_manifold_eigensystem_matches_dense_and_is_block_exact():
    h = build_hamiltonian(make_dimer())
    es = manifold_eigensystem(h)
    vals, _ = diagonalize(h)
    assert np.abs(np.sort(es.energies) - vals).max() < 1e-9
    # eigenvector columns never mix the manifolds, exactly
    space = h.space
    g = space.block(GROUND)
    exc_cols = es.excited
    assert np.all(es.vectors[g, :][:, exc_cols] == 0.0)
    assert np.all(es.vectors[g.stop:, :][:, ~exc_cols] == 0.0)
    assert np.all(np.diff(es.energies) >= 0)
    recon = (es.vectors * es.energies) @ es.vectors.T
    assert np.abs(recon - h.mat.real).max() < 1e-10 * np.abs(h.mat).max()
