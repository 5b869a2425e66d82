import numpy as np
import pytest

from vibrodimer import DecayParams, DimerConfig, SiteParams, build_generator_bundle

EPS_A = 18532.0
EPS_D = 19574.0
COUPLING_V = 92.0
DIP_A = 12.17
DIP_D = 11.87


def make_dimer(omega=1058.0, huang_rhys=0.0578, n_vib=3, coupling_v=COUPLING_V):
    donor = SiteParams(epsilon=EPS_D, omega=omega, huang_rhys=huang_rhys,
                       dipole=DIP_D, couples_to_light=True)
    acceptor = SiteParams(epsilon=EPS_A, omega=omega, huang_rhys=huang_rhys,
                          dipole=DIP_A)
    return DimerConfig(donor=donor, acceptor=acceptor, coupling_v=coupling_v,
                       n_vib=n_vib)


def make_bundle(omega=1058.0, huang_rhys=0.0578, lambda_e=1.0, lambda_v=1.0,
                tau_rec_ns=1.0, tau_trap_ps=10.0, n_vib=3, **kwargs):
    decay = kwargs.pop("decay", "default")
    if decay == "default":
        decay = DecayParams(tau_rec_ns=tau_rec_ns, tau_trap_ps=tau_trap_ps)
    return build_generator_bundle(
        make_dimer(omega, huang_rhys, n_vib=n_vib),
        lambda_e=lambda_e, lambda_v=lambda_v, decay=decay, **kwargs)


def random_density(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def default_bundle():
    return make_bundle()
