import math

import numpy as np
import pytest

from vibrodimer.dissipators import (
    TAG_REC_A,
    TAG_REC_D,
    TAG_TRAP,
    DecayParams,
    build_recombination,
    build_trapping,
)
from vibrodimer.model import EXC_A, EXC_D, GROUND, build_basis
from vibrodimer.superops import lindblad_super, unvec, vec
from vibrodimer.units import RATE_PS_TO_CM
from tests.conftest import make_dimer


def test_decay_params_validation_and_rates():
    with pytest.raises(ValueError):
        DecayParams(tau_rec_ns=-1.0, tau_trap_ps=10.0)
    with pytest.raises(ValueError):
        DecayParams(tau_rec_ns=1.0, tau_trap_ps=0.0)
    # disabled trapping does not validate tau_trap
    p = DecayParams(tau_rec_ns=1.0, tau_trap_ps=-5.0, trap_enabled=False)
    assert p.trap_rate == 0.0
    p = DecayParams(tau_rec_ns=1.0, tau_trap_ps=10.0)
    assert p.rec_rate == pytest.approx(RATE_PS_TO_CM / 1000.0, rel=1e-14)
    assert p.trap_rate == pytest.approx(RATE_PS_TO_CM / 10.0, rel=1e-14)


def test_infinite_recombination_time_gives_zero_generator():
    space = build_basis(make_dimer())
    p = DecayParams(tau_rec_ns=math.inf, tau_trap_ps=10.0, trap_enabled=False)
    for term in build_recombination(space, p):
        sup = lindblad_super(term.collapse, term.rate)
        assert np.all(sup == 0)


def test_trapping_disabled_returns_none():
    space = build_basis(make_dimer())
    assert build_trapping(space, DecayParams(1.0, 10.0, trap_enabled=False)) is None
    term = build_trapping(space, DecayParams(1.0, 10.0))
    assert term is not None and term.tag == TAG_TRAP


def test_collapse_targets_and_tags():
    space = build_basis(make_dimer())
    terms = build_recombination(space, DecayParams(1.0, 10.0))
    assert [t.tag for t in terms] == [TAG_REC_A, TAG_REC_D]
    c_a = terms[0].collapse
    assert c_a[space.index(GROUND, 2, 1), space.index(EXC_A, 2, 1)] == 1.0
    assert c_a[space.index(GROUND, 1, 2), space.index(EXC_A, 2, 1)] == 0.0


def test_collapse_preserves_vibrational_distribution():
    # populate the donor block with a known vibrational pattern, collapse it,
    # and find the same pattern on the ground-block diagonal
    space = build_basis(make_dimer(n_vib=3))
    dim = space.dim
    weights = {(0, 0): 0.5, (1, 2): 0.3, (2, 1): 0.2}
    rho = np.zeros((dim, dim), dtype=complex)
    for (na, nd), w in weights.items():
        i = space.index(EXC_D, na, nd)
        rho[i, i] = w
    term = [t for t in build_recombination(space, DecayParams(1.0, 10.0))
            if t.tag == TAG_REC_D][0]
    gain = term.rate * term.collapse @ rho @ term.collapse.T
    for (na, nd), w in weights.items():
        g = space.index(GROUND, na, nd)
        assert gain[g, g].real == pytest.approx(term.rate * w, rel=1e-14)
    assert np.trace(gain).real == pytest.approx(term.rate, rel=1e-14)


def test_anticommutator_loss_rate_is_sum_of_inverse_times():
    space = build_basis(make_dimer())
    dim = space.dim
    params = DecayParams(tau_rec_ns=1.0, tau_trap_ps=10.0)
    terms = build_recombination(space, params) + [build_trapping(space, params)]
    total = sum(lindblad_super(t.collapse, t.rate) for t in terms)
    i = space.index(EXC_A, 1, 2)
    loss = -total[i * dim + i, i * dim + i].real
    assert loss == pytest.approx(params.rec_rate + params.trap_rate, rel=1e-14)
    j = space.index(EXC_D, 0, 0)
    loss_d = -total[j * dim + j, j * dim + j].real
    assert loss_d == pytest.approx(params.rec_rate, rel=1e-14)


def test_lindblad_terms_preserve_trace_and_positivity():
    space = build_basis(make_dimer())
    dim = space.dim
    params = DecayParams(tau_rec_ns=1.0, tau_trap_ps=10.0)
    terms = build_recombination(space, params) + [build_trapping(space, params)]
    total = sum(lindblad_super(t.collapse, t.rate) for t in terms)
    # trace preservation: the population rows of the action sum to zero
    trace_rows = total.reshape(dim, dim, dim, dim)[np.arange(dim), np.arange(dim)]
    col_sums = trace_rows.sum(axis=0)
    assert np.abs(col_sums).max() < 1e-12 * np.abs(total).max()
    # pure decay keeps a density matrix positive: one explicit Euler-ish check
    rho = np.zeros((dim, dim), dtype=complex)
    rho[space.index(EXC_A, 0, 0), space.index(EXC_A, 0, 0)] = 1.0
    drho = unvec(total @ vec(rho))
    stepped = rho + 1e-3 * drho
    assert np.linalg.eigvalsh(stepped).min() >= -1e-12
