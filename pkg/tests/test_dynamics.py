from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decobound.dynamics import (
    check_state,
    concurrence,
    concurrence_at,
    figure_of_merit,
    propagate,
    purity,
    state_metrics,
    trace_distance,
)
from decobound.env_model import OhmicBath
from decobound.errors import DomainError
from decobound.generator_continuous import EffectiveGenerator, QubitParams, assemble_liouvillian, build_generator
from decobound.operators import SINGLET, TRIPLET0, ket, projector

from oracles import random_state, sig, wootters

DEFAULT = OhmicBath(alpha=0.05, omega_c=5.0, kappa=1.0, beta=2.0)


def test_concurrence_known_states():
    assert abs(concurrence(projector(SINGLET)) - 1) < 1e-14
    assert concurrence(projector(ket("01"))) < 1e-14
    for p in (0.2, 0.5, 0.9):
        werner = p * projector(SINGLET) + (1 - p) * np.eye(4) / 4
        assert abs(concurrence(werner) - max(0.0, (3 * p - 1) / 2)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_concurrence_matches_eigvals_route(seed, rank):
    rho = random_state(np.random.default_rng(seed), rank)
    assert abs(concurrence(rho) - wootters(rho)) < 1e-7


def test_purity_and_distance():
    rho = np.eye(4) / 4
    assert abs(purity(rho) - 0.25) < 1e-15
    assert abs(trace_distance(projector(ket("00")), projector(ket("11"))) - 1) < 1e-15
    m = state_metrics(projector(SINGLET), ref=projector(TRIPLET0))
    assert abs(m.trace_distance - 1) < 1e-14 and abs(m.purity - 1) < 1e-14


def test_check_state_rejects():
    with pytest.raises(DomainError):
        check_state(np.eye(4))
    with pytest.raises(DomainError):
        check_state(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(DomainError):
        check_state(np.eye(2) / 2)


def test_default_figure_of_merit_frozen():
    fom = figure_of_merit(build_generator(DEFAULT, QubitParams(1.0, 0.1)))
    assert abs(fom.q - 0.86516612222295564) < 1e-12
    assert abs(fom.t_gate - math.pi / (4 * 0.0045897259590254591)) < 1e-8


def test_gate_time_entangles_under_coherent_part():
    gen = build_generator(DEFAULT, QubitParams(1.0, 0.1))
    fom = figure_of_merit(gen)
    c = concurrence_at(gen, projector(ket("01")), fom.t_gate, coherent_only=True)
    assert abs(c - 1) < 1e-10


def test_fastest_channel_option():
    gen = build_generator(OhmicBath(0.05, 5.0, kappa=0.5, beta=2.0), QubitParams(1.0, 0.1))
    total = figure_of_merit(gen, "total")
    fast = figure_of_merit(gen, "fastest")
    assert fast.t_dec >= total.t_dec
    with pytest.raises(DomainError):
        figure_of_merit(gen, "median")


def test_no_coupling_reported():
    gen = build_generator(OhmicBath(0.05, 5.0, kappa=0.0, beta=2.0), QubitParams(1.0, 0.1))
    with pytest.raises(DomainError, match="no environment-mediated coupling"):
        figure_of_merit(gen)


def test_no_decoherence_warns():
    H = np.zeros((4, 4), complex)
    H[1, 2] = H[2, 1] = 0.1
    with pytest.warns(RuntimeWarning):
        fom = figure_of_merit(EffectiveGenerator(H))
    assert math.isinf(fom.q)


def test_propagate_constant_for_zero_generator():
    gen = build_generator(DEFAULT, QubitParams(1.0, 0.0))
    rho0 = projector(SINGLET)
    for rho in propagate(assemble_liouvillian(gen), rho0, [0.0, 5.0, 50.0]):
        assert np.abs(rho - rho0).max() < 1e-15


def test_propagate_grid_checks():
    L = np.zeros((16, 16))
    with pytest.raises(DomainError):
        propagate(L, np.eye(4) / 4, [1.0, 2.0])
    with pytest.raises(DomainError):
        propagate(L, np.eye(4) / 4, [0.0, 2.0, 1.0])


def test_symmetric_decay_of_triplet():
    # L = sqrt(gamma)(sigma_+^A + sigma_+^B): the triplet decays as e^{-2 gamma t}
    gamma = 0.3
    gen = EffectiveGenerator(np.zeros((4, 4), complex), (math.sqrt(gamma) * (sig(0, 1) + sig(1, 1)),))
    ts = np.linspace(0, 5, 6)
    states = propagate(assemble_liouvillian(gen), projector(TRIPLET0), ts)
    conc = [concurrence(r) for r in states]
    assert np.allclose(conc, np.exp(-2 * gamma * ts), atol=1e-12)
    assert all(a >= b for a, b in zip(conc, conc[1:]))


def test_singlet_is_dark_for_symmetric_bath():
    gen = build_generator(OhmicBath(0.05, 5.0, kappa=1.0, beta=2.0), QubitParams(1.0, 0.3))
    rho = propagate(assemble_liouvillian(gen), projector(SINGLET), [0.0, 100.0])[-1]
    assert abs(concurrence(rho) - 1) < 1e-10


def test_kappa_sweep_monotone():
    qs = []
    for kappa in (0.2, 0.4, 0.6, 0.8, 1.0):
        qs.append(figure_of_merit(build_generator(OhmicBath(0.05, 5.0, kappa, 2.0), QubitParams())).q)
    assert all(a < b for a, b in zip(qs, qs[1:]))


def test_no_warnings_on_default_path():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        figure_of_merit(build_generator(DEFAULT, QubitParams()))
