from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import expm

from decobound.env_model import DiscreteBath, OhmicBath, eval_spectrum
from decobound.errors import DomainError, InvariantViolation
from decobound.generator_continuous import (
    EffectiveGenerator,
    QubitParams,
    apply_generator,
    assemble_liouvillian,
    build_generator,
    dispersion_check,
    effective_hamiltonian,
    level_shift_matrix,
    lindblad_decomposition,
    rate_matrices,
    scale_coupling,
)
from decobound.oracle import Mode, OracleModel

from oracles import lindblad_ode, pv_symmetric, random_state, sig, single_mode_flip_flop

DEFAULT = OhmicBath(alpha=0.05, omega_c=5.0, kappa=1.0, beta=2.0)
QP = QubitParams(omega0=1.0, lam=0.1)


class GaussianLine:
    """Narrow Gaussian stand-in for a single zero-temperature mode of coupling g."""

    kind = "gaussian-line"
    breakpoints = ()
    beta = math.inf

    def __init__(self, Omega, g2, sigma):
        self.Omega, self.g2, self.sigma = Omega, g2, sigma

    def spectrum(self, w):
        w = np.asarray(w, dtype=float)
        G = np.exp(-0.5 * ((w - self.Omega) / self.sigma) ** 2) / (math.sqrt(2 * math.pi) * self.sigma)
        return (2 * math.pi * self.g2 * G)[..., None, None] * np.ones((2, 2))

    def window(self):
        return self.Omega + 12 * self.sigma


class NotPSD:
    kind = "broken"
    breakpoints = ()
    beta = math.inf

    def spectrum(self, w):
        w = np.asarray(w, dtype=float)
        env = np.exp(-(w**2))[..., None, None]
        return env * np.array([[1.0, 2.0], [2.0, 1.0]])

    def window(self):
        return 10.0


def test_default_values_frozen():
    # frozen after cross-checking the shifts against pv_symmetric below
    gen = build_generator(DEFAULT, QP)
    assert abs(gen.flip_flop - (-0.0045897259590254591)) < 1e-12
    assert abs(gen.total_rate - 0.006754564748228508) < 1e-14


@pytest.mark.parametrize("s", [1, -1])
def test_level_shift_matches_folded_pv(s):
    bath = OhmicBath(alpha=0.05, omega_c=5.0, kappa=0.7, beta=2.0)
    P = level_shift_matrix(bath, 1.0, s)
    W = bath.window()
    ref = pv_symmetric(lambda w: bath.scalar_spectrum(w), s * 1.0, -W, W) / (2 * np.pi)
    assert abs(P[0, 0] - ref) < 1e-10 * max(1.0, abs(ref))
    assert abs(P[0, 1] - 0.7 * ref) < 1e-10 * max(1.0, abs(ref))


def test_sign_against_single_mode_perturbation_theory():
    lam, g, Om = 0.05, 1.0, 1.3
    qp = QubitParams(1.0, lam)
    h = effective_hamiltonian(GaussianLine(Om, g * g, 0.01), qp)[2, 1].real
    analytic = single_mode_flip_flop(lam, g, g, Om, 1.0)
    assert h < 0 and analytic < 0
    assert abs(h - analytic) < 2e-3 * abs(analytic)  # Gaussian width correction ~ (sigma/detuning)^2


def test_sign_against_exact_diagonalization():
    lam, g, Om = 0.01, 1.0, 1.3
    qp = QubitParams(1.0, lam)
    model = OracleModel(qp, (Mode(Om, g, g, fock_dim=6),), math.inf)
    E, V = np.linalg.eigh(model.hamiltonian())
    k01 = np.zeros(model.dim)
    k01[1 * 6] = 1
    k10 = np.zeros(model.dim)
    k10[2 * 6] = 1
    e_sym = E[np.argmax(np.abs(V.T @ (k01 + k10)))]
    e_anti = E[np.argmax(np.abs(V.T @ (k01 - k10)))]
    exact = 0.5 * (e_sym - e_anti)
    h = effective_hamiltonian(GaussianLine(Om, g * g, 0.01), qp)[2, 1].real
    assert abs(h - exact) < 5e-3 * abs(exact)


def test_generator_hermitian_and_structure():
    gen = build_generator(OhmicBath(0.05, 5.0, kappa=0.4, beta=1.0), QP)
    assert np.allclose(gen.h_eff, gen.h_eff.conj().T, atol=0)
    # H_eff conserves the excitation number: only |01>,|10> mix
    mask = np.ones((4, 4), bool)
    mask[np.ix_([1, 2], [1, 2])] = False
    np.fill_diagonal(mask, False)
    assert np.abs(gen.h_eff[mask]).max() == 0


def test_rate_ratio_detailed_balance():
    for beta in (0.5, 2.0, 7.0):
        r = rate_matrices(OhmicBath(0.05, 5.0, kappa=0.5, beta=beta), QP)
        ratio = r.gamma_plus[0, 0].real / r.gamma_minus[0, 0].real
        assert abs(ratio / math.exp(beta) - 1) < 1e-12


def test_zero_temperature_has_no_absorption():
    r = rate_matrices(OhmicBath(0.05, 5.0, beta=math.inf), QP)
    assert np.all(r.gamma_minus == 0)
    _, ops = lindblad_decomposition(OhmicBath(0.05, 5.0, beta=math.inf), QP)
    assert len(ops) == 1  # kappa = 1: only the symmetric channel survives


def _channel_coefficients(L, s):
    """Coefficients c_b of L = sum_b c_b sigma_s^b, or None if L is not in that span."""
    c = [np.vdot(sig(b, s), L) / 2.0 for b in range(2)]
    rebuilt = c[0] * sig(0, s) + c[1] * sig(1, s)
    return c if np.allclose(rebuilt, L, atol=1e-15) else None


def test_lindblad_reconstructs_rates():
    spec = OhmicBath(0.05, 5.0, kappa=0.3, beta=2.0)
    rates, ops = lindblad_decomposition(spec, QP)
    assert len(ops) == 4
    for s in (1, -1):
        M = np.zeros((2, 2), complex)
        for L in ops:
            c = _channel_coefficients(L, s)
            if c is not None:
                M += np.outer(np.conj(c), c)
        assert np.allclose(M, rates.by_sign(s), atol=1e-16)


def test_dissipator_matches_rate_form():
    # D(rho) = sum_s sum_ab Gamma^s_ab (sigma_s^b rho sigma_s^a dag - 1/2 {sigma_s^a dag sigma_s^b, rho})
    spec = OhmicBath(0.05, 5.0, kappa=-0.6, beta=1.3)
    gen = build_generator(spec, QP)
    rng = np.random.default_rng(7)
    rho = random_state(rng)
    expect = np.zeros((4, 4), complex)
    for s in (1, -1):
        G = gen.rates.by_sign(s)
        for a in range(2):
            for b in range(2):
                A, B = sig(a, s), sig(b, s)
                Ad = A.conj().T
                expect += G[a, b] * (B @ rho @ Ad - 0.5 * (Ad @ B @ rho + rho @ Ad @ B))
    coherent = -1j * (gen.h_eff @ rho - rho @ gen.h_eff)
    assert np.allclose(apply_generator(gen, rho) - coherent, expect, atol=1e-15)


def test_liouvillian_matches_apply_and_ode():
    gen = build_generator(OhmicBath(0.05, 5.0, kappa=0.5, beta=1.0), QubitParams(1.0, 0.4))
    L = assemble_liouvillian(gen)
    rng = np.random.default_rng(3)
    rho = random_state(rng)
    assert np.allclose((L @ rho.ravel()).reshape(4, 4), apply_generator(gen, rho), atol=1e-15)
    t = 30.0
    via_expm = (expm(L * t) @ rho.ravel()).reshape(4, 4)
    via_ode = lindblad_ode(gen.h_eff, gen.lindblads, rho, t)
    assert np.abs(via_expm - via_ode).max() < 1e-10


def test_scale_coupling_equals_rebuild():
    gen = build_generator(DEFAULT, QP)
    for f in (0.1, 3.0):
        a = scale_coupling(gen, f)
        b = build_generator(DEFAULT, QubitParams(1.0, 0.1 * f))
        assert np.allclose(a.h_eff, b.h_eff, rtol=1e-12, atol=0)
        assert abs(a.total_rate / b.total_rate - 1) < 1e-12


def test_non_psd_spectrum_raises():
    with pytest.raises(InvariantViolation):
        build_generator(NotPSD(), QP)


def test_discrete_bath_rejected():
    bath = DiscreteBath(((1.3, np.eye(2)),), math.inf)
    with pytest.raises(DomainError):
        build_generator(bath, QP)


def test_non_hermitian_generator_rejected():
    with pytest.raises(InvariantViolation):
        EffectiveGenerator(np.array(np.triu(np.ones((4, 4))), dtype=complex))


def test_dispersion_relation():
    rep = dispersion_check(DEFAULT, QP, [0.5, 1.0, 1.5])
    assert rep.max_residual < 1e-8
    assert len(rep.rows) == 6


def test_qubit_params_domain():
    with pytest.raises(DomainError):
        QubitParams(omega0=0.0)
    with pytest.raises(DomainError):
        QubitParams(lam=-1.0)


def test_spectrum_consistency_used_for_rates():
    r = rate_matrices(DEFAULT, QP)
    assert np.allclose(r.gamma_plus, 0.01 * eval_spectrum(DEFAULT, 1.0))
