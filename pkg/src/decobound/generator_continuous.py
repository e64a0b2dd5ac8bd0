"""Markovian generator for a continuous environment spectrum.

In the frame rotating at omega0 the long-time second-order map is
t * L(rho) with

    H_eff = -lam^2 sum_s sum_ab [PV int dw/2pi J_ab(w)/(w - s w0)] sigma_{-s}^a sigma_s^b
    D_s(rho) = lam^2 sum_ab J_ab(s w0) [sigma_s^b rho sigma_{-s}^a - 1/2 {sigma_{-s}^a sigma_s^b, rho}]

The sign of H_eff is the one that reproduces the second-order level shifts
of ordinary perturbation theory (and the exact oracle dynamics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .env_model import DiscreteBath, eval_spectrum
from .errors import DomainError, InvariantViolation, QuadratureError
from .operators import SIGNS, sigma
from .quadrature import principal_value_integral

PSD_CLIP = 1e-12


@dataclass(frozen=True)
class QubitParams:
    omega0: float = 1.0
    lam: float = 0.1

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")
        if not self.lam >= 0:
            raise DomainError("coupling strength must be non-negative")


@dataclass(frozen=True)
class RateMatrices:
    """lam^2 J(+w0) (sigma_+ channels) and lam^2 J(-w0) (sigma_- channels)."""

    gamma_plus: np.ndarray
    gamma_minus: np.ndarray

    def by_sign(self, s: int) -> np.ndarray:
        return self.gamma_plus if s == +1 else self.gamma_minus

    @property
    def total(self) -> float:
        return float(np.trace(self.gamma_plus).real + np.trace(self.gamma_minus).real)


@dataclass(frozen=True)
class EffectiveGenerator:
    h_eff: np.ndarray
    lindblads: tuple = field(default_factory=tuple)
    rates: RateMatrices | None = None
    # lam^2 * PV int dw/2pi J_ab(w)/(w - s w0), keyed by s
    shifts: dict | None = None

    def __post_init__(self):
        h = np.asarray(self.h_eff, dtype=complex)
        if np.abs(h - h.conj().T).max() > 1e-12 * max(1.0, np.abs(h).max()):
            raise InvariantViolation("effective Hamiltonian is not Hermitian")
        object.__setattr__(self, "h_eff", 0.5 * (h + h.conj().T))
        object.__setattr__(self, "lindblads", tuple(np.asarray(L, dtype=complex) for L in self.lindblads))

    @property
    def flip_flop(self) -> complex:
        """<10| H_eff |01>, the coefficient that swaps one excitation between A and B."""
        return complex(self.h_eff[2, 1])

    @property
    def total_rate(self) -> float:
        if self.rates is not None:
            return self.rates.total
        # each L = sum_b c_b sigma^b has tr(L^dag L) = 2 sum |c_b|^2
        return float(sum(np.trace(L.conj().T @ L).real / 2 for L in self.lindblads))


def _pv_window(spec, pole: float) -> tuple[float, float]:
    W = spec.window()
    W = max(W, 2 * abs(pole) + 1.0)
    return -W, W


def level_shift_matrix(spec, omega0: float, s: int) -> np.ndarray:
    """PV int dw/2pi J_ab(w) / (w - s*omega0) as a 2x2 matrix."""
    if isinstance(spec, DiscreteBath):
        raise DomainError("continuous generator requires a continuous spectrum")
    pole = s * omega0
    val = principal_value_integral(
        lambda w: eval_spectrum(spec, w), pole, _pv_window(spec, pole), points=getattr(spec, "breakpoints", ())
    )
    return np.asarray(val, dtype=complex) / (2 * np.pi)


def _hamiltonian_from_shifts(shifts: dict) -> np.ndarray:
    H = np.zeros((4, 4), dtype=complex)
    for s in SIGNS:
        P = shifts[s]
        for a in range(2):
            for b in range(2):
                H -= P[a, b] * sigma(a, -s) @ sigma(b, s)
    return H


def effective_hamiltonian(spec, qp: QubitParams) -> np.ndarray:
    shifts = {s: qp.lam**2 * level_shift_matrix(spec, qp.omega0, s) for s in SIGNS}
    return _hamiltonian_from_shifts(shifts)


def rate_matrices(spec, qp: QubitParams) -> RateMatrices:
    lam2 = qp.lam**2
    return RateMatrices(
        gamma_plus=lam2 * eval_spectrum(spec, qp.omega0),
        gamma_minus=lam2 * eval_spectrum(spec, -qp.omega0),
    )


def _channel_operators(gamma: np.ndarray, s: int) -> list[np.ndarray]:
    gamma = 0.5 * (gamma + gamma.conj().T)
    vals, vecs = np.linalg.eigh(gamma)
    scale = max(1.0, float(np.abs(gamma).max()))
    if vals[0] < -PSD_CLIP * scale:
        raise InvariantViolation(f"rate matrix has negative eigenvalue {vals[0]:.3e}; spectrum not PSD")
    ops = []
    for g, v in zip(vals, vecs.T):
        if g <= PSD_CLIP * scale:
            continue
        # Gamma_ab = sum g v_a conj(v_b) -> L = sqrt(g) sum_b conj(v_b) sigma_s^b
        ops.append(np.sqrt(g) * sum(np.conj(v[b]) * sigma(b, s) for b in range(2)))
    return ops


def lindblad_decomposition(spec, qp: QubitParams) -> tuple[RateMatrices, list[np.ndarray]]:
    rates = rate_matrices(spec, qp)
    ops = _channel_operators(rates.gamma_plus, +1) + _channel_operators(rates.gamma_minus, -1)
    return rates, ops


def build_generator(spec, qp: QubitParams) -> EffectiveGenerator:
    shifts = {s: qp.lam**2 * level_shift_matrix(spec, qp.omega0, s) for s in SIGNS}
    rates, ops = lindblad_decomposition(spec, qp)
    return EffectiveGenerator(_hamiltonian_from_shifts(shifts), tuple(ops), rates, shifts)


def scale_coupling(gen: EffectiveGenerator, factor: float) -> EffectiveGenerator:
    """Generator for lam -> factor * lam (every coefficient scales as factor^2)."""
    f2 = factor**2
    rates = None
    if gen.rates is not None:
        rates = RateMatrices(f2 * gen.rates.gamma_plus, f2 * gen.rates.gamma_minus)
    shifts = None if gen.shifts is None else {s: f2 * P for s, P in gen.shifts.items()}
    return EffectiveGenerator(f2 * gen.h_eff, tuple(factor * L for L in gen.lindblads), rates, shifts)


def _left(A):
    return np.kron(A, np.eye(A.shape[0]))


def _right(A):
    return np.kron(np.eye(A.shape[0]), A.T)


def assemble_liouvillian(gen: EffectiveGenerator) -> np.ndarray:
    """Superoperator acting on row-major vec(rho) (``rho.reshape(-1)``)."""
    H = gen.h_eff
    Lsup = -1j * (_left(H) - _right(H))
    for L in gen.lindblads:
        LdL = L.conj().T @ L
        Lsup += np.kron(L, L.conj()) - 0.5 * (_left(LdL) + _right(LdL))
    return Lsup


def apply_generator(gen: EffectiveGenerator, rho: np.ndarray) -> np.ndarray:
    """Right-hand side -i[H, rho] + sum_mu (L rho L^dag - 1/2 {L^dag L, rho})."""
    out = -1j * (gen.h_eff @ rho - rho @ gen.h_eff)
    for L in gen.lindblads:
        Ld = L.conj().T
        out += L @ rho @ Ld - 0.5 * (Ld @ L @ rho + rho @ Ld @ L)
    return out


@dataclass(frozen=True)
class DispersionReport:
    max_residual: float
    rows: tuple


def _cauchy_pv(func, pole: float, a: float, b: float, points=()) -> float:
    """PV int_a^b func(w)/(w - pole) dw with QUADPACK's Cauchy-weight rule."""
    total = 0.0
    edges = sorted({a, b, *[p for p in points if a < p < b and p != pole]})
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo < pole < hi:
            val, err = quad(func, lo, hi, weight="cauchy", wvar=pole, epsabs=1e-13, epsrel=1e-11, limit=500)
        else:
            val, err = quad(lambda w: func(w) / (w - pole), lo, hi, epsabs=1e-13, epsrel=1e-11, limit=500)
        if not math.isfinite(val):
            raise QuadratureError("Cauchy-weight quadrature failed", achieved=err)
        total += val
    return total


def dispersion_check(spec, qp: QubitParams, omega_grid) -> DispersionReport:
    """Compare H_eff shift coefficients with the dispersion integral of the rate weights.

    For every operating frequency w on the grid and s in {+,-}, the shift
    coefficient lam^2 PV int dw'/2pi J_ab(w')/(w' - s w), computed through
    ``level_shift_matrix``, is compared against a separate Cauchy-weight
    quadrature of the channel weights lam^2 J_ab(w') (the sum of L^dag L at w').
    """
    rows = []
    worst = 0.0
    for omega in omega_grid:
        qw = QubitParams(omega0=float(omega), lam=qp.lam)
        for s in SIGNS:
            coeff = qp.lam**2 * level_shift_matrix(spec, qw.omega0, s)
            lo, hi = _pv_window(spec, s * omega)
            ref = np.zeros((2, 2), dtype=complex)
            for a in range(2):
                for b in range(2):
                    for part, unit in ((np.real, 1.0), (np.imag, 1j)):
                        def weight(w, a=a, b=b, part=part):
                            return float(part(qp.lam**2 * eval_spectrum(spec, w)[a, b]))

                        ref[a, b] += unit * _cauchy_pv(weight, s * omega, lo, hi, getattr(spec, "breakpoints", ()))
            ref /= 2 * np.pi
            scale = np.abs(ref).max()
            resid = float(np.abs(coeff - ref).max() / scale) if scale > 0 else float(np.abs(coeff).max())
            worst = max(worst, resid)
            rows.append((float(omega), s, resid))
    return DispersionReport(max_residual=worst, rows=tuple(rows))
