"""Independent reference computations for the test suite.

None of these call into decobound; they re-derive each quantity from its
definition with a different numerical method.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.integrate import dblquad, quad, solve_ivp

SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, lowers the energy
SM = SP.conj().T
I2 = np.eye(2, dtype=complex)


def op(site: int, m: np.ndarray) -> np.ndarray:
    return np.kron(m, I2) if site == 0 else np.kron(I2, m)


def sig(site: int, s: int) -> np.ndarray:
    return op(site, SP if s > 0 else SM)


# -- Ohmic correlation function ------------------------------------------


def ohmic_correlation(alpha: float, omega_c: float, beta: float, t: float) -> complex:
    """C_AA(t) for J = 2 pi alpha w (n+1) e^{-|w|/wc}, summed via the trigamma function.

    (1/2pi) int J e^{-iwt} dw = alpha/beta^2 [psi1((1/wc + it)/beta) + psi1((1/wc - it)/beta + 1)].
    """
    if math.isinf(beta):
        return complex(alpha / (1 / omega_c + 1j * t) ** 2)
    z1 = (1 / omega_c + 1j * t) / beta
    z2 = (1 / omega_c - 1j * t) / beta + 1
    return complex(alpha / beta**2 * (mpmath.psi(1, z1) + mpmath.psi(1, z2)))


# -- kernels by brute-force 2-D quadrature -----------------------------------


def _phase(s, s2, omega, omega0):
    a = s * omega0 - omega
    b = s2 * omega0 + omega
    return a, b


def kernel_dblquad(kind: str, s: int, s2: int, t: float, omega: float, omega0: float = 1.0) -> complex:
    """psi: square [0,t]^2; phi: ordered t' < t''. Integrand exp(-i a t' - i b t'')."""
    a, b = _phase(s, s2, omega, omega0)

    def re(t2, t1):
        return math.cos(a * t1 + b * t2)

    def im(t2, t1):
        return -math.sin(a * t1 + b * t2)

    lo = (lambda t1: 0.0) if kind == "psi" else (lambda t1: t1)
    kw = dict(epsabs=1e-12, epsrel=1e-12)
    r = dblquad(re, 0, t, lo, lambda t1: t, **kw)[0]
    i = dblquad(im, 0, t, lo, lambda t1: t, **kw)[0]
    return complex(r, i)


# -- principal values ---------------------------------------------------------


def pv_symmetric(f, pole: float, a: float, b: float) -> float:
    """PV int_a^b f(w)/(w - pole) dw by folding: int_0^d [f(p+u) - f(p-u)]/u du + regular rest."""
    d = min(pole - a, b - pole)
    core = quad(lambda u: (f(pole + u) - f(pole - u)) / u, 0, d, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
    rest = 0.0
    if pole - d > a:
        rest += quad(lambda w: f(w) / (w - pole), a, pole - d, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
    if pole + d < b:
        rest += quad(lambda w: f(w) / (w - pole), pole + d, b, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
    return core + rest


def single_mode_flip_flop(lam: float, g_a: float, g_b: float, Omega: float, omega0: float) -> float:
    """Second-order exchange coupling <10|H_eff|01> via virtual |00,1> and |11,1> at T = 0."""
    return -(lam**2) * g_a * g_b * (1 / (Omega - omega0) + 1 / (Omega + omega0))


# -- Lindblad ODE ---------------------------------------------------------------


def lindblad_rhs(H: np.ndarray, Ls) -> callable:
    def rhs(_t, y):
        rho = y.reshape(4, 4)
        out = -1j * (H @ rho - rho @ H)
        for L in Ls:
            LdL = L.conj().T @ L
            out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
        return out.ravel()

    return rhs


def lindblad_ode(H, Ls, rho0, t: float) -> np.ndarray:
    sol = solve_ivp(
        lindblad_rhs(H, Ls), (0, t), np.asarray(rho0, dtype=complex).ravel(), method="DOP853", rtol=1e-12, atol=1e-14
    )
    return sol.y[:, -1].reshape(4, 4)


# -- random objects -----------------------------------------------------------


def random_state(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    A = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def random_psd2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return scale * (A @ A.conj().T)


def wootters(rho: np.ndarray) -> float:
    """Concurrence from the eigenvalues of rho (sy sy) rho* (sy sy), non-Hermitian route."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    R = rho @ yy @ rho.conj() @ yy
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(R).real)))[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])
