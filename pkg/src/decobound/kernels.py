"""Time-integral kernels phi_{ss'}(t, w) and psi_{ss'}(t, w).

Both kernels are double integrals over the interaction-picture phases::

    psi_{ss'} = int_0^t dt' int_0^t  dt'' exp[-i w0 (s t' + s' t'') - i w (t'' - t')]
    phi_{ss'} = int_0^t dt' int_t'^t dt'' (same integrand)

Writing a = s*w0 - w and b = s'*w0 + w, the exponent separates into
exp(-i a t') exp(-i b t''). With x = -i a t and y = -i b t::

    psi = t^2 g1(x) g1(y)
    phi = t^2 G(x, y),   G(x, y) = int_0^1 dq e^{y q} int_0^q dp e^{x p}

where g1(z) = (e^z - 1)/z. Every evaluation below is free of removable
singularities: g1 is written through sinc on the imaginary axis, and G picks
the algebraic form whose denominator is not small, falling back to its
double power series when both arguments are small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_NSERIES = 21
_jj, _kk = np.meshgrid(np.arange(_NSERIES), np.arange(_NSERIES), indexing="ij")
_fact = np.array([math.factorial(n) for n in range(_NSERIES)], dtype=float)
# G(x, y) = sum_{j,k} x^j y^k / (j! k! (j+1) (j+k+2))
_G_COEF = 1.0 / (_fact[_jj] * _fact[_kk] * (_jj + 1) * (_jj + _kk + 2))


def _sign(s) -> int:
    if s in (1, "+", "plus"):
        return 1
    if s in (-1, "-", "minus"):
        return -1
    raise ValueError(f"spin sign must be +1 or -1, got {s!r}")


def _g1(theta):
    """g1(i*theta) = (e^{i theta} - 1)/(i theta), exact for real theta."""
    half = 0.5 * np.asarray(theta, dtype=float)
    return np.exp(1j * half) * np.sinc(half / np.pi)


def _G(X, Y):
    """G(iX, iY) for real X, Y (broadcast)."""
    X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    x = 1j * X
    y = 1j * Y
    out = np.empty(X.shape, dtype=complex)

    small = (np.abs(X) <= 1.0) & (np.abs(Y) <= 1.0)
    use_x = ~small & (np.abs(X) >= 1.0)
    use_y = ~small & ~use_x

    if np.any(small):
        xs, ys = x[small], y[small]
        xp = xs[:, None] ** np.arange(_NSERIES)[None, :]
        yp = ys[:, None] ** np.arange(_NSERIES)[None, :]
        out[small] = np.einsum("nj,jk,nk->n", xp, _G_COEF, yp)
    if np.any(use_x):
        xs, ys = x[use_x], y[use_x]
        out[use_x] = (_g1(X[use_x] + Y[use_x]) - _g1(Y[use_x])) / xs
    if np.any(use_y):
        xs, ys = x[use_y], y[use_y]
        out[use_y] = (np.exp(ys) * _g1(X[use_y]) - _g1(X[use_y] + Y[use_y])) / ys
    return out


def _phase_rates(s, s2, omega, omega0):
    s, s2 = _sign(s), _sign(s2)
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    omega = np.asarray(omega, dtype=float)
    return s * omega0 - omega, s2 * omega0 + omega


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("kernel time must be non-negative")
    return t


def eval_phi(s, s2, t, omega, omega0: float = 1.0):
    """Ordered (t' < t'') kernel phi_{s s2}(t, omega). Broadcasts over t, omega."""
    t = _check_time(t)
    a, b = _phase_rates(s, s2, omega, omega0)
    val = t**2 * _G(-a * t, -b * t)
    return val[()] if val.ndim == 0 else val


def eval_psi(s, s2, t, omega, omega0: float = 1.0):
    """Square-domain kernel psi_{s s2}(t, omega). Broadcasts over t, omega."""
    t = _check_time(t)
    a, b = _phase_rates(s, s2, omega, omega0)
    val = t**2 * _g1(-a * t) * _g1(-b * t)
    if _sign(s2) == -_sign(s):
        # a = -b here, so the product is |g1|^2; drop the rounding-level imaginary part
        val = val.real.astype(complex)
    return val[()] if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class KernelValue:
    phi: complex
    psi: complex
    s: int
    s2: int
    t: float
    omega: float
    omega0: float


def kernel_value(s, s2, t: float, omega: float, omega0: float = 1.0) -> KernelValue:
    return KernelValue(
        phi=complex(eval_phi(s, s2, t, omega, omega0)),
        psi=complex(eval_psi(s, s2, t, omega, omega0)),
        s=_sign(s),
        s2=_sign(s2),
        t=float(t),
        omega=float(omega),
        omega0=float(omega0),
    )


def gate_zero_times(Omega: float, omega0: float, s, k_max: int) -> list[float]:
    """Times 2*pi*k/|Omega - s*omega0| at which psi_{s,-s}(t, Omega) vanishes."""
    s = _sign(s)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    detuning = Omega - s * omega0
    if detuning == 0:
        raise ValueError("resonant line has no psi zeros")
    return [2.0 * np.pi * k / abs(detuning) for k in range(1, k_max + 1)]
