"""Adaptive quadrature helpers, including principal-value integrals."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, QuadratureError

EPSABS = 1e-10
EPSREL = 1e-8


def integrate(
    f: Callable,
    a: float,
    b: float,
    points: Sequence[float] = (),
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
    limit: int = 20000,
):
    """Adaptive Gauss-Kronrod integral of a scalar- or array-valued function."""
    inner = sorted(p for p in set(points) if a < p < b)
    value, err, info = quad_vec(
        f, a, b, epsabs=epsabs, epsrel=epsrel, points=inner or None, limit=limit, full_output=True
    )
    if not info.success:
        raise QuadratureError(f"adaptive quadrature on [{a}, {b}] did not converge", achieved=float(err))
    return value


def principal_value_integral(
    integrand: Callable,
    pole: float,
    window: tuple[float, float],
    points: Sequence[float] = (),
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
):
    """PV int_a^b integrand(w) / (w - pole) dw by subtracting the pole value.

    The integrand may return an array; the result has the same shape.
    """
    a, b = float(window[0]), float(window[1])
    if not a < pole < b:
        raise DomainError("pole must lie strictly inside the integration window")
    f_pole = np.asarray(integrand(pole))

    def regular(w):
        return (np.asarray(integrand(w)) - f_pole) / (w - pole)

    smooth = integrate(regular, a, b, points=[pole, *points], epsabs=epsabs, epsrel=epsrel)
    return smooth + f_pole * np.log((b - pole) / (pole - a))
