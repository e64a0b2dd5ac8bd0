"""Environment spectra, correlation functions and linear response.

Conventions (hbar = k_B = 1, frequencies in units of omega0)::

    C_ab(t) = <O_a(t) O_b(0)>
    J_ab(w) = int dt C_ab(t) e^{i w t}
    C_ab(t) = (1/2pi) int dw J_ab(w) e^{-i w t}

Positive frequencies carry the emission weight (n + 1) and the spectra obey
the KMS condition J(-w) = exp(-beta w) J(w)^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError
from .quadrature import integrate, principal_value_integral

TAIL_CUT = 1e-14


def check_beta(beta: float) -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise DomainError(f"inverse temperature must be >= 0, got {beta}")
    return beta


def bose_occupation(beta: float, omega):
    """n(w) = 1/(exp(beta w) - 1); at beta = inf this is 0 (w > 0) or -1 (w < 0)."""
    beta = check_beta(beta)
    w = np.asarray(omega, dtype=float)
    if np.any(w == 0) or (beta == 0 and w.size):
        raise DomainError("occupation divergent at zero frequency")
    if math.isinf(beta):
        n = np.where(w > 0, 0.0, -1.0)
    else:
        with np.errstate(over="ignore"):
            n = 1.0 / np.expm1(beta * w)
    return float(n) if n.ndim == 0 else n


def emission_factor(beta: float, omega):
    """w (n(w) + 1) = w / (1 - exp(-beta w)), finite at w = 0 (value 1/beta)."""
    w = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return np.where(w > 0, w, 0.0)
    if beta == 0:
        raise DomainError("emission factor diverges at infinite temperature")
    x = beta * w
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = np.where(x != 0, w / -np.expm1(-x), 1.0 / beta)
    return np.where(np.isfinite(out), out, 0.0)


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic spectrum with exponential cutoff and a constant cross correlation.

    J_AA = J_BB = 2 pi alpha w (n(w) + 1) exp(-|w|/omega_c),  J_AB = kappa J_AA.
    """

    alpha: float
    omega_c: float
    kappa: float = 1.0
    beta: float = math.inf

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.omega_c > 0:
            raise DomainError("omega_c must be positive")
        if not -1.0 <= self.kappa <= 1.0:
            raise DomainError("kappa must lie in [-1, 1]")
        beta = check_beta(self.beta)
        if beta == 0:
            raise DomainError("Ohmic spectrum is unbounded at beta = 0")
        object.__setattr__(self, "beta", beta)

    kind = "ohmic"
    breakpoints = (0.0,)

    @property
    def mixing(self) -> np.ndarray:
        return np.array([[1.0, self.kappa], [self.kappa, 1.0]])

    def scalar_spectrum(self, omega):
        w = np.asarray(omega, dtype=float)
        return 2 * np.pi * self.alpha * emission_factor(self.beta, w) * np.exp(-np.abs(w) / self.omega_c)

    def spectrum(self, omega) -> np.ndarray:
        j = self.scalar_spectrum(omega)
        return j[..., None, None] * self.mixing

    def absorptive(self, omega) -> np.ndarray:
        """(1 - exp(-beta w)) J(w) = J(w) - J(-w)^T, finite for every beta."""
        w = np.asarray(omega, dtype=float)
        j = 2 * np.pi * self.alpha * w * np.exp(-np.abs(w) / self.omega_c)
        return j[..., None, None] * self.mixing

    def window(self) -> float:
        """Half-width W of the frequency window, with |J(+-W)| below TAIL_CUT of the peak."""
        scale = max(self.omega_c, 0.0 if math.isinf(self.beta) else 1.0 / self.beta)
        W = 10.0 * scale
        grid = np.linspace(-W, W, 2001)
        peak = np.max(self.scalar_spectrum(grid))
        while max(self.scalar_spectrum(W), self.scalar_spectrum(-W)) > TAIL_CUT * peak:
            W *= 1.25
        return float(W)


@dataclass(frozen=True)
class DiscreteBath:
    """Spectrum made of delta lines J(w) = sum_n J_n delta(w - Omega_n).

    Negative-frequency KMS partners are stored explicitly; a partner whose
    weight vanishes (beta = inf) may be omitted.
    """

    lines: tuple = field(default_factory=tuple)
    beta: float = math.inf

    kind = "discrete"

    def __post_init__(self):
        beta = check_beta(self.beta)
        object.__setattr__(self, "beta", beta)
        clean = []
        for Omega, W in self.lines:
            W = np.array(W, dtype=complex).reshape(2, 2)
            W.setflags(write=False)
            clean.append((float(Omega), W))
        clean.sort(key=lambda line: line[0])
        object.__setattr__(self, "lines", tuple(clean))
        self.validate()

    @classmethod
    def from_positive_lines(cls, lines, beta: float = math.inf) -> "DiscreteBath":
        """Build a bath from positive-frequency lines, adding the KMS partners."""
        beta = check_beta(beta)
        out = []
        for Omega, W in lines:
            if Omega <= 0:
                raise DomainError("from_positive_lines expects Omega > 0")
            W = np.array(W, dtype=complex).reshape(2, 2)
            out.append((Omega, W))
            partner = np.exp(-beta * Omega) * W.T
            if np.any(partner != 0):
                out.append((-Omega, partner))
        return cls(tuple(out), beta)

    def validate(self, rtol: float = 1e-10) -> None:
        freqs = [Om for Om, _ in self.lines]
        if len(set(freqs)) != len(freqs):
            raise DomainError("line frequencies must be distinct")
        table = dict(self.lines)
        for Omega, W in self.lines:
            if not np.allclose(W, W.conj().T, atol=1e-14, rtol=0):
                raise DomainError(f"line weight at {Omega} is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (W + W.conj().T))[0] < -1e-12 * max(1.0, np.abs(W).max()):
                raise DomainError(f"line weight at {Omega} is not positive semi-definite")
        for Omega, W in self.lines:
            if Omega == 0:
                if not np.allclose(W, W.T, rtol=rtol, atol=0):
                    raise DomainError("zero-frequency weight violates KMS symmetry")
                continue
            if Omega > 0:
                expected = np.exp(-self.beta * Omega) * W.T
                partner = table.get(-Omega)
            else:
                # W = e^{-beta |Omega|} J_+^T  <=>  J_+ = e^{beta |Omega|} W^T
                positive = table.get(-Omega)
                if positive is None:
                    raise DomainError(f"negative line at {Omega} lacks its positive partner")
                expected = np.exp(-self.beta * -Omega) * positive.T
                partner = W
            scale = np.abs(W).max()
            if partner is None:
                if np.abs(expected).max() > rtol * scale:
                    raise DomainError(f"line at {Omega} lacks its KMS partner at {-Omega}")
            elif np.abs(partner - expected).max() > rtol * max(scale, np.abs(partner).max()):
                raise DomainError(f"lines at +-{abs(Omega)} violate KMS pairing")

    def scaled(self, factor: float) -> "DiscreteBath":
        return DiscreteBath(tuple((Om, factor * W) for Om, W in self.lines), self.beta)


BathSpec = Union[OhmicBath, DiscreteBath]


def eval_spectrum(spec, omega) -> np.ndarray:
    """Spectral matrix J_ab(omega) (shape (..., 2, 2)).

    Discrete baths return the weight of a line sitting exactly at omega and
    zero elsewhere; use ``spec.lines`` for the (Omega_n, J_n) pairs.
    """
    if isinstance(spec, DiscreteBath):
        w = np.asarray(omega, dtype=float)
        out = np.zeros(w.shape + (2, 2), dtype=complex)
        for Omega, W in spec.lines:
            out[w == Omega] = W
        return out
    return np.asarray(spec.spectrum(omega), dtype=complex)


def kms_residual(spec, omega) -> np.ndarray:
    """||J(-w) - e^{-beta w} J(w)^T|| relative to max(||J(w)||, ||J(-w)||), per w.

    The larger of the two norms is used so the check stays well conditioned
    where one side is exponentially suppressed.
    """
    # the identity at -u is the transpose of the identity at u, so test at |w|
    u = np.abs(np.atleast_1d(np.asarray(omega, dtype=float)))
    Jp = eval_spectrum(spec, u)
    Jm = eval_spectrum(spec, -u)
    factor = np.exp(-spec.beta * u) if not math.isinf(spec.beta) else np.where(u > 0, 0.0, 1.0)
    diff = Jm - factor[:, None, None] * np.swapaxes(Jp, -1, -2)
    num = np.linalg.norm(diff, axis=(-2, -1))
    den = np.maximum(np.linalg.norm(Jp, axis=(-2, -1)), np.linalg.norm(Jm, axis=(-2, -1)))
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), num)


def correlation_function(spec, t) -> np.ndarray:
    """C_ab(t) for scalar or array t; shape (..., 2, 2)."""
    t = np.asarray(t, dtype=float)
    if isinstance(spec, DiscreteBath):
        out = np.zeros(t.shape + (2, 2), dtype=complex)
        for Omega, W in spec.lines:
            out += np.exp(-1j * Omega * t)[..., None, None] * W
        return out / (2 * np.pi)
    W = spec.window()
    tf = t.reshape(-1)

    def f(w):
        return np.exp(-1j * w * tf)[:, None, None] * spec.spectrum(w)

    points = [p for p in getattr(spec, "breakpoints", ()) if -W < p < W]
    val = integrate(f, -W, W, points=points) / (2 * np.pi)
    return val.reshape(t.shape + (2, 2))


def absorptive_part(spec, omega) -> np.ndarray:
    """(1 - exp(-beta w)) J(w), evaluated without overflow."""
    if hasattr(spec, "absorptive"):
        return spec.absorptive(omega)
    w = np.asarray(omega, dtype=float)
    return eval_spectrum(spec, w) - np.swapaxes(eval_spectrum(spec, -w), -1, -2)


def susceptibility(spec, omega: float) -> np.ndarray:
    """chi_ba(w) = int dw' (1 - e^{-beta w'}) J_ba(w') / (w - w' + i0+).

    Returned as a 2x2 matrix indexed [b, a]: principal value minus
    i*pi times the absorptive weight at w.
    """
    if isinstance(spec, DiscreteBath):
        raise DomainError("susceptibility requires a continuous spectrum")
    W = max(spec.window(), 2 * abs(omega) + 1.0)
    pv = principal_value_integral(
        lambda w: absorptive_part(spec, w), omega, (-W, W), points=getattr(spec, "breakpoints", ())
    )
    return -pv - 1j * np.pi * absorptive_part(spec, omega)


@dataclass(frozen=True)
class FDTReport:
    omega: float
    lhs: float
    rhs: float
    residual: float


def fdt_report(spec, omega: float) -> FDTReport:
    """Both sides of Im chi_AB + Im chi_BA = J_AB(w) n(w) + J_BA(-w) n(-w).

    The two sides are reported, not asserted equal: the sign and 2*pi
    conventions of the relation are not fixed by the definitions.
    """
    chi = susceptibility(spec, omega)
    lhs = float(chi[0, 1].imag + chi[1, 0].imag)
    n_plus = bose_occupation(spec.beta, omega)
    n_minus = bose_occupation(spec.beta, -omega)
    Jp = eval_spectrum(spec, omega)
    Jm = eval_spectrum(spec, -omega)
    rhs = complex(Jp[0, 1] * n_plus + Jm[1, 0] * n_minus)
    return FDTReport(omega=float(omega), lhs=lhs, rhs=rhs.real, residual=lhs - rhs.real)
