"""Exact second-order map for environments made of discrete spectral lines.

Nothing is coarse-grained here: the map keeps the full kernels phi, psi, so
the coherent part and the dissipator both depend on time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env_model import DiscreteBath
from .errors import DomainError
from .generator_continuous import QubitParams
from .kernels import eval_phi, eval_psi
from .operators import SIGNS, sigma

# composite channel index (site, sign): (A,+), (A,-), (B,+), (B,-)
CHANNELS = tuple((a, s) for a in range(2) for s in SIGNS)
_OPS = {(a, s): sigma(a, s) for a in range(2) for s in SIGNS}


def _require_discrete(spec) -> None:
    if not isinstance(spec, DiscreteBath):
        raise DomainError("expected a DiscreteBath")


def _line_kernels(Omega: float, t: float, omega0: float):
    phi = {(s, s2): complex(eval_phi(s, s2, t, Omega, omega0)) for s in SIGNS for s2 in SIGNS}
    psi = {(s, s2): complex(eval_psi(s, s2, t, Omega, omega0)) for s in SIGNS for s2 in SIGNS}
    return phi, psi


def delta_rho2_discrete(spec: DiscreteBath, qp: QubitParams, rho0: np.ndarray, t: float) -> np.ndarray:
    """Second-order change of the interaction-picture two-qubit state."""
    _require_discrete(spec)
    if t < 0:
        raise DomainError("t must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    lam2 = qp.lam**2
    out = np.zeros((4, 4), dtype=complex)
    for Omega, W in spec.lines:
        phi, psi = _line_kernels(Omega, t, qp.omega0)
        c = lam2 * W / (2 * np.pi)
        for a in range(2):
            for b in range(2):
                if c[a, b] == 0:
                    continue
                for s in SIGNS:
                    for s2 in SIGNS:
                        Sb, Sa = _OPS[b, s], _OPS[a, s2]
                        jump = c[a, b] * psi[s, s2] * (Sb @ rho0 @ Sa)
                        left = c[a, b] * phi[s, s2] * (Sa @ Sb @ rho0)
                        out += jump - left - left.conj().T
    return out


def _coherent_times_t(spec: DiscreteBath, qp: QubitParams, t: float) -> np.ndarray:
    """t * H_eff(t) = -(i/2) sum c_ab (phi_{ss'} - conj phi_{-s',-s}) sigma_{s'}^a sigma_s^b."""
    lam2 = qp.lam**2
    out = np.zeros((4, 4), dtype=complex)
    for Omega, W in spec.lines:
        phi, _ = _line_kernels(Omega, t, qp.omega0)
        c = lam2 * W / (2 * np.pi)
        for a in range(2):
            for b in range(2):
                for s in SIGNS:
                    for s2 in SIGNS:
                        D = phi[s, s2] - np.conj(phi[-s2, -s])
                        out += -0.5j * c[a, b] * D * (_OPS[a, s2] @ _OPS[b, s])
    return 0.5 * (out + out.conj().T)


def dissipator_matrix(spec: DiscreteBath, qp: QubitParams, t: float, rotating_wave: bool = False) -> np.ndarray:
    """Coefficient matrix K over CHANNELS, entries sum_n lam^2 J_ab,n psi_{s,-tau}(t, Omega_n) / 2pi.

    Row (b, s), column (a, tau); the dissipator is
    sum K [A_r rho A_c^dag - 1/2 {A_c^dag A_r, rho}] with A_(a,s) = sigma_s^a.
    With ``rotating_wave`` only the psi_{s,-s} terms of lines with
    sign(Omega_n) = s are kept (the counter-rotating and s = s' parts drop).
    """
    _require_discrete(spec)
    lam2 = qp.lam**2
    K = np.zeros((4, 4), dtype=complex)
    for Omega, W in spec.lines:
        _, psi = _line_kernels(Omega, t, qp.omega0)
        c = lam2 * W / (2 * np.pi)
        for i, (b, s) in enumerate(CHANNELS):
            for j, (a, tau) in enumerate(CHANNELS):
                if rotating_wave and not (tau == s and s * Omega > 0):
                    continue
                K[i, j] += c[a, b] * psi[s, -tau]
    return 0.5 * (K + K.conj().T)


def apply_dissipator(K: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for i, r in enumerate(CHANNELS):
        for j, c in enumerate(CHANNELS):
            if K[i, j] == 0:
                continue
            Ar, Acd = _OPS[r], _OPS[c].conj().T
            out += K[i, j] * (Ar @ rho @ Acd - 0.5 * (Acd @ Ar @ rho + rho @ Acd @ Ar))
    return out


@dataclass(frozen=True)
class DiscreteGeneratorSnapshot:
    t: float
    h_eff_t: np.ndarray
    dissipator: np.ndarray

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """t * (-i [H_eff(t), rho]) + dissipator(rho); equals delta_rho2_discrete."""
        H = self.h_eff_t
        return -1j * self.t * (H @ rho - rho @ H) + apply_dissipator(self.dissipator, rho)


def snapshot(spec: DiscreteBath, qp: QubitParams, t: float) -> DiscreteGeneratorSnapshot:
    _require_discrete(spec)
    if t <= 0:
        raise DomainError("snapshot needs t > 0 (H_eff is defined through a division by t)")
    return DiscreteGeneratorSnapshot(
        t=float(t),
        h_eff_t=_coherent_times_t(spec, qp, t) / t,
        dissipator=dissipator_matrix(spec, qp, t),
    )


def residual_decoherence(spec: DiscreteBath, qp: QubitParams, t: float, rotating_wave: bool = False) -> float:
    """Spectral norm of the accumulated dissipator coefficient matrix at time t."""
    if t <= 0:
        raise DomainError("residual decoherence needs t > 0")
    return float(np.linalg.norm(dissipator_matrix(spec, qp, t, rotating_wave), 2))


def coherent_norm(spec: DiscreteBath, qp: QubitParams, t: float) -> float:
    """||t * H_eff(t)||_2, the accumulated coherent action."""
    _require_discrete(spec)
    return float(np.linalg.norm(_coherent_times_t(spec, qp, t), 2))


def smallest_detuning(spec: DiscreteBath, omega0: float) -> float:
    """min |Omega_n - s omega0| over lines with nonzero weight and both signs s."""
    det = [abs(Om - s * omega0) for Om, W in spec.lines if np.any(W != 0) for s in SIGNS]
    if not det:
        raise DomainError("bath has no lines")
    return min(det)


@dataclass(frozen=True)
class OffResonanceScan:
    t: np.ndarray
    residual: np.ndarray
    coherent: np.ndarray
    detuning: float
    amplitude: float
    envelope_error: float

    def rows(self):
        return list(zip(self.t.tolist(), self.residual.tolist(), self.coherent.tolist()))


def sinc_envelope(t, detuning: float):
    """t^2 sinc^2(detuning t / 2) = 4 sin^2(detuning t / 2) / detuning^2."""
    t = np.asarray(t, dtype=float)
    return t**2 * np.sinc(detuning * t / (2 * np.pi)) ** 2


def off_resonance_scan(spec: DiscreteBath, qp: QubitParams, t_grid, rotating_wave: bool = False) -> OffResonanceScan:
    """Residual decoherence and coherent action on a time grid, plus a sinc^2 envelope fit.

    The fitted model is A * t^2 sinc^2(dw t / 2) with dw the smallest detuning;
    ``envelope_error`` is max |residual - model| / max(model).
    """
    _require_discrete(spec)
    dw = smallest_detuning(spec, qp.omega0)
    if dw == 0:
        raise DomainError("resonant line present; off-resonance scan needs every line detuned")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(t < 0):
        raise DomainError("t grid must be a non-empty list of non-negative times")
    res = np.array([np.linalg.norm(dissipator_matrix(spec, qp, x, rotating_wave), 2) for x in t])
    coh = np.array([coherent_norm(spec, qp, x) for x in t])
    model = sinc_envelope(t, dw)
    denom = float(model @ model)
    amp = float(res @ model / denom) if denom > 0 else 0.0
    peak = amp * model.max()
    err = float(np.abs(res - amp * model).max() / peak) if peak > 0 else float("inf")
    return OffResonanceScan(t, res, coh, dw, amp, err)
