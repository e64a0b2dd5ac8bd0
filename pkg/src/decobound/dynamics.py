"""State propagation, entanglement measures and the gate figure of merit."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, InvariantViolation
from .generator_continuous import EffectiveGenerator, assemble_liouvillian

_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def check_state(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"two-qubit state must be 4x4, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise DomainError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -atol:
        raise DomainError("density matrix has a negative eigenvalue")
    return rho


def propagate(liouvillian: np.ndarray, rho0: np.ndarray, t_grid) -> list[np.ndarray]:
    """rho(t) = unvec(exp(L t) vec(rho0)) on an ascending grid starting at 0."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0 or np.any(np.diff(t) < 0):
        raise DomainError("t grid must be ascending and start at 0")
    rho0 = check_state(rho0)
    v0 = rho0.reshape(-1)
    out = []
    for x in t:
        rho = (expm(liouvillian * x) @ v0).reshape(4, 4)
        if abs(np.trace(rho) - 1) > 1e-10 or np.abs(rho - rho.conj().T).max() > 1e-10:
            raise InvariantViolation(f"propagated state lost trace or Hermiticity at t = {x}")
        out.append(rho)
    return out


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4)."""
    rho = 0.5 * (rho + rho.conj().T)
    tilde = _SYSY @ rho.conj() @ _SYSY
    r = _psd_sqrt(rho)
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(r @ tilde @ r), 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1:].sum()))


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    d = rho - sigma
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


@dataclass(frozen=True)
class StateMetrics:
    concurrence: float
    purity: float
    trace_distance: float | None = None


def state_metrics(rho: np.ndarray, ref: np.ndarray | None = None) -> StateMetrics:
    rho = check_state(rho)
    dist = None if ref is None else trace_distance(rho, np.asarray(ref, dtype=complex))
    return StateMetrics(concurrence(rho), purity(rho), dist)


@dataclass(frozen=True)
class FigureOfMerit:
    t_gate: float
    t_dec: float
    q: float


def figure_of_merit(gen: EffectiveGenerator, decoherence: str = "total") -> FigureOfMerit:
    """Ratio of decoherence time to entangling-gate time.

    t_gate = pi / (4 |h_AB|), with h_AB the flip-flop element of H_eff: the
    time for |01> to become maximally entangled. t_dec is 1/(sum of channel
    rates) by default, or 1/(largest channel rate) with decoherence="fastest".
    """
    h = abs(gen.flip_flop)
    scale = float(np.abs(gen.h_eff).max())
    if h == 0 or h <= 1e-14 * scale:
        raise DomainError("no environment-mediated coupling")
    t_gate = math.pi / (4 * h)
    if decoherence == "total":
        rate = gen.total_rate
    elif decoherence == "fastest":
        rate = max((float(np.trace(L.conj().T @ L).real / 2) for L in gen.lindblads), default=0.0)
    else:
        raise DomainError(f"unknown decoherence-time definition {decoherence!r}")
    if rate <= 0:
        warnings.warn("coherent coupling without decoherence: the figure-of-merit bound premise fails", RuntimeWarning)
        return FigureOfMerit(t_gate, math.inf, math.inf)
    t_dec = 1.0 / rate
    return FigureOfMerit(t_gate, t_dec, t_dec / t_gate)


def concurrence_at(gen: EffectiveGenerator, rho0: np.ndarray, t: float, coherent_only: bool = False) -> float:
    if coherent_only:
        gen = EffectiveGenerator(gen.h_eff)
    rho = propagate(assemble_liouvillian(gen), rho0, [0.0, t])[-1]
    return concurrence(rho)
