"""Two-qubit operator algebra in the fixed basis |00>, |01>, |10>, |11>.

Qubit A is the left tensor factor. |0> is the sigma_z = +1 state, which is
the ground state of -(omega0/2) sigma_z, so ``sigma_plus = |0><1|`` lowers
the qubit energy by omega0.
"""

from __future__ import annotations

import numpy as np

SITES = ("A", "B")
SIGNS = (+1, -1)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SP = np.array([[0, 1], [0, 0]], dtype=complex)
SM = np.array([[0, 0], [1, 0]], dtype=complex)


def _site_index(site) -> int:
    if site in (0, "A", "a"):
        return 0
    if site in (1, "B", "b"):
        return 1
    raise ValueError(f"unknown qubit site {site!r}")


def embed(op: np.ndarray, site) -> np.ndarray:
    """Lift a single-qubit operator onto the two-qubit space."""
    if _site_index(site) == 0:
        return np.kron(op, I2)
    return np.kron(I2, op)


def sigma(site, s: int) -> np.ndarray:
    """sigma_+ (s=+1) or sigma_- (s=-1) acting on one qubit."""
    if s == +1:
        return embed(SP, site)
    if s == -1:
        return embed(SM, site)
    raise ValueError(f"sign must be +1 or -1, got {s!r}")


def sigma_x(site) -> np.ndarray:
    return embed(SX, site)


def sigma_z(site) -> np.ndarray:
    return embed(SZ, site)


def qubit_hamiltonian(omega0: float) -> np.ndarray:
    """-(omega0/2)(sigma_z^A + sigma_z^B)."""
    return -0.5 * omega0 * (sigma_z(0) + sigma_z(1))


def ket(label: str) -> np.ndarray:
    """Computational basis ket from a bit string such as ``"01"``."""
    v = np.zeros(4, dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


SINGLET = (ket("01") - ket("10")) / np.sqrt(2)
TRIPLET0 = (ket("01") + ket("10")) / np.sqrt(2)


def to_lab_frame(rho: np.ndarray, omega0: float, t: float) -> np.ndarray:
    """Undo the rotating frame: e^{-i H_AB t} rho e^{+i H_AB t}."""
    phases = np.exp(-1j * np.diag(qubit_hamiltonian(omega0)).real * t)
    return phases[:, None] * rho * phases.conj()[None, :]


def to_interaction_frame(rho: np.ndarray, omega0: float, t: float) -> np.ndarray:
    phases = np.exp(1j * np.diag(qubit_hamiltonian(omega0)).real * t)
    return phases[:, None] * rho * phases.conj()[None, :]
