"""Reference engines used to check the generators.

* Exact unitary evolution of the two qubits plus truncated bosonic modes,
  O_a = sum_n g_{a,n} (a_n + a_n^dag), followed by a partial trace.
* Direct two-dimensional quadrature of the general second-order expression,
  which only needs the correlation function C_ab(t).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .env_model import DiscreteBath, bose_occupation, check_beta
from .errors import DomainError, QuadratureError
from .generator_continuous import QubitParams
from .operators import qubit_hamiltonian, sigma_x, to_interaction_frame

MAX_DIM = 4096
TAIL_TOL = 1e-8
FOCK_HEADROOM = 2


def thermal_tail(beta: float, Omega: float, dim: int) -> float:
    """Thermal weight outside the lowest ``dim`` Fock states."""
    if math.isinf(beta):
        return 0.0
    return math.exp(-beta * Omega * dim)


def auto_fock_dim(beta: float, Omega: float) -> int:
    """Smallest d with thermal tail below TAIL_TOL, plus headroom for driven excitation."""
    if math.isinf(beta):
        d = 1
    else:
        d = max(1, math.ceil(-math.log(TAIL_TOL) / (beta * Omega)))
        while thermal_tail(beta, Omega, d) >= TAIL_TOL:
            d += 1
    return max(2, d + FOCK_HEADROOM)


@dataclass(frozen=True)
class Mode:
    Omega: float
    g_A: float
    g_B: float
    fock_dim: int | None = None
    # coherent displacement of the initial mode state; nonzero values make <O> != 0
    displacement: complex = 0.0


@dataclass(frozen=True)
class OracleModel:
    qp: QubitParams
    modes: tuple = field(default_factory=tuple)
    beta: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "beta", check_beta(self.beta))
        modes = []
        for m in self.modes:
            if not isinstance(m, Mode):
                m = Mode(**m) if isinstance(m, dict) else Mode(*m)
            if not m.Omega > 0:
                raise DomainError("mode frequencies must be positive")
            dim = m.fock_dim or auto_fock_dim(self.beta, m.Omega)
            if dim < 2:
                raise DomainError("fock_dim must be >= 2")
            tail = thermal_tail(self.beta, m.Omega, dim)
            if tail >= TAIL_TOL:
                need = auto_fock_dim(self.beta, m.Omega) - FOCK_HEADROOM
                raise DomainError(f"fock_dim={dim} leaves thermal tail {tail:.2e}; need fock_dim >= {need}")
            modes.append(replace(m, fock_dim=dim))
        object.__setattr__(self, "modes", tuple(modes))
        if self.dim > MAX_DIM:
            raise DomainError(f"total Hilbert dimension {self.dim} exceeds cap {MAX_DIM}")

    @property
    def env_dim(self) -> int:
        return int(np.prod([m.fock_dim for m in self.modes])) if self.modes else 1

    @property
    def dim(self) -> int:
        return 4 * self.env_dim

    def with_coupling(self, lam: float) -> "OracleModel":
        return replace(self, qp=QubitParams(self.qp.omega0, lam))

    def to_bath_spec(self) -> DiscreteBath:
        """Discrete spectrum with the same (untruncated) correlation functions.

        A mode contributes 2 pi g g^T (n + 1) at +Omega and 2 pi g g^T n at -Omega.
        """
        weights: dict[float, np.ndarray] = {}
        for m in self.modes:
            g = np.array([m.g_A, m.g_B], dtype=float)
            gg = np.outer(g, g)
            n = 0.0 if math.isinf(self.beta) else bose_occupation(self.beta, m.Omega)
            for Om, w in ((m.Omega, n + 1.0), (-m.Omega, n)):
                if w > 0:
                    weights[Om] = weights.get(Om, 0) + 2 * np.pi * w * gg
        return DiscreteBath(tuple(weights.items()), self.beta)

    # -- environment operators on the truncated Fock space -----------------

    def _mode_ops(self, k: int):
        dims = [m.fock_dim for m in self.modes]
        d = dims[k]
        a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
        left = np.eye(int(np.prod(dims[:k])))
        right = np.eye(int(np.prod(dims[k + 1 :])))
        return np.kron(np.kron(left, a), right)

    @cached_property
    def _env_operators(self):
        dE = self.env_dim
        H_E = np.zeros((dE, dE), dtype=complex)
        O = [np.zeros((dE, dE), dtype=complex), np.zeros((dE, dE), dtype=complex)]
        for k, m in enumerate(self.modes):
            a = self._mode_ops(k)
            H_E += m.Omega * a.conj().T @ a
            x = a + a.conj().T
            O[0] += m.g_A * x
            O[1] += m.g_B * x
        return H_E, O

    @cached_property
    def env_state(self) -> np.ndarray:
        """Initial environment state: product of (displaced) truncated thermal states."""
        rho = np.ones((1, 1), dtype=complex)
        for m in self.modes:
            d = m.fock_dim
            n = np.arange(d)
            p = np.zeros(d)
            p[0] = 1.0
            if not math.isinf(self.beta):
                p = np.exp(-self.beta * m.Omega * n)
            p /= p.sum()
            r = np.diag(p).astype(complex)
            if m.displacement != 0:
                from scipy.linalg import expm

                a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
                D = expm(m.displacement * a.conj().T - np.conj(m.displacement) * a)
                r = D @ r @ D.conj().T
            rho = np.kron(rho, r)
        return rho

    def hamiltonian(self) -> np.ndarray:
        H_E, O = self._env_operators
        dE = self.env_dim
        H = np.kron(qubit_hamiltonian(self.qp.omega0), np.eye(dE)) + np.kron(np.eye(4), H_E)
        for a in range(2):
            H = H + self.qp.lam * np.kron(sigma_x(a), O[a])
        return H


def first_order_check(model: OracleModel) -> float:
    """|<O_A>| + |<O_B>| in the initial environment state."""
    _, O = model._env_operators
    rho = model.env_state
    return float(sum(abs(np.trace(rho @ Oa)) for Oa in O))


def partial_trace_env(rho: np.ndarray, env_dim: int) -> np.ndarray:
    r = rho.reshape(4, env_dim, 4, env_dim)
    return np.einsum("ikjk->ij", r)


class ExactPropagator:
    """Eigendecomposition of the full Hamiltonian, reused across times."""

    def __init__(self, model: OracleModel):
        if first_order_check(model) > 1e-12:
            raise DomainError("environment has <O> != 0; the first-order term is not removable")
        self.model = model
        self.energies, self.vectors = np.linalg.eigh(model.hamiltonian())

    def evolve(self, rho0: np.ndarray, t: float) -> np.ndarray:
        m = self.model
        rho_tot = np.kron(np.asarray(rho0, dtype=complex), m.env_state)
        V = self.vectors
        phase = np.exp(-1j * self.energies * t)
        U = (V * phase) @ V.conj().T
        rho_t = U @ rho_tot @ U.conj().T
        red = partial_trace_env(rho_t, m.env_dim)
        return to_interaction_frame(red, m.qp.omega0, t)


def exact_reduced_evolution(model: OracleModel, rho0: np.ndarray, t: float) -> np.ndarray:
    """Interaction-picture reduced two-qubit state at time t."""
    return ExactPropagator(model).evolve(rho0, t)


# -- direct quadrature of the general second-order expression -------------


def _gl_unit(panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    xs = np.concatenate([0.5 * (lo + hi) + 0.5 * (hi - lo) * x for lo, hi in zip(edges[:-1], edges[1:])])
    ws = np.concatenate([0.5 * (hi - lo) * w for lo, hi in zip(edges[:-1], edges[1:])])
    return xs, ws


def _interaction_sigma_x(omega0: float, t: np.ndarray) -> list[np.ndarray]:
    h = np.diag(qubit_hamiltonian(omega0)).real
    gap = h[:, None] - h[None, :]
    ph = np.exp(1j * gap[None, :, :] * t[:, None, None])
    return [ph * sigma_x(a)[None] for a in range(2)]


def _second_order_integrand_sums(corr, omega0, rho0, t, panels, order):
    x, w = _gl_unit(panels, order)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    W12 = np.outer(w, w).ravel()
    # square term: t' = t x1, t'' = t x2
    t1 = t * X1.ravel()
    t2 = t * X2.ravel()
    V1 = _interaction_sigma_x(omega0, t1)
    V2 = _interaction_sigma_x(omega0, t2)
    C = np.asarray(corr(t2 - t1))
    square = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        Va_rho = V1[a] @ rho0
        for b in range(2):
            coef = C[:, b, a] * W12
            square += np.einsum("n,nij,njk->ik", coef, Va_rho, V2[b])
    square *= t * t
    # ordered term: t' = t x1, t'' = t' + (t - t') x2
    tp = t * X1.ravel()
    tpp = tp + (t - tp) * X2.ravel()
    jac = t * (t - tp) * W12
    Vp = _interaction_sigma_x(omega0, tp)
    Vpp = _interaction_sigma_x(omega0, tpp)
    C = np.asarray(corr(tpp - tp))
    ordered = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            coef = C[:, a, b] * jac
            ordered += np.einsum("n,nij,njk->ik", coef, Vpp[a], Vp[b])
    ordered = ordered @ rho0
    return square - ordered - ordered.conj().T


def perturbative_direct(corr, qp: QubitParams, rho0: np.ndarray, t: float, tol: float = 1e-9, max_order: int = 96):
    """Second-order change of the interaction-picture state by 2-D quadrature.

    ``corr`` maps an array of time differences to C_ab, shape (..., 2, 2).
    Composite Gauss-Legendre rules are refined in order until two successive
    results agree to ``tol`` (absolute, on the lam^2-scaled result).
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return np.zeros((4, 4), dtype=complex)
    panels = max(1, math.ceil(t / 2.0))
    lam2 = qp.lam**2
    prev = None
    order = 8
    while order <= max_order:
        cur = lam2 * _second_order_integrand_sums(corr, qp.omega0, rho0, t, panels, order)
        if prev is not None:
            err = float(np.abs(cur - prev).max())
            if err < tol:
                return cur
        prev = cur
        order += 8
    raise QuadratureError("2-D quadrature of the second-order term did not converge", achieved=err)


@dataclass(frozen=True)
class ConvergenceTable:
    t: float
    rows: tuple  # (lam, error, ||delta_rho2||)
    slope: float


def convergence_compare(model: OracleModel, rho0: np.ndarray, t: float, lambdas) -> ConvergenceTable:
    """||exact - (rho0 + delta_rho2)|| (spectral norm) for several couplings, with the log-log slope."""
    from .generator_discrete import delta_rho2_discrete

    lambdas = [float(x) for x in lambdas]
    if len(lambdas) < 3:
        raise DomainError("need at least three coupling values")
    spec = model.to_bath_spec()
    rho0 = np.asarray(rho0, dtype=complex)
    rows = []
    for lam in lambdas:
        m = model.with_coupling(lam)
        d2 = delta_rho2_discrete(spec, m.qp, rho0, t)
        if lam == 0:
            rows.append((lam, 0.0, 0.0))
            continue
        exact = exact_reduced_evolution(m, rho0, t)
        err = float(np.linalg.norm(exact - rho0 - d2, 2))
        rows.append((lam, err, float(np.linalg.norm(d2, 2))))
    pts = [(lam, err) for lam, err, _ in rows if lam > 0 and err > 0]
    if len(pts) >= 2:
        x = np.log([p[0] for p in pts])
        y = np.log([p[1] for p in pts])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = float("nan")
    big = [lam for lam, _, n in rows if n >= 0.1]
    if big:
        warnings.warn(f"perturbative regime violated (||delta rho|| >= 0.1) at lam = {big}", RuntimeWarning)
    if not 2.7 <= slope <= 3.3:
        warnings.warn(f"error slope {slope:.3f} outside the cubic window [2.7, 3.3]", RuntimeWarning)
    return ConvergenceTable(t=float(t), rows=tuple(rows), slope=slope)
