"""Environment-mediated two-qubit gates: effective generators, kernels and oracles."""

from __future__ import annotations

__version__ = "0.1.0"

from .dynamics import (
    FigureOfMerit,
    StateMetrics,
    concurrence,
    concurrence_at,
    figure_of_merit,
    propagate,
    purity,
    state_metrics,
    trace_distance,
)
from .env_model import (
    DiscreteBath,
    FDTReport,
    OhmicBath,
    absorptive_part,
    bose_occupation,
    correlation_function,
    eval_spectrum,
    fdt_report,
    kms_residual,
    susceptibility,
)
from .errors import DomainError, InvariantViolation, QuadratureError
from .generator_continuous import (
    DispersionReport,
    EffectiveGenerator,
    QubitParams,
    RateMatrices,
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
from .generator_discrete import (
    DiscreteGeneratorSnapshot,
    OffResonanceScan,
    delta_rho2_discrete,
    dissipator_matrix,
    off_resonance_scan,
    residual_decoherence,
    snapshot,
)
from .kernels import KernelValue, eval_phi, eval_psi, gate_zero_times, kernel_value
from .oracle import (
    ConvergenceTable,
    Mode,
    OracleModel,
    convergence_compare,
    exact_reduced_evolution,
    perturbative_direct,
)
from .quadrature import principal_value_integral

__all__ = [name for name in dir() if not name.startswith("_")]
