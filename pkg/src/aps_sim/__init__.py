"""Statevector simulation of approximate phase search.

Non-binary controlled phase oracles, local and global diffusion over a
work + ancilla register, and lambda sweeps that locate eigenvalues of
diagonal cost Hamiltonians as peaks of the output KL divergence.
"""

from .engine import (
    RunConfig,
    RunResult,
    Schedule,
    default_config,
    default_schedule,
    grover_success_probability,
    preprocessing_amplitude_check,
    run_aps,
    run_grover_baseline,
    search_main_reps,
)
from .eigenscan import SweepConfig, SweepResult, degeneracy, find_peaks, iteration_candidates, scan_lambda
from .metrics import Histogram, kld, kld_vs_uniform
from .oracles import (
    DiagonalHamiltonian,
    Graph,
    SubsetSumInstance,
    build_phase_table,
    hamiltonian_phase_map,
    linear_phase_map,
    maxcut_cost,
    subset_sum_cost,
    subset_sum_hamiltonian,
    triangular_phase_map,
)
from .state import (
    PhaseTable,
    RegisterLayout,
    StateVector,
    apply_controlled_phase_oracle,
    apply_global_diffusion,
    apply_local_diffusion,
    apply_phase_oracle,
    init_uniform,
    marginal_work_distribution,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "DiagonalHamiltonian",
    "Graph",
    "Histogram",
    "PhaseTable",
    "RegisterLayout",
    "RunConfig",
    "RunResult",
    "Schedule",
    "StateVector",
    "SubsetSumInstance",
    "SweepConfig",
    "SweepResult",
    "apply_controlled_phase_oracle",
    "apply_global_diffusion",
    "apply_local_diffusion",
    "apply_phase_oracle",
    "build_phase_table",
    "default_config",
    "default_schedule",
    "degeneracy",
    "find_peaks",
    "grover_success_probability",
    "hamiltonian_phase_map",
    "init_uniform",
    "iteration_candidates",
    "kld",
    "kld_vs_uniform",
    "linear_phase_map",
    "marginal_work_distribution",
    "maxcut_cost",
    "preprocessing_amplitude_check",
    "run_aps",
    "run_grover_baseline",
    "sample",
    "scan_lambda",
    "search_main_reps",
    "subset_sum_cost",
    "subset_sum_hamiltonian",
    "triangular_phase_map",
]
