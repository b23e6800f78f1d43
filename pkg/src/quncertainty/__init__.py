"""Entropic uncertainty with quantum memory for two-qubit states.

Builds Schmidt-form states, evaluates the quantum-memory uncertainty bound
and three estimators of its left-hand side, reconstructs states by
maximum-likelihood tomography, and simulates the uncertainty game.
"""

from ._backend import BACKEND
from .entropy import (
    conditional_entropy,
    fano_bound,
    h_r_given_b,
    h_r_given_rb,
    joint_distribution,
    von_neumann_entropy,
)
from .gamesim import (
    ExperimentConfig,
    bootstrap_errors,
    run_game,
    sweep_omega,
    sweep_tangle,
    sweep_tangle_fixed_angle,
    witness_threshold_scan,
)
from .optimize import closed_form_terms, minimize_state, optimal_bob_basis
from .qmath import hermitian_eig, partial_trace
from .states import (
    X_BASIS,
    Y_BASIS,
    Z_BASIS,
    MeasurementBasis,
    SchmidtParams,
    bell_state,
    linear_basis,
    schmidt_state,
    tangle,
)
from .tomography import mle_reconstruct, overcomplete_settings, simulate_counts
from .uncertainty import UncertaintyReport, evaluate_berta, robertson_check

__version__ = "0.1.0"
