"""Noisy density-matrix VQE simulations of H2 with three error-mitigation
schemes: [[4,2,2]] encoding with post-selection, duplicate-circuit
(virtual distillation) estimation, and iterative Bayesian readout
unfolding."""

from .chem import (
    CoefficientTable,
    ObservableSum,
    assemble_energy,
    exact_ground_energy,
    hamiltonian,
    load_coefficients,
)
from .circuits import (
    MeasurementBasis,
    bare_ansatz,
    calibration_circuits,
    duplicate_ansatz,
    encoded_ansatz,
    pauli_exponential,
)
from .densesim import (
    Circuit,
    DensityMatrix,
    Gate,
    ShotHistogram,
    apply_unitary,
    derive_seed,
    init_state,
    pauli_expectation,
    probabilities,
    sample_shots,
)
from .mitigation import (
    PostSelectionReport,
    brem_unfold,
    duplicate_estimate,
    duplicate_oracle,
    estimate_response_matrix,
    expectation_from_histogram,
    qec_postselect,
)
from .noise import ExecutionMode, NoiseModel, apply_readout_error, depolarize, execute
from .vqe import EnergyRecord, ScanConfig, gate_error_sweep, min_over_theta, run_scan

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
