"""Discrete-time quantum walks on the line with an arbitrary U(2) coin."""

from .analysis import (
    CheckResult,
    Distribution,
    GProfile,
    InvalidSpecError,
    SweepResult,
    TheoremReport,
    check_corollary2,
    check_drift_nonzero,
    check_lemma1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    distribution,
    extract_G,
    fit_sinusoid,
    mean_position,
    sweep_mean_position,
)
from .coins import CoinParams, InvalidParameterError, check_unitary, hadamard_params, make_coin, su2_part
from .spectral import DegenerateModeError, SpectralMode, eigensystem, momentum_matrix, propagate_fourier
from .walk import InitialSpec, InvalidCoinError, WalkState, evolve, evolve_many, initial_state, step

__version__ = "0.1.0"
