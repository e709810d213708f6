"""Jaynes-Cummings inversion dynamics across CCR representations.

Closed-form atomic-inversion signals w(t) for irreducible, finite-N
reducible, and limiting representations of the canonical commutation
relations, a dense-matrix oracle that verifies the closed forms and the
algebraic identities behind them, and analysis tools (envelope,
spectra, least-squares fitting) for Rabi-oscillation data.
"""

from .analysis import EnvelopeReport, FitResult, Spectrum, envelope, fit, spectrum
from .dynamics import (
    IRREDUCIBLE,
    LIMIT_N_INF,
    REDUCIBLE_FINITE_N,
    InversionSignal,
    apply_damping,
    time_grid,
    w_coherent_limit,
    w_coherent_reducible,
    w_ground_state,
    w_thermal_limit,
    w_thermal_reducible,
    w_vacuum_irreducible,
    w_vacuum_limit,
    w_vacuum_reducible,
)
from .oracle import OracleModel, build_model, evolve_exact, run_all_checks
from .params import (
    ANGULAR,
    CYCLIC,
    INFINITE,
    FieldState,
    PhysicalParams,
    normalize,
    to_config,
)
from .weights import (
    WeightTable,
    binomial_weights,
    coherent_weights,
    gaussian_approx_weights,
    pairwise_sum,
    thermal_weights,
)

__version__ = "0.1.0"
