"""Empirical and exact checks of the random-coding bounds."""

from .density import (
    LlnReport,
    LlnRow,
    density_gaussian_check,
    density_tail_probability,
    lln_experiment,
    sample_densities,
)
from .ensemble import (
    Codebook,
    EnsembleRun,
    SimulationReport,
    TiePolicy,
    estimate_error,
    ml_decode,
    sample_codebook,
    simulate,
    transmit,
    wilson_interval,
)
from .exact import (
    EnsembleTable,
    enumerate_ensemble,
    error_given_pair,
    exact_ensemble_error,
    union_bound_average,
)
