"""Finite-blocklength achievability bounds for discrete memoryless channels.

Everything is measured in bits (log base 2).
"""

from .bounds import (
    BoundInputs,
    BoundValue,
    CodeParameters,
    NegativeRateWarning,
    conditional_error_bound,
    delta_schedule,
    ensemble_error_bound,
    evaluate_ensemble_bound,
    normal_approx_error,
    normal_approx_rate,
    normal_approx_rate_asymptotic,
    pairwise_markov_bound,
    qfunc,
    qfunc_inv,
)
from .channel import (
    Channel,
    InputDistribution,
    OutputDistribution,
    bec,
    bsc,
    identity,
    make_channel,
    output_distribution,
    vector_log_likelihood,
    z_channel,
)
from .measures import (
    CapacityResult,
    ChannelStatistics,
    capacity,
    channel_statistics,
    dispersion,
    information_density,
    mutual_information,
)

__version__ = "0.1.0"
