"""Closed-form achievability bounds and the normal approximation.

Rates are in bits per channel use and every power below is a power of 2.
The normal-approximation functions evaluate the Gaussian substitution for
the normalised information density literally; they are approximations, not
rigorous bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .channel import Channel, InputDistribution
from .errors import (
    DomainError,
    InfeasibleSlackError,
    InfiniteBoundError,
    InvalidParameterError,
)
from .measures import ChannelStatistics, information_density

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


class NegativeRateWarning(UserWarning):
    """The extracted rate is negative: the target error is out of reach at this n."""


# Gaussian tail

def qfunc(z):
    """Standard Gaussian upper tail Q(z) = P(N(0,1) > z)."""
    out = 0.5 * special.erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def _log_q(z):
    return float(special.log_ndtr(-z))


def qfunc_inv(p: float) -> float:
    """Inverse of :func:`qfunc` on (0, 1).

    Brackets the root, bisects to a coarse estimate and finishes with Newton
    steps on log Q, so tail probabilities keep full relative precision.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"qfunc_inv needs p in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1)
        return -qfunc_inv(1.0 - p)

    target = math.log(p)
    lo, hi = 0.0, 1.0
    while _log_q(hi) > target:
        lo, hi = hi, 2.0 * hi
    for _ in range(6):
        mid = 0.5 * (lo + hi)
        if _log_q(mid) > target:
            lo = mid
        else:
            hi = mid

    z = 0.5 * (lo + hi)
    for _ in range(100):
        lq = _log_q(z)
        f = lq - target
        if f > 0:
            lo = z
        else:
            hi = z
        # d/dz log Q(z) = -phi(z) / Q(z)
        slope = -math.exp(-0.5 * z * z - _LOG_SQRT_2PI - lq)
        z_new = z - f / slope
        if not lo <= z_new <= hi:
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 4 * np.finfo(float).eps * max(1.0, abs(z)):
            z = z_new
            break
        z = z_new
    # residual check in p-space
    if abs(math.expm1(_log_q(z) - target)) > 1e-12:
        raise DomainError(f"qfunc_inv failed to converge for p={p!r}")
    return z


# Code parameters

def _codebook_size(n, rate):
    e = n * rate
    if e >= 1000:
        # beyond double range: mantissa * 2^k as an exact Python int
        k = math.floor(e)
        return int(2.0 ** (e - k) * 2.0**52) << (k - 52)
    x = 2.0**e
    r = round(x)
    # guard against 2^(n log2(M) / n) landing one ulp above an integer
    if abs(x - r) <= 1e-9 * x:
        return int(r)
    return int(math.ceil(x))


@dataclass(frozen=True)
class CodeParameters:
    """Blocklength n, rate R in bits/use, and M = ceil(2^(nR)) codewords."""

    blocklength: int
    rate: float
    num_codewords: int = field(default=None)

    def __post_init__(self):
        n, r = self.blocklength, self.rate
        if int(n) != n or n < 1:
            raise InvalidParameterError(f"blocklength must be a positive integer, got {n!r}")
        object.__setattr__(self, "blocklength", int(n))
        if not (math.isfinite(r) and r >= 0):
            raise InvalidParameterError(f"rate must be finite and >= 0, got {r!r}")
        if self.num_codewords is None:
            object.__setattr__(self, "num_codewords", _codebook_size(int(n), r))
        if self.num_codewords < 2:
            raise InvalidParameterError(
                f"rate {r!r} at blocklength {n} gives M = {self.num_codewords} < 2 codewords"
            )

    @classmethod
    def from_codewords(cls, blocklength: int, num_codewords: int) -> "CodeParameters":
        return cls(blocklength, math.log2(num_codewords) / blocklength, int(num_codewords))


@dataclass(frozen=True)
class BoundInputs:
    stats: ChannelStatistics
    delta: float
    epsilon: float

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidParameterError(f"delta must be positive, got {self.delta!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParameterError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")


@dataclass(frozen=True)
class BoundValue:
    """A probability bound together with its unclipped exponent.

    ``exponent`` is the log2 of the exponential term, ``raw`` the bound
    before clipping to [0, 1]. ``clipped`` means the bound is vacuous.
    """

    value: float
    raw: float
    exponent: float
    clipped: bool


# Bounds

def pairwise_markov_bound(ch: Channel, px: InputDistribution, x, y) -> float:
    """P_Y(y) / P(y|x) = 2^-i(x;y); bounds the chance that an independent
    ensemble codeword scores at least as well as ``x``. Not clipped."""
    i = information_density(ch, px, x, y)
    if i == -math.inf:
        raise InfiniteBoundError("P(y|x) = 0: the conditioning event is impossible")
    return 2.0 ** (-i)


def conditional_error_exponent(params: CodeParameters, info_density: float) -> float:
    return params.blocklength * params.rate - info_density


def conditional_error_bound(params: CodeParameters, info_density: float) -> float:
    """Union bound min(1, 2^(nR) 2^-i) on the error given the transmitted pair."""
    if math.isnan(info_density):
        raise InvalidParameterError("information density is nan")
    e = conditional_error_exponent(params, info_density)
    if e >= 0:
        return 1.0
    return 2.0 ** e


def evaluate_ensemble_bound(params: CodeParameters, inputs: BoundInputs) -> BoundValue:
    n, r = params.blocklength, params.rate
    exponent = -n * (inputs.stats.mutual_information - inputs.delta - r)
    raw = inputs.epsilon + 2.0 ** exponent if exponent < 1024 else math.inf
    return BoundValue(value=min(raw, 1.0), raw=raw, exponent=exponent, clipped=raw >= 1.0)


def ensemble_error_bound(params: CodeParameters, inputs: BoundInputs) -> float:
    """epsilon + 2^(-n(I - delta - R)), clipped to 1.

    ``epsilon`` is the probability that i/n falls below I - delta.
    """
    return evaluate_ensemble_bound(params, inputs).value


def normal_approx_error(params: CodeParameters, inputs: BoundInputs) -> float:
    """Q((I - delta - R) / sqrt(V/n)) + 2^(-n delta), clipped to 1.

    This is the Gaussian substitution into the ensemble bound. It is an
    approximation and not itself an upper bound on the error probability.
    """
    n, r = params.blocklength, params.rate
    i, v, d = inputs.stats.mutual_information, inputs.stats.dispersion, inputs.delta
    slack = 2.0 ** (-n * d)
    if v <= 0:
        return slack if r + d < i else 1.0
    return min(1.0, qfunc((i - d - r) / math.sqrt(v / n)) + slack)


def normal_approx_rate(n: int, epsilon: float, stats: ChannelStatistics, delta: float) -> float:
    """R = I - delta - sqrt(V/n) Qinv(epsilon - 2^(-n delta)).

    Negative rates are returned unchanged with a :class:`NegativeRateWarning`.
    """
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta!r}")
    target = epsilon - 2.0 ** (-n * delta)
    if not 0.0 < target < 1.0:
        raise InfeasibleSlackError(
            f"epsilon - 2^(-n delta) = {target:.6g} is outside (0, 1) "
            f"(n={n}, epsilon={epsilon:g}, delta={delta:g})"
        )
    rate = stats.mutual_information - delta
    if stats.dispersion > 0:
        rate -= math.sqrt(stats.dispersion / n) * qfunc_inv(target)
    if rate < 0:
        warnings.warn(f"normal approximation rate {rate:.6g} < 0", NegativeRateWarning, stacklevel=2)
    return rate


def normal_approx_rate_asymptotic(n: int, epsilon: float, stats: ChannelStatistics) -> float:
    """R = I - sqrt(V/n) Qinv(epsilon)."""
    rate = stats.mutual_information
    if stats.dispersion > 0:
        rate -= math.sqrt(stats.dispersion / n) * qfunc_inv(epsilon)
    elif not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return rate


def delta_schedule(n: int, power: float = 0.75) -> float:
    """Default slack n^-power.

    ``power`` must lie strictly between 1/2 and 1 so that n*delta grows while
    sqrt(n)*delta vanishes.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if not 0.5 < power < 1.0:
        raise InvalidParameterError("power must lie in (0.5, 1)")
    return float(n) ** (-power)
