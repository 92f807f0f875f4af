"""Information density, mutual information, dispersion and capacity (bits).

Sign convention: the information density i(x;y) = log2 P(y|x)/P_Y(y) has
mean n*I over the i.i.d. ensemble. The log-ratio log2 P_Y/P(y|x) that shows
up when bounding the pairwise error is just -i, with mean -I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    Channel,
    InputDistribution,
    LevelTable,
    check_pair,
    output_distribution,
)
from .errors import InvalidParameterError, NonConvergenceError, UndefinedDensityError


@dataclass(frozen=True)
class ChannelStatistics:
    mutual_information: float  # bits per use
    dispersion: float  # bits^2 per use
    entropy_output: float  # bits


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    optimal_input: InputDistribution
    iterations: int
    final_gap: float


def density_table(ch: Channel, px: InputDistribution) -> np.ndarray:
    """Single-letter density log2 P(y|x)/P_Y(y).

    Entries are -inf for structural zeros and nan in columns where P_Y(y) = 0.
    """
    py = output_distribution(ch, px).probs
    with np.errstate(divide="ignore", invalid="ignore"):
        d = ch.log_transition - np.log2(py)[None, :]
    d[:, py == 0] = np.nan
    return d


def density_levels(ch: Channel, px: InputDistribution) -> LevelTable:
    d = density_table(ch, px)
    return LevelTable(np.where(np.isnan(d), -np.inf, d))


def information_density(ch: Channel, px: InputDistribution, x, y) -> float:
    """i(x;y) in bits, summed over positions; may be -inf."""
    x, y = check_pair(ch, x, y)
    d = density_table(ch, px)
    if np.any(np.isnan(d[0, y])):
        bad = int(y[np.isnan(d[0, y])][0])
        raise UndefinedDensityError(f"output symbol {bad} has P_Y = 0")
    return float(LevelTable(np.where(np.isnan(d), -np.inf, d)).total(x, y))


def _joint_support(ch, px):
    joint = px.probs[:, None] * ch.transition
    support = joint > 0
    return joint[support], density_table(ch, px)[support]


def mutual_information(ch: Channel, px: InputDistribution) -> float:
    """I(X;Y) = E[i(X;Y)] with the 0 log 0 = 0 convention."""
    w, d = _joint_support(ch, px)
    return float(np.dot(w, d))


def dispersion(ch: Channel, px: InputDistribution) -> float:
    """Variance of the single-letter density under P_X P(y|x), two-pass form."""
    w, d = _joint_support(ch, px)
    mean = np.dot(w, d)
    return float(np.dot(w, (d - mean) ** 2))


def output_entropy(ch: Channel, px: InputDistribution) -> float:
    py = output_distribution(ch, px).probs
    py = py[py > 0]
    return float(-np.dot(py, np.log2(py)))


def channel_statistics(ch: Channel, px: InputDistribution) -> ChannelStatistics:
    return ChannelStatistics(
        mutual_information=mutual_information(ch, px),
        dispersion=dispersion(ch, px),
        entropy_output=output_entropy(ch, px),
    )


def _divergences(w, logw, p):
    """D(W(.|x) || P_Y) for every input x, in bits."""
    py = p @ w
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * (logw - np.log2(py)[None, :]), 0.0)
    return terms.sum(axis=1)


def capacity(ch: Channel, tol: float = 1e-9, max_iter: int = 10000) -> CapacityResult:
    """Blahut-Arimoto iteration from the uniform input.

    Stops once ``max_x D(W(.|x)||P_Y) - I(P_X)`` falls to ``tol``; that gap
    bounds how far the returned rate is below capacity.
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    if max_iter < 1:
        raise InvalidParameterError("max_iter must be at least 1")
    w, logw = ch.transition, ch.log_transition
    p = np.full(ch.input_size, 1.0 / ch.input_size)
    result = None
    for it in range(1, max_iter + 1):
        div = _divergences(w, logw, p)
        rate = float(np.dot(p, div))
        top = float(div.max())
        gap = max(top - rate, 0.0)
        result = CapacityResult(
            capacity=max(rate, 0.0),
            optimal_input=InputDistribution(p),
            iterations=it,
            final_gap=gap,
        )
        if gap <= tol:
            return result
        p = p * np.exp2(div - top)
        p = p / p.sum()
    raise NonConvergenceError(
        f"Blahut-Arimoto gap {result.final_gap:.3g} > tol {tol:g} after {max_iter} iterations",
        result=result,
    )
