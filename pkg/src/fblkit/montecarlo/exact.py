"""Exact ensemble-average error probability for small instances.

Competitor codewords are independent of the transmitted pair and of each
other, so conditioned on (x, y) each one beats or ties the true codeword
with fixed probabilities computed by enumerating X^n once per output word.
No enumeration over whole codebooks is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..channel import Channel, InputDistribution
from ..errors import InstanceTooLargeError, InvalidParameterError
from ..measures import density_levels, density_table
from .ensemble import TiePolicy

MAX_PAIRS = 10**7
_ROW_BUDGET = 1 << 22


@dataclass(frozen=True, eq=False)
class EnsembleTable:
    """Per-pair quantities over all (x, y) in X^n x Y^n.

    Arrays are indexed ``[x_index, y_index]`` in lexicographic word order.
    ``greater``/``equal`` are the probabilities that one P_X-distributed
    competitor has likelihood strictly above / exactly equal to P(y|x).
    ``density`` is i(x;y), nan where P_Y(y) = 0.
    """

    n: int
    x_words: np.ndarray
    y_words: np.ndarray
    joint: np.ndarray
    greater: np.ndarray
    equal: np.ndarray
    density: np.ndarray

    @property
    def pairwise(self) -> np.ndarray:
        """Pr{P(y|X') >= P(y|x)}: the pairwise error event with ties as errors."""
        return self.greater + self.equal


def _words(k, n):
    return np.array(list(itertools.product(range(k), repeat=n)), dtype=np.intp).reshape(-1, n)


def enumerate_ensemble(ch: Channel, px: InputDistribution, n: int) -> EnsembleTable:
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    pairs = (ch.input_size ** n) * (ch.output_size ** n)
    if pairs > MAX_PAIRS:
        raise InstanceTooLargeError(f"{pairs} (x, y) pairs exceed the limit of {MAX_PAIRS}")
    xw = _words(ch.input_size, n)
    yw = _words(ch.output_size, n)
    pxn = np.prod(px.probs[xw], axis=1)
    lik = ch.likelihood_levels
    undefined = np.any(np.isnan(density_table(ch, px)[0][yw]), axis=1)
    dens_levels = density_levels(ch, px)

    nx, ny = xw.shape[0], yw.shape[0]
    joint = np.empty((nx, ny))
    greater = np.empty((nx, ny))
    equal = np.empty((nx, ny))
    density = np.empty((nx, ny))
    step = max(1, _ROW_BUDGET // (nx * n))
    for a in range(0, ny, step):
        ys = yw[a : a + step]
        metric = lik.total(xw[None, :, :], ys[:, None, :])  # (chunk, nx)
        density[:, a : a + step] = dens_levels.total(xw[:, None, :], ys[None, :, :])
        joint[:, a : a + step] = pxn[:, None] * np.exp2(metric.T)
        for j in range(ys.shape[0]):
            row = metric[j]
            levels, inverse = np.unique(row, return_inverse=True)
            mass = np.bincount(inverse, weights=pxn, minlength=levels.size)
            above = np.concatenate([np.cumsum(mass[::-1])[::-1][1:], [0.0]])
            greater[:, a + j] = above[inverse]
            equal[:, a + j] = mass[inverse]
    density[:, undefined] = np.nan
    return EnsembleTable(n, xw, yw, joint, greater, equal, density)


def error_given_pair(table: EnsembleTable, M: int, tie_policy=TiePolicy.TIES_ERROR) -> np.ndarray:
    """Ensemble error probability conditioned on each transmitted pair."""
    policy = TiePolicy(tie_policy)
    if M < 1:
        raise InvalidParameterError("M must be >= 1")
    if M == 1:
        return np.zeros_like(table.joint)
    others = M - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        if policy is TiePolicy.TIES_ERROR:
            q = np.clip(table.pairwise, 0.0, 1.0)
            return -np.expm1(others * np.log1p(-q))
        # success = (l+e)^N * E[1/(K+1)] with K ~ Bin(N, e/(l+e))
        s = np.clip(1.0 - table.greater, 0.0, 1.0)
        p = np.where(s > 0, np.clip(table.equal / s, 0.0, 1.0), 0.0)
        mean_inv = np.where(
            p > 0, -np.expm1((others + 1) * np.log1p(-p)) / ((others + 1) * p), 1.0
        )
        success = np.where(s > 0, np.power(s, others) * mean_inv, 0.0)
    return 1.0 - success


def exact_ensemble_error(
    ch: Channel, px: InputDistribution, n: int, M: int, tie_policy=TiePolicy.TIES_ERROR,
    table: EnsembleTable = None,
) -> float:
    """Exact average ML error over the i.i.d. random-coding ensemble.

    Raises InstanceTooLargeError beyond 10^7 (x, y) pairs.
    """
    if table is None:
        table = enumerate_ensemble(ch, px, n)
    cond = error_given_pair(table, M, tie_policy)
    support = table.joint > 0
    return float(np.sum(table.joint[support] * cond[support]))


def union_bound_average(table: EnsembleTable, multiplier: float) -> float:
    """E[min(1, multiplier * 2^-i(X;Y))] over the transmitted pair.

    ``multiplier = M - 1`` is the union over the actual competitors,
    ``multiplier = 2^(nR)`` the displayed bound.
    """
    support = table.joint > 0
    with np.errstate(over="ignore"):
        b = np.minimum(1.0, multiplier * np.exp2(-table.density[support]))
    return float(np.sum(table.joint[support] * b))
