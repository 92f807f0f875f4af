"""Sampling experiments on the information density of i.i.d. pairs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from ..channel import Channel, InputDistribution
from ..errors import InstanceTooLargeError, InvalidParameterError, ZeroDispersionError
from ..measures import channel_statistics, density_levels, density_table
from . import _sampling as smp
from .philox import uniforms

MAX_COMPOSITIONS = 5 * 10**6


@dataclass(frozen=True)
class LlnRow:
    n: int
    prob: float
    trials: int


@dataclass(frozen=True)
class LlnReport:
    delta: float
    rows: list = field(default_factory=list)


def sample_densities(ch: Channel, px: InputDistribution, n: int, trials: int, seed: int,
                     stream: int = smp.STREAM_LLN, threads=None) -> np.ndarray:
    """i(X;Y) for ``trials`` independent pairs drawn i.i.d. from P_X P(y|x)."""
    trials = smp.check_trials(trials)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    levels = density_levels(ch, px)
    joint_cum = smp.cdf((px.probs[:, None] * ch.transition).ravel())
    ny = ch.output_size

    def run(idx):
        pair = smp.categorical(uniforms(seed, stream, idx, n), joint_cum)
        x, y = np.divmod(pair, ny)
        return levels.total(x, y)

    return np.concatenate(smp.run_chunks(run, smp.chunked(trials, n), threads))


def _below(densities, n, threshold):
    return densities / n <= threshold


def lln_experiment(ch: Channel, px: InputDistribution, n_list, delta: float, trials: int,
                   seed: int, threads=None) -> LlnReport:
    """Empirical Pr{i/n <= I - delta} at each blocklength in ``n_list``."""
    if not delta > 0:
        raise InvalidParameterError("delta must be positive")
    threshold = channel_statistics(ch, px).mutual_information - delta
    rows = []
    for n in n_list:
        n = int(n)
        # streams are independent across blocklengths
        stream = (smp.STREAM_LLN << 24) | (n & 0xFFFFFF)
        dens = sample_densities(ch, px, n, trials, seed, stream=stream, threads=threads)
        rows.append(LlnRow(n=n, prob=float(np.mean(_below(dens, n, threshold))), trials=int(trials)))
    return LlnReport(delta=float(delta), rows=rows)


def density_gaussian_check(ch: Channel, px: InputDistribution, n: int, trials: int, seed: int,
                           threads=None) -> float:
    """Kolmogorov-Smirnov distance between samples of i/n and N(I, V/n)."""
    st = channel_statistics(ch, px)
    if st.dispersion <= 0:
        raise ZeroDispersionError("V = 0: the density is degenerate, no Gaussian limit")
    dens = sample_densities(ch, px, n, trials, seed, stream=smp.STREAM_GAUSS, threads=threads)
    scale = math.sqrt(st.dispersion / n)
    return float(stats.kstest(dens / n, "norm", args=(st.mutual_information, scale)).statistic)


def _compositions(n, k):
    # stars and bars: every k-vector of non-negative counts summing to n
    combos = list(itertools.combinations(range(n + k - 1), k - 1))
    bars = np.array(combos, dtype=np.intp).reshape(len(combos), k - 1)
    edges = np.concatenate(
        [np.full((bars.shape[0], 1), -1), bars, np.full((bars.shape[0], 1), n + k - 1)], axis=1
    )
    return np.diff(edges, axis=1) - 1


def density_tail_probability(ch: Channel, px: InputDistribution, n: int, threshold: float,
                             strict: bool = False) -> float:
    """Exact Pr{i(X;Y)/n <= threshold} (``<`` with ``strict``) for the i.i.d. pair.

    Enumerates histograms over the distinct single-letter density values, so
    the cost is C(n+K-1, K-1) for K distinct values on the joint support.
    Densities are summed the same way as in sampling, so boundary cases agree.
    """
    joint = px.probs[:, None] * ch.transition
    table = density_table(ch, px)
    support = joint > 0
    levels = density_levels(ch, px).values
    d = table[support]
    w = joint[support]
    # probability of each distinct level appearing in one letter
    mass = np.array([w[d == v].sum() for v in levels])
    keep = mass > 0
    levels, mass = levels[keep], mass[keep]
    k = levels.size
    if math.comb(n + k - 1, k - 1) > MAX_COMPOSITIONS:
        raise InstanceTooLargeError(f"too many density histograms for n={n}, K={k}")
    counts = _compositions(n, k)
    total = np.zeros(counts.shape[0])
    for j, v in enumerate(levels):
        total = total + counts[:, j] * v
    logpmf = special.gammaln(n + 1) - special.gammaln(counts + 1).sum(axis=1)
    logpmf = logpmf + (counts * np.log(mass)).sum(axis=1)
    hit = total / n < threshold if strict else _below(total, n, threshold)
    return float(np.exp(logpmf[hit]).sum())
