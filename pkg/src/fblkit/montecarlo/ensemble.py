"""Random-coding ensemble simulation with maximum-likelihood decoding."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from ..bounds import CodeParameters, qfunc_inv
from ..channel import Channel, InputDistribution, as_word
from ..errors import InvalidParameterError, LengthMismatchError
from ..measures import density_levels
from . import _sampling as smp
from .philox import uniforms


class TiePolicy(str, Enum):
    """How the decoder treats competitors whose likelihood equals the true one.

    TIES_ERROR counts every tie as a decoding error, matching the
    pairwise event "competitor metric >= true metric". UNIFORM picks a
    maximiser uniformly at random.
    """

    TIES_ERROR = "ties-error"
    UNIFORM = "uniform"


@dataclass(frozen=True, eq=False)
class Codebook:
    words: np.ndarray  # M x n input symbols

    @property
    def n(self) -> int:
        return self.words.shape[1]

    @property
    def M(self) -> int:
        return self.words.shape[0]


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    errors: int
    p_hat: float
    ci_low: float
    ci_high: float
    tie_policy: str
    seed: int
    n: int
    rate: float
    num_codewords: int

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class EnsembleRun:
    """Outcome of one simulation pass, scored under both tie policies.

    ``densities[t]`` is i(x;y) of the transmitted pair in trial ``t``.
    """

    params: CodeParameters
    seed: int
    errors_ties: int
    errors_uniform: int
    densities: np.ndarray
    fixed_codebook: bool = False

    @property
    def trials(self) -> int:
        return self.densities.size

    def report(self, tie_policy=TiePolicy.TIES_ERROR) -> SimulationReport:
        policy = TiePolicy(tie_policy)
        errors = self.errors_ties if policy is TiePolicy.TIES_ERROR else self.errors_uniform
        lo, hi = wilson_interval(errors, self.trials)
        return SimulationReport(
            trials=self.trials,
            errors=int(errors),
            p_hat=errors / self.trials,
            ci_low=lo,
            ci_high=hi,
            tie_policy=policy.value,
            seed=self.seed,
            n=self.params.blocklength,
            rate=self.params.rate,
            num_codewords=self.params.num_codewords,
        )


_Z95 = qfunc_inv(0.025)


def wilson_interval(errors: int, trials: int, z: float = _Z95):
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


def sample_codebook(px: InputDistribution, n: int, M: int, seed: int) -> Codebook:
    """M codewords of length n, every letter drawn i.i.d. from ``px``."""
    if n < 1 or M < 2:
        raise InvalidParameterError("need n >= 1 and M >= 2")
    u = uniforms(seed, smp.STREAM_CODEBOOK, np.arange(M), n)
    words = smp.categorical(u, smp.cdf(px.probs))
    words.setflags(write=False)
    return Codebook(words)


def transmit(ch: Channel, x, u):
    """Pass word ``x`` through the channel using one uniform per letter."""
    cum = np.apply_along_axis(smp.cdf, 1, ch.transition)
    x = np.asarray(x)
    return np.count_nonzero(np.asarray(u)[..., None] >= cum[x], axis=-1).clip(
        max=ch.output_size - 1
    )


def ml_decode(ch: Channel, cb: Codebook, y, tie_policy=TiePolicy.UNIFORM, rng=None):
    """Index of the codeword maximising P(y|x).

    On a tie, UNIFORM draws a maximiser with ``rng`` while TIES_ERROR
    returns None (the tie is a decoding failure).
    """
    policy = TiePolicy(tie_policy)
    y = as_word(y, ch.output_size)
    if y.size != cb.n:
        raise LengthMismatchError(f"output word has length {y.size}, codebook n = {cb.n}")
    metrics = ch.likelihood_levels.total(cb.words, y[None, :])
    best = np.flatnonzero(metrics == metrics.max())
    if best.size == 1:
        return int(best[0])
    if policy is TiePolicy.TIES_ERROR:
        return None
    if rng is None:
        raise InvalidParameterError("uniform tie-breaking needs an rng")
    return int(best[int(rng.random() * best.size)])


def _score(metrics, true_metric, tie_u):
    """Per-trial errors under both policies given competitor metrics."""
    beats = metrics > true_metric[:, None]
    ties = metrics == true_metric[:, None]
    err_ties = np.any(beats | ties, axis=1)
    k = np.count_nonzero(ties, axis=1)
    err_uniform = np.any(beats, axis=1) | (tie_u * (k + 1) >= 1.0)
    return int(err_ties.sum()), int(err_uniform.sum())


def simulate(
    ch: Channel,
    px: InputDistribution,
    params: CodeParameters,
    trials: int,
    seed: int,
    *,
    threads=None,
    fixed_codebook: bool = False,
) -> EnsembleRun:
    """Run the random-coding experiment, drawing a fresh codebook for each trial.

    Each trial transmits codeword 0, passes it through the channel and
    compares its likelihood against the M-1 independent competitors.
    With ``fixed_codebook`` one codebook drawn from ``seed`` is reused and the
    message is uniform. That mode estimates the error of a single code, which
    is NOT the ensemble average that the bounds cover.
    """
    trials = smp.check_trials(trials)
    if px.size != ch.input_size:
        raise InvalidParameterError("input distribution does not match the channel")
    n, M = params.blocklength, params.num_codewords
    lik = ch.likelihood_levels
    dens = density_levels(ch, px)
    px_cum = smp.cdf(px.probs)
    joint = (px.probs[:, None] * ch.transition).ravel()
    joint_cum = smp.cdf(joint)
    ny = ch.output_size

    if fixed_codebook:
        book = sample_codebook(px, n, M, seed).words
        per_trial = n + 2

        def run(idx):
            u = uniforms(seed, smp.STREAM_FIXED, idx, per_trial)
            msg = np.minimum((u[:, 0] * M).astype(np.intp), M - 1)
            x = book[msg]
            y = transmit(ch, x, u[:, 1 : n + 1])
            metrics = lik.total(book[None, :, :], y[:, None, :])
            rows = np.arange(idx.size)
            true_metric = metrics[rows, msg]
            others = metrics.copy()
            # duplicates of the sent word keep their equal metric and tie
            others[rows, msg] = -np.inf
            e_t, e_u = _score(others, true_metric, u[:, n + 1])
            return e_t, e_u, dens.total(x, y)

    else:
        per_trial = M * n + 1

        def run(idx):
            u = uniforms(seed, smp.STREAM_ENSEMBLE, idx, per_trial)
            pair = smp.categorical(u[:, :n], joint_cum)
            x, y = np.divmod(pair, ny)
            comp = smp.categorical(u[:, n : M * n], px_cum).reshape(idx.size, M - 1, n)
            true_metric = lik.total(x, y)
            metrics = lik.total(comp, y[:, None, :])
            e_t, e_u = _score(metrics, true_metric, u[:, M * n])
            return e_t, e_u, dens.total(x, y)

    parts = smp.run_chunks(run, smp.chunked(trials, per_trial), threads)
    return EnsembleRun(
        params=params,
        seed=int(seed),
        errors_ties=sum(p[0] for p in parts),
        errors_uniform=sum(p[1] for p in parts),
        densities=np.concatenate([p[2] for p in parts]),
        fixed_codebook=fixed_codebook,
    )


def estimate_error(
    ch: Channel,
    px: InputDistribution,
    n: int,
    R: float,
    trials: int,
    seed: int,
    tie_policy=TiePolicy.TIES_ERROR,
    *,
    num_codewords=None,
    threads=None,
    fixed_codebook: bool = False,
) -> SimulationReport:
    """Monte Carlo estimate of the ensemble-average ML error probability.

    The result depends only on (seed, trials, parameters), never on the
    number of worker threads.
    """
    params = CodeParameters(n, R, num_codewords)
    run = simulate(ch, px, params, trials, seed, threads=threads, fixed_codebook=fixed_codebook)
    return run.report(tie_policy)
