"""Discrete memoryless channels and the distributions they act on.

All logarithms in fblkit are base 2, so likelihoods and densities are in bits.
Alphabets are index based: inputs are ``0..|X|-1`` and outputs ``0..|Y|-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateAlphabetError,
    DimensionMismatchError,
    InvalidParameterError,
    LengthMismatchError,
    NegativeEntryError,
    RowSumError,
    SymbolOutOfRangeError,
)

SUM_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_pmf(probs, what):
    if probs.ndim != 1 or probs.size == 0:
        raise DimensionMismatchError(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(probs)):
        raise InvalidParameterError(f"{what} has non-finite entries")
    if np.any(probs < 0):
        raise NegativeEntryError(f"{what} has negative entries")
    if np.any(probs > 1):
        raise InvalidParameterError(f"{what} has entries above 1")
    if abs(probs.sum() - 1.0) > SUM_TOL:
        raise RowSumError(f"{what} sums to {probs.sum()!r}, not 1")


class LevelTable:
    """Canonical summation of per-letter table values over words.

    Floating-point sums depend on summation order, which would make exact
    tie detection between codewords unreliable. Summing ``count * value``
    over the distinct table values in a fixed order gives bit-identical
    results for any two words with the same value histogram.
    """

    def __init__(self, table):
        table = np.asarray(table, dtype=float)
        finite = np.isfinite(table)
        self.values = np.unique(table[finite])
        index = np.full(table.shape, -1, dtype=np.intp)
        index[finite] = np.searchsorted(self.values, table[finite])
        self.index = index
        self.has_neg_inf = bool(np.any(table == -np.inf))

    def total(self, xs, ys):
        """Sum the table over the last axis of broadcastable index arrays."""
        lev = self.index[xs, ys]
        total = np.zeros(lev.shape[:-1])
        for k, v in enumerate(self.values):
            total = total + np.count_nonzero(lev == k, axis=-1) * v
        if self.has_neg_inf:
            total = np.where(np.any(lev == -1, axis=-1), -np.inf, total)
        return total


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic transition matrix; entry ``(x, y)`` is P(y | x)."""

    transition: np.ndarray
    name: str = ""

    def __post_init__(self):
        w = np.array(self.transition, dtype=float)
        if w.ndim != 2 or w.size == 0:
            raise DimensionMismatchError("transition must be a non-empty 2-D matrix")
        if w.shape[0] < 2 or w.shape[1] < 2:
            raise DegenerateAlphabetError(
                f"need |X| >= 2 and |Y| >= 2, got {w.shape[0]}x{w.shape[1]}"
            )
        if not np.all(np.isfinite(w)):
            raise InvalidParameterError("transition has non-finite entries")
        if np.any(w < 0):
            raise NegativeEntryError("transition has negative entries")
        sums = w.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > SUM_TOL)
        if bad.size:
            r = int(bad[0])
            raise RowSumError(f"row {r} sums to {sums[r]!r}, not 1")
        object.__setattr__(self, "transition", _frozen(w))

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    @cached_property
    def log_transition(self) -> np.ndarray:
        """log2 P(y|x); structural zeros map to -inf."""
        with np.errstate(divide="ignore"):
            return _frozen(np.log2(self.transition))

    @cached_property
    def likelihood_levels(self) -> LevelTable:
        return LevelTable(self.log_transition)

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return np.array_equal(self.transition, other.transition)

    def __hash__(self):
        return hash(self.transition.tobytes())

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Channel({label}{self.input_size}x{self.output_size})"


@dataclass(frozen=True, eq=False)
class InputDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        _check_pmf(p, "input distribution")
        object.__setattr__(self, "probs", _frozen(p))

    @classmethod
    def uniform(cls, size: int) -> "InputDistribution":
        return cls(np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        return self.probs.size

    def __eq__(self, other):
        if not isinstance(other, InputDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        _check_pmf(p, "output distribution")
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def size(self) -> int:
        return self.probs.size


def make_channel(transition, name: str = "") -> Channel:
    """Validate a transition matrix and wrap it as a :class:`Channel`.

    Raises RowSumError, NegativeEntryError or DegenerateAlphabetError for
    malformed input.
    """
    return Channel(np.asarray(transition, dtype=float), name=name)


# Built-in channel families.

def bsc(p: float) -> Channel:
    """Binary symmetric channel with crossover probability ``p``."""
    _check_unit(p, "crossover probability")
    return make_channel([[1 - p, p], [p, 1 - p]], name=f"bsc:{p:g}")


def bec(e: float) -> Channel:
    """Binary erasure channel; output 2 is the erasure symbol."""
    _check_unit(e, "erasure probability")
    return make_channel([[1 - e, 0.0, e], [0.0, 1 - e, e]], name=f"bec:{e:g}")


def z_channel(p: float) -> Channel:
    """Z-channel: input 0 is noiseless, input 1 flips to 0 with probability ``p``."""
    _check_unit(p, "flip probability")
    return make_channel([[1.0, 0.0], [p, 1 - p]], name=f"zchannel:{p:g}")


def identity(k: int = 2) -> Channel:
    return make_channel(np.eye(k), name=f"identity:{k}")


def _check_unit(p, what):
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"{what} must lie in [0, 1], got {p!r}")


def as_word(word, alphabet: int) -> np.ndarray:
    w = np.asarray(word)
    if w.ndim != 1 or w.size == 0:
        raise LengthMismatchError("words must be non-empty 1-D sequences")
    if not np.issubdtype(w.dtype, np.integer):
        if not np.all(np.equal(np.mod(w, 1), 0)):
            raise SymbolOutOfRangeError("symbols must be integer indices")
        w = w.astype(np.intp)
    if np.any(w < 0) or np.any(w >= alphabet):
        raise SymbolOutOfRangeError(f"symbol outside alphabet 0..{alphabet - 1}")
    return w


def check_pair(ch: Channel, x, y):
    x = as_word(x, ch.input_size)
    y = as_word(y, ch.output_size)
    if x.size != y.size:
        raise LengthMismatchError(f"input word has length {x.size}, output word {y.size}")
    return x, y


def vector_log_likelihood(ch: Channel, x, y) -> float:
    """log2 P(y|x) for the memoryless extension of ``ch``, in bits.

    Returns ``-inf`` when some letter has a zero transition probability.
    """
    x, y = check_pair(ch, x, y)
    return float(ch.likelihood_levels.total(x, y))


def output_distribution(ch: Channel, px: InputDistribution) -> OutputDistribution:
    """P_Y(y) = sum_x P_X(x) P(y|x)."""
    if px.size != ch.input_size:
        raise DimensionMismatchError(
            f"input distribution has {px.size} entries, channel has {ch.input_size} inputs"
        )
    py = px.probs @ ch.transition
    # marginalisation keeps the sum within a few ulps of 1; renormalising
    # would hide real mismatches, so only clip stray negatives from rounding
    return OutputDistribution(np.clip(py, 0.0, 1.0))
