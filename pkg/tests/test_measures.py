import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from fblkit import (
    InputDistribution,
    bec,
    bsc,
    capacity,
    channel_statistics,
    dispersion,
    identity,
    information_density,
    make_channel,
    mutual_information,
    z_channel,
)
from fblkit.errors import NonConvergenceError, UndefinedDensityError

from .conftest import h2
from .strategies import channels_with_input


def joint_sum(ch, px, f):
    """Brute-force expectation of f(log-ratio) over the joint pmf."""
    total = 0.0
    for x, y in itertools.product(range(ch.input_size), range(ch.output_size)):
        pxy = px.probs[x] * ch.transition[x, y]
        if pxy > 0:
            py = sum(px.probs[a] * ch.transition[a, y] for a in range(ch.input_size))
            total += pxy * f(math.log2(ch.transition[x, y] / py))
    return total


def z_capacity_grid(p, step=1e-6):
    """Grid search over P_X(1) for the Z-channel [[1, 0], [p, 1-p]]."""
    q = np.arange(0.0, 1.0 + step / 2, step)
    py1 = q * (1 - p)
    with np.errstate(divide="ignore", invalid="ignore"):
        hy = -np.nan_to_num(py1 * np.log2(py1)) - np.nan_to_num((1 - py1) * np.log2(1 - py1))
    return float(np.max(hy - q * h2(p)))


class TestInformationDensity:
    def test_useless_channel(self, uniform2):
        assert information_density(bsc(0.5), uniform2, [0, 1, 1], [1, 1, 0]) == 0.0

    def test_noiseless(self, uniform2, noiseless):
        assert information_density(noiseless, uniform2, [0], [0]) == 1.0

    def test_bsc_flip(self, uniform2, bsc011):
        assert information_density(bsc011, uniform2, [0], [1]) == pytest.approx(
            math.log2(0.11 / 0.5), abs=1e-15
        )

    def test_minus_infinity(self, uniform2, noiseless):
        assert information_density(noiseless, uniform2, [0], [1]) == -math.inf

    def test_undefined(self):
        # output 1 unreachable when input 1 has zero mass
        ch = make_channel([[1.0, 0.0], [0.5, 0.5]])
        with pytest.raises(UndefinedDensityError):
            information_density(ch, InputDistribution([1.0, 0.0]), [0], [1])

    @settings(max_examples=50, deadline=None)
    @given(channels_with_input(allow_zero=False))
    def test_concatenation_additive(self, chpx):
        ch, px = chpx
        x1, y1, x2, y2 = [0, 1], [1, 0], [1, 1, 0], [0, 1, 1]
        whole = information_density(ch, px, x1 + x2, y1 + y2)
        parts = information_density(ch, px, x1, y1) + information_density(ch, px, x2, y2)
        assert whole == pytest.approx(parts, abs=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(channels_with_input())
    def test_mean_is_mutual_information(self, chpx):
        ch, px = chpx
        mean = 0.0
        for x, y in itertools.product(range(ch.input_size), range(ch.output_size)):
            w = px.probs[x] * ch.transition[x, y]
            if w > 0:
                mean += w * information_density(ch, px, [x], [y])
        assert mean == pytest.approx(mutual_information(ch, px), abs=1e-10)


class TestMutualInformation:
    def test_examples(self, uniform2, noiseless):
        assert mutual_information(bsc(0.5), uniform2) == 0.0
        assert mutual_information(noiseless, uniform2) == 1.0
        assert mutual_information(bsc(0.11), uniform2) == pytest.approx(1 - h2(0.11), abs=1e-14)

    def test_matches_direct_sum(self, uniform2):
        ch = z_channel(0.3)
        px = InputDistribution([0.6, 0.4])
        assert mutual_information(ch, px) == pytest.approx(joint_sum(ch, px, lambda d: d), abs=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(channels_with_input())
    def test_range(self, chpx):
        ch, px = chpx
        i = mutual_information(ch, px)
        assert -1e-12 <= i <= min(math.log2(ch.input_size), math.log2(ch.output_size)) + 1e-12


class TestDispersion:
    @pytest.mark.parametrize("p", [0.01, 0.11, 0.25, 0.4])
    def test_bsc_closed_form(self, p, uniform2):
        closed = p * (1 - p) * math.log2((1 - p) / p) ** 2
        brute = joint_sum(bsc(p), uniform2, lambda d: d * d) - joint_sum(bsc(p), uniform2, lambda d: d) ** 2
        assert dispersion(bsc(p), uniform2) == pytest.approx(closed, abs=1e-12)
        assert brute == pytest.approx(closed, abs=1e-12)

    def test_zero_cases(self, uniform2, noiseless):
        assert dispersion(bsc(0.5), uniform2) == 0.0
        assert dispersion(noiseless, uniform2) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(channels_with_input())
    def test_nonnegative(self, chpx):
        ch, px = chpx
        v = dispersion(ch, px)
        assert v >= 0 and math.isfinite(v)


class TestChannelStatistics:
    def test_bundles(self, uniform2, noiseless):
        s = channel_statistics(bsc(0.5), uniform2)
        assert (s.mutual_information, s.dispersion, s.entropy_output) == (0.0, 0.0, 1.0)
        s = channel_statistics(noiseless, uniform2)
        assert (s.mutual_information, s.dispersion, s.entropy_output) == (1.0, 0.0, 1.0)

    def test_bec(self, uniform2):
        assert channel_statistics(bec(0.3), uniform2).mutual_information == pytest.approx(0.7, abs=1e-15)

    def test_consistent_with_parts(self, uniform2):
        ch = z_channel(0.2)
        s = channel_statistics(ch, uniform2)
        assert s.mutual_information == mutual_information(ch, uniform2)
        assert s.dispersion == dispersion(ch, uniform2)


class TestCapacity:
    def test_useless(self):
        r = capacity(bsc(0.5))
        assert r.capacity == 0.0 and r.final_gap <= 1e-9

    @pytest.mark.parametrize("p", [0.01, 0.11, 0.25])
    def test_bsc(self, p):
        r = capacity(bsc(p))
        assert r.capacity == pytest.approx(1 - h2(p), abs=1e-9)
        np.testing.assert_allclose(r.optimal_input.probs, 0.5, atol=1e-6)

    def test_z_channel_grid_search(self):
        r = capacity(z_channel(0.5))
        assert r.capacity == pytest.approx(z_capacity_grid(0.5), abs=1e-6)
        assert r.capacity == pytest.approx(math.log2(1.25), abs=1e-9)

    def test_feedback_reproduces(self):
        ch = make_channel([[0.7, 0.2, 0.1], [0.1, 0.1, 0.8], [0.3, 0.4, 0.3]])
        r = capacity(ch)
        assert mutual_information(ch, r.optimal_input) == pytest.approx(r.capacity, abs=1e-9)

    def test_nonconvergence_carries_iterate(self):
        with pytest.raises(NonConvergenceError) as info:
            capacity(z_channel(0.5), tol=1e-15, max_iter=3)
        assert info.value.result.iterations == 3

    @settings(max_examples=40, deadline=None)
    @given(channels_with_input())
    def test_capacity_dominates(self, chpx):
        ch, px = chpx
        try:
            r = capacity(ch)
            assert r.final_gap <= 1e-9
        except NonConvergenceError as exc:
            # nearly useless channels converge slowly; the gap still certifies
            r = exc.result
        assert r.capacity >= mutual_information(ch, px) - max(r.final_gap, 1e-9)
        assert r.capacity <= math.log2(min(ch.input_size, ch.output_size)) + 1e-12
