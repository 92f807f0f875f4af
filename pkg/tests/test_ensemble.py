import itertools
import math

import numpy as np
import pytest

from fblkit import CodeParameters, InputDistribution, bsc, identity, vector_log_likelihood, z_channel
from fblkit.errors import InvalidParameterError
from fblkit.montecarlo import (
    Codebook,
    TiePolicy,
    estimate_error,
    exact_ensemble_error,
    ml_decode,
    sample_codebook,
    simulate,
    transmit,
    wilson_interval,
)


class TestSampleCodebook:
    def test_point_mass(self):
        cb = sample_codebook(InputDistribution([1.0, 0.0]), 6, 5, seed=3)
        assert cb.words.shape == (5, 6) and not cb.words.any()

    def test_deterministic(self, uniform2):
        a = sample_codebook(uniform2, 20, 8, seed=99)
        b = sample_codebook(uniform2, 20, 8, seed=99)
        np.testing.assert_array_equal(a.words, b.words)
        assert not np.array_equal(a.words, sample_codebook(uniform2, 20, 8, seed=100).words)

    def test_concentration(self, uniform2):
        # binomial(2*10^4, 1/2): 0.48..0.52 is about 5.6 standard deviations
        cb = sample_codebook(uniform2, 10**4, 2, seed=5)
        assert 0.48 <= cb.words.mean() <= 0.52

    def test_nonuniform_frequencies(self):
        cb = sample_codebook(InputDistribution([0.2, 0.5, 0.3]), 20000, 2, seed=1)
        freq = np.bincount(cb.words.ravel(), minlength=3) / cb.words.size
        np.testing.assert_allclose(freq, [0.2, 0.5, 0.3], atol=0.01)


class TestTransmit:
    def test_output_frequencies(self, bsc011):
        from fblkit.montecarlo.philox import uniforms

        u = uniforms(1, 9, np.arange(1), 50000)[0]
        y = transmit(bsc011, np.zeros(50000, dtype=int), u)
        assert abs(y.mean() - 0.11) < 0.006

    def test_structural_zero_never_emitted(self, noiseless):
        y = transmit(noiseless, np.array([0, 1] * 50), np.linspace(0, 1, 100, endpoint=False))
        np.testing.assert_array_equal(y, [0, 1] * 50)


class TestMlDecode:
    def test_noiseless_unique(self, noiseless):
        cb = Codebook(np.array([[0, 0, 1], [0, 1, 1], [1, 1, 0], [1, 0, 0]]))
        for m in range(4):
            assert ml_decode(noiseless, cb, cb.words[m]) == m

    def test_uniform_tiebreak_frequency(self, bsc011):
        cb = Codebook(np.array([[0, 1, 0], [0, 1, 0]]))
        rng = np.random.default_rng(11)
        picks = [ml_decode(bsc011, cb, [0, 1, 1], TiePolicy.UNIFORM, rng) for _ in range(10**4)]
        assert abs(np.mean(picks) - 0.5) <= 0.02

    def test_ties_error_reports_none(self, bsc011):
        cb = Codebook(np.array([[0, 1, 0], [0, 1, 0], [1, 1, 1]]))
        assert ml_decode(bsc011, cb, [0, 1, 0], TiePolicy.TIES_ERROR) is None

    def test_uniform_needs_rng(self, bsc011):
        cb = Codebook(np.array([[0, 1], [0, 1]]))
        with pytest.raises(InvalidParameterError):
            ml_decode(bsc011, cb, [0, 1], TiePolicy.UNIFORM)

    def test_matches_exhaustive_metric_table(self, bsc011):
        cb = Codebook(np.array([[0, 0, 0], [1, 1, 1], [0, 1, 1]]))
        for y in itertools.product(range(2), repeat=3):
            table = [math.prod(bsc011.transition[a, b] for a, b in zip(w, y)) for w in cb.words]
            best = [m for m, v in enumerate(table) if math.isclose(v, max(table), rel_tol=1e-12)]
            got = ml_decode(bsc011, cb, y, TiePolicy.TIES_ERROR)
            assert got == (best[0] if len(best) == 1 else None)
            assert max(table) == pytest.approx(2 ** vector_log_likelihood(bsc011, cb.words[best[0]], y))


class TestWilson:
    @pytest.mark.parametrize("errors,trials", [(0, 10), (3, 10), (10, 10), (1, 10**5), (50, 100)])
    def test_contains_estimate(self, errors, trials):
        lo, hi = wilson_interval(errors, trials)
        assert 0 <= lo <= errors / trials <= hi <= 1

    def test_known_value(self):
        # p = 1/2 centres the interval; half width z*sqrt(1/400 + z^2/40000)/(1 + z^2/100)
        lo, hi = wilson_interval(50, 100)
        assert lo == pytest.approx(0.4038315, abs=1e-7) and hi == pytest.approx(0.5961685, abs=1e-7)


class TestEstimateError:
    def test_report_fields(self, bsc011, uniform2):
        r = estimate_error(bsc011, uniform2, 3, 2 / 3, 2000, seed=1)
        assert r.num_codewords == 4 and r.trials == 2000 and r.tie_policy == "ties-error"
        assert r.ci_low <= r.p_hat <= r.ci_high
        assert r.errors <= r.trials

    def test_noiseless_against_oracle(self, noiseless, uniform2):
        r = estimate_error(noiseless, uniform2, 4, 0.5, 20000, seed=2, tie_policy="uniform")
        exact = exact_ensemble_error(noiseless, uniform2, 4, 4, "uniform")
        assert abs(r.p_hat - exact) <= r.half_width

    def test_useless_channel(self, uniform2):
        r = estimate_error(bsc(0.5), uniform2, 3, 1 / 3, 20000, seed=4, tie_policy="uniform")
        exact = exact_ensemble_error(bsc(0.5), uniform2, 3, 2, "uniform")
        assert exact == pytest.approx(0.5)
        assert abs(r.p_hat - exact) <= r.half_width
        r = estimate_error(bsc(0.5), uniform2, 3, 1 / 3, 2000, seed=4)
        assert r.p_hat == 1.0

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_against_oracle_three_seeds(self, seed, uniform2):
        ch = z_channel(0.3)
        run = simulate(ch, uniform2, CodeParameters.from_codewords(3, 3), 40000, seed)
        for policy in TiePolicy:
            r = run.report(policy)
            exact = exact_ensemble_error(ch, uniform2, 3, 3, policy)
            assert abs(r.p_hat - exact) <= r.half_width + 1e-12

    def test_unbiased_across_seeds(self, uniform2):
        # standardised errors over independent seeds should average near zero
        ch = z_channel(0.5)
        exact = {p: exact_ensemble_error(ch, uniform2, 4, 4, p) for p in TiePolicy}
        z = {p: [] for p in TiePolicy}
        for seed in range(20):
            run = simulate(ch, uniform2, CodeParameters.from_codewords(4, 4), 20000, 900 + seed)
            for p in TiePolicy:
                e = exact[p]
                z[p].append((run.report(p).p_hat - e) / math.sqrt(e * (1 - e) / 20000))
        for p in TiePolicy:
            assert abs(np.mean(z[p])) <= 3 / math.sqrt(20)
            assert 0.5 <= np.std(z[p]) <= 1.6

    def test_uniform_never_worse(self, bsc011, uniform2):
        run = simulate(bsc011, uniform2, CodeParameters.from_codewords(4, 4), 5000, 8)
        assert run.errors_uniform <= run.errors_ties

    def test_thread_count_irrelevant(self, bsc011, uniform2):
        params = CodeParameters(12, 0.35)
        a = simulate(bsc011, uniform2, params, 30000, 77, threads=1)
        b = simulate(bsc011, uniform2, params, 30000, 77, threads=4)
        assert (a.errors_ties, a.errors_uniform) == (b.errors_ties, b.errors_uniform)
        np.testing.assert_array_equal(a.densities, b.densities)

    def test_env_cap(self, bsc011, uniform2, monkeypatch):
        from fblkit.montecarlo._sampling import worker_count

        monkeypatch.setenv("FBLKIT_THREADS", "2")
        assert worker_count(16) == 2
        monkeypatch.setenv("FBLKIT_THREADS", "x")
        with pytest.raises(InvalidParameterError):
            worker_count()

    def test_fixed_codebook_mode(self, noiseless, uniform2):
        # distinct codewords on a noiseless channel never fail
        params = CodeParameters.from_codewords(1, 2)
        run = simulate(noiseless, uniform2, params, 2000, seed=6, fixed_codebook=True)
        from fblkit.montecarlo import sample_codebook

        words = sample_codebook(uniform2, 1, 2, 6).words
        expected = 0 if words[0, 0] != words[1, 0] else 2000
        assert run.errors_ties == expected

    def test_densities_mean(self, bsc011, uniform2):
        run = simulate(bsc011, uniform2, CodeParameters(50, 0.2), 4000, seed=9)
        i = 1 + 0.11 * math.log2(0.11) + 0.89 * math.log2(0.89)
        sd = math.sqrt(0.11 * 0.89 * math.log2(0.89 / 0.11) ** 2 * 50 / 4000)
        assert abs(run.densities.mean() - 50 * i) < 4 * sd

    def test_rejects_zero_trials(self, bsc011, uniform2):
        with pytest.raises(InvalidParameterError):
            estimate_error(bsc011, uniform2, 3, 0.5, 0, seed=1)
