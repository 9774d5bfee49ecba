"""Tests for preference/regression surrogates and pathwise samples."""

import numpy as np
import pytest
from scipy import stats

from paretoduel.core import InteractionDataset, Query, Response
from paretoduel.dm import NoiseProfile, respond
from paretoduel.errors import DataError
from paretoduel.surrogate import (
    KernelConfig,
    PreferenceModel,
    SurrogateConfig,
    fit_preference,
    fit_regression,
    preference_log_likelihood,
)

FAST = SurrogateConfig(restarts=2, maxfun=40)


def pairwise_dataset(f, xs, rng, lam=0.2, n_pairs=60):
    """Pairwise records from a known 1-d generator with Gumbel noise."""
    ds = InteractionDataset()
    noise = NoiseProfile(np.array([lam]))
    oracle = lambda x: np.array([f(x[0])])
    for _ in range(n_pairs):
        i, j = rng.choice(len(xs), size=2, replace=False)
        q = Query(np.array([[xs[i]], [xs[j]]]))
        ds.append(q, respond(q, oracle, noise, rng))
    return ds


class TestPreferenceLogLikelihood:
    def test_symmetric_pair(self):
        assert preference_log_likelihood([0.0, 0.0], 1, 0.7) == pytest.approx(
            np.log(0.5)
        )

    def test_direct_value(self):
        lam = 0.31
        val = preference_log_likelihood([lam * np.log(3.0), 0.0], 1, lam)
        assert val == pytest.approx(np.log(0.75))

    def test_equal_q4(self):
        assert preference_log_likelihood(np.zeros(4), 3, 1.0) == pytest.approx(
            np.log(0.25)
        )

    def test_winner_out_of_range(self):
        with pytest.raises(IndexError):
            preference_log_likelihood([0.0, 1.0], 3, 1.0)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            q = rng.integers(2, 6)
            vals = rng.normal(size=q) * 10
            lam = float(rng.uniform(0.01, 5.0))
            total = sum(
                np.exp(preference_log_likelihood(vals, w, lam))
                for w in range(1, q + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-12)


class TestFitPreference:
    def test_single_record_orders_anchors(self):
        ds = InteractionDataset()
        ds.append(Query(np.array([[0.2], [0.8]])), Response([1]))
        model = fit_preference(ds, 0, config=FAST, rng=np.random.default_rng(0))
        assert model.laplace_mean[0] >= model.laplace_mean[1]

    def test_recovers_monotone_ranking(self):
        rng = np.random.default_rng(1)
        xs = np.linspace(0.05, 0.95, 12)
        ds = pairwise_dataset(lambda x: 2.0 * x, xs, rng)
        model = fit_preference(ds, 0, config=FAST, rng=rng)
        probes = np.array([[0.1], [0.3], [0.5], [0.7], [0.9]])
        means = model.posterior_mean(probes)
        tau = stats.kendalltau(means, probes.ravel()).statistic
        assert tau == pytest.approx(1.0)
        assert np.all(np.diff(means) > 0)  # every pair concordant

    def test_marginal_never_below_start(self):
        rng = np.random.default_rng(2)
        xs = np.linspace(0.0, 1.0, 8)
        ds = pairwise_dataset(lambda x: np.sin(3 * x), xs, rng, n_pairs=25)
        model = fit_preference(ds, 0, config=FAST, rng=rng)
        assert model.log_marginal >= model.diagnostics["log_ml_start"] - 1e-9

    def test_empty_dataset_rejected(self):
        with pytest.raises(DataError):
            fit_preference(InteractionDataset(), 0)

    def test_laplace_cov_psd_and_gauge(self):
        rng = np.random.default_rng(3)
        xs = np.linspace(0.0, 1.0, 10)
        ds = pairwise_dataset(lambda x: x**2, xs, rng, n_pairs=40)
        model = fit_preference(ds, 0, config=FAST, rng=rng)
        evals = np.linalg.eigvalsh(model.laplace_cov)
        assert evals.min() > -1e-8
        # softmax likelihood is shift-invariant: its gradient sums to zero
        assert abs(model.diagnostics["grad_ll_sum"]) < 1e-6

    def test_anchor_dedup(self):
        ds = InteractionDataset()
        ds.append(Query(np.array([[0.2], [0.8]])), Response([2]))
        ds.append(Query(np.array([[0.2], [0.5]])), Response([2]))
        model = fit_preference(ds, 0, config=FAST, rng=np.random.default_rng(0))
        assert model.anchors.shape == (3, 1)


class TestPosteriorPredictions:
    @pytest.fixture(scope="class")
    def model(self):
        rng = np.random.default_rng(4)
        xs = np.linspace(0.05, 0.95, 10)
        ds = pairwise_dataset(lambda x: np.cos(4 * x), xs, rng, n_pairs=50)
        return fit_preference(ds, 0, config=FAST, rng=rng)

    def test_mean_at_anchor_interpolates(self, model):
        got = model.posterior_mean(model.anchors)
        np.testing.assert_allclose(got, model.laplace_mean, atol=1e-10)

    def test_mean_decays_far_from_anchors(self, model):
        far = np.array([[1000.0]])
        assert abs(model.posterior_mean(far)[0]) < 1e-3

    def test_variance_at_anchor_below_prior(self, model):
        var = model.posterior_var(model.anchors)
        assert np.all(var <= model.kernel.signal_variance + 1e-9)

    def test_sample_mean_consistent_with_posterior_mean(self, model):
        rng = np.random.default_rng(5)
        x = np.array([[0.4]])
        draws = np.array(
            [model.sample_function(rng, 1000)(x)[0] for _ in range(200)]
        )
        se = draws.std(ddof=1) / np.sqrt(200)
        assert abs(draws.mean() - model.posterior_mean(x)[0]) <= 3 * se + 1e-3


class TestFunctionSamples:
    def test_prior_variance_matches_signal_variance(self):
        kernel = KernelConfig(np.array([0.4, 0.6]), signal_variance=1.7)
        model = PreferenceModel.prior(kernel)
        rng = np.random.default_rng(6)
        x = np.array([[0.3, 0.8]])
        draws = np.array([model.sample_function(rng, 1000)(x)[0] for _ in range(500)])
        assert draws.var(ddof=1) == pytest.approx(1.7, rel=0.15)

    def test_sample_moments_at_anchors_match_laplace(self):
        rng = np.random.default_rng(7)
        xs = np.linspace(0.05, 0.95, 8)
        ds = pairwise_dataset(lambda x: x, xs, rng, n_pairs=40)
        model = fit_preference(ds, 0, config=FAST, rng=rng)
        draws = np.array(
            [model.sample_function(rng, 1000)(model.anchors) for _ in range(500)]
        )
        mean_se = draws.std(axis=0, ddof=1) / np.sqrt(500)
        np.testing.assert_array_less(
            np.abs(draws.mean(axis=0) - model.laplace_mean),
            3 * mean_se + 1e-6,
        )
        sample_cov = np.cov(draws.T)
        # sampling sd of cov entries is sqrt((c_ii c_jj + c_ij^2) / n)
        cov = model.laplace_cov
        entry_sd = np.sqrt(
            (np.outer(np.diag(cov), np.diag(cov)) + cov**2) / 500.0
        )
        np.testing.assert_array_less(
            np.abs(sample_cov - cov), 4.0 * entry_sd + 1e-5
        )

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        xs = np.linspace(0.05, 0.95, 8)
        ds = pairwise_dataset(lambda x: np.sin(5 * x), xs, rng, n_pairs=30)
        model = fit_preference(ds, 0, config=FAST, rng=rng)
        sample = model.sample_function(rng, 500)
        pts = rng.random((10, 1))
        grad = sample.gradient(pts)
        h = 1e-5
        for k, x in enumerate(pts):
            fd = (sample(x + h)[0] - sample(x - h)[0]) / (2 * h)
            denom = max(abs(fd), 1e-8)
            assert abs(grad[k, 0] - fd) / denom < 1e-4

    def test_sample_evaluation_deterministic(self):
        kernel = KernelConfig(np.array([0.5]), signal_variance=1.0)
        model = PreferenceModel.prior(kernel)
        sample = model.sample_function(np.random.default_rng(9), 200)
        x = np.array([[0.25]])
        assert sample(x)[0] == sample(x)[0]


class TestFitRegression:
    def test_noiseless_interpolation(self):
        # with the noise variance pinned at its floor the posterior mean
        # must interpolate the observations
        rng = np.random.default_rng(10)
        X = np.linspace(0.05, 0.95, 8)[:, None]
        y = np.sin(4 * X[:, 0])
        cfg = SurrogateConfig(
            restarts=2, maxfun=60, noise_variance_bounds=(1e-8, 1e-8)
        )
        model = fit_regression(X, y, config=cfg, rng=rng)
        np.testing.assert_allclose(model.posterior_mean(X), y, atol=1e-6)

    def test_variance_reduced_at_training_points(self):
        rng = np.random.default_rng(11)
        X = rng.random((15, 2))
        y = X[:, 0] - X[:, 1]
        model = fit_regression(X, y, config=FAST, rng=rng)
        var = model.posterior_var(X)
        assert np.all(var <= model.kernel.signal_variance + 1e-9)

    def test_sin_generator_rmse(self):
        rng = np.random.default_rng(12)
        X = rng.random((20, 1))
        y = np.sin(6 * X[:, 0])
        model = fit_regression(X, y, config=FAST, rng=rng)
        held = np.linspace(0, 1, 50)[:, None]
        rmse = np.sqrt(np.mean((model.posterior_mean(held) - np.sin(6 * held[:, 0])) ** 2))
        assert rmse < 0.1

    def test_too_few_observations(self):
        with pytest.raises(DataError):
            fit_regression(np.array([[0.5]]), np.array([1.0]))

    def test_sample_respects_observations(self):
        rng = np.random.default_rng(13)
        X = rng.random((10, 1))
        y = 2.0 + np.cos(3 * X[:, 0])
        model = fit_regression(X, y, config=FAST, rng=rng)
        sample = model.sample_function(rng, 800)
        resid = sample(X) - y
        tol = 4 * np.sqrt(model.noise_variance + 1e-4) + 0.2
        assert np.max(np.abs(resid)) < tol
