import numpy as np
import pytest

from canopyfit.bayesopt.gp import (MAX_JITTER, GaussianProcess, Hyperparameters, KernelConfig, gp_fit,
                                   log_marginal_likelihood, posterior)
from canopyfit.errors import ConfigError, DomainError


def dense_matern52(a, b, ls, var):
    """Textbook Matern-5/2, one pair at a time."""
    K = np.empty((len(a), len(b)))
    for i, p in enumerate(a):
        for j, q in enumerate(b):
            r = np.sqrt(np.sum(((p - q) / ls) ** 2))
            K[i, j] = var * (1 + np.sqrt(5) * r + 5 * r * r / 3) * np.exp(-np.sqrt(5) * r)
    return K


def dense_posterior(gp: GaussianProcess, xs):
    h = gp.hyper
    ys = (gp.y - gp.y_mean) / gp.y_scale
    K = dense_matern52(gp.X, gp.X, h.length_scales, h.variance) + (h.noise + gp.jitter) * np.eye(len(gp.X))
    Kinv = np.linalg.inv(K)
    ks = dense_matern52(xs, gp.X, h.length_scales, h.variance)
    mu = ks @ Kinv @ ys
    var = h.variance - np.einsum("ij,jk,ik->i", ks, Kinv, ks)
    return mu * gp.y_scale + gp.y_mean, np.sqrt(np.maximum(var, 0)) * gp.y_scale


def dense_lml(X, y, hyper):
    K = dense_matern52(X, X, hyper.length_scales, hyper.variance) + (hyper.noise + 1e-10) * np.eye(len(X))
    sign, logdet = np.linalg.slogdet(K)
    assert sign > 0
    return -0.5 * y @ np.linalg.solve(K, y) - 0.5 * logdet - 0.5 * len(y) * np.log(2 * np.pi)


def problem(seed, n=20, d=2):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, d))
    y = np.sin(3 * X[:, 0]) + X[:, 1] ** 2 + 0.01 * rng.normal(size=n)
    return X, y, rng


@pytest.mark.parametrize("seed", range(10))
def test_posterior_matches_dense_oracle(seed):
    X, y, rng = problem(seed)
    gp = gp_fit(X, y, hyper=Hyperparameters(np.array([0.3, 0.5]), 1.2, 1e-4))
    xs = rng.uniform(size=(50, 2))
    mu, sd = posterior(gp, xs)
    omu, osd = dense_posterior(gp, xs)
    assert np.max(np.abs(mu - omu)) < 1e-8
    assert np.max(np.abs(sd ** 2 - osd ** 2)) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_fitted_posterior_matches_dense_oracle(seed):
    X, y, rng = problem(seed)
    gp = gp_fit(X, y)
    xs = rng.uniform(size=(50, 2))
    mu, sd = posterior(gp, xs)
    omu, osd = dense_posterior(gp, xs)
    assert np.max(np.abs(mu - omu)) < 1e-8
    assert np.max(np.abs(sd ** 2 - osd ** 2)) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_lml_matches_dense(seed):
    X, y, _ = problem(seed)
    hyper = Hyperparameters(np.array([0.4, 0.2]), 0.8, 1e-3)
    assert log_marginal_likelihood(X, y, hyper) == pytest.approx(dense_lml(X, y, hyper), abs=1e-8)


def test_fit_maximizes_over_grid():
    X, y, _ = problem(3)
    gp = gp_fit(X, y)
    ys = (y - gp.y_mean) / gp.y_scale
    assert gp.log_likelihood == pytest.approx(log_marginal_likelihood(X, ys, gp.hyper, jitter=gp.jitter), abs=1e-9)
    for ls in (0.05, 0.3, 3.0):
        other = Hyperparameters(np.full(2, ls), 1.0, 1e-3)
        assert gp.log_likelihood >= log_marginal_likelihood(X, ys, other) - 1e-9


def test_constant_function():
    X = np.random.default_rng(0).uniform(size=(10, 2))
    gp = gp_fit(X, np.full(10, 3.5))
    mu, _ = posterior(gp, np.random.default_rng(1).uniform(size=(20, 2)))
    np.testing.assert_allclose(mu, 3.5, atol=1e-6)


def test_interpolates_training_targets():
    X, y, _ = problem(1)
    gp = gp_fit(X, y, hyper=Hyperparameters(np.array([0.3, 0.3]), 1.0, 1e-8))
    mu, sd = posterior(gp, X)
    np.testing.assert_allclose(mu, y, atol=1e-4)
    assert np.all(sd ** 2 <= gp.noise_variance + 1e-6)


def test_prior_reversion():
    X = np.random.default_rng(2).uniform(size=(15, 1)) * 0.1
    y = np.random.default_rng(3).normal(size=15)
    ls = 0.05
    gp = gp_fit(X, y, hyper=Hyperparameters(np.array([ls]), 1.0, 1e-2))
    far = np.array([[0.1 + 10 * ls]])
    mu, sd = posterior(gp, far)
    assert mu[0] == pytest.approx(gp.y_mean, abs=0.01 * gp.y_scale)
    assert sd[0] == pytest.approx(np.sqrt(gp.hyper.variance) * gp.y_scale, rel=0.01)


def test_warm_start_close_to_full_fit():
    X, y, _ = problem(4, n=40)
    full = gp_fit(X, y)
    warm = gp_fit(X, y, warm_start=full.hyper)
    assert warm.log_likelihood >= full.log_likelihood - 1e-9


def test_posterior_std_non_negative(rng):
    X, y, _ = problem(5)
    gp = gp_fit(X, y)
    _, sd = posterior(gp, np.vstack([X, rng.uniform(size=(100, 2))]))
    assert np.all(sd >= 0)


def test_jitter_escalates_for_duplicates():
    X = np.array([[0.5, 0.5]] * 5 + [[0.1, 0.2]])
    y = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 2.0])
    gp = gp_fit(X, y, hyper=Hyperparameters(np.array([0.3, 0.3]), 1.0, 0.0))
    assert 0 < gp.jitter <= MAX_JITTER


def test_input_validation():
    with pytest.raises(DomainError):
        gp_fit(np.zeros((1, 2)), [1.0])
    with pytest.raises(DomainError):
        gp_fit(np.zeros((3, 2)), [1.0, 2.0])
    with pytest.raises(DomainError):
        gp_fit(np.zeros((2, 1)), [1.0, np.nan])
    with pytest.raises(ConfigError):
        KernelConfig(nu=1.0)
