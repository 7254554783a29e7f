import numpy as np
import pytest

import oracles
from reidkit.errors import DimensionError
from reidkit.features import logistic


def test_sigmoid_handles_extremes():
    z = np.array([-1000.0, -10.0, 0.0, 10.0, 1000.0])
    s = logistic.sigmoid(z)
    assert np.isfinite(s).all()
    assert s[0] == 0.0 or s[0] < 1e-300
    assert s[2] == 0.5
    assert s[4] == 1.0
    np.testing.assert_allclose(s[1], 1 / (1 + np.exp(10)), rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n, d, c = 12, 5, 3
    x = rng.normal(size=(n, d))
    t = (rng.random((c, n)) < 0.5).astype(float)
    w0 = rng.normal(size=(c, d)) * 0.3
    b0 = rng.normal(size=c) * 0.3
    l2 = 1e-2

    _, gw, gb = logistic.loss_and_grad(w0, b0, x, t, l2)
    analytic = np.concatenate([gw.ravel(), gb])

    def loss_of(flat):
        w = flat[: c * d].reshape(c, d)
        b = flat[c * d :]
        return logistic.loss_and_grad(w, b, x, t, l2)[0]

    numeric = oracles.finite_difference_gradient(
        loss_of, np.concatenate([w0.ravel(), b0]))
    denom = np.maximum(np.abs(numeric), 1e-8)
    assert (np.abs(analytic - numeric) / denom).max() <= 1e-4


def test_loss_decreases_monotonically():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(60, 4))
    t = (x[:, 0] + 0.3 * rng.normal(size=60) > 0).astype(float)[None, :]
    result = logistic.train_one_vs_all(x, t, max_epochs=80)
    hist = np.array(result.loss_history)
    assert (np.diff(hist) <= 0).all()


def test_separable_data_trains_accurately():
    rng = np.random.default_rng(4)
    x = np.concatenate([rng.normal(size=(50, 3)) + 4, rng.normal(size=(50, 3)) - 4])
    t = np.concatenate([np.ones(50), np.zeros(50)])[None, :]
    result = logistic.train_one_vs_all(x, t, max_epochs=300)
    p = logistic.predict_proba(result.weights, result.bias, x)[:, 0]
    assert ((p > 0.5) == t[0].astype(bool)).mean() >= 0.99


def test_zero_epochs_gives_half_probabilities():
    x = np.random.default_rng(5).normal(size=(10, 4))
    result = logistic.train_one_vs_all(x, np.zeros((2, 10)), max_epochs=0)
    np.testing.assert_array_equal(
        logistic.predict_proba(result.weights, result.bias, x), 0.5)


def test_order_independence():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(40, 3))
    t = (rng.random((2, 40)) < 0.5).astype(float)
    perm = rng.permutation(40)
    a = logistic.train_one_vs_all(x, t, max_epochs=50)
    b = logistic.train_one_vs_all(x[perm], t[:, perm], max_epochs=50)
    np.testing.assert_allclose(a.loss_history[-1], b.loss_history[-1], atol=1e-6)


def test_l2_shrinks_weights():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(80, 4))
    t = (x[:, 1] > 0).astype(float)[None, :]
    small = logistic.train_one_vs_all(x, t, l2=1e-6, max_epochs=200)
    large = logistic.train_one_vs_all(x, t, l2=1.0, max_epochs=200)
    assert np.linalg.norm(large.weights) < np.linalg.norm(small.weights)


def test_predict_dim_mismatch():
    with pytest.raises(DimensionError):
        logistic.predict_proba(np.zeros((2, 4)), np.zeros(2), np.zeros((5, 3)))
