import math

import numpy as np
import pytest

from gridforecast.losses import (LossConfig, cross_entropy, cross_entropy_grad, focal_loss,
                                 focal_loss_grad, loss)

EPS = 1e-7


def naive_ce(p, y):
    total = 0.0
    for pi, yi in zip(p.ravel(), y.ravel()):
        pi = min(max(pi, EPS), 1 - EPS)
        total += -(yi * math.log(pi) + (1 - yi) * math.log(1 - pi))
    return total / p.size


def test_ce_zero_pair():
    z = np.zeros((4, 4))
    assert cross_entropy(z, z) == pytest.approx(-math.log(1 - EPS))
    assert cross_entropy(z, z) < 1e-6


def test_ce_single_cell():
    assert cross_entropy(np.array([[0.5]]), np.array([[1.0]])) == pytest.approx(math.log(2))


def test_ce_matches_naive(rng):
    for _ in range(20):
        p, y = rng.random((8, 8)), rng.random((8, 8))
        assert cross_entropy(p, y) == pytest.approx(naive_ce(p, y), abs=1e-6)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        cross_entropy(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        focal_loss(np.zeros((2, 2)), np.zeros((3, 2)))


def test_focal_single_positive():
    cfg = LossConfig(focal_alpha=2.0)
    assert focal_loss(np.array([[0.5]]), np.array([[1.0]]), cfg) == pytest.approx(0.25 * math.log(2))


def test_focal_negative_is_penalty_reduced():
    p = np.array([[0.3]])
    near = focal_loss(p, np.array([[0.9]]))
    far = focal_loss(p, np.array([[0.0]]))
    assert 0 < near < far
    assert far == pytest.approx(-(0.3 ** 2) * math.log(0.7))


def test_focal_perfect_prediction():
    y = np.zeros((6, 6))
    y[2, 3] = 1.0
    assert focal_loss(y, y) < 1e-10
    assert cross_entropy(y, y) < 1e-6


def binary_pair(r, shape=(12, 12)):
    return r.random(shape), (r.random(shape) < 0.2).astype(float)


def test_focal_degenerates_to_ce(rng):
    cfg = LossConfig(focal_alpha=0.0, focal_beta=0.0)
    for _ in range(100):
        p, y = binary_pair(rng)
        assert focal_loss(p, y, cfg) == pytest.approx(cross_entropy(p, y), abs=1e-6)


def test_nonnegative_and_permutation_invariant(rng):
    p, y = rng.random(64), rng.random(64)
    y[5] = 1.0
    perm = rng.permutation(64)
    for f in (cross_entropy, focal_loss):
        assert f(p, y) >= 0
        assert f(p[perm], y[perm]) == pytest.approx(f(p, y), abs=1e-12)


def fd_grad(f, p, y, h=1e-6):
    g = np.zeros_like(p)
    for idx in np.ndindex(p.shape):
        a, b = p.copy(), p.copy()
        a[idx] += h
        b[idx] -= h
        g[idx] = (f(a, y) - f(b, y)) / (2 * h)
    return g


@pytest.mark.parametrize("cfg", [LossConfig(), LossConfig(focal_alpha=0.0, focal_beta=0.0),
                                 LossConfig(focal_alpha=1.5, focal_beta=2.0)])
def test_focal_gradient(rng, cfg):
    p = rng.uniform(0.05, 0.95, (5, 5))
    y = rng.random((5, 5))
    y[1, 1] = y[3, 4] = 1.0
    analytic = focal_loss_grad(p, y, cfg)
    numeric = fd_grad(lambda a, b: focal_loss(a, b, cfg), p, y)
    np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=0)


def test_ce_gradient(rng):
    p = rng.uniform(0.05, 0.95, (5, 5))
    y = rng.random((5, 5))
    np.testing.assert_allclose(cross_entropy_grad(p, y), fd_grad(cross_entropy, p, y), rtol=1e-4)


def test_dispatch_and_config_validation():
    p, y = np.full((2, 2), 0.4), np.eye(2)
    assert loss(p, y, LossConfig("cross_entropy")) == cross_entropy(p, y)
    assert loss(p, y, LossConfig("focal")) == focal_loss(p, y)
    with pytest.raises(ValueError):
        LossConfig("l2")
    with pytest.raises(ValueError):
        LossConfig(epsilon=0.6)
    with pytest.raises(ValueError):
        LossConfig(focal_alpha=-1)
