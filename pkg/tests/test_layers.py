"""Layer forward contracts and gradient soundness against finite differences."""

import math

import numpy as np
import pytest

from desknet.errors import (
    InvalidGeometryError,
    InvalidRangeError,
    StaleCacheError,
)
from desknet.layers import Conv2D, Dense, Dropout, Flatten, MaxPool2D, ReLU
from desknet.loss import softmax, softmax_xent
from desknet.rng import RandomSource

from oracles import dense_loops, finite_difference, max_rel_err

GRAD_TOL = 1e-4


def linear_probe(layer, x, rng=None, train=False, seed=0):
    """Scalar functional sum(forward(x) * R) for a fixed random R."""
    y, _ = layer.forward(x, rng=rng, train=train)
    r = np.random.default_rng(seed).uniform(-1, 1, y.shape)

    def f():
        out, _ = layer.forward(x, rng=rng, train=train)
        return float((out * r).sum())

    return f, r


def check_layer_gradients(layer, x, n_param_checks=True):
    """Analytic dx and dparams vs central differences on a linear probe."""
    f, r = linear_probe(layer, x)
    y, cache = layer.forward(x)
    for p in layer.params():
        p.zero_grad()
    dx = layer.backward(cache, r)

    fd_dx = finite_difference(f, x)
    assert max_rel_err(dx, fd_dx) < GRAD_TOL
    for p in layer.params():
        fd_dp = finite_difference(f, p.value)
        assert max_rel_err(p.grad, fd_dp) < GRAD_TOL


class TestDenseForward:
    def test_identity_weights(self):
        layer = Dense(3, 3)
        layer.w.value[...] = np.eye(3)
        x = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        y, _ = layer.forward(x)
        assert np.array_equal(y, x)

    def test_zero_input_gives_bias(self):
        layer = Dense(3, 4)
        layer.b.value[...] = [1.0, 2.0, 3.0, 4.0]
        y, _ = layer.forward(np.zeros((2, 3)))
        assert np.array_equal(y, np.tile([1.0, 2.0, 3.0, 4.0], (2, 1)))

    def test_matches_loop_oracle(self):
        rng = RandomSource(21)
        layer = Dense(3, 4, rng)
        x = rng.uniform(6, -1, 1).reshape(2, 3)
        y, _ = layer.forward(x)
        want = dense_loops(x, layer.w.value, layer.b.value)
        assert np.abs(y - want).max() <= 1e-12

    def test_dense_backward_dw_for_identity_input(self):
        layer = Dense(3, 3)
        x = np.eye(3)
        _, cache = layer.forward(x)
        upstream = np.arange(9.0).reshape(3, 3)
        layer.backward(cache, upstream)
        assert np.array_equal(layer.w.grad, upstream)


class TestReLU:
    def test_all_negative(self):
        y, _ = ReLU().forward(np.array([[-1.0, -5.0]]))
        assert np.array_equal(y, [[0.0, 0.0]])

    def test_all_positive_unchanged(self):
        x = np.array([[1.0, 2.0]])
        y, _ = ReLU().forward(x)
        assert np.array_equal(y, x)

    def test_mixed(self):
        y, _ = ReLU().forward(np.array([[-1.0, 0.0, 2.0]]))
        assert y.tolist() == [[0.0, 0.0, 2.0]]

    def test_backward_masks_upstream(self):
        layer = ReLU()
        _, cache = layer.forward(np.array([[-1.0, 2.0]]))
        dx = layer.backward(cache, np.array([[5.0, 5.0]]))
        assert dx.tolist() == [[0.0, 5.0]]


class TestConvGeometry:
    def test_invalid_geometry_raises(self):
        layer = Conv2D(1, 1, 3, stride=2, pad=0)
        with pytest.raises(InvalidGeometryError):
            layer.forward(np.zeros((1, 1, 6, 6)))

    def test_forward_shape(self):
        layer = Conv2D(16, 1, 5, stride=1, pad=2, rng=RandomSource(1))
        y, _ = layer.forward(np.zeros((2, 1, 28, 28)))
        assert y.shape == (2, 16, 28, 28)


class TestMaxPoolGeometry:
    def test_odd_size_rejected(self):
        with pytest.raises(InvalidGeometryError):
            MaxPool2D(2, 2).forward(np.zeros((1, 1, 5, 5)))


class TestDropout:
    def test_rate_zero_identity(self):
        x = np.ones((4, 4))
        for train in (True, False):
            y, _ = Dropout(0.0).forward(x, rng=RandomSource(1), train=train)
            assert np.array_equal(y, x)

    def test_eval_mode_identity(self):
        x = np.ones((4, 4))
        y, _ = Dropout(0.9).forward(x, rng=RandomSource(1), train=False)
        assert np.array_equal(y, x)

    def test_train_mean_preserved(self):
        x = np.ones((100, 1000))
        y, _ = Dropout(0.5).forward(x, rng=RandomSource(99), train=True)
        assert abs(y.mean() - 1.0) < 0.02

    def test_survivors_scaled(self):
        x = np.ones((10, 10))
        y, _ = Dropout(0.25).forward(x, rng=RandomSource(3), train=True)
        assert set(np.unique(y)) <= {0.0, 1.0 / 0.75}

    def test_rate_range_checked(self):
        for rate in (-0.1, 1.0, 1.5):
            with pytest.raises(InvalidRangeError):
                Dropout(rate)

    def test_backward_applies_mask(self):
        layer = Dropout(0.5)
        x = np.ones((8, 8))
        y, cache = layer.forward(x, rng=RandomSource(5), train=True)
        dx = layer.backward(cache, np.ones_like(x))
        assert np.array_equal(dx, y)  # mask times ones is the mask itself


class TestSoftmaxXent:
    def test_uniform_logits_is_log10(self):
        logits = np.zeros((3, 10))
        targets = np.eye(10)[:3]
        loss, _ = softmax_xent(logits, targets)
        assert abs(loss - math.log(10)) < 1e-12

    def test_confident_correct_is_near_zero(self):
        logits = np.zeros((1, 10))
        logits[0, 4] = 1000.0
        targets = np.zeros((1, 10))
        targets[0, 4] = 1.0
        loss, _ = softmax_xent(logits, targets)
        assert loss < 1e-9

    def test_rows_sum_to_one(self):
        logits = np.random.default_rng(8).uniform(-5, 5, (6, 10))
        p = softmax(logits)
        assert np.abs(p.sum(axis=1) - 1.0).max() < 1e-12
        assert p.min() >= 0

    def test_loss_nonnegative(self):
        rng = np.random.default_rng(9)
        logits = rng.uniform(-3, 3, (8, 10))
        targets = np.eye(10)[rng.integers(0, 10, 8)]
        loss, _ = softmax_xent(logits, targets)
        assert loss >= 0

    def test_rejects_non_one_hot(self):
        logits = np.zeros((2, 10))
        bad = np.zeros((2, 10))
        bad[0, 0] = 1.0
        bad[1, 3] = 0.5
        with pytest.raises(InvalidRangeError):
            softmax_xent(logits, bad)

    def test_dlogits_matches_finite_differences(self):
        rng = np.random.default_rng(10)
        logits = rng.uniform(-1, 1, (4, 10))
        targets = np.eye(10)[rng.integers(0, 10, 4)]
        _, dlogits = softmax_xent(logits, targets)

        def f():
            loss, _ = softmax_xent(logits, targets)
            return loss

        fd = finite_difference(f, logits, eps=1e-6)
        assert max_rel_err(dlogits, fd, floor=1e-8) < 1e-6


class TestGradientsAgainstFiniteDifferences:
    @pytest.mark.parametrize("case", range(5))
    def test_dense(self, case):
        rng = RandomSource(100 + case)
        layer = Dense(4, 3, rng)
        x = rng.uniform(8, -1, 1).reshape(2, 4)
        check_layer_gradients(layer, x)

    @pytest.mark.parametrize("case", range(5))
    def test_conv2d(self, case):
        rng = RandomSource(200 + case)
        layer = Conv2D(3, 2, 3, stride=1, pad=1, rng=rng)
        x = rng.uniform(2 * 2 * 6 * 6, -1, 1).reshape(2, 2, 6, 6)
        check_layer_gradients(layer, x)

    @pytest.mark.parametrize("case", range(3))
    def test_relu(self, case):
        rng = RandomSource(300 + case)
        x = rng.uniform(12, -1, 1).reshape(3, 4)
        x[np.abs(x) < 0.05] += 0.1  # keep clear of the kink
        check_layer_gradients(ReLU(), x)

    @pytest.mark.parametrize("case", range(3))
    def test_maxpool(self, case):
        rng = RandomSource(400 + case)
        x = rng.uniform(1 * 2 * 4 * 4, -1, 1).reshape(1, 2, 4, 4)
        check_layer_gradients(MaxPool2D(2, 2), x)

    def test_flatten(self):
        rng = RandomSource(500)
        x = rng.uniform(2 * 2 * 3 * 3, -1, 1).reshape(2, 2, 3, 3)
        check_layer_gradients(Flatten(), x)

    def test_dropout_eval(self):
        rng = RandomSource(600)
        x = rng.uniform(16, -1, 1).reshape(4, 4)
        check_layer_gradients(Dropout(0.5), x)  # eval mode: identity


def test_cache_reuse_raises():
    layer = Dense(3, 2, RandomSource(7))
    x = np.ones((1, 3))
    _, cache = layer.forward(x)
    layer.backward(cache, np.ones((1, 2)))
    with pytest.raises(StaleCacheError):
        layer.backward(cache, np.ones((1, 2)))
