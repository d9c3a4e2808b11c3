"""Forward primitives and the reverse-mode tape."""
from __future__ import annotations

import numpy as np
import pytest

from bevnav.common.errors import GradientError, NonFiniteError, ShapeError
from bevnav.nn import tensor as T
from bevnav.nn.conv import conv2d, global_max_pool
from bevnav.nn.tensor import Tape, Tensor, set_finite_checks


def test_matmul_identity():
    x = Tensor(np.arange(12, dtype=np.float32).reshape(3, 4))
    out = T.matmul(Tensor(np.eye(3)), x)
    np.testing.assert_array_equal(out.data, x.data)


def test_relu_definition():
    out = T.relu(Tensor([-1.0, 0.0, 2.0]))
    np.testing.assert_array_equal(out.data, [0.0, 0.0, 2.0])


def test_conv2d_all_ones_kernel():
    x = Tensor(np.array([[[[1.0, 2.0], [3.0, 4.0]]]]))
    w = Tensor(np.ones((1, 1, 2, 2)))
    out = conv2d(x, w, stride=1, padding=0)
    assert out.shape == (1, 1, 1, 1)
    assert out.data[0, 0, 0, 0] == 10.0


def test_shape_mismatch_names_both_shapes():
    with pytest.raises(ShapeError) as exc:
        T.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    assert "(2, 3)" in str(exc.value)


def test_add_rejects_incompatible_broadcast():
    with pytest.raises(ShapeError, match=r"\(3,\).*\(4,\)"):
        T.add(Tensor(np.ones(3)), Tensor(np.ones(4)))


def test_float32_by_default():
    assert Tensor([1, 2, 3]).dtype == np.float32
    assert Tensor(np.zeros(2, dtype=np.float64)).dtype == np.float64


def test_numpy_operand_defers_to_tensor():
    t = Tensor(np.ones(3), requires_grad=True)
    with Tape():
        out = np.full(3, 2.0) * t
    assert isinstance(out, Tensor)
    np.testing.assert_array_equal(out.data, [2.0, 2.0, 2.0])


class TestBackward:
    def test_sum_gradient_is_ones(self):
        x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
        with Tape() as tape:
            loss = T.sum(x)
        tape.backward(loss)
        np.testing.assert_array_equal(x.grad, [1.0, 1.0, 1.0])

    def test_mean_of_squares(self):
        x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        with Tape() as tape:
            loss = T.mean(T.square(x))
        tape.backward(loss)
        np.testing.assert_allclose(x.grad, [1.0, 2.0])

    def test_non_scalar_loss_rejected(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with Tape() as tape:
            y = x * 2.0
        with pytest.raises(GradientError):
            tape.backward(y)

    def test_loss_off_tape_rejected(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with Tape():
            loss = T.sum(x)
        with pytest.raises(GradientError):
            Tape().backward(loss)

    def test_unreachable_parameters_get_zero_gradients(self):
        x = Tensor(np.ones(2), requires_grad=True)
        unused = Tensor(np.ones((2, 2)), requires_grad=True)
        with Tape() as tape:
            loss = T.sum(x)
        tape.backward(loss, params=[x, unused])
        np.testing.assert_array_equal(unused.grad, np.zeros((2, 2)))

    def test_each_entry_replayed_once_in_reverse(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with Tape() as tape:
            y = T.tanh(x)
            z = T.exp(y)
            loss = T.sum(z * y)
        tape.backward(loss)
        n = len(tape)
        assert tape.last_backward_order == list(range(n - 1, -1, -1))

    def test_gradients_accumulate_on_leaves(self):
        x = Tensor(np.array([3.0]), requires_grad=True)
        with Tape() as tape:
            loss = T.sum(x * x + x)
        tape.backward(loss)
        np.testing.assert_allclose(x.grad, [7.0])

    def test_detach_blocks_gradient(self):
        x = Tensor(np.array([2.0]), requires_grad=True)
        with Tape() as tape:
            loss = T.sum(x * x.detach())
        tape.backward(loss)
        np.testing.assert_allclose(x.grad, [2.0])

    def test_nothing_recorded_without_tape(self):
        x = Tensor(np.ones(2), requires_grad=True)
        y = T.sum(x * 3.0)
        assert y.is_leaf
        assert not y.requires_grad


class TestPrimitiveGradients:
    """Central differences in float64 against each vector-Jacobian product."""

    @staticmethod
    def numeric(fn, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
        grad = np.zeros_like(x)
        for i in np.ndindex(x.shape):
            orig = x[i]
            x[i] = orig + eps
            plus = fn(Tensor(x)).item()
            x[i] = orig - eps
            minus = fn(Tensor(x)).item()
            x[i] = orig
            grad[i] = (plus - minus) / (2 * eps)
        return grad

    def check(self, fn, x: np.ndarray) -> None:
        t = Tensor(x.copy(), requires_grad=True)
        with Tape() as tape:
            loss = fn(t)
        tape.backward(loss)
        num = self.numeric(fn, x.copy())
        scale = max(np.abs(num).max(), 1e-12)
        assert np.abs(t.grad - num).max() / scale < 1e-6

    @pytest.mark.parametrize(
        "fn",
        [
            lambda t: T.sum(T.tanh(t) * t),
            lambda t: T.sum(T.exp(t) / (1.0 + T.square(t))),
            lambda t: T.sum(T.softplus(t) - T.sqrt(T.square(t) + 1.0)),
            lambda t: T.sum(T.log_softmax(t, axis=1) * np.arange(12.0).reshape(3, 4)),
            lambda t: T.mean(T.reshape(t, (4, 3)) @ Tensor(np.ones((3, 2), dtype=np.float64))),
            lambda t: T.sum(T.concat([t, T.square(t)], axis=0)[1:4] * 1.5),
            lambda t: T.sum(T.transpose(t) * np.arange(12.0).reshape(4, 3)),
            lambda t: T.sum(T.sum(t, axis=1) * np.array([1.0, -2.0, 0.5])),
        ],
    )
    def test_smooth_primitives(self, fn):
        x = np.random.default_rng(3).standard_normal((3, 4))
        self.check(fn, x)

    def test_relu_away_from_kink(self):
        x = np.array([[-1.5, -0.3, 0.4, 2.0]])
        self.check(lambda t: T.sum(T.relu(t) * np.array([1.0, 2.0, 3.0, 4.0])), x)

    def test_conv2d_with_stride_and_padding(self):
        rng = np.random.default_rng(1)
        w = Tensor(rng.standard_normal((3, 2, 3, 3)))
        b = Tensor(rng.standard_normal(3))
        proj = rng.standard_normal((1, 3, 3, 3))
        x = rng.standard_normal((1, 2, 5, 5))
        self.check(lambda t: T.sum(conv2d(t, w, b, stride=2, padding=1) * proj), x)

    def test_global_max_pool(self):
        x = np.random.default_rng(2).standard_normal((2, 3, 4, 4))
        self.check(lambda t: T.sum(global_max_pool(t) * np.arange(6.0).reshape(2, 3)), x)


def test_global_max_pool_matches_brute_force():
    x = np.random.default_rng(4).standard_normal((2, 5, 3, 4)).astype(np.float32)
    out = global_max_pool(Tensor(x))
    for b in range(2):
        for c in range(5):
            assert out.data[b, c] == x[b, c].max()


def test_log_softmax_normalizes():
    out = T.log_softmax(Tensor(np.random.default_rng(5).standard_normal((4, 6))), axis=1)
    np.testing.assert_allclose(np.exp(out.data).sum(axis=1), np.ones(4), rtol=1e-5)


def test_clip_gradient_zero_outside_range():
    x = Tensor(np.array([-3.0, 0.5, 3.0]), requires_grad=True)
    with Tape() as tape:
        loss = T.sum(T.clip(x, -1.0, 1.0))
    tape.backward(loss)
    np.testing.assert_array_equal(x.grad, [0.0, 1.0, 0.0])


def test_minimum_routes_gradient_to_smaller_input():
    a = Tensor(np.array([1.0, 5.0]), requires_grad=True)
    b = Tensor(np.array([2.0, 4.0]), requires_grad=True)
    with Tape() as tape:
        loss = T.sum(T.minimum(a, b))
    tape.backward(loss)
    np.testing.assert_array_equal(a.grad, [1.0, 0.0])
    np.testing.assert_array_equal(b.grad, [0.0, 1.0])


class TestScalarPrecision:
    def test_float64_scalar_sum_stays_float64(self):
        s = Tensor(np.array(1.0 + 1e-12, dtype=np.float64))
        out = s + s
        assert out.dtype == np.float64
        assert out.item() == 2.0 + 2e-12

    def test_scalar_losses_keep_float64(self):
        x = Tensor(np.array([0.1, 0.2, 0.3]), requires_grad=True)
        with Tape() as tape:
            loss = 0.5 * T.sum(x) + 2.0 * T.sum(T.square(x))
        assert loss.dtype == np.float64
        tape.backward(loss, params=[x])
        assert x.grad.dtype == np.float64
        np.testing.assert_allclose(x.grad, 0.5 + 4.0 * x.data, rtol=1e-14)

    def test_float32_scalars_stay_float32(self):
        s = Tensor(np.array([1.5, 2.5], dtype=np.float32))
        assert T.sum(s).dtype == np.float32
        assert (-T.sum(s)).dtype == np.float32


class TestFiniteChecks:
    def test_non_finite_forward_raises(self):
        with np.errstate(all="ignore"), pytest.raises(NonFiniteError):
            T.log(Tensor(np.array([0.0, 1.0])))

    def test_checks_can_be_disabled(self):
        set_finite_checks(False)
        try:
            with np.errstate(all="ignore"):
                out = T.log(Tensor(np.array([0.0])))
            assert np.isneginf(out.data[0])
        finally:
            set_finite_checks(True)
