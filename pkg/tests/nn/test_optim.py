from __future__ import annotations

import numpy as np
import pytest

from bevnav.common.errors import CheckpointError, GradientError
from bevnav.nn import tensor as T
from bevnav.nn.layers import Parameter
from bevnav.nn.optim import Adam, StepSchedule
from bevnav.nn.tensor import Tape


def _quadratic_step(w: Parameter, opt: Adam, target: float = 3.0) -> float:
    with Tape() as tape:
        loss = T.sum(T.square(w - target))
    tape.backward(loss, params=[w])
    opt.step()
    return loss.item()


def test_schedule_halves_every_interval():
    sched = StepSchedule(initial=1e-3, decay=0.5, interval=10_000)
    assert sched.lr_at(0) == pytest.approx(1e-3)
    assert sched.lr_at(9_999) == pytest.approx(1e-3)
    assert sched.lr_at(10_000) == pytest.approx(5e-4)
    assert sched.lr_at(25_000) == pytest.approx(2.5e-4)


def test_schedule_without_interval_is_constant():
    assert StepSchedule(initial=0.1, interval=0).lr_at(10**6) == 0.1


def test_first_step_moves_by_learning_rate():
    w = Parameter(np.array([0.0]), name="w")
    opt = Adam([w], StepSchedule(initial=1e-3, interval=0))
    w.grad = np.array([1.0])
    opt.step()
    assert w.data[0] == pytest.approx(-1e-3, rel=1e-6)


def test_zero_gradient_leaves_parameter_and_moments():
    w = Parameter(np.array([0.7, -0.2]), name="w")
    opt = Adam([w])
    w.grad = np.zeros(2)
    opt.step()
    np.testing.assert_array_equal(w.data, [0.7, -0.2])
    np.testing.assert_array_equal(opt.state.m["w"], [0.0, 0.0])
    np.testing.assert_array_equal(opt.state.v["w"], [0.0, 0.0])


def test_step_clears_gradients_and_counts():
    w = Parameter(np.ones(3), name="w")
    opt = Adam([w])
    w.grad = np.ones(3)
    opt.step()
    assert w.grad is None
    assert opt.state.step == 1


def test_small_rate_moves_steadily_toward_minimum():
    """Adam's per-step move is bounded by the rate, so 100 steps at 1e-2 cover about 1.0."""
    w = Parameter(np.array(0.0), name="w")
    opt = Adam([w], StepSchedule(initial=1e-2, interval=0))
    distances = []
    for _ in range(100):
        _quadratic_step(w, opt)
        distances.append(abs(float(w.data) - 3.0))
    assert all(b < a for a, b in zip(distances, distances[1:], strict=False))
    assert 2.0 < distances[-1] < 2.3


def test_converges_on_quadratic():
    w = Parameter(np.array(0.0), name="w")
    opt = Adam([w], StepSchedule(initial=0.1, interval=0))
    for _ in range(300):
        _quadratic_step(w, opt)
    assert abs(float(w.data) - 3.0) < 0.5


def test_missing_gradient_rejected():
    a = Parameter(np.ones(2), name="a")
    b = Parameter(np.ones(2), name="b")
    opt = Adam([a, b])
    a.grad = np.ones(2)
    with pytest.raises(GradientError, match="b"):
        opt.step()


@pytest.mark.parametrize("names", [["", "b"], ["a", "a"]])
def test_parameters_need_unique_names(names):
    params = [Parameter(np.ones(1), name=n) for n in names]
    with pytest.raises(GradientError):
        Adam(params)


def test_state_export_import_continues_identically():
    def make() -> tuple[Parameter, Adam]:
        w = Parameter(np.array([0.0, 1.0]), name="w")
        return w, Adam([w], StepSchedule(initial=0.05, interval=0))

    w1, opt1 = make()
    for _ in range(5):
        _quadratic_step(w1, opt1)
    tensors, meta = opt1.export_state("opt")

    w2, opt2 = make()
    w2.data = w1.data.copy()
    opt2.import_state("opt", tensors, meta)
    assert opt2.state.step == 5
    for _ in range(3):
        _quadratic_step(w1, opt1)
        _quadratic_step(w2, opt2)
    np.testing.assert_array_equal(w1.data, w2.data)


def test_import_state_missing_entry():
    w = Parameter(np.zeros(1), name="w")
    opt = Adam([w])
    with pytest.raises(CheckpointError, match="opt.m.w"):
        opt.import_state("opt", {}, {"step": 0})
