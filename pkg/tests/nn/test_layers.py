from __future__ import annotations

import numpy as np
import pytest

from bevnav.common.errors import CheckpointError, ShapeError
from bevnav.nn.layers import MLP, Conv2d, Linear
from bevnav.nn.tensor import Tensor


def test_mlp_parameter_names_follow_layer_order(rng):
    mlp = MLP([4, 8, 2], rng)
    mlp.assign_names("pi")
    names = [p.name for p in mlp.parameters()]
    assert names == [
        "pi.layers.0.weight",
        "pi.layers.0.bias",
        "pi.layers.1.weight",
        "pi.layers.1.bias",
    ]
    assert mlp.num_parameters() == 4 * 8 + 8 + 8 * 2 + 2


def test_linear_rejects_wrong_width(rng):
    with pytest.raises(ShapeError, match="Linear"):
        Linear(3, 2, rng)(Tensor(np.ones((5, 4))))


def test_mlp_needs_two_sizes(rng):
    with pytest.raises(ShapeError):
        MLP([4], rng)


def test_conv2d_output_shape(rng):
    conv = Conv2d(2, 5, 3, rng, stride=2, padding=1)
    out = conv(Tensor(np.zeros((3, 2, 8, 8))))
    assert out.shape == (3, 5, 4, 4)


def test_state_dict_round_trip(rng):
    a = MLP([3, 4, 2], rng)
    b = MLP([3, 4, 2], rng)
    b.load_state_dict(a.state_dict())
    x = Tensor(rng.standard_normal((2, 3)))
    np.testing.assert_array_equal(a(x).data, b(x).data)


def test_load_state_dict_mismatch_leaves_module_untouched(rng):
    mlp = MLP([3, 4, 2], rng)
    before = mlp.state_dict()
    bad = dict(before)
    bad["layers.1.weight"] = np.zeros((5, 2), dtype=np.float32)
    with pytest.raises(CheckpointError, match="layers.1.weight"):
        mlp.load_state_dict(bad)
    del bad["layers.1.weight"]
    with pytest.raises(CheckpointError, match="missing"):
        mlp.load_state_dict(bad)
    for name, value in mlp.state_dict().items():
        np.testing.assert_array_equal(value, before[name])


def test_copy_is_independent(rng):
    mlp = MLP([2, 2], rng)
    clone = mlp.copy()
    clone.parameters()[0].data += 1.0
    assert not np.array_equal(clone.parameters()[0].data, mlp.parameters()[0].data)


def test_astype_casts_every_parameter(rng):
    mlp = MLP([2, 3, 1], rng).astype(np.float64)
    assert {p.dtype for p in mlp.parameters()} == {np.dtype(np.float64)}
