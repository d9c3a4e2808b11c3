"""Parameters, modules and the small set of layers the networks are built from."""
from __future__ import annotations

import copy
from collections.abc import Callable, Iterator, Sequence
from typing import Any

import numpy as np

from bevnav.common.errors import CheckpointError, ShapeError
from bevnav.nn import tensor as T
from bevnav.nn.conv import conv2d
from bevnav.nn.tensor import Tensor


class Parameter(Tensor):
    """A trainable tensor. Its dotted name is assigned by the owning module tree."""

    __slots__ = ("name",)

    def __init__(self, data: Any, name: str = "") -> None:
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


class Module:
    """Base class. Parameters and sub-modules are discovered from attributes in
    assignment order, which fixes the parameter naming and ordering."""

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError

    def _children(self) -> Iterator[tuple[str, Parameter | Module]]:
        for key, value in vars(self).items():
            if isinstance(value, (Parameter, Module)):
                yield key, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, (Parameter, Module)):
                        yield f"{key}.{i}", item

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for key, value in self._children():
            full = f"{prefix}.{key}" if prefix else key
            if isinstance(value, Parameter):
                yield full, value
            else:
                yield from value.named_parameters(full)

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def assign_names(self, prefix: str = "") -> None:
        for name, p in self.named_parameters(prefix):
            p.name = name

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def astype(self, dtype: Any) -> Module:
        """Cast every parameter in place; float64 is used for gradient checks."""
        for p in self.parameters():
            p.data = p.data.astype(dtype)
            p.grad = None
        return self

    def copy(self) -> Module:
        return copy.deepcopy(self)

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        named = dict(self.named_parameters())
        missing = sorted(set(named) - set(state))
        unexpected = sorted(set(state) - set(named))
        if missing or unexpected:
            raise CheckpointError(f"parameter mismatch: missing={missing} unexpected={unexpected}")
        for name, p in named.items():
            value = state[name]
            if value.shape != p.data.shape:
                raise CheckpointError(f"{name}: shape {value.shape} != {p.data.shape}")
        for name, p in named.items():
            p.data = state[name].astype(p.data.dtype, copy=True)

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape).astype(np.float32)


class Linear(Module):
    """y = x W + b with W stored as (in, out)."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator) -> None:
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(uniform_init(rng, (in_features, out_features), in_features))
        self.bias = Parameter(uniform_init(rng, (out_features,), in_features))

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"Linear({self.in_features}->{self.out_features}) got input {x.shape}")
        return T.matmul(x, self.weight) + self.bias


_ACTIVATIONS: dict[str, Callable[[Tensor], Tensor]] = {"relu": T.relu, "tanh": T.tanh}


class MLP(Module):
    """Linear layers with an activation between them and none after the last."""

    def __init__(self, sizes: Sequence[int], rng: np.random.Generator, activation: str = "relu") -> None:
        if len(sizes) < 2:
            raise ShapeError(f"MLP needs at least input and output sizes, got {list(sizes)}")
        self.sizes = tuple(int(s) for s in sizes)
        self.activation = activation
        self.layers = [Linear(a, b, rng) for a, b in zip(self.sizes[:-1], self.sizes[1:], strict=True)]

    def forward(self, x: Tensor) -> Tensor:
        act = _ACTIVATIONS[self.activation]
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1:
                x = act(x)
        return x


class Conv2d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        stride: int = 1,
        padding: int = 0,
    ) -> None:
        fan_in = in_channels * kernel_size * kernel_size
        self.stride = stride
        self.padding = padding
        self.weight = Parameter(
            uniform_init(rng, (out_channels, in_channels, kernel_size, kernel_size), fan_in)
        )
        self.bias = Parameter(uniform_init(rng, (out_channels,), fan_in))

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=self.stride, padding=self.padding)


class Identity(Module):
    def forward(self, x: Tensor) -> Tensor:
        return x
