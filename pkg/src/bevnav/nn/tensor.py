"""Tensor values and the reverse-mode tape.

Every primitive computes its forward value eagerly with numpy and, when a
``Tape`` is active and any input requires a gradient, records a vector-Jacobian
product on that tape. ``Tape.backward`` replays the records in reverse order.

Tensors default to float32. Casting inputs and parameters to float64 keeps the
whole graph in float64, which is what the finite-difference checker relies on.
"""
from __future__ import annotations

import threading
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from bevnav.common.errors import GradientError, NonFiniteError, ShapeError

DEFAULT_DTYPE = np.float32

Vjp = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_state = threading.local()
_finite_checks = True


def set_finite_checks(enabled: bool) -> None:
    global _finite_checks
    _finite_checks = bool(enabled)


def _tape_stack() -> list[Tape]:
    stack = getattr(_state, "tapes", None)
    if stack is None:
        stack = []
        _state.tapes = stack
    return stack


def current_tape() -> Tape | None:
    stack = _tape_stack()
    return stack[-1] if stack else None


def _check_finite(op: str, data: np.ndarray) -> None:
    if _finite_checks and not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{op} produced non-finite values (shape {tuple(data.shape)})")


def _as_array(data: Any, dtype: Any = None) -> np.ndarray:
    if dtype is not None:
        return np.asarray(data, dtype=dtype)
    if isinstance(data, np.ndarray) and np.issubdtype(data.dtype, np.floating):
        return data
    # 0-d numpy results come back as scalars; keep their precision
    if isinstance(data, np.floating):
        return np.asarray(data)
    return np.asarray(data, dtype=DEFAULT_DTYPE)


class Tensor:
    """Shape-tagged float array with an optional gradient slot."""

    __slots__ = ("data", "requires_grad", "grad", "_tape", "__weakref__")
    # numpy defers mixed arithmetic to the Tensor operators
    __array_ufunc__ = None

    def __init__(self, data: Any, requires_grad: bool = False, dtype: Any = None) -> None:
        self.data = _as_array(data, dtype)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._tape: Tape | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self._tape is None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def detach(self) -> Tensor:
        """Stop-gradient: same values, never recorded on a tape."""
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # operator sugar
    def __add__(self, other: Any) -> Tensor:
        return add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        return add(other, self)

    def __sub__(self, other: Any) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        return mul(other, self)

    def __truediv__(self, other: Any) -> Tensor:
        return div(self, other)

    def __rtruediv__(self, other: Any) -> Tensor:
        return div(other, self)

    def __neg__(self) -> Tensor:
        return neg(self)

    def __matmul__(self, other: Any) -> Tensor:
        return matmul(self, other)

    def __getitem__(self, index: Any) -> Tensor:
        return getitem(self, index)


@dataclass
class TapeEntry:
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    vjp: Vjp


class Tape:
    """Ordered record of primitive applications.

    Use as a context manager; primitives evaluated inside the block are
    recorded when any input requires a gradient::

        with Tape() as tape:
            loss = mean(square(model(x)))
        tape.backward(loss)
    """

    def __init__(self) -> None:
        self.entries: list[TapeEntry] = []
        self.last_backward_order: list[int] = []

    def __enter__(self) -> Tape:
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc: object) -> None:
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self.entries)

    def record(self, op: str, inputs: tuple[Tensor, ...], output: Tensor, vjp: Vjp) -> None:
        output._tape = self
        self.entries.append(TapeEntry(op=op, inputs=inputs, output=output, vjp=vjp))

    def backward(self, loss: Tensor, params: Iterable[Tensor] | None = None) -> None:
        """Populate ``.grad`` on every leaf reachable from ``loss``.

        Leaf gradients accumulate. Tensors in ``params`` that the loss does not
        reach receive zero gradients.
        """
        if loss.size != 1:
            raise GradientError(f"backward needs a scalar loss, got shape {loss.shape}")
        if loss._tape is not self:
            raise GradientError("loss was not recorded on this tape")

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        order: list[int] = []
        for index in range(len(self.entries) - 1, -1, -1):
            entry = self.entries[index]
            g = grads.pop(id(entry.output), None)
            order.append(index)
            if g is None:
                continue
            input_grads = entry.vjp(g)
            for inp, ig in zip(entry.inputs, input_grads, strict=True):
                if ig is None or not inp.requires_grad:
                    continue
                _check_finite(f"backward({entry.op})", ig)
                if ig.shape != inp.data.shape:
                    raise ShapeError(
                        f"backward({entry.op}) produced grad {ig.shape} for input {inp.data.shape}"
                    )
                if inp.is_leaf:
                    ig = ig.astype(inp.data.dtype, copy=False)
                    inp.grad = ig.copy() if inp.grad is None else inp.grad + ig
                else:
                    key = id(inp)
                    grads[key] = grads[key] + ig if key in grads else ig
        self.last_backward_order = order

        if params is not None:
            for p in params:
                if p.grad is None:
                    p.grad = np.zeros_like(p.data)


def backward(tape: Tape, loss: Tensor, params: Iterable[Tensor] | None = None) -> None:
    tape.backward(loss, params=params)


def as_tensor(value: Any, like: Tensor | None = None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    dtype = like.data.dtype if like is not None else None
    return Tensor(value, dtype=dtype)


def make_result(op: str, data: np.ndarray, inputs: tuple[Tensor, ...], vjp: Vjp) -> Tensor:
    """Wrap a forward value and record it when a gradient is needed."""
    _check_finite(op, data)
    tape = current_tape()
    needs_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs_grad)
    if needs_grad:
        assert tape is not None
        tape.record(op, inputs, out, vjp)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shapes(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}") from e


# ---------------------------------------------------------------------------
# Elementwise
# ---------------------------------------------------------------------------


def add(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shapes("add", a, b)
    return make_result(
        "add",
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shapes("sub", a, b)
    return make_result(
        "sub",
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shapes("mul", a, b)
    return make_result(
        "mul",
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def div(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shapes("div", a, b)
    out = a.data / b.data
    return make_result(
        "div",
        out,
        (a, b),
        lambda g: (_unbroadcast(g / b.data, a.shape), _unbroadcast(-g * out / b.data, b.shape)),
    )


def neg(a: Tensor) -> Tensor:
    return make_result("neg", -a.data, (a,), lambda g: (-g,))


def square(a: Tensor) -> Tensor:
    return make_result("square", a.data * a.data, (a,), lambda g: (2.0 * a.data * g,))


def sqrt(a: Tensor) -> Tensor:
    out = np.sqrt(a.data)
    return make_result("sqrt", out, (a,), lambda g: (g / (2.0 * out),))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return make_result("relu", np.where(mask, a.data, 0).astype(a.dtype), (a,), lambda g: (g * mask,))


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)
    return make_result("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return make_result("exp", out, (a,), lambda g: (g * out,))


def log(a: Tensor) -> Tensor:
    return make_result("log", np.log(a.data), (a,), lambda g: (g / a.data,))


def softplus(a: Tensor) -> Tensor:
    x = a.data
    out = np.logaddexp(0.0, x).astype(a.dtype)
    sig = (0.5 * (1.0 + np.tanh(0.5 * x))).astype(a.dtype)
    return make_result("softplus", out, (a,), lambda g: (g * sig,))


def clip(a: Tensor, low: float, high: float) -> Tensor:
    """Clamp values; the gradient is zero where the clamp is active."""
    inside = (a.data >= low) & (a.data <= high)
    return make_result("clip", np.clip(a.data, low, high), (a,), lambda g: (g * inside,))


def minimum(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"minimum: shapes differ {a.shape} vs {b.shape}")
    pick_a = a.data <= b.data
    return make_result(
        "minimum",
        np.where(pick_a, a.data, b.data),
        (a, b),
        lambda g: (g * pick_a, g * ~pick_a),
    )


# ---------------------------------------------------------------------------
# Linear algebra and shape
# ---------------------------------------------------------------------------


def matmul(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    return make_result(
        "matmul",
        a.data @ b.data,
        (a, b),
        lambda g: (g @ b.data.T, a.data.T @ g),
    )


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ShapeError("concat: no tensors")
    ndim = tensors[0].ndim
    ax = axis % ndim
    for t in tensors[1:]:
        if t.ndim != ndim or any(
            t.shape[d] != tensors[0].shape[d] for d in range(ndim) if d != ax
        ):
            raise ShapeError(f"concat: incompatible shapes {tensors[0].shape} and {t.shape}")
    sizes = [t.shape[ax] for t in tensors]
    bounds = np.cumsum([0, *sizes])

    def vjp(g: np.ndarray) -> list[np.ndarray]:
        return [
            np.take(g, np.arange(bounds[i], bounds[i + 1]), axis=ax) for i in range(len(tensors))
        ]

    return make_result("concat", np.concatenate([t.data for t in tensors], axis=ax), tuple(tensors), vjp)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError as e:
        raise ShapeError(f"reshape: cannot view {a.shape} as {shape}") from e
    return make_result("reshape", out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor) -> Tensor:
    if a.ndim != 2:
        raise ShapeError(f"transpose expects a matrix, got {a.shape}")
    return make_result("transpose", a.data.T, (a,), lambda g: (g.T,))


def getitem(a: Tensor, index: Any) -> Tensor:
    out = a.data[index]

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return make_result("getitem", np.array(out, copy=True), (a,), vjp)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------


def sum(a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).astype(a.dtype, copy=True),)

    return make_result("sum", np.asarray(out, dtype=a.dtype), (a,), vjp)


def mean(a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = a.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        count = int(np.prod([a.shape[ax] for ax in axes]))
    if count == 0:
        raise ShapeError(f"mean over an empty extent of shape {a.shape}")
    out = a.data.mean(axis=axis, keepdims=keepdims)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return ((np.broadcast_to(g, a.shape) / count).astype(a.dtype),)

    return make_result("mean", np.asarray(out, dtype=a.dtype), (a,), vjp)


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    soft = np.exp(out)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (g - soft * g.sum(axis=axis, keepdims=True),)

    return make_result("log_softmax", out.astype(a.dtype), (a,), vjp)


def _pair(a: Any, b: Any) -> tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        return a, as_tensor(b, like=a)
    if isinstance(b, Tensor):
        return as_tensor(a, like=b), b
    return as_tensor(a), as_tensor(b)
