"""Central finite-difference gradient checks run in float64."""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from bevnav.nn import tensor as T
from bevnav.nn.layers import Module
from bevnav.nn.tensor import Tape, Tensor


@dataclass
class GradCheckReport:
    tolerance: float
    errors: dict[str, float] = field(default_factory=dict)
    max_abs_grad: dict[str, float] = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def _to_float64(value: object) -> object:
    if isinstance(value, Tensor):
        return Tensor(value.data.astype(np.float64), requires_grad=value.requires_grad)
    if isinstance(value, np.ndarray) and np.issubdtype(value.dtype, np.floating):
        return value.astype(np.float64)
    return value


def grad_check(
    model: Module,
    inputs: Sequence[object] = (),
    loss_fn: Callable[..., Tensor] | None = None,
    tolerance: float = 1e-4,
    eps: float = 1e-6,
    max_entries: int = 32,
    seed: int = 0,
) -> GradCheckReport:
    """Compare analytic parameter gradients with central differences.

    ``loss_fn(model, *inputs)`` must return a scalar. Without one, the model
    output is contracted with a fixed random tensor so every output element
    contributes. At most ``max_entries`` entries per parameter are checked.
    The error per parameter is ``max|analytic - numeric| / max(max|analytic|, max|numeric|)``
    over the checked entries, and 0 when both are identically zero.
    """
    rng = np.random.default_rng(seed)
    replica = model.copy().astype(np.float64)
    args = [_to_float64(x) for x in inputs]
    projection: dict[str, np.ndarray] = {}

    def scalar_loss() -> Tensor:
        if loss_fn is not None:
            return loss_fn(replica, *args)
        out = replica(*args)
        if "w" not in projection:
            projection["w"] = np.random.default_rng(seed + 1).standard_normal(out.shape)
        return T.sum(out * Tensor(projection["w"], dtype=np.float64))

    named = list(replica.named_parameters())
    replica.zero_grad()
    with Tape() as tape:
        loss = scalar_loss()
    if loss.is_leaf:
        # the loss never touched a parameter
        for _, p in named:
            p.grad = np.zeros_like(p.data)
    else:
        tape.backward(loss, params=[p for _, p in named])

    report = GradCheckReport(tolerance=tolerance)
    for name, p in named:
        analytic_full = p.grad.copy() if p.grad is not None else np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        count = min(max_entries, flat.size)
        picks = rng.choice(flat.size, size=count, replace=False)
        analytic = analytic_full.reshape(-1)[picks]
        numeric = np.empty(count)
        for j, i in enumerate(picks):
            original = flat[i]
            flat[i] = original + eps
            plus = scalar_loss().item()
            flat[i] = original - eps
            minus = scalar_loss().item()
            flat[i] = original
            numeric[j] = (plus - minus) / (2.0 * eps)
        scale = max(np.abs(analytic).max(initial=0.0), np.abs(numeric).max(initial=0.0))
        diff = np.abs(analytic - numeric).max(initial=0.0)
        report.errors[name] = 0.0 if scale == 0.0 else float(diff / scale)
        report.max_abs_grad[name] = float(np.abs(analytic_full).max(initial=0.0))
    return report

