"""Parallel map over independent work items.

Results always come back in input order. Ray is used when requested and
available; any Ray failure degrades to sequential execution.
"""
from __future__ import annotations

from collections.abc import Callable
from typing import Any, TypeVar

from bevnav.common.logging import get_logger
from bevnav.kernel.swarm import get_swarm, is_available

log = get_logger("bevnav.kernel.batch")

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    fn: Callable[..., R],
    items: list[T],
    use_ray: bool | None = None,
    **extra_kwargs: Any,
) -> list[R]:
    if not items:
        return []
    if use_ray is None:
        use_ray = is_available()

    if use_ray and len(items) > 1:
        try:
            results = get_swarm().batch_map(fn, items, **extra_kwargs)
            log.info("parallel_map_ray", items=len(items))
            return results
        except Exception as e:
            log.warning("parallel_map_ray_failed", error=str(e))

    return [fn(item, **extra_kwargs) for item in items]
