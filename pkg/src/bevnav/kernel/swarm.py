"""Optional Ray backend for fanning out independent runs.

Evaluation seeds, sweep arms and ablation variants share nothing, so each
one can become a Ray task. Ray stays off unless it is installed and
``USE_RAY`` is set.
"""
from __future__ import annotations

from collections.abc import Callable
from typing import Any

from bevnav.common.logging import get_logger
from bevnav.common.settings import get_settings

log = get_logger("bevnav.kernel.swarm")


def _has_ray() -> bool:
    try:
        import ray  # noqa: F401
        return True
    except ImportError:
        return False


def is_available() -> bool:
    return _has_ray() and get_settings().use_ray


class RaySwarm:
    """Owns the local Ray runtime for one process.

    Every run carries its own agent and world, so tasks are submitted in
    waves of at most ``max_in_flight`` to bound driver memory.
    """

    def __init__(self, max_in_flight: int = 32) -> None:
        self.max_in_flight = max(1, max_in_flight)
        self._initialized = False

    def ensure_init(self, **ray_init_kwargs: Any) -> None:
        if not _has_ray():
            raise ImportError("ray is not installed; install the 'bevnav-lab[ray]' extra")
        import ray

        if not ray.is_initialized():
            ray_init_kwargs.setdefault("ignore_reinit_error", True)
            ray_init_kwargs.setdefault("log_to_driver", False)
            ray.init(**ray_init_kwargs)
            log.info("ray_initialized", cpus=ray.available_resources().get("CPU"))
        self._initialized = True

    def shutdown(self) -> None:
        if not self._initialized:
            return
        import ray

        if ray.is_initialized():
            ray.shutdown()
        self._initialized = False

    def batch_map(self, fn: Callable[..., Any], items: list[Any], **extra_kwargs: Any) -> list[Any]:
        """Run ``fn(item, **extra_kwargs)`` per item as Ray tasks; results keep input order."""
        self.ensure_init()
        import ray

        task = ray.remote(fn)
        shared = {k: ray.put(v) for k, v in extra_kwargs.items()}
        results: list[Any] = []
        for start in range(0, len(items), self.max_in_flight):
            wave = items[start : start + self.max_in_flight]
            results.extend(ray.get([task.remote(item, **shared) for item in wave]))
        return results

    @property
    def is_initialized(self) -> bool:
        if not _has_ray():
            return False
        import ray

        return ray.is_initialized()


_swarm = RaySwarm()


def get_swarm() -> RaySwarm:
    return _swarm
