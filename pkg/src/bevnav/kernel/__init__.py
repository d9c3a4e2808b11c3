"""Fan independent runs (evaluation seeds, sweep arms) out over Ray when enabled."""

from bevnav.kernel.batch import parallel_map
from bevnav.kernel.swarm import RaySwarm, get_swarm
from bevnav.kernel.swarm import is_available as ray_available

__all__ = ["parallel_map", "RaySwarm", "get_swarm", "ray_available"]
