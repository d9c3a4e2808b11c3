"""bevnav: point-cloud navigation with a sparse-dense BEV encoder and contrastive SAC."""

__all__ = ["__version__"]

__version__ = "0.1.0"
