from bevnav.common.errors import (  # noqa: F401
    BevNavError,
    CheckpointError,
    CloudFileError,
    ConfigError,
    EmptyCloudError,
    EpisodeFinishedError,
    GradientError,
    MetricsError,
    NonFiniteError,
    NoPathError,
    ShapeError,
    WorldGenerationError,
)
