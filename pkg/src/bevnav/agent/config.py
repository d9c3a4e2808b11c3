from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bevnav.nn.optim import StepSchedule


class TrainConfig(BaseModel):
    """Soft actor-critic and auxiliary-loss hyperparameters.

    SAC-B is ``enable_scl=False, enable_tcl=False``; the CURL-style baseline
    keeps only ``enable_scl``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(default=0.99, ge=0, le=1)
    tau: float = Field(default=0.005, gt=0, le=1)
    batch_size: int = Field(default=64, ge=1)
    window: int = Field(default=3, ge=0)
    lambda_sc: float = Field(default=1.0, ge=0)
    lambda_tc: float = Field(default=1.0, ge=0)
    warmup_steps: int = Field(default=1000, ge=0)
    updates_per_step: int = Field(default=1, ge=1)
    target_entropy: float = -2.0
    enable_scl: bool = True
    enable_tcl: bool = True
    buffer_capacity: int = Field(default=100_000, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    lr_decay: float = Field(default=0.5, gt=0, le=1)
    lr_interval: int = Field(default=10_000, ge=0)
    init_alpha: float = Field(default=0.1, gt=0)
    augment_shift: float = Field(default=0.01, ge=0)
    tcl_temperature: float = Field(default=0.1, gt=0)
    log_std_min: float = -20.0
    log_std_max: float = 2.0
    hidden: int = Field(default=256, ge=1)

    @model_validator(mode="after")
    def _log_std_bounds(self) -> TrainConfig:
        if self.log_std_min >= self.log_std_max:
            raise ValueError(f"log_std_min {self.log_std_min} must be < log_std_max {self.log_std_max}")
        return self

    @property
    def tcl_active(self) -> bool:
        """A zero-step window disables temporal contrastive learning."""
        return self.enable_tcl and self.window > 0

    @property
    def ssl_active(self) -> bool:
        return self.enable_scl or self.tcl_active

    def schedule(self) -> StepSchedule:
        return StepSchedule(initial=self.lr, decay=self.lr_decay, interval=self.lr_interval)
