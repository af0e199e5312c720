"""Pipeline configuration: data file paths, knobs, seeds and parallelism."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ConfigurationError

DEFAULT_SCHEDULE = ("skip", "skip_implicit_labels", "skip_implicit_ripple")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a caption run needs; None paths mean the shipped defaults."""

    posecode_defs: str | None = None
    binning_specs: str | None = None
    super_posecodes: str | None = None
    support_roles: str | None = None
    eligibility: str | None = None
    rules: str | None = None
    templates: str | None = None
    exclusions: str | None = None
    schedule: tuple[str, ...] = DEFAULT_SCHEDULE
    skip_prob: float = 0.15
    aggregation_prob: float = 0.95
    noise_scale: float = 1.0
    seed: int = 0
    jobs: int = 0  # 0 means one worker per logical core

    def __post_init__(self):
        for knob in ("skip_prob", "aggregation_prob"):
            value = getattr(self, knob)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{knob} must be within [0, 1], got {value}")
        if self.noise_scale < 0:
            raise ConfigurationError("noise_scale must be non-negative")
        if self.jobs < 0:
            raise ConfigurationError("jobs must be non-negative")

    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    def to_json(self) -> str:
        data = asdict(self)
        data["schedule"] = list(self.schedule)
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "schedule" in data:
            data["schedule"] = tuple(data["schedule"])
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        p = Path(path)
        if not p.exists():
            raise ConfigurationError(f"config file not found: {p}")
        return cls.from_json(p.read_text("utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), "utf-8")

    def override(self, **kwargs) -> "PipelineConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs) if kwargs else self
