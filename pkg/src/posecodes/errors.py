"""Exception types shared across the package."""


class PosecodesError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PosecodesError):
    """Bad or inconsistent configuration data (registries, defs, templates)."""


class PoseError(PosecodesError):
    """Invalid pose data."""


class MeasurementError(PosecodesError):
    """A geometric measurement is undefined for the given pose."""

    def __init__(self, message: str, def_id: str | None = None):
        super().__init__(message if def_id is None else f"{def_id}: {message}")
        self.def_id = def_id


class PipelineError(PosecodesError):
    """A caption-generation stage failed; carries stage name and pose id."""

    def __init__(self, stage: str, pose_id: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed for pose {pose_id!r}: {cause}")
        self.stage = stage
        self.pose_id = pose_id
        self.cause = cause
