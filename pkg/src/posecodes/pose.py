"""Pose representation: keypoint registries, auxiliary keypoints, distance, mirroring.

Poses are plain arrays of named 3D keypoints in meters, y-axis up, already
normalized (neutral shape, yaw zeroed).  Everything here is immutable after
construction so poses can be shared freely between worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, PoseError

# The 52 joints of the default body model: 22 body joints followed by
# 15 left-hand and 15 right-hand finger joints.
BODY_JOINT_NAMES = [
    "pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee",
    "spine2", "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot",
    "neck", "left_collar", "right_collar", "head", "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist",
]

_FINGER_JOINTS = [
    "index1", "index2", "index3", "middle1", "middle2", "middle3",
    "pinky1", "pinky2", "pinky3", "ring1", "ring2", "ring3",
    "thumb1", "thumb2", "thumb3",
]

SMPLH_JOINT_NAMES = (
    BODY_JOINT_NAMES
    + [f"left_{j}" for j in _FINGER_JOINTS]
    + [f"right_{j}" for j in _FINGER_JOINTS]
)

# Keypoints derived from the raw joints (see derive_auxiliary_keypoints).
AUXILIARY_KEYPOINT_NAMES = ["left_hand", "right_hand", "torso"]


def side_of(name: str) -> str:
    if name.startswith("left_"):
        return "left"
    if name.startswith("right_"):
        return "right"
    return "center"


def mirror_name(name: str) -> str:
    """Name of the opposite-side keypoint ('left_*' <-> 'right_*')."""
    if name.startswith("left_"):
        return "right_" + name[5:]
    if name.startswith("right_"):
        return "left_" + name[6:]
    return name


@dataclass(frozen=True)
class Keypoint:
    name: str
    side: str
    index: int


class KeypointRegistry:
    """Ordered, named keypoint set shared by all poses of a corpus."""

    def __init__(self, names: Sequence[str]):
        if len(set(names)) != len(names):
            raise ConfigurationError("duplicate keypoint names in registry")
        self.names: tuple[str, ...] = tuple(names)
        self.keypoints = tuple(
            Keypoint(n, side_of(n), i) for i, n in enumerate(names)
        )
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, KeypointRegistry) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ConfigurationError(f"unknown keypoint {name!r}") from None

    def extend(self, names: Iterable[str]) -> "KeypointRegistry":
        return KeypointRegistry(self.names + tuple(names))

    def mirror_indices(self) -> np.ndarray:
        """Index permutation mapping each keypoint to its opposite-side one.

        Raises if a sided keypoint has no counterpart.
        """
        perm = np.empty(len(self.names), dtype=np.intp)
        for i, name in enumerate(self.names):
            other = mirror_name(name)
            if other not in self._index:
                raise ConfigurationError(
                    f"keypoint {name!r} has no mirrored counterpart {other!r}"
                )
            perm[i] = self._index[other]
        return perm


_default_registry: KeypointRegistry | None = None
_extended_registry: KeypointRegistry | None = None


def default_registry() -> KeypointRegistry:
    """The shipped 52-joint registry (without derived keypoints)."""
    global _default_registry
    if _default_registry is None:
        _default_registry = KeypointRegistry(SMPLH_JOINT_NAMES)
    return _default_registry


def extended_registry() -> KeypointRegistry:
    """Default registry plus the three derived keypoints."""
    global _extended_registry
    if _extended_registry is None:
        _extended_registry = default_registry().extend(AUXILIARY_KEYPOINT_NAMES)
    return _extended_registry


class PoseKeypoints:
    """One pose: an (N, 3) float array bound to a keypoint registry."""

    __slots__ = ("coords", "registry")

    def __init__(self, coords: np.ndarray, registry: KeypointRegistry):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape != (len(registry), 3):
            raise PoseError(
                f"expected coords of shape ({len(registry)}, 3), got {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise PoseError("pose contains non-finite coordinates")
        coords = coords.copy()
        coords.flags.writeable = False
        self.coords = coords
        self.registry = registry

    def __getitem__(self, name: str) -> np.ndarray:
        return self.coords[self.registry.index(name)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PoseKeypoints)
            and self.registry == other.registry
            and np.array_equal(self.coords, other.coords)
        )


@dataclass(frozen=True)
class PoseRecord:
    pose_id: str
    keypoints: PoseKeypoints
    sequence_id: str | None = None
    aux_labels: tuple[str, ...] = ()

    def with_keypoints(self, keypoints: PoseKeypoints) -> "PoseRecord":
        return replace(self, keypoints=keypoints)


@dataclass(frozen=True)
class PoseCorpus:
    records: tuple[PoseRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ids = [r.pose_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise PoseError("duplicate pose_id in corpus")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


# sources for the derived keypoints: each output is a plain average of inputs
_AUX_SOURCES = {
    "left_hand": ("left_wrist", "left_middle2"),
    "right_hand": ("right_wrist", "right_middle2"),
    "torso": ("pelvis", "neck", "spine3"),
}


def derive_auxiliary_keypoints(pose: PoseKeypoints) -> PoseKeypoints:
    """Append the derived hand and torso keypoints to a pose.

    The hand keypoint is the midpoint of the wrist and the second phalanx of
    the middle finger; the torso keypoint is the mean of pelvis, neck and the
    third spine joint.
    """
    reg = pose.registry
    for out, sources in _AUX_SOURCES.items():
        if out in reg:
            raise ConfigurationError(f"registry already contains {out!r}")
        for s in sources:
            if s not in reg:
                raise ConfigurationError(
                    f"cannot derive {out!r}: registry lacks keypoint {s!r}"
                )
    extended = reg.extend(_AUX_SOURCES)
    extra = np.stack(
        [
            sum(pose.coords[reg.index(s)] for s in sources) / len(sources)
            for sources in _AUX_SOURCES.values()
        ]
    )
    return PoseKeypoints(np.vstack([pose.coords, extra]), extended)


def ensure_auxiliary_keypoints(pose: PoseKeypoints) -> PoseKeypoints:
    """Derive the auxiliary keypoints unless the registry already has them."""
    if all(n in pose.registry for n in _AUX_SOURCES):
        return pose
    return derive_auxiliary_keypoints(pose)


def mpje(a: PoseKeypoints, b: PoseKeypoints) -> float:
    """Mean per-joint Euclidean distance between two poses, in meters."""
    if a.registry != b.registry:
        raise PoseError("cannot compare poses over different registries")
    return float(np.mean(np.linalg.norm(a.coords - b.coords, axis=1)))


def mpje_to_many(a: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Mean per-joint distance from one (N,3) pose to a stack of (M,N,3) poses."""
    return np.linalg.norm(others - a[None], axis=2).mean(axis=1)


def mirror_pose(pose: PoseKeypoints) -> PoseKeypoints:
    """Reflect a pose through the x=0 plane, swapping left and right keypoints.

    An involution: mirroring twice restores the original coordinates bit for
    bit.
    """
    perm = pose.registry.mirror_indices()
    coords = pose.coords[perm].copy()
    coords[:, 0] = -coords[:, 0]
    return PoseKeypoints(coords, pose.registry)


def mirror_record(record: PoseRecord) -> PoseRecord:
    return record.with_keypoints(mirror_pose(record.keypoints))
