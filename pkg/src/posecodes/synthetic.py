"""Synthetic pose construction: a plausible standing body, classic stances
and randomized corpora.  Coordinates are meters, y up, x toward the body's
left, z forward; no claim of anatomical accuracy beyond what the geometric
measurements need.
"""

from __future__ import annotations

import numpy as np

from .pose import (
    BODY_JOINT_NAMES,
    PoseCorpus,
    PoseKeypoints,
    PoseRecord,
    default_registry,
)

_BASE_BODY = {
    "pelvis": (0.00, 0.93, 0.00),
    "left_hip": (0.09, 0.90, 0.00),
    "right_hip": (-0.09, 0.90, 0.00),
    "spine1": (0.00, 1.03, 0.01),
    "left_knee": (0.10, 0.50, 0.00),
    "right_knee": (-0.10, 0.50, 0.00),
    "spine2": (0.00, 1.13, 0.01),
    "left_ankle": (0.10, 0.09, -0.02),
    "right_ankle": (-0.10, 0.09, -0.02),
    "spine3": (0.00, 1.23, 0.01),
    "left_foot": (0.11, 0.02, 0.10),
    "right_foot": (-0.11, 0.02, 0.10),
    "neck": (0.00, 1.43, 0.00),
    "left_collar": (0.06, 1.39, 0.00),
    "right_collar": (-0.06, 1.39, 0.00),
    "head": (0.00, 1.56, 0.02),
    "left_shoulder": (0.18, 1.40, 0.00),
    "right_shoulder": (-0.18, 1.40, 0.00),
    "left_elbow": (0.23, 1.12, 0.00),
    "right_elbow": (-0.23, 1.12, 0.00),
    "left_wrist": (0.25, 0.86, 0.01),
    "right_wrist": (-0.25, 0.86, 0.01),
}

# finger joints hang slightly under the wrist; offsets are per finger chain
_FINGER_OFFSETS = {
    "index": (0.010, -0.060, 0.025),
    "middle": (0.000, -0.070, 0.020),
    "ring": (-0.008, -0.065, 0.012),
    "pinky": (-0.015, -0.055, 0.005),
    "thumb": (0.020, -0.030, 0.030),
}


def standing_pose() -> PoseKeypoints:
    """A neutral standing pose with arms hanging along the body."""
    registry = default_registry()
    coords = np.zeros((len(registry), 3))
    for name, xyz in _BASE_BODY.items():
        coords[registry.index(name)] = xyz
    for side, sign in (("left", 1.0), ("right", -1.0)):
        wrist = np.array(_BASE_BODY[f"{side}_wrist"])
        for finger, (ox, oy, oz) in _FINGER_OFFSETS.items():
            for phalanx in (1, 2, 3):
                offset = np.array([sign * ox, oy, oz]) * (0.5 + 0.25 * phalanx)
                coords[registry.index(f"{side}_{finger}{phalanx}")] = wrist + offset
    return PoseKeypoints(coords, registry)


def t_pose() -> PoseKeypoints:
    """Arms stretched horizontally, legs straight."""
    pose = standing_pose()
    coords = pose.coords.copy()
    registry = pose.registry
    for side, sign in (("left", 1.0), ("right", -1.0)):
        shoulder_y = _BASE_BODY[f"{side}_shoulder"][1]
        coords[registry.index(f"{side}_elbow")] = (sign * 0.50, shoulder_y, 0.0)
        coords[registry.index(f"{side}_wrist")] = (sign * 0.78, shoulder_y, 0.0)
        wrist = coords[registry.index(f"{side}_wrist")]
        for finger, (ox, oy, oz) in _FINGER_OFFSETS.items():
            for phalanx in (1, 2, 3):
                offset = np.array([sign * abs(oy), ox, oz]) * (0.5 + 0.25 * phalanx)
                coords[registry.index(f"{side}_{finger}{phalanx}")] = wrist + offset
    return PoseKeypoints(coords, registry)


def kneeling_pose() -> PoseKeypoints:
    """Sitting on the heels: knees grounded and completely bent."""
    pose = standing_pose()
    coords = pose.coords.copy()
    registry = pose.registry
    updates = {
        "pelvis": (0.00, 0.38, -0.28),
        "left_hip": (0.09, 0.36, -0.28),
        "right_hip": (-0.09, 0.36, -0.28),
        "left_knee": (0.10, 0.06, 0.00),
        "right_knee": (-0.10, 0.06, 0.00),
        "left_ankle": (0.10, 0.08, -0.36),
        "right_ankle": (-0.10, 0.08, -0.36),
        "left_foot": (0.11, 0.02, -0.46),
        "right_foot": (-0.11, 0.02, -0.46),
        "spine1": (0.00, 0.50, -0.24),
        "spine2": (0.00, 0.62, -0.21),
        "spine3": (0.00, 0.74, -0.18),
        "neck": (0.00, 0.94, -0.14),
        "left_collar": (0.06, 0.90, -0.14),
        "right_collar": (-0.06, 0.90, -0.14),
        "head": (0.00, 1.07, -0.12),
        "left_shoulder": (0.18, 0.91, -0.14),
        "right_shoulder": (-0.18, 0.91, -0.14),
        "left_elbow": (0.23, 0.64, -0.12),
        "right_elbow": (-0.23, 0.64, -0.12),
        "left_wrist": (0.25, 0.40, -0.10),
        "right_wrist": (-0.25, 0.40, -0.10),
    }
    for name, xyz in updates.items():
        coords[registry.index(name)] = xyz
    for side, sign in (("left", 1.0), ("right", -1.0)):
        wrist = coords[registry.index(f"{side}_wrist")]
        for finger, (ox, oy, oz) in _FINGER_OFFSETS.items():
            for phalanx in (1, 2, 3):
                offset = np.array([sign * ox, oy, oz]) * (0.5 + 0.25 * phalanx)
                coords[registry.index(f"{side}_{finger}{phalanx}")] = wrist + offset
    return PoseKeypoints(coords, registry)


def random_pose(rng: np.random.Generator, scale: float = 0.12) -> PoseKeypoints:
    """Standing pose with coherent random jitter.

    Body joints move independently; finger joints follow their wrist so the
    derived hand keypoint stays near the wrist.
    """
    base = standing_pose()
    coords = base.coords.copy()
    registry = base.registry
    n_body = len(BODY_JOINT_NAMES)
    coords[:n_body] += rng.normal(0.0, scale, size=(n_body, 3))
    for side in ("left", "right"):
        wrist_idx = registry.index(f"{side}_wrist")
        shift = coords[wrist_idx] - base.coords[wrist_idx]
        for finger in _FINGER_OFFSETS:
            for phalanx in (1, 2, 3):
                idx = registry.index(f"{side}_{finger}{phalanx}")
                coords[idx] = base.coords[idx] + shift + rng.normal(0, 0.01, 3)
    return PoseKeypoints(coords, registry)


def random_corpus(
    n: int,
    seed: int = 0,
    scale: float = 0.12,
    label_every: int = 0,
    labels: tuple[str, ...] = ("yoga", "stretch", "dance"),
    sequence_size: int = 0,
) -> PoseCorpus:
    """A corpus of jittered standing poses with optional action labels."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        aux = ()
        if label_every and i % label_every == 0:
            aux = (labels[(i // label_every) % len(labels)],)
        sequence_id = f"seq{i // sequence_size:05d}" if sequence_size else None
        records.append(
            PoseRecord(
                pose_id=f"pose{i:06d}",
                keypoints=random_pose(rng, scale),
                sequence_id=sequence_id,
                aux_labels=aux,
            )
        )
    return PoseCorpus(tuple(records))
