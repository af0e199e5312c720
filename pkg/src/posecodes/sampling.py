"""Diverse pose selection: frame filtering and farthest-point sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoseError
from .pose import PoseCorpus, PoseKeypoints, PoseRecord, mpje_to_many


@dataclass(frozen=True)
class SequenceFrames:
    sequence_id: str
    frames: tuple[PoseKeypoints, ...]


def sequences_from_corpus(corpus: PoseCorpus) -> list[SequenceFrames]:
    """Group corpus records into sequences, preserving file order."""
    grouped: dict[str, list[PoseKeypoints]] = {}
    for record in corpus:
        grouped.setdefault(record.sequence_id or record.pose_id, []).append(
            record.keypoints
        )
    return [SequenceFrames(sid, tuple(frames)) for sid, frames in grouped.items()]


def filter_frames(
    seq: SequenceFrames, head_tail: int = 25, stride: int = 25
) -> list[PoseRecord]:
    """Drop head/tail frames, then keep one frame per stride window."""
    frames = seq.frames[head_tail : len(seq.frames) - head_tail or None]
    if len(seq.frames) <= 2 * head_tail:
        return []
    picked = []
    for window_start in range(0, len(frames) - stride + 1, stride):
        frame_idx = head_tail + window_start
        picked.append(
            PoseRecord(
                pose_id=f"{seq.sequence_id}_f{frame_idx:06d}",
                keypoints=frames[window_start],
                sequence_id=seq.sequence_id,
            )
        )
    return picked


def farthest_point_sample(
    candidates: list[PoseRecord], n: int, seed: int = 0
) -> list[PoseRecord]:
    """Greedy max-min selection of n poses under the mean per-joint distance.

    The first pick is uniform (seeded); each next pick maximizes the minimum
    distance to everything already selected, breaking ties at the lowest
    candidate index.  Returns poses in selection order.
    """
    if n > len(candidates):
        raise PoseError(f"cannot sample {n} poses from {len(candidates)} candidates")
    if n == 0:
        return []
    rng = np.random.default_rng(seed)
    stack = np.stack([c.keypoints.coords for c in candidates])
    first = int(rng.integers(len(candidates)))
    order = [first]
    min_dist = mpje_to_many(stack[first], stack)
    for _ in range(n - 1):
        min_dist[order] = -np.inf  # never re-pick
        nxt = int(np.argmax(min_dist))  # argmax takes the lowest index on ties
        order.append(nxt)
        min_dist = np.minimum(min_dist, mpje_to_many(stack[nxt], stack))
    return [candidates[i] for i in order]
