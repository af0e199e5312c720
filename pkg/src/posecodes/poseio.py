"""File formats: pose corpora (JSON lines and packed binary) and captions.

The JSONL pose format keeps one object per line with the pose id, optional
sequence id, optional labels and named coordinate triples.  The binary
variant trades readability for bulk throughput: a header with a magic tag,
version, joint-name table and record count, then little-endian float32
triples per record.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import PoseError
from .pipeline import Caption
from .pose import KeypointRegistry, PoseCorpus, PoseKeypoints, PoseRecord

MAGIC = b"PKPB"
BINARY_VERSION = 1


def record_to_obj(record: PoseRecord) -> dict:
    obj: dict = {"pose_id": record.pose_id}
    if record.sequence_id is not None:
        obj["sequence_id"] = record.sequence_id
    if record.aux_labels:
        obj["labels"] = list(record.aux_labels)
    # repr-based floats round-trip float64 exactly
    obj["joints"] = {
        name: [float(v) for v in xyz]
        for name, xyz in zip(record.keypoints.registry.names, record.keypoints.coords)
    }
    return obj


def record_from_obj(obj: dict, registry: KeypointRegistry | None = None) -> PoseRecord:
    joints = obj["joints"]
    if registry is None:
        registry = KeypointRegistry(list(joints))
    coords = np.array([joints[name] for name in registry.names], dtype=np.float64)
    return PoseRecord(
        pose_id=obj["pose_id"],
        keypoints=PoseKeypoints(coords, registry),
        sequence_id=obj.get("sequence_id"),
        aux_labels=tuple(obj.get("labels", ())),
    )


def write_poses_jsonl(path: str | Path, corpus: PoseCorpus) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in corpus:
            f.write(json.dumps(record_to_obj(record)) + "\n")


def read_poses_jsonl(path: str | Path) -> PoseCorpus:
    records = []
    registry: KeypointRegistry | None = None
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            record = record_from_obj(json.loads(line), registry)
            registry = record.keypoints.registry
            records.append(record)
    return PoseCorpus(tuple(records))


def _write_str(f: IO[bytes], s: str) -> None:
    raw = s.encode("utf-8")
    f.write(struct.pack("<H", len(raw)))
    f.write(raw)


def _read_str(f: IO[bytes]) -> str:
    (n,) = struct.unpack("<H", f.read(2))
    return f.read(n).decode("utf-8")


def write_poses_binary(path: str | Path, corpus: PoseCorpus) -> None:
    if len(corpus) == 0:
        raise PoseError("refusing to write an empty binary corpus")
    registry = corpus.records[0].keypoints.registry
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIQ", BINARY_VERSION, len(registry), len(corpus)))
        for name in registry.names:
            _write_str(f, name)
        for record in corpus:
            _write_str(f, record.pose_id)
            _write_str(f, record.sequence_id or "")
            f.write(struct.pack("<H", len(record.aux_labels)))
            for label in record.aux_labels:
                _write_str(f, label)
            f.write(record.keypoints.coords.astype("<f4").tobytes())


def read_poses_binary(path: str | Path) -> PoseCorpus:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise PoseError(f"{path}: not a packed pose file")
        version, n_joints, n_records = struct.unpack("<IIQ", f.read(16))
        if version != BINARY_VERSION:
            raise PoseError(f"{path}: unsupported version {version}")
        registry = KeypointRegistry([_read_str(f) for _ in range(n_joints)])
        records = []
        for _ in range(n_records):
            pose_id = _read_str(f)
            sequence_id = _read_str(f) or None
            (n_labels,) = struct.unpack("<H", f.read(2))
            labels = tuple(_read_str(f) for _ in range(n_labels))
            coords = np.frombuffer(
                f.read(n_joints * 12), dtype="<f4"
            ).reshape(n_joints, 3)
            records.append(
                PoseRecord(
                    pose_id,
                    PoseKeypoints(coords.astype(np.float64), registry),
                    sequence_id,
                    labels,
                )
            )
    return PoseCorpus(tuple(records))


def read_pose_file(path: str | Path) -> PoseCorpus:
    """Read either format, sniffing the binary magic."""
    with open(path, "rb") as f:
        head = f.read(4)
    if head == MAGIC:
        return read_poses_binary(path)
    return read_poses_jsonl(path)


# ---------------------------------------------------------------------------
# caption records


def caption_to_obj(caption: Caption, provenance: bool = False) -> dict:
    obj = {
        "pose_id": caption.pose_id,
        "caption_index": caption.caption_index,
        "profile": caption.profile,
        "seed": caption.seed,
        "text": caption.text,
    }
    if provenance:
        obj["provenance"] = [[fid, pos] for fid, pos in caption.provenance]
    return obj


def write_captions(
    path: str | Path, captions: Iterable[Caption], provenance: bool = False
) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for caption in captions:
            f.write(json.dumps(caption_to_obj(caption, provenance)) + "\n")


def read_captions(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
