"""Elementary posecode measurement and categorization.

A posecode definition names a small set of keypoints and a measurement kind
(angle, distance, per-axis relative position, pitch/roll or ground contact).
Measuring a pose yields one raw value per definition, which is binned into a
category by comparing against fixed thresholds after adding a uniform noise
term drawn once per posecode.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, MeasurementError
from .pose import KeypointRegistry, PoseKeypoints, mirror_name

POSECODE_KINDS = (
    "angle",
    "distance",
    "relpos_x",
    "relpos_y",
    "relpos_z",
    "pitchroll",
    "ground_contact",
)

_KIND_ARITY = {
    "angle": 3,
    "distance": 2,
    "relpos_x": 2,
    "relpos_y": 2,
    "relpos_z": 2,
    "pitchroll": 2,
    "ground_contact": 1,
}

_AXIS = {"relpos_x": 0, "relpos_y": 1, "relpos_z": 2}

# unit of the raw measurement per kind
KIND_UNITS = {
    "angle": "degrees",
    "distance": "meters",
    "relpos_x": "meters",
    "relpos_y": "meters",
    "relpos_z": "meters",
    "pitchroll": "degrees",
    "ground_contact": "meters",
}


@dataclass(frozen=True)
class PosecodeDef:
    """One posecode: a measurement kind over an ordered keypoint tuple."""

    id: str
    kind: str
    joints: tuple[str, ...]
    # display name of the described body segment (pitch/roll posecodes only)
    subject_label: str | None = None

    def __post_init__(self):
        if self.kind not in _KIND_ARITY:
            raise ConfigurationError(f"{self.id}: unknown posecode kind {self.kind!r}")
        if len(self.joints) != _KIND_ARITY[self.kind]:
            raise ConfigurationError(
                f"{self.id}: kind {self.kind!r} takes {_KIND_ARITY[self.kind]} "
                f"joints, got {len(self.joints)}"
            )


@dataclass(frozen=True)
class BinningSpec:
    """Ordered category bands for one posecode kind.

    Band i covers thresholds[i-1] < v <= thresholds[i]; the first band is
    unbounded below and the last unbounded above.  ``noise`` is the half-width
    of the uniform perturbation applied before thresholding.
    """

    kind: str
    categories: tuple[str, ...]
    thresholds: tuple[float, ...]
    noise: float

    def __post_init__(self):
        if len(self.categories) != len(self.thresholds) + 1:
            raise ConfigurationError(
                f"{self.kind}: need one more category than thresholds"
            )
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigurationError(f"{self.kind}: thresholds must increase")
        if self.noise < 0:
            raise ConfigurationError(f"{self.kind}: negative noise level")

    def category_of(self, value: float) -> str:
        """Noiseless band lookup (v <= threshold falls in the lower band)."""
        return self.categories[bisect.bisect_left(self.thresholds, value)]


@dataclass(frozen=True)
class ExtractedPosecode:
    """A measured and categorized posecode for one pose."""

    def_: PosecodeDef
    value: float
    category: str

    @property
    def unit(self) -> str:
        return KIND_UNITS[self.def_.kind]

    @property
    def key(self) -> tuple[str, str]:
        return (self.def_.id, self.category)


# ---------------------------------------------------------------------------
# measurements


def _positions(pose: PoseKeypoints, names) -> list[np.ndarray]:
    return [pose[n] for n in names]


def measure_angle(pose: PoseKeypoints, i: str, j: str, k: str) -> float:
    """Bending angle at joint j between segments j->i and j->k, in [0, 180]."""
    pi, pj, pk = _positions(pose, (i, j, k))
    u = pi - pj
    w = pk - pj
    nu = np.linalg.norm(u)
    nw = np.linalg.norm(w)
    if nu == 0.0 or nw == 0.0:
        raise MeasurementError(f"angle undefined: {j} coincides with {i} or {k}")
    cos = np.dot(u, w) / (nu * nw)
    return float(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))


def measure_distance(pose: PoseKeypoints, i: str, j: str) -> float:
    pi, pj = _positions(pose, (i, j))
    return float(np.linalg.norm(pi - pj))


def measure_relative_position(pose: PoseKeypoints, i: str, j: str, axis: str) -> float:
    """Signed coordinate difference p_i - p_j along 'x', 'y' or 'z'."""
    a = "xyz".index(axis)
    pi, pj = _positions(pose, (i, j))
    return float(pi[a] - pj[a])


def measure_pitch_roll(pose: PoseKeypoints, i: str, j: str) -> float:
    """Angle between the i->j segment and the vertical axis, folded to [0, 90].

    0 means the segment is vertical, 90 that it lies in the ground plane.
    """
    pi, pj = _positions(pose, (i, j))
    seg = pj - pi
    n = np.linalg.norm(seg)
    if n == 0.0:
        raise MeasurementError(f"pitch/roll undefined: {i} coincides with {j}")
    return float(np.degrees(np.arccos(np.clip(abs(seg[1]) / n, 0.0, 1.0))))


def measure_ground_contact(pose: PoseKeypoints, i: str) -> float:
    """Height of keypoint i above the lowest keypoint of the pose."""
    return float(pose[i][1] - pose.coords[:, 1].min())


def measure(pose: PoseKeypoints, def_: PosecodeDef) -> float:
    try:
        if def_.kind == "angle":
            return measure_angle(pose, *def_.joints)
        if def_.kind == "distance":
            return measure_distance(pose, *def_.joints)
        if def_.kind in _AXIS:
            return measure_relative_position(
                pose, *def_.joints, axis="xyz"[_AXIS[def_.kind]]
            )
        if def_.kind == "pitchroll":
            return measure_pitch_roll(pose, *def_.joints)
        return measure_ground_contact(pose, *def_.joints)
    except MeasurementError as e:
        raise MeasurementError(str(e), def_id=def_.id) from None


def categorize(value: float, spec: BinningSpec, rng: np.random.Generator) -> str:
    """Bin a raw value, perturbing it by one uniform draw in [-noise, +noise]."""
    if not np.isfinite(value):
        raise MeasurementError(f"cannot categorize non-finite value {value!r}")
    eps = rng.uniform(-1.0, 1.0) * spec.noise
    return spec.category_of(value + eps)


# ---------------------------------------------------------------------------
# batch extraction

BinningSpecs = dict[str, BinningSpec]


class CompiledDefs:
    """Keypoint indices and thresholds pre-resolved for fast extraction."""

    def __init__(
        self,
        defs: list[PosecodeDef],
        specs: BinningSpecs,
        registry: KeypointRegistry,
    ):
        self.defs = list(defs)
        self.specs = dict(specs)
        self.registry = registry
        n = len(self.defs)
        for d in self.defs:
            if d.kind not in specs:
                raise ConfigurationError(f"{d.id}: no binning spec for {d.kind!r}")
            for j in d.joints:
                registry.index(j)  # raises on unknown keypoints

        self.noise = np.array([specs[d.kind].noise for d in self.defs])
        self._by_kind: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        for kind in {d.kind for d in self.defs}:
            rows = np.array(
                [i for i, d in enumerate(self.defs) if d.kind == kind], dtype=np.intp
            )
            joints = np.array(
                [
                    [registry.index(j) for j in self.defs[i].joints]
                    for i in rows
                ],
                dtype=np.intp,
            )
            self._by_kind[kind] = (rows, joints)
        self._thresholds = {
            kind: np.asarray(specs[kind].thresholds) for kind in specs
        }
        self._n = n

    def measure_all(self, pose: PoseKeypoints) -> np.ndarray:
        """Raw measurement per definition, in definition order."""
        if pose.registry != self.registry:
            raise ConfigurationError(
                "pose registry does not match the compiled definitions"
            )
        c = pose.coords
        out = np.empty(self._n)
        for kind, (rows, joints) in self._by_kind.items():
            if kind == "angle":
                u = c[joints[:, 0]] - c[joints[:, 1]]
                w = c[joints[:, 2]] - c[joints[:, 1]]
                nu = np.linalg.norm(u, axis=1)
                nw = np.linalg.norm(w, axis=1)
                bad = (nu == 0.0) | (nw == 0.0)
                if bad.any():
                    d = self.defs[rows[int(np.argmax(bad))]]
                    raise MeasurementError("degenerate angle", def_id=d.id)
                cos = np.einsum("ij,ij->i", u, w) / (nu * nw)
                out[rows] = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
            elif kind == "distance":
                out[rows] = np.linalg.norm(c[joints[:, 0]] - c[joints[:, 1]], axis=1)
            elif kind in _AXIS:
                a = _AXIS[kind]
                out[rows] = c[joints[:, 0], a] - c[joints[:, 1], a]
            elif kind == "pitchroll":
                seg = c[joints[:, 1]] - c[joints[:, 0]]
                n = np.linalg.norm(seg, axis=1)
                bad = n == 0.0
                if bad.any():
                    d = self.defs[rows[int(np.argmax(bad))]]
                    raise MeasurementError("degenerate segment", def_id=d.id)
                out[rows] = np.degrees(np.arccos(np.clip(np.abs(seg[:, 1]) / n, 0, 1)))
            else:  # ground_contact
                out[rows] = c[joints[:, 0], 1] - c[:, 1].min()
        return out

    def categorize_all(
        self, values: np.ndarray, rng: np.random.Generator, noise_scale: float = 1.0
    ) -> list[str]:
        """Category per definition; one noise draw per posecode, in order."""
        eps = rng.uniform(-1.0, 1.0, size=self._n) * (self.noise * noise_scale)
        noisy = values + eps
        cats: list[str | None] = [None] * self._n
        for kind, (rows, _) in self._by_kind.items():
            spec = self.specs[kind]
            idx = np.searchsorted(self._thresholds[kind], noisy[rows], side="left")
            for r, band in zip(rows, idx):
                cats[r] = spec.categories[band]
        return cats  # type: ignore[return-value]

    def extract(
        self, pose: PoseKeypoints, rng: np.random.Generator, noise_scale: float = 1.0
    ) -> list[ExtractedPosecode]:
        values = self.measure_all(pose)
        if not np.all(np.isfinite(values)):
            d = self.defs[int(np.argmax(~np.isfinite(values)))]
            raise MeasurementError("non-finite measurement", def_id=d.id)
        cats = self.categorize_all(values, rng, noise_scale)
        return [
            ExtractedPosecode(d, float(v), cat)
            for d, v, cat in zip(self.defs, values, cats)
        ]


def extract_posecodes(
    pose: PoseKeypoints,
    defs: list[PosecodeDef],
    specs: BinningSpecs,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
) -> list[ExtractedPosecode]:
    """Measure and categorize every definition against one pose.

    Output order follows the definition order and the random stream is
    consumed deterministically (one uniform draw per definition).
    """
    compiled = CompiledDefs(defs, specs, pose.registry)
    return compiled.extract(pose, rng, noise_scale)


# ---------------------------------------------------------------------------
# mirroring of posecode facts

# category swaps induced by negating the measured value (argument swap of a
# relative-position posecode) and by reflecting the pose (left/right exchange)
NEGATION_SWAP = {
    "at the left of": "at the right of",
    "at the right of": "at the left of",
    "above": "below",
    "below": "above",
    "in front of": "behind",
    "behind": "in front of",
}

X_MIRROR_SWAP = {
    "at the left of": "at the right of",
    "at the right of": "at the left of",
}


def build_fact_mirror_map(
    defs: list[PosecodeDef], specs: BinningSpecs
) -> dict[tuple[str, str], tuple[str, str]]:
    """Map each (def id, category) fact to its left/right-mirrored fact.

    The mirrored counterpart of a definition is the one whose joints are the
    side-swapped joints, possibly in reversed order (cross-side pairs such as
    left hand vs right hand mirror onto themselves with swapped arguments).
    """
    by_joints = {(d.kind, d.joints): d for d in defs}
    out_map: dict[tuple[str, str], tuple[str, str]] = {}
    for d in defs:
        swapped = tuple(mirror_name(j) for j in d.joints)
        reversed_order = False
        if (d.kind, swapped) in by_joints:
            target = by_joints[(d.kind, swapped)]
        elif (d.kind, swapped[::-1]) in by_joints:
            target = by_joints[(d.kind, swapped[::-1])]
            reversed_order = True
        else:
            raise ConfigurationError(f"{d.id}: no mirrored counterpart definition")
        for cat in specs[d.kind].categories:
            out = cat
            if reversed_order and d.kind in ("relpos_x", "relpos_y", "relpos_z"):
                out = NEGATION_SWAP.get(out, out)
            if d.kind == "relpos_x":
                out = X_MIRROR_SWAP.get(out, out)
            out_map[(d.id, cat)] = (target.id, out)
    return out_map
