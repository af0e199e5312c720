"""Description units and the four aggregation rules.

A description unit is one subject (or subject group) plus the categorized
statements to verbalize about it.  Units start as one posecode each and are
merged by four rules: entity-based (elbow + hand of one side become the arm),
symmetry-based (left and right counterparts become a plural subject),
keypoint-based (statements sharing a subject are pooled) and
interpretation-based (same statement about unrelated subjects).  Applicable
merges are listed together and applied in random order, each with a given
acceptance probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .extraction import ExtractedPosecode
from .pose import side_of
from .superposecodes import FactKey, SuperPosecodeFact

_PLURALS = {"foot": "feet", "calf": "calves", "body": "bodies", "torso": "torsos"}


def pluralize(base: str) -> str:
    if base in _PLURALS:
        return _PLURALS[base]
    head, _, last = base.rpartition(" ")
    if last in _PLURALS:
        return f"{head} {_PLURALS[last]}".strip()
    return base + "s"


@dataclass(frozen=True)
class PartRef:
    """A body part reference: base name, optional side, plurality."""

    base: str
    side: str | None = None
    plural: bool = False
    opposite: bool = False  # render as 'the opposite <base>'

    def display(self) -> str:
        if self.opposite:
            return f"the opposite {self.base}"
        if self.plural:
            return f"the {pluralize(self.base)}"
        if self.side:
            return f"the {self.side} {self.base}"
        return f"the {self.base}"

    def mirrored(self) -> "PartRef":
        if self.side is None:
            return self
        return replace(self, side="right" if self.side == "left" else "left")


def part_from_keypoint(name: str) -> PartRef:
    side = side_of(name)
    base = name.split("_", 1)[1] if side != "center" else name
    base = base.replace("_", " ")
    if base.startswith("spine"):
        base = "spine"
    return PartRef(base, side if side != "center" else None)


def part_from_label(label: str) -> PartRef:
    for side in ("left", "right"):
        if label.startswith(side + " "):
            return PartRef(label[len(side) + 1 :], side)
    return PartRef(label)


@dataclass(frozen=True)
class Statement:
    kind: str
    category: str
    obj: PartRef | None = None
    omission: str | None = None  # support-keypoint omission case, when any


@dataclass(frozen=True)
class DescriptionUnit:
    subjects: tuple[PartRef, ...]
    statements: tuple[Statement, ...]
    provenance: tuple[FactKey, ...]
    # single posecode over a pure side pair: subject side is chosen at render
    symmetric: bool = False

    @property
    def plural(self) -> bool:
        return len(self.subjects) > 1 or self.subjects[0].plural

    def subject_display(self) -> str:
        parts = [s.display() for s in self.subjects]
        if len(parts) == 1:
            return parts[0]
        return ", ".join(parts[:-1]) + f" and {parts[-1]}"


@dataclass(frozen=True)
class Entity:
    """A larger body part assembled from member parts of one side."""

    name: str
    side: str
    members: frozenset[str]


# member base-name sets that assemble into an entity
ENTITY_MEMBER_SETS: dict[frozenset[str], str] = {
    frozenset(["elbow", "hand"]): "arm",
    frozenset(["elbow", "wrist"]): "arm",
    frozenset(["upper arm", "forearm"]): "arm",
    frozenset(["knee", "foot"]): "leg",
    frozenset(["knee", "ankle"]): "leg",
    frozenset(["thigh", "calf"]): "leg",
}


# ---------------------------------------------------------------------------
# building initial units from selected posecodes

_SUPER_SUBJECTS = {
    "body": PartRef("body"),
    "torso": PartRef("torso"),
    "hands": PartRef("hand", plural=True),
    "feet": PartRef("foot", plural=True),
}


def _omission_case(kind: str, category: str, subj: PartRef, obj: PartRef) -> str | None:
    if kind == "relpos_z" and obj.base == "torso":
        return "torso_in_front" if category == "in front of" else "torso_behind"
    if (
        kind == "relpos_y"
        and category == "above"
        and subj.base in ("wrist", "hand")
        and obj.base in ("neck", "head")
    ):
        return "raised"
    if (
        kind == "relpos_x"
        and subj.base in ("hand", "foot")
        and obj.base in ("shoulder", "hip")
        and subj.side == obj.side
    ):
        if category == "at the left of":
            return "turned_left"
        if category == "at the right of":
            return "turned_right"
    return None


def build_unit(fact: ExtractedPosecode | SuperPosecodeFact) -> DescriptionUnit:
    if isinstance(fact, SuperPosecodeFact):
        subject = _SUPER_SUBJECTS.get(fact.def_.subject, PartRef(fact.def_.subject))
        return DescriptionUnit(
            subjects=(subject,),
            statements=(Statement("super", fact.def_.category),),
            provenance=(fact.key,),
        )
    d = fact.def_
    if d.kind in ("angle", "pitchroll"):
        if d.subject_label:
            subject = part_from_label(d.subject_label)
        else:
            subject = part_from_keypoint(d.joints[1] if d.kind == "angle" else d.joints[0])
        return DescriptionUnit(
            subjects=(subject,),
            statements=(Statement(d.kind, fact.category),),
            provenance=(fact.key,),
        )
    if d.kind == "ground_contact":
        subject = part_from_keypoint(d.joints[0])
        return DescriptionUnit(
            subjects=(subject,),
            statements=(Statement(d.kind, fact.category),),
            provenance=(fact.key,),
        )
    subject = part_from_keypoint(d.joints[0])
    obj = part_from_keypoint(d.joints[1])
    symmetric = (
        subject.side is not None
        and obj.side is not None
        and subject.side != obj.side
        and subject.base == obj.base
    )
    return DescriptionUnit(
        subjects=(subject,),
        statements=(
            Statement(
                d.kind,
                fact.category,
                obj,
                _omission_case(d.kind, fact.category, subject, obj),
            ),
        ),
        provenance=(fact.key,),
        symmetric=symmetric,
    )


def build_units(facts: Iterable[ExtractedPosecode | SuperPosecodeFact]):
    return [build_unit(f) for f in facts]


# ---------------------------------------------------------------------------
# merge options


@dataclass(frozen=True)
class AggregationOption:
    rule: str  # entity | symmetry | keypoint | interpretation
    first: int  # positions in the unit list at enumeration time
    second: int
    signature: tuple  # stable identity across re-enumerations


def _single(unit: DescriptionUnit) -> Statement | None:
    if len(unit.statements) == 1 and len(unit.subjects) == 1:
        return unit.statements[0]
    return None


def _symmetry_applicable(u: DescriptionUnit, v: DescriptionUnit) -> bool:
    su, sv = _single(u), _single(v)
    if su is None or sv is None or u.symmetric or v.symmetric:
        return False
    a, b = u.subjects[0], v.subjects[0]
    if a.plural or b.plural or a.side is None or b.side is None:
        return False
    if a.base != b.base or a.side == b.side:
        return False
    if (su.kind, su.category) != (sv.kind, sv.category):
        return False
    oa, ob = su.obj, sv.obj
    if oa is None and ob is None:
        return True
    if oa is None or ob is None:
        return False
    if oa == ob:
        return True
    # objects that are themselves a side pair (aligned or crossed with subjects)
    return oa.base == ob.base and None not in (oa.side, ob.side) and oa.side != ob.side


def _entity_applicable(u: DescriptionUnit, v: DescriptionUnit) -> Entity | None:
    su, sv = _single(u), _single(v)
    if su is None or sv is None:
        return None
    a, b = u.subjects[0], v.subjects[0]
    if a.plural or b.plural or a.side is None or a.side != b.side:
        return None
    if (su.kind, su.category, su.obj) != (sv.kind, sv.category, sv.obj):
        return None
    name = ENTITY_MEMBER_SETS.get(frozenset([a.base, b.base]))
    if name is None:
        return None
    return Entity(name, a.side, frozenset([a.base, b.base]))


def _keypoint_applicable(u: DescriptionUnit, v: DescriptionUnit) -> bool:
    # symmetric units may join too; the merge locks their default orientation
    return len(u.subjects) == 1 and u.subjects == v.subjects


def _interpretation_applicable(u: DescriptionUnit, v: DescriptionUnit) -> bool:
    if len(u.statements) != 1 or len(v.statements) != 1:
        return False
    su, sv = u.statements[0], v.statements[0]
    if (su.kind, su.category, su.obj, su.omission) != (
        sv.kind,
        sv.category,
        sv.obj,
        sv.omission,
    ):
        return False
    if set(u.subjects) & set(v.subjects):
        return False
    # side-swapped pairs belong to the symmetry rule instead
    return not _symmetry_applicable(u, v)


ALL_RULES = ("entity", "symmetry", "keypoint", "interpretation")

_RULE_CHECKS = {
    "entity": _entity_applicable,
    "symmetry": _symmetry_applicable,
    "keypoint": _keypoint_applicable,
    "interpretation": _interpretation_applicable,
}


def _pair_rules(
    u: DescriptionUnit, v: DescriptionUnit, rules: Sequence[str]
) -> list[str]:
    return [rule for rule in rules if _RULE_CHECKS[rule](u, v)]


def enumerate_aggregation_options(
    units: Sequence[DescriptionUnit],
    rules: Sequence[str] = ALL_RULES,
) -> list[AggregationOption]:
    """All currently applicable merges, in deterministic order."""
    options: list[AggregationOption] = []
    n = len(units)
    for i in range(n):
        for j in range(i + 1, n):
            u, v = units[i], units[j]
            for rule in _pair_rules(u, v, rules):
                sig = (rule, frozenset([u.provenance, v.provenance]))
                options.append(AggregationOption(rule, i, j, sig))
    return options


def _merge(rule: str, u: DescriptionUnit, v: DescriptionUnit) -> DescriptionUnit:
    prov = u.provenance + v.provenance
    if rule == "symmetry":
        su, sv = u.statements[0], v.statements[0]
        subject = replace(u.subjects[0], side=None, plural=True)
        obj = su.obj
        if obj is not None and sv.obj is not None and obj != sv.obj:
            if obj.side == u.subjects[0].side:
                obj = replace(obj, side=None, plural=True)  # aligned sides
            else:
                obj = replace(obj, side=None, opposite=True)  # crossed sides
        return DescriptionUnit(
            subjects=(subject,),
            statements=(replace(su, obj=obj),),
            provenance=prov,
        )
    if rule == "entity":
        entity = _entity_applicable(u, v)
        assert entity is not None
        return DescriptionUnit(
            subjects=(PartRef(entity.name, entity.side),),
            statements=u.statements,
            provenance=prov,
        )
    if rule == "keypoint":
        return DescriptionUnit(
            subjects=u.subjects,
            statements=u.statements + v.statements,
            provenance=prov,
        )
    if rule == "interpretation":
        return DescriptionUnit(
            subjects=u.subjects + v.subjects,
            statements=u.statements,
            provenance=prov,
        )
    raise ValueError(f"unknown aggregation rule {rule!r}")


def apply_aggregations(
    units: Sequence[DescriptionUnit],
    aggregation_prob: float = 0.95,
    rng: np.random.Generator | None = None,
    rules: Sequence[str] = ALL_RULES,
) -> list[DescriptionUnit]:
    """Randomly apply merge options until none is left.

    One applicable option is drawn uniformly at a time; it is applied with
    probability ``aggregation_prob`` and otherwise permanently discarded.
    Options are re-enumerated after every merge, so chained merges happen;
    options undone by an earlier merge silently disappear.  The multiset of
    contributing posecodes is preserved.
    """
    current = list(units)
    if aggregation_prob <= 0:
        return current
    if rng is None:
        raise ValueError("aggregation_prob > 0 requires a random generator")

    # Options are maintained incrementally: applicability only depends on the
    # two units involved, so a merge invalidates the options touching the
    # consumed units and can only create options involving the merged unit.
    # This matches re-enumerating from scratch, minus the quadratic rescan.
    uids = list(range(len(current)))  # stable handles, in rendering order
    by_uid = dict(zip(uids, current))
    options: list[tuple[str, int, int]] = [
        (rule, uids[i], uids[j])
        for i in range(len(uids))
        for j in range(i + 1, len(uids))
        for rule in _pair_rules(by_uid[uids[i]], by_uid[uids[j]], rules)
    ]
    next_uid = len(uids)
    while options:
        pick = int(rng.integers(len(options)))
        rule, ua, ub = options[pick]
        if rng.random() >= aggregation_prob:
            del options[pick]  # permanently discarded
            continue
        merged = _merge(rule, by_uid[ua], by_uid[ub])
        mid = next_uid
        next_uid += 1
        by_uid[mid] = merged
        del by_uid[ua], by_uid[ub]
        # the merged unit inherits the earliest consumed position
        uids[uids.index(ua)] = mid
        uids.remove(ub)
        options = [o for o in options if ua not in o[1:] and ub not in o[1:]]
        mid_pos = uids.index(mid)
        for pos, other in enumerate(uids):
            if other == mid:
                continue
            first, second = (other, mid) if pos < mid_pos else (mid, other)
            for new_rule in _pair_rules(by_uid[first], by_uid[second], rules):
                options.append((new_rule, first, second))
    return [by_uid[uid] for uid in uids]
