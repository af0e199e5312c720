"""Posecode selection: eligibility classes, redundancy rules, random skipping.

Eligibility is a corpus statistic: categorizations that hold for most poses
are trivial (never described), rare ones are unskippable, inherently
ambiguous ones (mid-band categorizations) are never described either, and the
rest may be randomly skipped.  Redundancy is removed through two kinds of
ripple-effect rules: transitive ordering relations within one pose, and
implications X => Y mined over a whole corpus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, PoseError
from .extraction import (
    BinningSpecs,
    CompiledDefs,
    ExtractedPosecode,
    PosecodeDef,
    build_fact_mirror_map,
)
from .pose import PoseCorpus, ensure_auxiliary_keypoints
from .superposecodes import (
    FactKey,
    SuperPosecodeDef,
    SuperPosecodeFact,
    SupportRoles,
    evaluate_super_posecodes,
)

ELIGIBILITY_CLASSES = (
    "unskippable",
    "skippable",
    "ignored_trivial",
    "ignored_ambiguous",
)

# categorizations that never carry usable information, whatever the corpus
AMBIGUOUS_CATEGORIES = frozenset(
    ["x-ignored", "y-ignored", "z-ignored", "pitch-roll-ignored", "ground-ignored"]
)


@dataclass
class EligibilityTable:
    classes: dict[FactKey, str]

    def class_of(self, key: FactKey) -> str:
        try:
            return self.classes[key]
        except KeyError:
            raise ConfigurationError(
                f"no eligibility class for posecode {key[0]!r} "
                f"category {key[1]!r}"
            ) from None

    def to_lines(self) -> list[str]:
        return [
            f"{def_id}\t{cat}\t{cls}"
            for (def_id, cat), cls in sorted(self.classes.items())
        ]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "EligibilityTable":
        classes: dict[FactKey, str] = {}
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            def_id, cat, klass = line.split("\t")
            if klass not in ELIGIBILITY_CLASSES:
                raise ConfigurationError(f"unknown eligibility class {klass!r}")
            classes[(def_id, cat)] = klass
        return cls(classes)


@dataclass
class FrequencyTable:
    """Fraction of corpus poses per (definition, category), noiseless."""

    freqs: dict[FactKey, float]
    n_poses: int

    def to_lines(self) -> list[str]:
        return [
            f"{def_id}\t{cat}\t{freq:.6f}"
            for (def_id, cat), freq in sorted(self.freqs.items())
        ]


def _noiseless_facts_per_pose(
    corpus: PoseCorpus,
    defs: list[PosecodeDef],
    specs: BinningSpecs,
) -> list[list[ExtractedPosecode]]:
    if len(corpus) == 0:
        raise PoseError("operation requires a non-empty corpus")
    rng = np.random.default_rng(0)  # noise scale 0: draws never move values
    compiled = None
    out = []
    for record in corpus:
        pose = ensure_auxiliary_keypoints(record.keypoints)
        if compiled is None or compiled.registry != pose.registry:
            compiled = CompiledDefs(defs, specs, pose.registry)
        out.append(compiled.extract(pose, rng, noise_scale=0.0))
    return out


def compute_category_frequencies(
    corpus: PoseCorpus,
    defs: list[PosecodeDef],
    specs: BinningSpecs,
    super_defs: Sequence[SuperPosecodeDef] = (),
) -> FrequencyTable:
    """Noiseless categorization frequencies over a corpus.

    Elementary frequencies partition to 1 per definition; super-posecode
    entries (when definitions are passed) record the production rate.
    """
    per_pose = _noiseless_facts_per_pose(corpus, defs, specs)
    counts: dict[FactKey, int] = {}
    for d in defs:
        for cat in specs[d.kind].categories:
            counts[(d.id, cat)] = 0
    for sp in super_defs:
        counts[sp.key] = 0
    no_roles = SupportRoles()
    for facts in per_pose:
        for f in facts:
            counts[f.key] += 1
        if super_defs:
            produced, _ = evaluate_super_posecodes(facts, list(super_defs), no_roles)
            for sp_fact in produced:
                counts[sp_fact.key] += 1
    n = len(per_pose)
    return FrequencyTable({k: c / n for k, c in counts.items()}, n)


def classify_eligibility(
    freqs: FrequencyTable,
    trivial_at: float = 0.60,
    unskippable_below: float = 0.06,
    ambiguous: Iterable[FactKey] = (),
    ambiguous_categories: frozenset[str] = AMBIGUOUS_CATEGORIES,
) -> EligibilityTable:
    """Derive eligibility classes from categorization frequencies.

    Ambiguous categorizations are ruled out first (they are undescribable at
    any frequency); the rest are trivial at >= ``trivial_at``, unskippable
    below ``unskippable_below`` and skippable otherwise.
    """
    ambiguous_keys = set(ambiguous)
    classes: dict[FactKey, str] = {}
    for key, freq in freqs.freqs.items():
        if key in ambiguous_keys or key[1] in ambiguous_categories:
            classes[key] = "ignored_ambiguous"
        elif freq >= trivial_at:
            classes[key] = "ignored_trivial"
        elif freq < unskippable_below:
            classes[key] = "unskippable"
        else:
            classes[key] = "skippable"
    return EligibilityTable(classes)


# ---------------------------------------------------------------------------
# statistics-based rules (X => Y implications mined over a corpus)


@dataclass(frozen=True)
class StatRule:
    x: tuple[FactKey, ...]  # sorted, 1 or 2 facts
    y: FactKey
    support: int  # number of poses carrying all of X
    confidence: float
    suspect: bool = False

    def head(self) -> str:
        lhs = " + ".join(f"{d}:{c}" for d, c in self.x)
        return f"{lhs} => {self.y[0]}:{self.y[1]}"

    def to_line(self) -> str:
        flag = "\tsuspect" if self.suspect else ""
        return f"{self.head()}\t{self.support}\t{self.confidence:.6f}{flag}"

    @classmethod
    def from_line(cls, line: str) -> "StatRule":
        parts = line.rstrip("\n").split("\t")
        head = parts[0]
        lhs, rhs = head.split(" => ")
        x = tuple(tuple(p.split(":", 1)) for p in lhs.split(" + "))
        y = tuple(rhs.split(":", 1))
        return cls(
            x=x,  # type: ignore[arg-type]
            y=y,  # type: ignore[arg-type]
            support=int(parts[1]),
            confidence=float(parts[2]),
            suspect=len(parts) > 3 and parts[3] == "suspect",
        )


def rules_to_lines(rules: Sequence[StatRule], params: dict | None = None) -> list[str]:
    lines = []
    if params:
        lines.append(
            "# mined implication rules; params: "
            + " ".join(f"{k}={v}" for k, v in sorted(params.items()))
        )
    lines += [r.to_line() for r in rules]
    return lines


def rules_from_lines(lines: Iterable[str]) -> list[StatRule]:
    out = []
    for line in lines:
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        out.append(StatRule.from_line(line))
    return out


_UPPER_PARTS = (
    "hand", "wrist", "elbow", "shoulder", "collar", "neck", "head",
    "index", "middle", "ring", "pinky", "thumb",
)
_LOWER_PARTS = ("hip", "knee", "ankle", "foot", "toe")


def _def_regions(def_: PosecodeDef) -> set[str]:
    regions = set()
    for joint in def_.joints:
        base = joint.split("_", 1)[-1]
        if any(p in base for p in _UPPER_PARTS):
            regions.add("upper")
        elif any(p in base for p in _LOWER_PARTS):
            regions.add("lower")
    return regions


def _is_suspect(rule: StatRule, defs_by_id: dict[str, PosecodeDef]) -> bool:
    """Flag rules mixing upper and lower body between X and Y for review."""
    y_regions = _def_regions(defs_by_id[rule.y[0]])
    x_regions = set().union(*(_def_regions(defs_by_id[d]) for d, _ in rule.x))
    return bool(
        ("upper" in x_regions and y_regions == {"lower"})
        or ("lower" in x_regions and y_regions == {"upper"})
    )


def mine_statistics_rules(
    corpus: PoseCorpus,
    defs: list[PosecodeDef],
    specs: BinningSpecs,
    *,
    eligibility: EligibilityTable | None = None,
    roles: SupportRoles | None = None,
    min_support: int = 50,
    tau_single: float = 0.7,
    tau_pair: float = 0.8,
    max_x: int = 2,
    exclusions: frozenset[str] = frozenset(),
) -> list[StatRule]:
    """Mine X => Y implications (|X| <= 2, |Y| = 1) over a corpus.

    A rule is kept when X applies to at least ``min_support`` poses, the
    fraction of those poses also carrying Y meets the confidence threshold
    for |X|, and the left/right-mirrored rule passes the same tests.  Only
    posecodes that can reach a description participate: ignored
    categorizations and support posecodes are excluded.
    """
    if max_x > 2:
        raise ConfigurationError("rule antecedents are limited to two facts")
    per_pose = _noiseless_facts_per_pose(corpus, defs, specs)
    if eligibility is None:
        eligibility = classify_eligibility(
            compute_category_frequencies(corpus, defs, specs)
        )
    roles = roles or SupportRoles()

    def eligible(key: FactKey) -> bool:
        return (
            eligibility.class_of(key) in ("skippable", "unskippable")
            and roles.role_of(key[0]) != "support"
        )

    # bitmask of poses per eligible fact
    masks: dict[FactKey, int] = {}
    for pose_idx, facts in enumerate(per_pose):
        bit = 1 << pose_idx
        for f in facts:
            if eligible(f.key):
                masks[f.key] = masks.get(f.key, 0) | bit

    mirror_map = build_fact_mirror_map(defs, specs)
    defs_by_id = {d.id: d for d in defs}
    taus = {1: tau_single, 2: tau_pair}

    def stats(x_keys: tuple[FactKey, ...], y_key: FactKey) -> tuple[int, float] | None:
        mask_x = masks[x_keys[0]]
        for k in x_keys[1:]:
            mask_x &= masks[k]
        support = mask_x.bit_count()
        if support < min_support:
            return None
        confidence = (mask_x & masks[y_key]).bit_count() / support
        if confidence < taus[len(x_keys)]:
            return None
        return support, confidence

    def mirrored_ok(x_keys: tuple[FactKey, ...], y_key: FactKey) -> bool:
        try:
            mx = tuple(sorted(mirror_map[k] for k in x_keys))
            my = mirror_map[y_key]
        except KeyError:
            return False
        if any(k not in masks for k in mx) or my not in masks or my in mx:
            return False
        return stats(mx, my) is not None

    facts_sorted = sorted(masks)
    candidates: list[tuple[FactKey, ...]] = [(k,) for k in facts_sorted]
    if max_x >= 2:
        for a, b in itertools.combinations(facts_sorted, 2):
            if a[0] == b[0]:
                continue  # one category per definition per pose
            if (masks[a] & masks[b]).bit_count() >= min_support:
                candidates.append((a, b))

    rules: list[StatRule] = []
    for x_keys in candidates:
        x_def_ids = {k[0] for k in x_keys}
        for y_key in facts_sorted:
            if y_key[0] in x_def_ids:
                continue
            got = stats(x_keys, y_key)
            if got is None:
                continue
            if not mirrored_ok(x_keys, y_key):
                continue
            support, confidence = got
            rule = StatRule(x=x_keys, y=y_key, support=support, confidence=confidence)
            if rule.head() in exclusions:
                continue
            rules.append(replace(rule, suspect=_is_suspect(rule, defs_by_id)))
    rules.sort(key=lambda r: (r.x, r.y))
    return rules


# ---------------------------------------------------------------------------
# ripple-effect redundancy removal

# categories stating that the first joint has the larger coordinate
_GREATER = frozenset(["at the left of", "above", "in front of"])
_LESSER = frozenset(["at the right of", "below", "behind"])

Fact = ExtractedPosecode | SuperPosecodeFact


def _ordering_edge(fact: Fact) -> tuple[str, str, str] | None:
    """(axis kind, greater joint, lesser joint) for ordering facts, else None."""
    if not isinstance(fact, ExtractedPosecode):
        return None
    kind = fact.def_.kind
    if kind not in ("relpos_x", "relpos_y", "relpos_z"):
        return None
    i, j = fact.def_.joints
    if fact.category in _GREATER:
        return (kind, i, j)
    if fact.category in _LESSER:
        return (kind, j, i)
    return None


def apply_relation_ripple(posecodes: list[Fact]) -> list[Fact]:
    """Drop ordering facts implied by two other facts through transitivity.

    For every axis, a fact a > c is removed when facts a > b and b > c are
    both present in the input; removal decisions are simultaneous, so no
    surviving triple remains.
    """
    out: dict[str, dict[str, set[str]]] = {}
    for fact in posecodes:
        edge = _ordering_edge(fact)
        if edge:
            out.setdefault(edge[0], {}).setdefault(edge[1], set()).add(edge[2])

    kept: list[Fact] = []
    for fact in posecodes:
        edge = _ordering_edge(fact)
        if edge:
            axis, hi, lo = edge
            adj = out[axis]
            if any(lo in adj.get(mid, ()) for mid in adj.get(hi, ()) if mid != lo):
                continue
        kept.append(fact)
    return kept


def apply_statistics_ripple(units: list, rules: Sequence[StatRule]) -> list:
    """Remove Y units for every rule whose X facts are all present.

    Runs once, in rule order, over description units (after entity- and
    symmetry-based aggregation).  Y is removed only if it still exists as a
    stand-alone unit; aggregated-away facts are left untouched.
    """
    present: set[FactKey] = set()
    for unit in units:
        present.update(unit.provenance)
    kept = list(units)
    for rule in rules:
        if not all(k in present for k in rule.x):
            continue
        for idx, unit in enumerate(kept):
            if unit.provenance == (rule.y,):
                del kept[idx]
                present.discard(rule.y)
                break
    return kept


def select_posecodes(
    posecodes: list[Fact],
    eligibility: EligibilityTable,
    skip_prob: float = 0.15,
    rng: np.random.Generator | None = None,
) -> list[Fact]:
    """Drop ignored posecodes and randomly skip skippable ones.

    Unskippable posecodes always survive; each skippable one is dropped
    independently with probability ``skip_prob``.
    """
    if skip_prob and rng is None:
        raise ConfigurationError("skip_prob > 0 requires a random generator")
    classes = [eligibility.class_of(f.key) for f in posecodes]
    n_skippable = sum(c == "skippable" for c in classes)
    draws = rng.random(n_skippable) if rng is not None else np.zeros(n_skippable)
    kept = []
    i = 0
    for fact, cls in zip(posecodes, classes):
        if cls.startswith("ignored"):
            continue
        if cls == "skippable":
            drop = draws[i] < skip_prob
            i += 1
            if drop:
                continue
        kept.append(fact)
    return kept
