"""Higher-level binary pose concepts built from elementary posecode categories.

A super-posecode fires when all categorizations of one of its production
alternatives are present.  Contributing posecodes carry a role deciding what
happens to them afterwards: 'support' posecodes exist only to produce the
concept and are never verbalized, 'semi_support' posecodes are verbalized
only when their concept failed to fire, and regular contributors always pass
through.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigurationError
from .extraction import ExtractedPosecode

FactKey = tuple[str, str]  # (definition id, category)


@dataclass(frozen=True)
class SuperPosecodeDef:
    id: str
    subject: str
    category: str
    eligibility: str  # "skippable" | "unskippable"
    alternatives: tuple[tuple[FactKey, ...], ...]

    def __post_init__(self):
        if self.eligibility not in ("skippable", "unskippable"):
            raise ConfigurationError(
                f"{self.id}: eligibility must be skippable or unskippable"
            )
        if not self.alternatives:
            raise ConfigurationError(f"{self.id}: needs at least one alternative")

    @property
    def key(self) -> FactKey:
        return (self.id, self.category)


@dataclass(frozen=True)
class SuperPosecodeFact:
    """A produced super-posecode, with the elementary facts that fired it."""

    def_: SuperPosecodeDef
    sources: tuple[FactKey, ...]

    @property
    def key(self) -> FactKey:
        return self.def_.key


@dataclass(frozen=True)
class SupportRoles:
    """Role per definition id; unlisted definitions are regular."""

    support: frozenset[str] = frozenset()
    semi_support: dict[str, str] = field(default_factory=dict)  # def id -> super id

    def validate(self, defs_by_id: dict[str, object], supers: list[SuperPosecodeDef]):
        contributing = {
            key[0] for sp in supers for alt in sp.alternatives for key in alt
        }
        super_ids = {sp.id for sp in supers}
        for def_id in self.support | set(self.semi_support):
            if def_id not in defs_by_id:
                raise ConfigurationError(f"role references unknown posecode {def_id!r}")
            if def_id not in contributing:
                raise ConfigurationError(
                    f"{def_id!r} has a support role but feeds no super-posecode"
                )
        for def_id, super_id in self.semi_support.items():
            if super_id not in super_ids:
                raise ConfigurationError(
                    f"{def_id!r} scoped to unknown super-posecode {super_id!r}"
                )

    def role_of(self, def_id: str) -> str:
        if def_id in self.support:
            return "support"
        if def_id in self.semi_support:
            return "semi_support"
        return "regular"


def evaluate_super_posecodes(
    extracted: list[ExtractedPosecode],
    defs: list[SuperPosecodeDef],
    roles: SupportRoles,
) -> tuple[list[SuperPosecodeFact], list[ExtractedPosecode]]:
    """Produce super-posecode facts and filter the elementary posecodes.

    Returns the produced facts plus the retained elementary posecodes:
    support posecodes are always dropped, semi-support posecodes are dropped
    exactly when the super-posecode they are scoped to was produced.
    """
    present = {p.key for p in extracted}
    produced: list[SuperPosecodeFact] = []
    produced_ids: set[str] = set()
    for sp in defs:
        for alt in sp.alternatives:
            if all(key in present for key in alt):
                produced.append(SuperPosecodeFact(sp, alt))
                produced_ids.add(sp.id)
                break

    retained: list[ExtractedPosecode] = []
    for p in extracted:
        role = roles.role_of(p.def_.id)
        if role == "support":
            continue
        if role == "semi_support" and roles.semi_support[p.def_.id] in produced_ids:
            continue
        retained.append(p)
    return produced, retained
