"""Turning description units into sentences and sentences into captions.

Every (kind, category) pair owns a pool of template sentences; one is picked
at random per statement.  Symmetric statements choose their subject side at
random and may refer to the counterpart with a substitute expression.
Sentences are finally shuffled and joined with random transition phrases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .aggregation import DescriptionUnit, PartRef, Statement
from .errors import ConfigurationError
from .extraction import NEGATION_SWAP


class TemplateBank:
    """Sentence templates, transitions, intros and substitute expressions."""

    def __init__(self, data: dict):
        self.intros: list[str] = list(data["intros"])
        self.transitions: list[str] = list(data["transitions"])
        self.other_refs: list[str] = list(data.get("other_refs", ["name"]))
        self.substitutes: dict[str, str] = dict(
            data.get("substitutes", {"singular": "it", "plural": "they"})
        )
        self.aux_templates: list[str] = list(data.get("aux_templates", []))
        self.templates: dict[str, dict[str, dict[str, list[str]]]] = data["templates"]
        self.omissions: dict[str, dict[str, list[str]]] = data.get("omissions", {})
        if not self.intros or not self.transitions:
            raise ConfigurationError("template bank needs intros and transitions")

    def pick(
        self, kind: str, category: str, plural: bool, rng: np.random.Generator | None
    ) -> str:
        try:
            pool = self.templates[kind][category]["plural" if plural else "singular"]
        except KeyError:
            raise ConfigurationError(
                f"no template for kind {kind!r} category {category!r}"
            ) from None
        return _choice(pool, rng)

    def pick_omission(
        self, case: str, plural: bool, rng: np.random.Generator | None
    ) -> str:
        try:
            pool = self.omissions[case]["plural" if plural else "singular"]
        except KeyError:
            raise ConfigurationError(f"no omission template for case {case!r}") from None
        return _choice(pool, rng)


def _choice(pool: Sequence[str], rng: np.random.Generator | None) -> str:
    """Uniform pick; a None generator means 'fully deterministic': index 0."""
    if rng is None:
        return pool[0]
    return pool[int(rng.integers(len(pool)))]


@dataclass(frozen=True)
class SubjectAssignment:
    """Outcome of the subject choice for one unit."""

    subject: PartRef
    statements: tuple[Statement, ...]
    object_style: str = "name"  # name | side | other


def choose_subject(
    unit: DescriptionUnit,
    rng: np.random.Generator | None,
    allow_substitutes: bool = True,
) -> SubjectAssignment:
    """Pick the subject of a unit.

    Symmetric units (two keypoints differing only by side) get a uniformly
    random side as subject; the other keypoint is then referred to by name,
    by side or as 'the other'.  Asymmetric units keep their main keypoint.
    """
    if not unit.symmetric:
        return SubjectAssignment(unit.subjects[0], unit.statements)
    st = unit.statements[0]
    assert st.obj is not None
    if rng is None:
        return SubjectAssignment(unit.subjects[0], unit.statements, "name")
    flip = bool(rng.random() < 0.5)
    styles = ["name", "side", "other"] if allow_substitutes else ["name"]
    style = styles[int(rng.integers(len(styles)))] if len(styles) > 1 else styles[0]
    if not flip:
        return SubjectAssignment(unit.subjects[0], unit.statements, style)
    # swapping subject and object reverses ordering categories
    category = NEGATION_SWAP.get(st.category, st.category)
    flipped = replace(st, category=category, obj=unit.subjects[0])
    return SubjectAssignment(st.obj, (flipped,), style)


def _object_display(obj: PartRef, style: str) -> str:
    if style == "side" and obj.side:
        return f"the {obj.side} one"
    if style == "other":
        return "the other"
    return obj.display()


def render_unit(
    unit: DescriptionUnit,
    bank: TemplateBank,
    rng: np.random.Generator | None,
    implicitness: bool = True,
) -> str:
    """Render one unit as a sentence clause (no capitalization, no period)."""
    assignment = choose_subject(unit, rng, allow_substitutes=implicitness)
    plural = unit.plural
    subject_text = (
        assignment.subject.display()
        if len(unit.subjects) == 1 or unit.symmetric
        else unit.subject_display()
    )
    clauses = []
    for idx, st in enumerate(assignment.statements):
        if implicitness and st.omission is not None:
            template = bank.pick_omission(st.omission, plural, rng)
        else:
            template = bank.pick(st.kind, st.category, plural, rng)
        obj_text = ""
        if st.obj is not None:
            obj_text = _object_display(st.obj, assignment.object_style)
        subj = subject_text
        if idx > 0 and rng is not None:
            # follow-up statements of a pooled unit may use a substitute word
            if rng.random() < 0.5:
                subj = bank.substitutes["plural" if plural else "singular"]
        clauses.append(template.format(S=subj, O=obj_text))
    if len(clauses) == 1:
        return clauses[0]
    if len(clauses) == 2:
        return f"{clauses[0]} and {clauses[1]}"
    return ", ".join(clauses[:-1]) + f" and {clauses[-1]}"


def _normalize(text: str) -> str:
    text = re.sub(r"\s+", " ", text).strip()
    if not text.endswith("."):
        text += "."
    # capitalize the start of every sentence
    parts = re.split(r"(\. )", text)
    parts = [p[0].upper() + p[1:] if p and p not in (". ",) else p for p in parts]
    return "".join(parts)


def assemble_caption(
    sentences: Sequence[str],
    bank: TemplateBank,
    rng: np.random.Generator | None,
) -> str:
    text, _ = assemble_caption_with_order(sentences, bank, rng)
    return text


def assemble_caption_with_order(
    sentences: Sequence[str],
    bank: TemplateBank,
    rng: np.random.Generator | None,
) -> tuple[str, list[int]]:
    """Join clauses in random order with random transitions.

    Returns the final text and, for each input clause, the position at which
    it ended up.  A None generator keeps the input order and always uses the
    first intro and transition.
    """
    if not sentences:
        raise ConfigurationError("cannot assemble a caption out of zero sentences")
    if rng is None:
        order = list(range(len(sentences)))
    else:
        order = [int(i) for i in rng.permutation(len(sentences))]
    intro = _choice(bank.intros, rng)
    text = intro.format(clause=sentences[order[0]])
    for idx in order[1:]:
        transition = _choice(bank.transitions, rng)
        text += transition + sentences[idx]
    position = [0] * len(sentences)
    for pos, idx in enumerate(order):
        position[idx] = pos
    return _normalize(text), position


def append_auxiliary_sentence(
    text: str,
    labels: Sequence[str],
    bank: TemplateBank,
    rng: np.random.Generator | None,
    admit_dancing: bool = False,
) -> str:
    """Add one sentence built from a high-level action label, if any applies.

    The automatically assigned 'dancing' label is only admitted when
    requested; other labels always are.
    """
    admitted = [l for l in labels if admit_dancing or l != "dancing"]
    if not admitted:
        return text
    label = _choice(admitted, rng)
    template = _choice(bank.aux_templates, rng)
    sentence = _normalize(template.format(label=label))
    return f"{text} {sentence}" if text else sentence


_SIDE_WORD = re.compile(r"\b(left|right)\b", re.IGNORECASE)


def _swap_side_word(match: re.Match) -> str:
    word = match.group(0)
    swapped = "right" if word.lower() == "left" else "left"
    if word.isupper():
        return swapped.upper()
    if word[0].isupper():
        return swapped.capitalize()
    return swapped


def mirror_text(text: str) -> str:
    """Exchange 'left' and 'right' words, preserving case.  An involution."""
    return _SIDE_WORD.sub(_swap_side_word, text)
