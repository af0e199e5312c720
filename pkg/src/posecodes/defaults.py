"""Loading of the shipped (or user-overridden) data tables.

Every table lives in a plain file so operators can swap definitions,
thresholds or wording without touching code.  The resolution order is:
explicit path, then the directory named by the POSECODE_DATA_DIR environment
variable, then the package's bundled data.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError
from .extraction import BinningSpec, BinningSpecs, PosecodeDef
from .realization import TemplateBank
from .selection import EligibilityTable
from .superposecodes import SuperPosecodeDef, SupportRoles

DATA_DIR_ENV = "POSECODE_DATA_DIR"

FILENAMES = {
    "posecode_defs": "posecode_defs.json",
    "binning_specs": "binning_specs.json",
    "super_posecodes": "super_posecodes.json",
    "support_roles": "support_roles.json",
    "eligibility": "eligibility_default.tsv",
    "templates": "templates.json",
    "exclusions": "rule_exclusions.txt",
}


def _read_text(kind: str, path: str | Path | None) -> str:
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigurationError(f"{kind} file not found: {p}")
        return p.read_text(encoding="utf-8")
    env_dir = os.environ.get(DATA_DIR_ENV)
    if env_dir:
        p = Path(env_dir) / FILENAMES[kind]
        if p.exists():
            return p.read_text(encoding="utf-8")
    return (
        resources.files("posecodes").joinpath("data", FILENAMES[kind]).read_text("utf-8")
    )


def load_posecode_defs(path: str | Path | None = None) -> list[PosecodeDef]:
    rows = json.loads(_read_text("posecode_defs", path))
    defs = [
        PosecodeDef(
            id=r["id"],
            kind=r["kind"],
            joints=tuple(r["joints"]),
            subject_label=r.get("subject_label"),
        )
        for r in rows
    ]
    ids = [d.id for d in defs]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("duplicate posecode definition ids")
    return defs


def load_binning_specs(path: str | Path | None = None) -> BinningSpecs:
    raw = json.loads(_read_text("binning_specs", path))
    return {
        kind: BinningSpec(
            kind=kind,
            categories=tuple(spec["categories"]),
            thresholds=tuple(spec["thresholds"]),
            noise=float(spec["noise"]),
        )
        for kind, spec in raw.items()
    }


def load_super_posecodes(path: str | Path | None = None) -> list[SuperPosecodeDef]:
    rows = json.loads(_read_text("super_posecodes", path))
    return [
        SuperPosecodeDef(
            id=r["id"],
            subject=r["subject"],
            category=r["category"],
            eligibility=r["eligibility"],
            alternatives=tuple(
                tuple((d, c) for d, c in alt) for alt in r["alternatives"]
            ),
        )
        for r in rows
    ]


def load_support_roles(path: str | Path | None = None) -> SupportRoles:
    raw = json.loads(_read_text("support_roles", path))
    return SupportRoles(
        support=frozenset(raw.get("support", [])),
        semi_support=dict(raw.get("semi_support", {})),
    )


def load_eligibility(path: str | Path | None = None) -> EligibilityTable:
    return EligibilityTable.from_lines(
        _read_text("eligibility", path).splitlines()
    )


def load_template_bank(path: str | Path | None = None) -> TemplateBank:
    return TemplateBank(json.loads(_read_text("templates", path)))


def load_exclusions(path: str | Path | None = None) -> frozenset[str]:
    lines = _read_text("exclusions", path).splitlines()
    return frozenset(
        line.strip() for line in lines if line.strip() and not line.startswith("#")
    )
