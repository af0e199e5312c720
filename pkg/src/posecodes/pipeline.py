"""End-to-end caption generation.

One caption is a deterministic function of (pose record, configuration,
seed).  The seed of caption k for a pose is derived by hashing the global
seed, the pose id and k, so datasets come out identical whatever the number
of workers or the processing order.
"""

from __future__ import annotations

import hashlib
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .aggregation import apply_aggregations, build_units
from .config import PipelineConfig
from .defaults import (
    load_binning_specs,
    load_eligibility,
    load_exclusions,
    load_posecode_defs,
    load_support_roles,
    load_super_posecodes,
    load_template_bank,
)
from .errors import PipelineError, PosecodesError
from .extraction import CompiledDefs
from .pose import PoseCorpus, PoseRecord, ensure_auxiliary_keypoints, extended_registry
from .realization import (
    append_auxiliary_sentence,
    assemble_caption_with_order,
    render_unit,
)
from .selection import (
    EligibilityTable,
    StatRule,
    apply_relation_ripple,
    apply_statistics_ripple,
    rules_from_lines,
    select_posecodes,
)
from .superposecodes import evaluate_super_posecodes


@dataclass(frozen=True)
class CaptionProfile:
    """Feature toggles and knobs for one caption flavor."""

    name: str
    random_skip: bool = False
    implicitness: bool = False
    aux_labels: str = "off"  # off | babel | babel_dancing
    ripple_effect: bool = False
    skip_prob: float = 0.15
    aggregation_prob: float = 0.95
    noise_scale: float = 1.0
    # golden-regression mode: template index 0, identity sentence order
    deterministic_text: bool = False

    def with_knobs(
        self, skip_prob: float, aggregation_prob: float, noise_scale: float
    ) -> "CaptionProfile":
        return CaptionProfile(
            self.name,
            self.random_skip,
            self.implicitness,
            self.aux_labels,
            self.ripple_effect,
            skip_prob,
            aggregation_prob,
            noise_scale,
            self.deterministic_text,
        )


# single-feature variants, plus the mixed flavors used by the default
# three-caption schedule
PROFILES: dict[str, CaptionProfile] = {
    p.name: p
    for p in (
        CaptionProfile("basic"),
        CaptionProfile("skip", random_skip=True),
        CaptionProfile("implicit", implicitness=True),
        CaptionProfile("labeled", aux_labels="babel"),
        CaptionProfile("labeled_dancing", aux_labels="babel_dancing"),
        CaptionProfile("ripple", ripple_effect=True),
        CaptionProfile(
            "skip_implicit_labels",
            random_skip=True,
            implicitness=True,
            aux_labels="babel_dancing",
        ),
        CaptionProfile(
            "skip_implicit_ripple",
            random_skip=True,
            implicitness=True,
            ripple_effect=True,
        ),
    )
}


@dataclass(frozen=True)
class Caption:
    text: str
    pose_id: str
    caption_index: int
    profile: str
    seed: int
    # (posecode or super-posecode id, sentence position) per surviving fact
    provenance: tuple[tuple[str, int], ...] = ()


@dataclass
class PoseFailure:
    pose_id: str
    stage: str
    message: str


class Engine:
    """Loaded, immutable pipeline state shared by all workers."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.registry = extended_registry()
        self.defs = load_posecode_defs(config.posecode_defs)
        self.specs = load_binning_specs(config.binning_specs)
        self.super_defs = load_super_posecodes(config.super_posecodes)
        self.roles = load_support_roles(config.support_roles)
        self.roles.validate({d.id: d for d in self.defs}, self.super_defs)
        self.compiled = CompiledDefs(self.defs, self.specs, self.registry)
        eligibility = load_eligibility(config.eligibility)
        # the table must also cover super-posecodes: fill from their defs
        classes = dict(eligibility.classes)
        for sp in self.super_defs:
            classes.setdefault(sp.key, sp.eligibility)
        self.eligibility = EligibilityTable(classes)
        self.bank = load_template_bank(config.templates)
        self.rules: list[StatRule] = []
        if config.rules:
            with open(config.rules, encoding="utf-8") as f:
                self.rules = rules_from_lines(f)
        self.exclusions = load_exclusions(config.exclusions)
        self.schedule = [self._profile(name) for name in config.schedule]

    def _profile(self, name: str) -> CaptionProfile:
        try:
            base = PROFILES[name]
        except KeyError:
            raise PosecodesError(f"unknown caption profile {name!r}") from None
        return base.with_knobs(
            self.config.skip_prob, self.config.aggregation_prob, self.config.noise_scale
        )

    def profile_for(self, caption_index: int) -> CaptionProfile:
        return self.schedule[caption_index % len(self.schedule)]


def derive_caption_seed(global_seed: int, pose_id: str, caption_index: int) -> int:
    """Stable per-caption seed; independent of process and iteration order."""
    digest = hashlib.blake2b(
        f"{global_seed}|{pose_id}|{caption_index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def generate_caption(
    record: PoseRecord,
    engine: Engine,
    profile: CaptionProfile,
    seed: int,
    caption_index: int = 0,
) -> Caption:
    """Run the whole pipeline for one pose and one seed."""
    rng = np.random.default_rng(seed)
    stage = "derive-keypoints"
    try:
        pose = ensure_auxiliary_keypoints(record.keypoints)

        stage = "extract"
        extracted = engine.compiled.extract(pose, rng, profile.noise_scale)

        stage = "super-posecodes"
        produced, retained = evaluate_super_posecodes(
            extracted, engine.super_defs, engine.roles
        )
        facts = retained + produced

        stage = "relation-ripple"
        if profile.ripple_effect:
            facts = apply_relation_ripple(facts)

        stage = "select"
        facts = select_posecodes(
            facts,
            engine.eligibility,
            profile.skip_prob if profile.random_skip else 0.0,
            rng,
        )

        stage = "aggregate"
        units = build_units(facts)
        if profile.implicitness:
            units = apply_aggregations(
                units, profile.aggregation_prob, rng, rules=("entity", "symmetry")
            )

        stage = "statistics-ripple"
        if profile.ripple_effect:
            units = apply_statistics_ripple(units, engine.rules)

        stage = "aggregate"
        if profile.implicitness:
            units = apply_aggregations(units, profile.aggregation_prob, rng)

        stage = "render"
        text_rng = None if profile.deterministic_text else rng
        sentences = [
            render_unit(u, engine.bank, text_rng, implicitness=profile.implicitness)
            for u in units
        ]

        stage = "assemble"
        if sentences:
            text, positions = assemble_caption_with_order(
                sentences, engine.bank, text_rng
            )
        else:
            text, positions = "", []

        stage = "auxiliary-label"
        if profile.aux_labels != "off":
            text = append_auxiliary_sentence(
                text,
                record.aux_labels,
                engine.bank,
                text_rng,
                admit_dancing=profile.aux_labels == "babel_dancing",
            )
    except Exception as e:  # noqa: BLE001 - annotate failures with pipeline stage
        raise PipelineError(stage, record.pose_id, e) from e

    provenance = tuple(
        (fact_id, positions[unit_idx])
        for unit_idx, unit in enumerate(units)
        for fact_id, _category in unit.provenance
    )
    return Caption(
        text=text,
        pose_id=record.pose_id,
        caption_index=caption_index,
        profile=profile.name,
        seed=seed,
        provenance=provenance,
    )


def caption_record(
    record: PoseRecord, engine: Engine, caption_index: int, global_seed: int
) -> Caption:
    profile = engine.profile_for(caption_index)
    seed = derive_caption_seed(global_seed, record.pose_id, caption_index)
    return generate_caption(record, engine, profile, seed, caption_index)


# worker-side state for multiprocess runs
_WORKER: dict = {}


def _init_worker(config: PipelineConfig, captions_per_pose: int, global_seed: int):
    _WORKER["engine"] = Engine(config)
    _WORKER["captions_per_pose"] = captions_per_pose
    _WORKER["global_seed"] = global_seed


def _caption_one_pose(record: PoseRecord) -> list[Caption] | PoseFailure:
    engine: Engine = _WORKER["engine"]
    try:
        pre = record.with_keypoints(ensure_auxiliary_keypoints(record.keypoints))
        return [
            caption_record(pre, engine, ci, _WORKER["global_seed"])
            for ci in range(_WORKER["captions_per_pose"])
        ]
    except PipelineError as e:
        return PoseFailure(record.pose_id, e.stage, str(e.cause))
    except PosecodesError as e:
        return PoseFailure(record.pose_id, "load", str(e))


def generate_dataset(
    corpus: PoseCorpus,
    config: PipelineConfig,
    captions_per_pose: int = 3,
    jobs: int | None = None,
    engine: Engine | None = None,
) -> tuple[list[Caption], list[PoseFailure]]:
    """Generate captions for every pose of a corpus, in corpus order.

    Failures are collected instead of aborting the run.  Results are byte
    stable for a given (corpus, config, seed) whatever the worker count.
    """
    jobs = config.resolved_jobs() if jobs is None else max(1, jobs)
    captions: list[Caption] = []
    failures: list[PoseFailure] = []

    # build (and thereby validate) the engine in the parent before forking
    if engine is None:
        engine = Engine(config)

    if jobs == 1 or len(corpus) < 4:
        _WORKER.update(
            engine=engine, captions_per_pose=captions_per_pose, global_seed=config.seed
        )
        results = map(_caption_one_pose, corpus.records)
        for result in results:
            if isinstance(result, PoseFailure):
                failures.append(result)
            else:
                captions.extend(result)
        return captions, failures

    chunk = max(1, len(corpus) // (jobs * 8))
    # fork keeps workers importable regardless of how the parent was started
    method = "fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn"
    with multiprocessing.get_context(method).Pool(
        jobs, initializer=_init_worker, initargs=(config, captions_per_pose, config.seed)
    ) as pool:
        for result in pool.imap(_caption_one_pose, corpus.records, chunksize=chunk):
            if isinstance(result, PoseFailure):
                failures.append(result)
            else:
                captions.extend(result)
    return captions, failures
