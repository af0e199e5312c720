"""Command-line interface: generate, mine, stats, sample, mirror, extract.

Every command is reproducible byte for byte from its inputs, flags and seed;
no wall-clock entropy is used anywhere.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .defaults import (
    load_binning_specs,
    load_eligibility,
    load_exclusions,
    load_posecode_defs,
    load_support_roles,
    load_super_posecodes,
)
from .errors import PosecodesError
from .extraction import CompiledDefs
from .pipeline import generate_dataset
from .pose import ensure_auxiliary_keypoints, extended_registry
from .poseio import read_pose_file, write_captions
from .realization import mirror_text
from .sampling import farthest_point_sample, filter_frames, sequences_from_corpus
from .selection import (
    classify_eligibility,
    compute_category_frequencies,
    mine_statistics_rules,
    rules_to_lines,
)


def _load_config(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    return config.override(
        seed=getattr(args, "seed", None),
        jobs=getattr(args, "jobs", None),
        skip_prob=getattr(args, "skip_prob", None),
        aggregation_prob=getattr(args, "agg_prob", None),
        noise_scale=getattr(args, "noise_scale", None),
        schedule=(args.profile,) if getattr(args, "profile", None) else None,
    )


def cli_generate(args) -> int:
    config = _load_config(args)
    corpus = read_pose_file(args.corpus)
    started = time.perf_counter()
    captions, failures = generate_dataset(
        corpus, config, captions_per_pose=args.per_pose, jobs=config.resolved_jobs()
    )
    elapsed = time.perf_counter() - started
    write_captions(args.out, captions, provenance=args.provenance)
    rate = len(captions) / elapsed if elapsed > 0 else float("inf")
    print(
        f"poses={len(corpus)} captions={len(captions)} failures={len(failures)} "
        f"wall={elapsed:.2f}s rate={rate:.0f} captions/s"
    )
    for failure in failures:
        print(
            f"FAILED pose={failure.pose_id} stage={failure.stage}: {failure.message}",
            file=sys.stderr,
        )
    return 1 if failures else 0


def cli_mine(args) -> int:
    config = _load_config(args)
    corpus = read_pose_file(args.corpus)
    defs = load_posecode_defs(config.posecode_defs)
    specs = load_binning_specs(config.binning_specs)
    roles = load_support_roles(config.support_roles)
    eligibility = None
    if config.eligibility or not args.recompute_eligibility:
        eligibility = load_eligibility(config.eligibility)
    rules = mine_statistics_rules(
        corpus,
        defs,
        specs,
        eligibility=eligibility,
        roles=roles,
        min_support=args.min_support,
        tau_single=args.tau1,
        tau_pair=args.tau2,
        exclusions=load_exclusions(config.exclusions),
    )
    params = {
        "min_support": args.min_support,
        "tau_single": args.tau1,
        "tau_pair": args.tau2,
        "poses": len(corpus),
    }
    Path(args.out).write_text(
        "\n".join(rules_to_lines(rules, params)) + "\n", "utf-8"
    )
    suspects = [r for r in rules if r.suspect]
    if args.report:
        lines = ["# rules flagged for manual review (upper/lower body mix)"]
        lines += [r.to_line() for r in suspects]
        Path(args.report).write_text("\n".join(lines) + "\n", "utf-8")
    print(f"poses={len(corpus)} rules={len(rules)} suspect={len(suspects)}")
    return 0


def cli_stats(args) -> int:
    config = _load_config(args)
    corpus = read_pose_file(args.corpus)
    defs = load_posecode_defs(config.posecode_defs)
    specs = load_binning_specs(config.binning_specs)
    supers = load_super_posecodes(config.super_posecodes)
    freqs = compute_category_frequencies(corpus, defs, specs, super_defs=supers)
    table = classify_eligibility(freqs, args.trivial_at, args.unskippable_below)
    out = Path(args.out)
    out.write_text("\n".join(freqs.to_lines()) + "\n", "utf-8")
    Path(args.eligibility_out).write_text(
        "\n".join(table.to_lines()) + "\n", "utf-8"
    )
    print(f"poses={len(corpus)} entries={len(freqs.freqs)}")
    return 0


def cli_sample(args) -> int:
    corpus = read_pose_file(args.corpus)
    candidates = []
    for seq in sequences_from_corpus(corpus):
        candidates.extend(filter_frames(seq, args.head_tail, args.stride))
    selected = farthest_point_sample(candidates, args.n, args.seed)
    Path(args.out).write_text(
        "".join(r.pose_id + "\n" for r in selected), "utf-8"
    )
    print(f"sequences-candidates={len(candidates)} selected={len(selected)}")
    return 0


def cli_mirror(args) -> int:
    with open(args.captions, encoding="utf-8") as f:
        rows = [json.loads(line) for line in f if line.strip()]
    for row in rows:
        row["text"] = mirror_text(row["text"])
    with open(args.out, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")
    print(f"captions={len(rows)}")
    return 0


def cli_extract(args) -> int:
    config = _load_config(args)
    corpus = read_pose_file(args.corpus)
    defs = load_posecode_defs(config.posecode_defs)
    specs = load_binning_specs(config.binning_specs)
    compiled = CompiledDefs(defs, specs, extended_registry())
    rng = np.random.default_rng(config.seed)
    with open(args.out, "w", encoding="utf-8") as f:
        for record in corpus:
            pose = ensure_auxiliary_keypoints(record.keypoints)
            facts = compiled.extract(pose, rng, config.noise_scale)
            f.write(
                json.dumps(
                    {
                        "pose_id": record.pose_id,
                        "posecodes": [
                            {
                                "id": p.def_.id,
                                "value": round(p.value, 6),
                                "unit": p.unit,
                                "category": p.category,
                            }
                            for p in facts
                        ],
                    }
                )
                + "\n"
            )
    print(f"poses={len(corpus)} posecodes={len(defs)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posecodes",
        description="Deterministic rule-based captions for 3D human poses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--corpus", required=True, help="pose file (jsonl or packed)")
        p.add_argument("--config", help="pipeline config JSON")
        if seed:
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("generate", help="generate captions for a pose corpus")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--per-pose", type=int, default=3, dest="per_pose")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--profile", help="use one named profile for every caption")
    p.add_argument("--skip-prob", type=float, default=None, dest="skip_prob")
    p.add_argument("--agg-prob", type=float, default=None, dest="agg_prob")
    p.add_argument("--noise-scale", type=float, default=None, dest="noise_scale")
    p.add_argument("--provenance", action="store_true")
    p.set_defaults(func=cli_generate)

    p = sub.add_parser("mine", help="mine statistical redundancy rules")
    common(p, seed=False)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write suspect rules for manual review")
    p.add_argument("--min-support", type=int, default=50, dest="min_support")
    p.add_argument("--tau1", type=float, default=0.7)
    p.add_argument("--tau2", type=float, default=0.8)
    p.add_argument(
        "--recompute-eligibility",
        action="store_true",
        help="derive eligibility from this corpus instead of the shipped table",
    )
    p.set_defaults(func=cli_mine)

    p = sub.add_parser("stats", help="categorization frequencies and eligibility")
    common(p, seed=False)
    p.add_argument("--out", required=True, help="frequency table output")
    p.add_argument("--eligibility-out", required=True, dest="eligibility_out")
    p.add_argument("--trivial-at", type=float, default=0.60, dest="trivial_at")
    p.add_argument(
        "--unskippable-below", type=float, default=0.06, dest="unskippable_below"
    )
    p.set_defaults(func=cli_stats)

    p = sub.add_parser("sample", help="farthest-point sample diverse poses")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--head-tail", type=int, default=25, dest="head_tail")
    p.add_argument("--stride", type=int, default=25)
    p.set_defaults(func=cli_sample)
    p.set_defaults(seed=0)

    p = sub.add_parser("mirror", help="swap left/right words in a caption file")
    p.add_argument("--captions", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cli_mirror)

    p = sub.add_parser("extract", help="dump raw posecodes per pose")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--noise-scale", type=float, default=0.0, dest="noise_scale")
    p.set_defaults(func=cli_extract)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PosecodesError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
