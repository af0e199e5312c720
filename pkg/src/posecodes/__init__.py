"""posecodes: deterministic rule-based captions for 3D human poses.

The pipeline measures elementary geometric relations over body keypoints
(posecodes), bins them into categories with randomized thresholds, infers
higher-level binary concepts, prunes trivial and redundant information,
merges what reads better together and realizes the rest through randomized
sentence templates.  Also included: greedy farthest-point pose sampling and
mining of statistical redundancy rules over a corpus.
"""

from .aggregation import (
    DescriptionUnit,
    Entity,
    PartRef,
    apply_aggregations,
    build_units,
    enumerate_aggregation_options,
)
from .config import DEFAULT_SCHEDULE, PipelineConfig
from .defaults import (
    load_binning_specs,
    load_eligibility,
    load_exclusions,
    load_posecode_defs,
    load_support_roles,
    load_super_posecodes,
    load_template_bank,
)
from .errors import (
    ConfigurationError,
    MeasurementError,
    PipelineError,
    PoseError,
    PosecodesError,
)
from .extraction import (
    BinningSpec,
    CompiledDefs,
    ExtractedPosecode,
    PosecodeDef,
    build_fact_mirror_map,
    categorize,
    extract_posecodes,
    measure_angle,
    measure_distance,
    measure_ground_contact,
    measure_pitch_roll,
    measure_relative_position,
)
from .pipeline import (
    PROFILES,
    Caption,
    CaptionProfile,
    Engine,
    PoseFailure,
    derive_caption_seed,
    generate_caption,
    generate_dataset,
)
from .pose import (
    Keypoint,
    KeypointRegistry,
    PoseCorpus,
    PoseKeypoints,
    PoseRecord,
    default_registry,
    derive_auxiliary_keypoints,
    ensure_auxiliary_keypoints,
    extended_registry,
    mirror_pose,
    mpje,
)
from .poseio import (
    read_captions,
    read_pose_file,
    read_poses_binary,
    read_poses_jsonl,
    write_captions,
    write_poses_binary,
    write_poses_jsonl,
)
from .realization import (
    TemplateBank,
    append_auxiliary_sentence,
    assemble_caption,
    choose_subject,
    mirror_text,
    render_unit,
)
from .sampling import SequenceFrames, farthest_point_sample, filter_frames
from .selection import (
    EligibilityTable,
    FrequencyTable,
    StatRule,
    apply_relation_ripple,
    apply_statistics_ripple,
    classify_eligibility,
    compute_category_frequencies,
    mine_statistics_rules,
    select_posecodes,
)
from .superposecodes import (
    SuperPosecodeDef,
    SuperPosecodeFact,
    SupportRoles,
    evaluate_super_posecodes,
)

__version__ = "0.1.0"
