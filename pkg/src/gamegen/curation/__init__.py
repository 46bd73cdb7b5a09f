"""Dataset construction pipeline: tiered filtering, annotation aggregation,
caption sampling, shot/motion splitting, histogram quality scores, and
2D/3D balancing."""

from .records import (  # noqa: F401
    AnnotationTask,
    CaptionSet,
    CurationRecord,
    EmptyBatch,
    IncompleteCaptionSet,
    MalformedTask,
    MissingScore,
    OneStyleMissing,
    Tier,
    TierThresholds,
    acceptance_check,
    aggregate_annotation,
    balance_styles,
    classify_tier,
    sample_caption,
)
from .video import (  # noqa: F401
    TooShort,
    block_flow,
    luminance_quality,
    mean_flow_series,
    motion_richness,
    motion_split,
    split_scenes,
)
from .pipeline import CurationConfig, curate_corpus  # noqa: F401
from .fixtures import build_fixture_corpus  # noqa: F401
