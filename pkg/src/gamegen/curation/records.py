"""Asset records, tier gates, annotation aggregation, caption sampling,
and style balancing."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Sequence

from ..errors import GamegenError

EXACT_MATCH_MIN = 0.70
WITHIN_ONE_MIN = 0.95
DEFAULT_SAMPLE_RATE = 0.05

# Aesthetic scoring dimensions, each rated 1..5 by five annotators.
AESTHETIC_DIMENSIONS = (
    "color_harmony",
    "light_shadow_harmony",
    "structural_rationality",
    "form_fluidity",
    "image_completeness",
    "compositional_layering",
)

CAPTION_VARIANTS = ("short", "medium", "detailed", "comprehensive")
# Training-time sampling ratio 1:1:1:7 over the four image caption lengths.
CAPTION_WEIGHTS = (1, 1, 1, 7)

CLIP_CAPTION_COMPONENTS = ("long_visual", "long_motion", "short_visual", "short_motion")


class MissingScore(GamegenError):
    pass


class MalformedTask(GamegenError):
    pass


class EmptyBatch(GamegenError):
    pass


class IncompleteCaptionSet(GamegenError):
    pass


class OneStyleMissing(GamegenError):
    pass


class Tier(IntEnum):
    BRONZE = 1
    GOLD = 2
    PREMIUM = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class TierThresholds:
    style: float = 0.5
    clarity: float = 0.05
    aesthetic: float = 0.5
    min_dimension: int = 1024  # both image dimensions must reach this for Gold


@dataclass(frozen=True)
class CaptionSet:
    short: Optional[str] = None
    medium: Optional[str] = None
    detailed: Optional[str] = None
    comprehensive: Optional[str] = None
    long_visual: Optional[str] = None
    long_motion: Optional[str] = None
    short_visual: Optional[str] = None
    short_motion: Optional[str] = None
    tags: tuple[str, ...] = ()

    def image_variants(self) -> tuple[Optional[str], ...]:
        return (self.short, self.medium, self.detailed, self.comprehensive)


@dataclass
class CurationRecord:
    asset_id: str
    kind: str  # "image" | "clip"
    width: int
    height: int
    frames: int = 1
    scores: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    style: str = "other"  # "2D" | "3D" | "other"
    manual_pass: bool = False
    tier: Optional[Tier] = None
    captions: Optional[CaptionSet] = None
    clip_bounds: Optional[tuple[int, int]] = None
    selected: bool = True

    def flag(self, name: str) -> bool:
        return bool(self.flags.get(name, False))


def classify_tier(
    record: CurationRecord, thresholds: TierThresholds = TierThresholds()
) -> Optional[Tier]:
    """Highest tier the record attains, or None when it fails the style
    gate. Gates nest: Gold implies Bronze, Premium implies Gold."""
    for name in ("style", "clarity", "aesthetic"):
        if name not in record.scores:
            raise MissingScore(f"record {record.asset_id} lacks score {name!r}")
    if record.scores["style"] < thresholds.style:
        return None
    tier = Tier.BRONZE
    gold = (
        record.width >= thresholds.min_dimension
        and record.height >= thresholds.min_dimension
        and record.scores["clarity"] >= thresholds.clarity
        and record.scores["aesthetic"] >= thresholds.aesthetic
        and not record.flag("watermark")
        and not record.flag("ocr_text")
    )
    if gold:
        tier = Tier.GOLD
        if not record.flag("defect") and not record.flag("aigc") and record.manual_pass:
            tier = Tier.PREMIUM
    return tier


@dataclass(frozen=True)
class AnnotationTask:
    asset_id: str
    dimension: str
    scores: tuple[int, ...]

    def __post_init__(self):
        if len(self.scores) != 5:
            raise MalformedTask(
                f"task needs exactly five scores, got {len(self.scores)}"
            )
        if any(not isinstance(s, int) or not 1 <= s <= 5 for s in self.scores):
            raise MalformedTask(f"scores must be integers in 1..5, got {self.scores}")
        if self.dimension not in AESTHETIC_DIMENSIONS:
            raise MalformedTask(f"unknown scoring dimension {self.dimension!r}")


def aggregate_annotation(task: AnnotationTask) -> Optional[int]:
    """The agreed score when at least four of the five annotators match
    (the mode, unique at that multiplicity), else None for invalid."""
    value, count = Counter(task.scores).most_common(1)[0]
    return value if count >= 4 else None


@dataclass(frozen=True)
class AcceptanceResult:
    passed: bool
    exact_fraction: float
    within_one_fraction: float
    sampled: int


def acceptance_check(
    pairs: Sequence[tuple[int, int]],
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    seed: int = 0,
    exact_min: float = EXACT_MATCH_MIN,
    within_one_min: float = WITHIN_ONE_MIN,
) -> AcceptanceResult:
    """Quality-inspect a batch of (final, reference) score pairs on a
    seeded random sample. Passes when the exact-match fraction is at least
    `exact_min` and the off-by-at-most-one fraction at least
    `within_one_min` (both boundaries inclusive)."""
    if not pairs:
        raise EmptyBatch("no annotation pairs to inspect")
    rng = random.Random(seed)
    k = max(1, round(sample_rate * len(pairs)))
    k = min(k, len(pairs))
    indices = sorted(rng.sample(range(len(pairs)), k))
    exact = 0
    within = 0
    for i in indices:
        final, reference = pairs[i]
        diff = abs(int(final) - int(reference))
        exact += diff == 0
        within += diff <= 1
    exact_frac = exact / k
    within_frac = within / k
    return AcceptanceResult(
        passed=(exact_frac >= exact_min and within_frac >= within_one_min),
        exact_fraction=exact_frac,
        within_one_fraction=within_frac,
        sampled=k,
    )


def sample_caption(captions: CaptionSet, rng: random.Random) -> str:
    """Pick one of the four image caption lengths at the declared 1:1:1:7
    weights."""
    variants = captions.image_variants()
    if any(v is None for v in variants):
        missing = [n for n, v in zip(CAPTION_VARIANTS, variants) if v is None]
        raise IncompleteCaptionSet(f"missing caption variants: {missing}")
    total = sum(CAPTION_WEIGHTS)
    r = rng.random() * total
    acc = 0.0
    for text, weight in zip(variants, CAPTION_WEIGHTS):
        acc += weight
        if r < acc:
            return text  # type: ignore[return-value]
    return variants[-1]  # type: ignore[return-value]


def sample_clip_caption(
    captions: CaptionSet, rng: random.Random, weights: Sequence[float] = (1, 1, 1, 1)
) -> str:
    """Pick one clip caption component; component weights are configuration
    (defaults uniform)."""
    values = [getattr(captions, name) for name in CLIP_CAPTION_COMPONENTS]
    if any(v is None for v in values):
        missing = [n for n, v in zip(CLIP_CAPTION_COMPONENTS, values) if v is None]
        raise IncompleteCaptionSet(f"missing clip caption components: {missing}")
    total = float(sum(weights))
    r = rng.random() * total
    acc = 0.0
    for text, weight in zip(values, weights):
        acc += weight
        if r < acc:
            return text  # type: ignore[return-value]
    return values[-1]  # type: ignore[return-value]


def balance_styles(records: Sequence[CurationRecord]) -> list[CurationRecord]:
    """Equalize 2D and 3D record counts by dropping the lowest-aesthetic
    records of the majority style; records of other styles are excluded.
    Output counts differ by at most one (they end up equal)."""
    two_d = [r for r in records if r.style == "2D"]
    three_d = [r for r in records if r.style == "3D"]
    if not two_d or not three_d:
        raise OneStyleMissing(
            f"need both styles, got 2D={len(two_d)} 3D={len(three_d)}"
        )
    keep = min(len(two_d), len(three_d))

    def top(group: list[CurationRecord]) -> set[str]:
        ranked = sorted(
            group,
            key=lambda r: (-r.scores.get("aesthetic", 0.0), r.asset_id),
        )
        return {r.asset_id for r in ranked[:keep]}

    selected_ids = top(two_d) | top(three_d)
    return [r for r in records if r.asset_id in selected_ids and r.style in ("2D", "3D")]
