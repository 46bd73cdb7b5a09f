"""End-to-end corpus curation.

Input layout: `<root>/images/*.png` with a same-stem `.json` sidecar
carrying ingested metadata (flags, style, manual_pass, captions), and
`<root>/videos/<name>/frame_*.png` frame directories with a
`<name>.json` sidecar. Output: a line-delimited JSON manifest (one record
per line, sorted by asset id) plus a summary report with tier counts,
style ratio, and score histograms. Every stage is seeded, so reruns are
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import load_png
from .records import (
    CaptionSet,
    CurationRecord,
    Tier,
    TierThresholds,
    balance_styles,
    classify_tier,
    sample_caption,
    sample_clip_caption,
)
from .scorers import default_image_scorers
from .video import luminance_quality, motion_richness, motion_split, split_scenes

MANIFEST_NAME = "manifest.jsonl"
SUMMARY_NAME = "summary.json"


@dataclass(frozen=True)
class CurationConfig:
    thresholds: TierThresholds = field(default_factory=TierThresholds)
    cut_threshold: float = 0.5
    grad_threshold: float = 0.5
    min_clip_len: int = 5
    luminance_min: float = 0.4
    fps: float = 8.0
    seed: int = 0
    clip_caption_weights: tuple[float, float, float, float] = (1, 1, 1, 1)


def _asset_rng(seed: int, asset_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{asset_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _caption_set(data: dict) -> Optional[CaptionSet]:
    if not data:
        return None
    return CaptionSet(
        short=data.get("short"),
        medium=data.get("medium"),
        detailed=data.get("detailed"),
        comprehensive=data.get("comprehensive"),
        long_visual=data.get("long_visual"),
        long_motion=data.get("long_motion"),
        short_visual=data.get("short_visual"),
        short_motion=data.get("short_motion"),
        tags=tuple(data.get("tags", ())),
    )


def _load_sidecar(path: Path) -> dict:
    if path.exists():
        return json.loads(path.read_text())
    return {}


def scan_corpus(root) -> tuple[list[Path], list[Path]]:
    root = Path(root)
    images = sorted((root / "images").glob("*.png")) if (root / "images").is_dir() else []
    videos = (
        sorted(p for p in (root / "videos").iterdir() if p.is_dir())
        if (root / "videos").is_dir()
        else []
    )
    return images, videos


def _curate_image(path: Path, root: Path, config: CurationConfig) -> CurationRecord:
    image = load_png(path)
    sidecar = _load_sidecar(path.with_suffix(".json"))
    asset_id = path.relative_to(root).as_posix()
    scores = {
        scorer.name: round(float(scorer.score(image.pixels)), 6)
        for scorer in default_image_scorers()
    }
    record = CurationRecord(
        asset_id=asset_id,
        kind="image",
        width=image.width,
        height=image.height,
        frames=1,
        scores=scores,
        flags=dict(sidecar.get("flags", {})),
        style=sidecar.get("style", "other"),
        manual_pass=bool(sidecar.get("manual_pass", False)),
        captions=_caption_set(sidecar.get("captions", {})),
    )
    record.tier = classify_tier(record, config.thresholds)
    return record


def _load_frames(video_dir: Path) -> list[np.ndarray]:
    frames = []
    for frame_path in sorted(video_dir.glob("*.png")):
        frames.append(load_png(frame_path).pixels)
    return frames


def _curate_video(video_dir: Path, root: Path, config: CurationConfig) -> list[CurationRecord]:
    frames = _load_frames(video_dir)
    sidecar = _load_sidecar(video_dir.parent / f"{video_dir.name}.json")
    base_id = video_dir.relative_to(root).as_posix()
    records = []
    scenes = split_scenes(
        frames, cut_threshold=config.cut_threshold, min_len=config.min_clip_len
    )
    aesthetic = default_image_scorers()[2]
    for scene_start, scene_end in scenes:
        scene = frames[scene_start:scene_end]
        if len(scene) >= 3:
            ranges = motion_split(scene, grad_threshold=config.grad_threshold)
        else:
            ranges = [(0, len(scene))]
        for rel_start, rel_end in ranges:
            start, end = scene_start + rel_start, scene_start + rel_end
            clip = frames[start:end]
            lum = round(luminance_quality(clip), 6)
            richness = (
                round(motion_richness(clip, fps=config.fps), 6) if len(clip) >= 2 else 0.0
            )
            mid = clip[len(clip) // 2]
            record = CurationRecord(
                asset_id=f"{base_id}#{start}-{end}",
                kind="clip",
                width=int(mid.shape[1]),
                height=int(mid.shape[0]),
                frames=end - start,
                scores={
                    "luminance": lum,
                    "motion_richness": richness,
                    "aesthetic": round(float(aesthetic.score(mid)), 6),
                },
                flags=dict(sidecar.get("flags", {})),
                style=sidecar.get("style", "other"),
                captions=_caption_set(sidecar.get("captions", {})),
                clip_bounds=(start, end),
                selected=lum >= config.luminance_min,
            )
            records.append(record)
    return records


def _record_json(record: CurationRecord, config: CurationConfig) -> dict:
    caption = None
    if record.captions is not None:
        rng = _asset_rng(config.seed, record.asset_id)
        try:
            if record.kind == "image":
                caption = sample_caption(record.captions, rng)
            else:
                caption = sample_clip_caption(
                    record.captions, rng, config.clip_caption_weights
                )
        except Exception:
            caption = None
    data = {
        "asset_id": record.asset_id,
        "kind": record.kind,
        "width": record.width,
        "height": record.height,
        "frames": record.frames,
        "scores": {k: record.scores[k] for k in sorted(record.scores)},
        "scorer_sources": {k: "pixel-stat" for k in sorted(record.scores)},
        "flags": {k: bool(v) for k, v in sorted(record.flags.items())},
        "style": record.style,
        "manual_pass": record.manual_pass,
        "tier": record.tier.label if record.tier is not None else "rejected",
        "caption": caption,
        "clip_bounds": list(record.clip_bounds) if record.clip_bounds else None,
        "selected": record.selected,
    }
    return data


def _score_histogram(values: list[float], bins: int = 8) -> list[int]:
    counts = [0] * bins
    for v in values:
        idx = min(bins - 1, max(0, int(v * bins)))
        counts[idx] += 1
    return counts


def curate_corpus(root, out_dir, config: CurationConfig = CurationConfig()) -> dict:
    """Run the full pipeline and write manifest + summary; returns the
    summary dict."""
    root = Path(root)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image_paths, video_dirs = scan_corpus(root)

    records: list[CurationRecord] = []
    for path in image_paths:
        records.append(_curate_image(path, root, config))
    clip_records: list[CurationRecord] = []
    for video_dir in video_dirs:
        clip_records.extend(_curate_video(video_dir, root, config))

    kept_clips = [r for r in clip_records if r.selected]
    balanced_ids = set()
    styles_present = {r.style for r in kept_clips}
    if "2D" in styles_present and "3D" in styles_present:
        balanced_ids = {r.asset_id for r in balance_styles(kept_clips)}
        for r in clip_records:
            r.selected = r.asset_id in balanced_ids
    records.extend(clip_records)

    records.sort(key=lambda r: r.asset_id)
    manifest_path = out / MANIFEST_NAME
    with manifest_path.open("w") as fh:
        for record in records:
            fh.write(json.dumps(_record_json(record, config), sort_keys=True) + "\n")

    tier_counts = {"rejected": 0, "bronze": 0, "gold": 0, "premium": 0}
    funnel = {"bronze": 0, "gold": 0, "premium": 0}
    for r in records:
        if r.kind != "image":
            continue
        label = r.tier.label if r.tier is not None else "rejected"
        tier_counts[label] += 1
        if r.tier is not None:
            for tier in Tier:
                if r.tier >= tier:
                    funnel[tier.label] += 1
    selected_styles = [r.style for r in clip_records if r.selected]
    n2 = selected_styles.count("2D")
    n3 = selected_styles.count("3D")
    ratio = n2 / (n2 + n3) if (n2 + n3) else None
    summary = {
        "images": len(image_paths),
        "videos": len(video_dirs),
        "clip_records": len(clip_records),
        "tier_counts": tier_counts,
        "tier_funnel": funnel,
        "balanced_2d": n2,
        "balanced_3d": n3,
        "style_ratio_2d": round(ratio, 6) if ratio is not None else None,
        "score_histograms": {
            name: _score_histogram(
                [r.scores[name] for r in records if name in r.scores]
            )
            for name in ("style", "clarity", "aesthetic", "luminance", "motion_richness")
        },
        "seed": config.seed,
    }
    (out / SUMMARY_NAME).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
