"""Deterministic 60-asset fixture corpus (40 images + 20 frame-dir videos).

Assets are procedural, so the corpus regenerates bit-identically and the
pipeline's manifest can be pinned against a golden copy. The mix covers
every tier gate: premium candidates, gold-only (defect/aigc/no manual
pass), bronze (small, soft, flagged, resolution edge), rejected grayscale,
a hard-cut video, an under-lit video, and translating-pattern videos split
across 2D/3D styles for balancing.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..core import Rgba8Image, save_png

CUT_POINTS = (40, 90)
CUT_VIDEO_FRAMES = 110
FRAME_SIZE = 32

# Saturated palette with lumas spread across the histogram.
_PALETTE = np.array(
    [
        (230, 25, 25), (25, 210, 40), (40, 60, 235), (240, 200, 20),
        (200, 30, 200), (20, 200, 200), (250, 120, 20), (120, 30, 220),
        (30, 120, 60), (220, 160, 120), (90, 200, 120), (180, 60, 90),
        (60, 90, 180), (240, 240, 80), (80, 240, 180), (160, 20, 60),
    ],
    dtype=np.uint8,
)

_SOLID_COLORS = ((220, 40, 40), (40, 200, 70), (60, 80, 230))


def _palette_checker(h: int, w: int, cell: int = 8, phase: int = 0) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    idx = (yy // cell + xx // cell + phase) % len(_PALETTE)
    rgba = np.empty((h, w, 4), dtype=np.uint8)
    rgba[:, :, :3] = _PALETTE[idx]
    rgba[:, :, 3] = 255
    return rgba


def _smooth_gradient(h: int, w: int, phase: int = 0) -> np.ndarray:
    ramp = np.linspace(90, 250, w, dtype=np.float64)
    rgba = np.empty((h, w, 4), dtype=np.uint8)
    rgba[:, :, 0] = np.broadcast_to(ramp, (h, w)).astype(np.uint8)
    rgba[:, :, 1] = 25 + (phase * 13) % 40
    rgba[:, :, 2] = 55
    rgba[:, :, 3] = 255
    return rgba


def _gray_photo(h: int, w: int, phase: int = 0) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    g = ((yy * 3 + xx * 5 + phase * 17) % 200 + 20).astype(np.uint8)
    rgba = np.stack([g, g, g, np.full_like(g, 255)], axis=2)
    return rgba


def _solid(h: int, w: int, color) -> np.ndarray:
    rgba = np.empty((h, w, 4), dtype=np.uint8)
    rgba[:, :, 0], rgba[:, :, 1], rgba[:, :, 2] = color
    rgba[:, :, 3] = 255
    return rgba


def build_cut_video_frames() -> list[np.ndarray]:
    """Solid-color video with hard cuts starting frames 40 and 90."""
    frames = []
    bounds = (0,) + CUT_POINTS + (CUT_VIDEO_FRAMES,)
    for seg, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        for _ in range(a, b):
            frames.append(_solid(FRAME_SIZE, FRAME_SIZE, _SOLID_COLORS[seg]))
    return frames


def build_motion_video_frames(
    rng: np.random.Generator,
    n_frames: int = 12,
    directions=((0, 1),),
    step: int = 1,
    size: int = FRAME_SIZE,
) -> list[np.ndarray]:
    """Camera-pan fixture: a window sliding over a larger static pattern,
    advancing `step` pixels per frame along the cycled `directions`. Pure
    translation (no wrap), so block matching recovers the motion exactly."""
    margin = max(1, n_frames * step)
    big = rng.integers(
        0, 255, size=(size + 2 * margin, size + 2 * margin, 3), dtype=np.uint8
    )
    offset = np.array([margin, margin], dtype=int)
    frames = []
    for i in range(n_frames):
        if i > 0:
            offset = offset + step * np.asarray(directions[(i - 1) % len(directions)])
        oy, ox = int(offset[0]), int(offset[1])
        rgba = np.empty((size, size, 4), dtype=np.uint8)
        rgba[:, :, :3] = big[oy : oy + size, ox : ox + size]
        rgba[:, :, 3] = 255
        frames.append(rgba)
    return frames


def _image_captions(idx: int) -> dict:
    return {
        "short": f"fixture scene {idx}",
        "medium": f"fixture scene {idx} with tiled props",
        "detailed": f"fixture scene {idx} with tiled props under flat studio light",
        "comprehensive": (
            f"fixture scene {idx} with tiled props under flat studio light, "
            "isometric angle, saturated palette, shallow depth"
        ),
    }


def _clip_captions(idx: int) -> dict:
    return {
        "long_visual": f"fixture clip {idx} showing a patterned wall",
        "long_motion": f"fixture clip {idx} with the wall drifting steadily",
        "short_visual": f"patterned wall {idx}",
        "short_motion": f"steady drift {idx}",
        "tags": ["fixture", f"clip-{idx}"],
    }


def _write_image(root: Path, idx: int, pixels: np.ndarray, sidecar: dict) -> None:
    stem = root / "images" / f"img_{idx:02d}"
    save_png(Rgba8Image(pixels), stem.with_suffix(".png"))
    stem.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def _write_video(root: Path, name: str, frames: list[np.ndarray], sidecar: dict) -> None:
    vdir = root / "videos" / name
    vdir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        save_png(Rgba8Image(frame), vdir / f"frame_{i:04d}.png")
    (root / "videos" / f"{name}.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )


def build_fixture_corpus(root, seed: int = 7) -> dict:
    """Write the corpus under `root`; returns asset counts."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "videos").mkdir(parents=True, exist_ok=True)

    idx = 0
    # 10 premium candidates: every gate passes, manual pass granted.
    for _ in range(10):
        sidecar = {"flags": {}, "manual_pass": True, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _palette_checker(1024, 1024, phase=idx), sidecar)
        idx += 1
    # 6 gold-only: machine gates pass, premium gate fails three ways.
    for i in range(6):
        flags = {}
        manual = False
        if i in (3, 4):
            flags = {"defect": True}
            manual = True
        elif i == 5:
            flags = {"aigc": True}
            manual = True
        sidecar = {"flags": flags, "manual_pass": manual, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _palette_checker(1024, 1024, phase=idx), sidecar)
        idx += 1
    # 8 bronze: good pattern but below the resolution gate.
    for _ in range(8):
        sidecar = {"flags": {}, "manual_pass": True, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _palette_checker(256, 256, phase=idx), sidecar)
        idx += 1
    # 2 bronze at the resolution edge (one dimension at 1023).
    for shape in ((1023, 1024), (1024, 1023)):
        sidecar = {"flags": {}, "manual_pass": True, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _palette_checker(*shape, phase=idx), sidecar)
        idx += 1
    # 2 bronze: sharp and large but machine-flagged.
    for flag in ("watermark", "ocr_text"):
        sidecar = {"flags": {flag: True}, "manual_pass": True, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _palette_checker(1024, 1024, phase=idx), sidecar)
        idx += 1
    # 2 bronze: colorful but too soft for the clarity gate.
    for _ in range(2):
        sidecar = {"flags": {}, "manual_pass": True, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _smooth_gradient(1024, 1024, phase=idx), sidecar)
        idx += 1
    # 10 rejected: grayscale content fails the style gate.
    for _ in range(10):
        sidecar = {"flags": {}, "manual_pass": False, "style": "other",
                   "captions": _image_captions(idx)}
        _write_image(root, idx, _gray_photo(512, 512, phase=idx), sidecar)
        idx += 1

    rng = np.random.default_rng(seed)
    vid = 0
    # Hard-cut fixture: three solid segments, cuts at 40 and 90.
    _write_video(root, f"vid_{vid:02d}", build_cut_video_frames(),
                 {"style": "2D", "captions": _clip_captions(vid), "flags": {}})
    vid += 1
    # Under-lit fixture: fails the luminance gate.
    dark = [_solid(FRAME_SIZE, FRAME_SIZE, (4, 4, 4)) for _ in range(12)]
    _write_video(root, f"vid_{vid:02d}", dark,
                 {"style": "2D", "captions": _clip_captions(vid), "flags": {}})
    vid += 1
    direction_cycles = (
        ((0, 1),),
        ((1, 0),),
        ((0, -1),),
        ((-1, 0),),
        ((0, 1), (1, 0)),
        ((0, 1), (0, -1), (1, 0), (-1, 0)),
    )
    for i in range(9):
        _write_video(
            root, f"vid_{vid:02d}",
            build_motion_video_frames(rng, directions=direction_cycles[i % len(direction_cycles)]),
            {"style": "2D", "captions": _clip_captions(vid), "flags": {}},
        )
        vid += 1
    for i in range(9):
        _write_video(
            root, f"vid_{vid:02d}",
            build_motion_video_frames(rng, directions=direction_cycles[(i + 3) % len(direction_cycles)]),
            {"style": "3D", "captions": _clip_captions(vid), "flags": {}},
        )
        vid += 1

    return {"images": idx, "videos": vid}
