"""Frame-sequence analysis: shot boundaries from histogram distances,
motion segmentation from block-matching flow, and histogram quality
scores.

Frames are (h, w, 3) or (h, w, 4) uint8 arrays; alpha is ignored. Flow is
estimated by exhaustive SAD block matching (16x16 blocks, search radius 4),
a cheap deterministic stand-in for a learned flow network.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import GamegenError

HIST_BINS = 32
BLOCK_SIZE = 16
SEARCH_RADIUS = 4
DIRECTION_BINS = 8


class TooShort(GamegenError):
    pass


def _rgb(frame: np.ndarray) -> np.ndarray:
    if frame.ndim != 3 or frame.shape[2] < 3:
        raise TooShort(f"frame must be (h,w,3+) uint8, got {frame.shape}")
    return frame[:, :, :3]


def luma(frame: np.ndarray) -> np.ndarray:
    """Rec.601 luma in [0, 255]."""
    rgb = _rgb(frame).astype(np.float32)
    return 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]


def channel_histograms(frame: np.ndarray, bins: int = HIST_BINS) -> np.ndarray:
    """Normalized per-channel intensity histograms, shape (3, bins)."""
    rgb = _rgb(frame)
    width = 256 // bins
    out = np.empty((3, bins), dtype=np.float64)
    for c in range(3):
        counts = np.bincount((rgb[:, :, c] // width).reshape(-1), minlength=bins)
        out[c] = counts / counts.sum()
    return out


def chi2_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Chi-square histogram distance averaged over channels, in [0, 1]."""
    num = (h1 - h2) ** 2
    den = h1 + h2
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(0.5 * terms.sum(axis=1).mean())


def split_scenes(
    frames: Sequence[np.ndarray],
    cut_threshold: float = 0.5,
    min_len: int = 5,
    bins: int = HIST_BINS,
) -> list[tuple[int, int]]:
    """Partition [0, n) at hard cuts: a cut starts a new clip wherever the
    consecutive-frame histogram distance exceeds the threshold. Clips
    shorter than min_len merge into their successor (the trailing one
    merges backward)."""
    n = len(frames)
    if n < 2:
        raise TooShort(f"need at least 2 frames, got {n}")
    hists = [channel_histograms(f, bins) for f in frames]
    cuts = [
        i
        for i in range(1, n)
        if chi2_distance(hists[i - 1], hists[i]) > cut_threshold
    ]
    bounds = [0] + cuts + [n]
    clips = [(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    merged: list[tuple[int, int]] = []
    acc_start = clips[0][0]
    for start, end in clips:
        if end - acc_start >= min_len:
            merged.append((acc_start, end))
            acc_start = end
    if acc_start < n:
        if merged:
            last_start, _ = merged.pop()
            merged.append((last_start, n))
        else:
            merged.append((0, n))
    return merged


def block_flow(
    prev: np.ndarray,
    cur: np.ndarray,
    block: int = BLOCK_SIZE,
    radius: int = SEARCH_RADIUS,
) -> np.ndarray:
    """Per-block (dy, dx) displacement minimizing SAD, shape (by, bx, 2).

    Displacements are scanned nearest-first with strict improvement, so
    identical frames yield exactly zero flow.
    """
    g1 = luma(prev)
    g2 = luma(cur)
    h, w = g1.shape
    block = min(block, h, w)
    by, bx = h // block, w // block
    g1 = g1[: by * block, : bx * block]
    padded = np.pad(g2, radius, mode="edge")
    best_err = np.full((by, bx), np.inf, dtype=np.float64)
    best = np.zeros((by, bx, 2), dtype=np.float64)
    offsets = sorted(
        ((dy, dx) for dy in range(-radius, radius + 1) for dx in range(-radius, radius + 1)),
        key=lambda d: (d[0] * d[0] + d[1] * d[1], d[0], d[1]),
    )
    for dy, dx in offsets:
        window = padded[
            radius + dy : radius + dy + by * block,
            radius + dx : radius + dx + bx * block,
        ]
        err = (
            np.abs(g1 - window)
            .reshape(by, block, bx, block)
            .sum(axis=(1, 3))
        )
        better = err < best_err
        best_err = np.where(better, err, best_err)
        best[better] = (dy, dx)
    return best


def mean_flow_series(
    frames: Sequence[np.ndarray],
    block: int = BLOCK_SIZE,
    radius: int = SEARCH_RADIUS,
) -> np.ndarray:
    """Mean flow magnitude per consecutive frame pair, length n-1."""
    n = len(frames)
    if n < 2:
        raise TooShort(f"need at least 2 frames, got {n}")
    mags = []
    for i in range(1, n):
        flow = block_flow(frames[i - 1], frames[i], block, radius)
        mags.append(float(np.linalg.norm(flow, axis=2).mean()))
    return np.asarray(mags)


def motion_split(
    frames: Sequence[np.ndarray],
    grad_threshold: float = 0.5,
    block: int = BLOCK_SIZE,
    radius: int = SEARCH_RADIUS,
) -> list[tuple[int, int]]:
    """Partition a clip where the mean-flow series jumps: a change greater
    than the threshold between consecutive pairs marks a new action unit."""
    n = len(frames)
    if n < 3:
        raise TooShort(f"need at least 3 frames, got {n}")
    mu = mean_flow_series(frames, block, radius)
    bounds = [0]
    for i in range(len(mu) - 1):
        if abs(mu[i + 1] - mu[i]) > grad_threshold:
            boundary = i + 2  # first frame of the new motion regime
            if boundary > bounds[-1] and boundary < n:
                bounds.append(boundary)
    bounds.append(n)
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def luminance_quality(
    frames: Sequence[np.ndarray], bins: int = HIST_BINS, clip_bins: int = 2
) -> float:
    """1 minus the fraction of pixels in the darkest/brightest luma bins,
    averaged over frames and clamped to [0, 1]."""
    if not len(frames):
        raise TooShort("empty clip")
    width = 256 // bins
    fractions = []
    for frame in frames:
        bins_idx = (luma(frame) // width).astype(np.int64)
        clipped = (bins_idx < clip_bins) | (bins_idx >= bins - clip_bins)
        fractions.append(float(clipped.mean()))
    return float(min(1.0, max(0.0, 1.0 - float(np.mean(fractions)))))


def motion_richness(
    frames: Sequence[np.ndarray],
    fps: float = 8.0,
    block: int = BLOCK_SIZE,
    radius: int = SEARCH_RADIUS,
    direction_bins: int = DIRECTION_BINS,
) -> float:
    """Shannon entropy (bits) of the flow-direction histogram pooled over
    all blocks and frame pairs, per second of clip; zero-motion blocks do
    not vote and an empty histogram counts as zero entropy."""
    n = len(frames)
    if n < 2:
        raise TooShort(f"need at least 2 frames, got {n}")
    counts = np.zeros(direction_bins, dtype=np.int64)
    for i in range(1, n):
        flow = block_flow(frames[i - 1], frames[i], block, radius).reshape(-1, 2)
        mags = np.linalg.norm(flow, axis=1)
        moving = flow[mags > 0]
        if moving.size == 0:
            continue
        angles = np.arctan2(moving[:, 0], moving[:, 1])  # (dy, dx) -> angle
        idx = np.floor((angles + math.pi) / (2 * math.pi) * direction_bins).astype(int)
        idx = np.clip(idx, 0, direction_bins - 1)
        counts += np.bincount(idx, minlength=direction_bins)
    total = counts.sum()
    if total == 0:
        entropy = 0.0
    else:
        p = counts[counts > 0] / total
        entropy = float(-(p * np.log2(p)).sum())
    duration = n / fps
    return entropy / duration
