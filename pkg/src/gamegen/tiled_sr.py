"""Patch-wise tiled denoising for video super-resolution.

The upscaled shape is covered by overlapping spatiotemporal windows; each
window is denoised independently, conditioned on the matching window of the
bilinearly upsampled low-resolution latent stacked along channels, and the
outputs are reassembled by per-cell averaging. Window noise is indexed by
absolute cell coordinates, so a single-window plan reproduces untiled
sampling bit-exactly.

Desk-scale default tile is (9, 96, 96) with overlap (1, 24, 24); the
documented production configuration is 129-frame, 768x768 windows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import LatentVolume
from .denoise import (
    ConditionBundle,
    DenoiserInterface,
    Schedule,
    ShapeMismatch,
    sample,
)
from .errors import GamegenError

DEFAULT_TILE = (9, 96, 96)
DEFAULT_OVERLAP = (1, 24, 24)
PRODUCTION_TILE = (129, 768, 768)


class InvalidOverlap(GamegenError):
    pass


class InvalidScale(GamegenError):
    pass


@dataclass(frozen=True)
class TileWindow:
    t0: int
    h0: int
    w0: int
    t_len: int
    h_len: int
    w_len: int

    @property
    def slices(self) -> tuple[slice, slice, slice]:
        return (
            slice(self.t0, self.t0 + self.t_len),
            slice(self.h0, self.h0 + self.h_len),
            slice(self.w0, self.w0 + self.w_len),
        )


@dataclass(frozen=True)
class TilePlan:
    windows: tuple[TileWindow, ...]
    tile: tuple[int, int, int]
    overlap: tuple[int, int, int]


def plan_axis(length: int, tile: int, overlap: int) -> list[int]:
    """Start offsets covering [0, length) with fixed-size windows.

    Regular stride tile-overlap, with the final window clamped to end
    exactly at `length`; a single full-axis window when length <= tile.
    """
    if tile < 1:
        raise InvalidOverlap(f"tile must be >= 1, got {tile}")
    if overlap < 0 or overlap >= tile:
        raise InvalidOverlap(f"overlap must satisfy 0 <= overlap < tile ({overlap} vs {tile})")
    if length <= tile:
        return [0]
    stride = tile - overlap
    starts = []
    s = 0
    while s + tile < length:
        starts.append(s)
        s += stride
    starts.append(length - tile)
    return sorted(dict.fromkeys(starts))


def make_plan(
    shape: tuple[int, int, int],
    tile: tuple[int, int, int] = DEFAULT_TILE,
    overlap: tuple[int, int, int] = DEFAULT_OVERLAP,
) -> TilePlan:
    """Cartesian product of per-axis window starts over a (t, h, w) shape."""
    starts = [plan_axis(length, t, o) for length, t, o in zip(shape, tile, overlap)]
    lens = [min(t, length) for length, t in zip(shape, tile)]
    windows = tuple(
        TileWindow(t0, h0, w0, lens[0], lens[1], lens[2])
        for t0, h0, w0 in itertools.product(*starts)
    )
    return TilePlan(windows, tuple(tile), tuple(overlap))


def coverage_counts(plan: TilePlan, shape: tuple[int, int, int]) -> np.ndarray:
    counts = np.zeros(shape, dtype=np.int64)
    for win in plan.windows:
        counts[win.slices] += 1
    return counts


def _interp_axis(arr: np.ndarray, axis: int, new_len: int) -> np.ndarray:
    old = arr.shape[axis]
    if new_len == old:
        return arr
    if old == 1:
        return np.repeat(arr, new_len, axis=axis)
    pos = np.arange(new_len) * ((old - 1) / (new_len - 1))
    i0 = np.minimum(np.floor(pos).astype(np.int64), old - 2)
    frac = pos - i0
    shape = [1] * arr.ndim
    shape[axis] = new_len
    frac = frac.reshape(shape)
    lo = np.take(arr, i0, axis=axis)
    hi = np.take(arr, i0 + 1, axis=axis)
    return lo + (hi - lo) * frac


def upsample(lr: LatentVolume, factor_h: int, factor_w: int) -> LatentVolume:
    """Separable bilinear upsampling with corner-aligned sampling; exact on
    per-axis linear ramps and the identity for factor 1."""
    if factor_h < 1 or factor_w < 1 or int(factor_h) != factor_h or int(factor_w) != factor_w:
        raise InvalidScale(f"factors must be integers >= 1, got ({factor_h}, {factor_w})")
    arr = lr.data.astype(np.float64)
    arr = _interp_axis(arr, 2, lr.height * int(factor_h))
    arr = _interp_axis(arr, 3, lr.width * int(factor_w))
    return LatentVolume._wrap(arr.astype(np.float32))


@dataclass(frozen=True)
class ConcatLayout:
    """Channel layout of the conditioned denoiser input: the noisy latent
    first, then the same number of condition channels (the upsampled
    low-resolution latent). Mirrors a backbone whose doubled input
    convolution keeps pretrained weights on the noisy half and zero-
    initializes the condition half."""

    order: tuple[str, str] = ("noisy", "condition")
    condition_source: str = "upsampled-low-resolution-latent"
    init_semantics: tuple[tuple[str, str], ...] = (
        ("noisy", "inherited"),
        ("condition", "zero-initialized"),
    )

    def concat(self, noisy: LatentVolume, condition: LatentVolume) -> LatentVolume:
        if noisy.shape != condition.shape:
            raise ShapeMismatch(
                f"noisy {noisy.shape} and condition {condition.shape} must match"
            )
        stacked = np.concatenate([noisy.data, condition.data], axis=0)
        assert stacked.shape[0] == 2 * noisy.channels
        return LatentVolume._wrap(stacked)

    def split(self, stacked: LatentVolume) -> tuple[LatentVolume, LatentVolume]:
        if stacked.channels % 2 != 0:
            raise ShapeMismatch(f"stacked channels {stacked.channels} not even")
        c = stacked.channels // 2
        return (
            LatentVolume._wrap(np.ascontiguousarray(stacked.data[:c])),
            LatentVolume._wrap(np.ascontiguousarray(stacked.data[c:])),
        )


DEFAULT_LAYOUT = ConcatLayout()


@dataclass
class ConditionTargetDenoiser:
    """Toy conditioned field: treats the condition half of the stacked
    input as the reconstruction target. Stands in for a perfect SR
    backbone and exercises the declared channel layout on every call."""

    layout: ConcatLayout = field(default_factory=ConcatLayout)
    last_input_channels: Optional[int] = None

    def velocity(self, x, t, cond=None) -> LatentVolume:
        if cond is None or cond.extra_channels is None:
            raise ShapeMismatch("ConditionTargetDenoiser needs cond.extra_channels")
        stacked = self.layout.concat(x, cond.extra_channels)
        self.last_input_channels = stacked.channels
        noisy, target = self.layout.split(stacked)
        return LatentVolume._wrap((noisy.data - target.data) / np.float32(t))


def crop(vol: LatentVolume, win: TileWindow) -> LatentVolume:
    return LatentVolume._wrap(
        np.ascontiguousarray(vol.data[(slice(None),) + win.slices])
    )


def _feather_weights(win: TileWindow, overlap: tuple[int, int, int]) -> np.ndarray:
    w = np.ones((win.t_len, win.h_len, win.w_len), dtype=np.float32)
    for axis, (length, ov) in enumerate(zip((win.t_len, win.h_len, win.w_len), overlap)):
        if ov < 1 or length < 2 * ov:
            continue
        ramp = np.ones(length, dtype=np.float32)
        edge = (np.arange(1, ov + 1, dtype=np.float32)) / (ov + 1)
        ramp[:ov] = edge
        ramp[length - ov :] = edge[::-1]
        shape = [1, 1, 1]
        shape[axis] = length
        w = w * ramp.reshape(shape)
    return w


def average_tiles(
    shape: tuple[int, int, int, int],
    pieces: Iterable[tuple[TileWindow, np.ndarray]],
    weights: Optional[Iterable[np.ndarray]] = None,
) -> LatentVolume:
    """Accumulate window outputs and divide by per-cell coverage. Addition
    is commutative per cell, so the result is independent of tile order."""
    acc = np.zeros(shape, dtype=np.float32)
    norm = np.zeros(shape[1:], dtype=np.float32)
    weights = list(weights) if weights is not None else None
    for idx, (win, data) in enumerate(pieces):
        w = weights[idx] if weights is not None else np.ones(
            (win.t_len, win.h_len, win.w_len), dtype=np.float32
        )
        acc[(slice(None),) + win.slices] += data * w[None]
        norm[win.slices] += w
    if norm.min() <= 0:
        raise InvalidOverlap("tile plan leaves uncovered cells")
    return LatentVolume._wrap(acc / norm[None])


def upscale_video(
    lr: LatentVolume,
    scale: int,
    denoiser: DenoiserInterface,
    schedule: Schedule,
    seed: int,
    tile: tuple[int, int, int] = DEFAULT_TILE,
    overlap: tuple[int, int, int] = DEFAULT_OVERLAP,
    feather: bool = False,
) -> LatentVolume:
    """Upsample the conditioning latent, denoise overlapping windows against
    their condition crop, and average the overlaps back together."""
    if scale not in (2, 4):
        raise InvalidScale(f"scale must be 2 or 4, got {scale}")
    hr_cond = upsample(lr, scale, scale)
    full_shape = (lr.channels, hr_cond.frames, hr_cond.height, hr_cond.width)
    plan = make_plan(full_shape[1:], tile, overlap)
    pieces = []
    weights = [] if feather else None
    for win in plan.windows:
        cond = ConditionBundle(extra_channels=crop(hr_cond, win))
        out = sample(
            denoiser,
            schedule,
            (lr.channels, win.t_len, win.h_len, win.w_len),
            seed,
            cond,
            noise_origin=(0, win.t0, win.h0, win.w0),
        )
        pieces.append((win, out.data))
        if feather:
            weights.append(_feather_weights(win, plan.overlap))
    return average_tiles(full_shape, pieces, weights)
