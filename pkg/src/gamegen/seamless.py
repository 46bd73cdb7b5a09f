"""Wrap-tileable texture synthesis.

The wrap seam of an image maps to its midline after swapping the two
halves along an axis; inpainting a band centered on that midline and
swapping back yields a texture whose opposite edges continue each other.
Both-direction textures run the horizontal pass first, then the vertical
pass on its output, so the second band crosses (and repairs) the corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import BinaryMask, LatentVolume, Rgba8Image, decode, encode
from .denoise import DenoiserInterface, Schedule, derive_seed, sample_inpaint
from .errors import GamegenError

AXIS_HEIGHT = 2
AXIS_WIDTH = 3


class OddDimension(GamegenError):
    pass


class BandTooWide(GamegenError):
    pass


class SeamDirection(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    BOTH = "both"


@dataclass(frozen=True)
class SeamSpec:
    direction: SeamDirection = SeamDirection.HORIZONTAL
    band_width: int = 8

    def __post_init__(self):
        if self.band_width < 2 or self.band_width % 2 != 0:
            raise BandTooWide(
                f"band width must be an even count >= 2, got {self.band_width}"
            )

    @property
    def axes(self) -> tuple[int, ...]:
        if self.direction == SeamDirection.HORIZONTAL:
            return (AXIS_WIDTH,)
        if self.direction == SeamDirection.VERTICAL:
            return (AXIS_HEIGHT,)
        return (AXIS_WIDTH, AXIS_HEIGHT)


def swap_halves(vol: LatentVolume, axis: int) -> LatentVolume:
    """Exchange the two halves along `axis`: out[i] = in[(i + D/2) mod D]."""
    if axis not in (AXIS_HEIGHT, AXIS_WIDTH):
        raise ValueError(f"axis must be {AXIS_HEIGHT} (height) or {AXIS_WIDTH} (width)")
    d = vol.shape[axis]
    if d % 2 != 0:
        raise OddDimension(f"dimension {d} along axis {axis} is odd")
    return LatentVolume._wrap(np.roll(vol.data, -(d // 2), axis=axis))


def _axis_band(h: int, w: int, axis: int, band: int, frames: int) -> np.ndarray:
    bits = np.zeros((frames, h, w), dtype=np.uint8)
    if axis == AXIS_WIDTH:
        if band >= w:
            raise BandTooWide(f"band {band} must be narrower than width {w}")
        bits[:, :, w // 2 - band // 2 : w // 2 + band // 2] = 1
    else:
        if band >= h:
            raise BandTooWide(f"band {band} must be narrower than height {h}")
        bits[:, h // 2 - band // 2 : h // 2 + band // 2, :] = 1
    return bits


def band_mask(h: int, w: int, spec: SeamSpec, frames: int = 1) -> BinaryMask:
    """Synthesis mask for the mid-image seam band (1 = inpainted)."""
    bits = np.zeros((frames, h, w), dtype=np.uint8)
    for axis in spec.axes:
        bits |= _axis_band(h, w, axis, spec.band_width, frames)
    return BinaryMask(bits)


def seam_region(h: int, w: int, spec: SeamSpec, frames: int = 1) -> BinaryMask:
    """The band mapped back to input coordinates: the pixels near the wrap
    edges that make_seamless is allowed to touch."""
    bits = np.zeros((frames, h, w), dtype=np.uint8)
    half = spec.band_width // 2
    for axis in spec.axes:
        if axis == AXIS_WIDTH:
            bits[:, :, :half] = 1
            bits[:, :, w - half :] = 1
        else:
            bits[:, :half, :] = 1
            bits[:, h - half :, :] = 1
    return BinaryMask(bits)


def make_seamless(
    image: Rgba8Image,
    spec: SeamSpec,
    denoiser: DenoiserInterface,
    schedule: Schedule,
    seed: int,
) -> Rgba8Image:
    """Swap halves, inpaint the midline band, swap back; one pass per
    active axis. Pixels outside seam_region come back bit-equal."""
    vol = encode(image)
    h, w = image.height, image.width
    for pass_idx, axis in enumerate(spec.axes):
        swapped = swap_halves(vol, axis)
        mask = BinaryMask(_axis_band(h, w, axis, spec.band_width, 1))
        filled = sample_inpaint(
            denoiser, schedule, swapped, mask, derive_seed(seed, pass_idx)
        )
        vol = swap_halves(filled, axis)
    return decode(vol)
