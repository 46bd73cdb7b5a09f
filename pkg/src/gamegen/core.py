"""Value containers and lossless I/O.

A LatentVolume is an immutable 4-D float32 grid laid out (channels, frames,
height, width); images are volumes with frames == 1. Pixels and latents are
interchanged through an exact byte<->real codec (b/255 and back), so every
downstream transform stays bit-testable. Volumes persist in the FGLV
container, images as PNG.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GamegenError

FGLV_MAGIC = b"FGLV"
FGLV_VERSION = 1
_HEADER = struct.Struct("<4sI4I")  # magic, version, (c, t, h, w), all little-endian


class WrongShape(GamegenError):
    pass


class BadMagic(GamegenError):
    pass


class DimMismatch(GamegenError):
    pass


class TruncatedPayload(GamegenError):
    pass


@dataclass(frozen=True)
class LatentVolume:
    """Immutable (c, t, h, w) float32 grid.

    The backing array is copied on construction and marked read-only;
    values must be finite and every dimension >= 1.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float32, order="C", copy=True)
        self._validate(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @staticmethod
    def _validate(arr: np.ndarray) -> None:
        if arr.ndim != 4:
            raise WrongShape(f"expected 4-D (c,t,h,w) data, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise WrongShape(f"every dimension must be >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise WrongShape("volume entries must be finite")

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "LatentVolume":
        # Trusted fast path for freshly computed arrays: takes ownership, no copy.
        out = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        cls._validate(arr)
        arr.flags.writeable = False
        object.__setattr__(out, "data", arr)
        return out

    @classmethod
    def zeros(cls, shape: tuple[int, int, int, int]) -> "LatentVolume":
        return cls._wrap(np.zeros(shape, dtype=np.float32))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def frames(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]


@dataclass(frozen=True)
class BinaryMask:
    """(frames, height, width) grid of {0, 1} bytes."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bits, dtype=np.uint8, order="C", copy=True)
        if arr.ndim != 3:
            raise WrongShape(f"expected 3-D (t,h,w) mask, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise WrongShape(f"every dimension must be >= 1, got {arr.shape}")
        if arr.size and arr.max() > 1:
            raise WrongShape("mask entries must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.bits.shape  # type: ignore[return-value]

    @property
    def frames(self) -> int:
        return self.bits.shape[0]

    @property
    def height(self) -> int:
        return self.bits.shape[1]

    @property
    def width(self) -> int:
        return self.bits.shape[2]

    def inverted(self) -> "BinaryMask":
        return BinaryMask(1 - self.bits)


@dataclass(frozen=True)
class Rgba8Image:
    """(height, width, 4) uint8 RGBA image."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.uint8, order="C", copy=True)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise WrongShape(f"expected (h,w,4) pixels, got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise WrongShape(f"image dimensions must be >= 1, got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def encode(image: Rgba8Image) -> LatentVolume:
    """Map an RGBA image to a (4, 1, h, w) volume; byte b becomes b/255."""
    arr = image.pixels.astype(np.float32) / np.float32(255.0)
    vol = np.ascontiguousarray(np.transpose(arr, (2, 0, 1))[:, None, :, :])
    return LatentVolume._wrap(vol)


def decode(vol: LatentVolume) -> Rgba8Image:
    """Inverse of encode: real r becomes round(clamp(r, 0, 1) * 255)."""
    if vol.channels != 4 or vol.frames != 1:
        raise WrongShape(
            f"decode needs a (4,1,h,w) volume, got {vol.shape}"
        )
    scaled = np.clip(vol.data[:, 0], 0.0, 1.0) * np.float32(255.0)
    bytes_ = np.rint(scaled).astype(np.uint8)
    pixels = np.ascontiguousarray(np.transpose(bytes_, (1, 2, 0)))
    return Rgba8Image(pixels)


def decode_frame(vol: LatentVolume, frame: int) -> Rgba8Image:
    """Decode a single frame of a 4-channel video volume."""
    if vol.channels != 4:
        raise WrongShape(f"decode_frame needs 4 channels, got {vol.channels}")
    single = LatentVolume._wrap(np.ascontiguousarray(vol.data[:, frame : frame + 1]))
    return decode(single)


def save_volume(vol: LatentVolume, path) -> None:
    c, t, h, w = vol.shape
    header = _HEADER.pack(FGLV_MAGIC, FGLV_VERSION, c, t, h, w)
    payload = np.ascontiguousarray(vol.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def load_volume(path) -> LatentVolume:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise TruncatedPayload(f"file shorter than header ({len(blob)} bytes)")
    magic, version, c, t, h, w = _HEADER.unpack_from(blob)
    if magic != FGLV_MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != FGLV_VERSION:
        raise BadMagic(f"unsupported container version {version}")
    if min(c, t, h, w) == 0:
        raise DimMismatch(f"zero dimension in header ({c},{t},{h},{w})")
    expected = 4 * c * t * h * w
    payload = blob[_HEADER.size :]
    if len(payload) < expected:
        raise TruncatedPayload(
            f"payload {len(payload)} bytes, expected {expected}"
        )
    if len(payload) > expected:
        raise DimMismatch(
            f"payload {len(payload)} bytes exceeds header dims ({expected})"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(c, t, h, w)
    return LatentVolume._wrap(arr.astype(np.float32))


def load_png(path) -> Rgba8Image:
    from PIL import Image

    with Image.open(path) as im:
        rgba = im.convert("RGBA")
        return Rgba8Image(np.asarray(rgba, dtype=np.uint8))


def save_png(image: Rgba8Image, path) -> None:
    from PIL import Image

    Image.fromarray(image.pixels, mode="RGBA").save(path, format="PNG")


def png_bytes(image: Rgba8Image) -> bytes:
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(image.pixels, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


def png_from_bytes(blob: bytes) -> Rgba8Image:
    import io

    from PIL import Image

    with Image.open(io.BytesIO(blob)) as im:
        rgba = im.convert("RGBA")
        return Rgba8Image(np.asarray(rgba, dtype=np.uint8))
