"""Denoising engine.

Integrates a pluggable velocity field from noise (t=1) down to data (t=0)
with explicit Euler steps, plus a masked variant that re-blends known cells
toward their noised value at every step. Noise is counter-based: the value
at a cell is a pure function of (seed, c, t, h, w), so a window of a large
grid sees exactly the noise the full grid would, regardless of evaluation
order or tiling.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Protocol, runtime_checkable

import numpy as np

from .core import BinaryMask, LatentVolume
from .errors import GamegenError

_MASK64 = (1 << 64) - 1
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_GAMMA = 0x9E3779B97F4A7C15
_U2_SALT = np.uint64(0x5851F42D4C957F2D)


class ShapeMismatch(GamegenError):
    pass


class BadSchedule(GamegenError):
    pass


def mix64(x: int) -> int:
    """SplitMix64 finalizer over plain ints (mod 2^64)."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _M1) & _MASK64
    x = ((x ^ (x >> 27)) * _M2) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, tag: int) -> int:
    """Deterministic sub-seed for an independent noise stream."""
    return mix64((seed & _MASK64) ^ mix64(tag + _GAMMA))


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_M1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class SeededNoise:
    """Standard-normal source keyed by (seed, c, t, h, w).

    Values are produced by hashing the absolute cell index, so any window
    of the grid can be generated independently via `origin`.
    """

    seed: int

    def array(
        self,
        shape: tuple[int, int, int, int],
        origin: tuple[int, int, int, int] = (0, 0, 0, 0),
    ) -> np.ndarray:
        base = np.uint64(mix64(self.seed & _MASK64) ^ _GAMMA & _MASK64)
        k = base
        for length, off, ndim in zip(shape, origin, range(4)):
            coords = np.arange(off, off + length, dtype=np.uint64)
            coords = coords.reshape([-1 if i == ndim else 1 for i in range(4)])
            k = _mix64_array(k ^ coords)
        u1 = ((k >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        k2 = _mix64_array(k ^ _U2_SALT)
        u2 = ((k2 >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return z.astype(np.float32)

    def volume(self, shape, origin=(0, 0, 0, 0)) -> LatentVolume:
        return LatentVolume._wrap(self.array(shape, origin))


@dataclass(frozen=True)
class Schedule:
    """Strictly decreasing integration times from exactly 1.0 to exactly 0.0."""

    times: tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        if len(ts) < 2:
            raise BadSchedule("schedule needs at least two times")
        if ts[0] != 1.0 or ts[-1] != 0.0:
            raise BadSchedule(f"endpoints must be 1.0 and 0.0, got {ts[0]}..{ts[-1]}")
        if any(a <= b for a, b in zip(ts, ts[1:])):
            raise BadSchedule("times must be strictly decreasing")
        object.__setattr__(self, "times", ts)

    @classmethod
    def uniform(cls, steps: int) -> "Schedule":
        if steps < 1:
            raise BadSchedule(f"steps must be >= 1, got {steps}")
        return cls(tuple((steps - k) / steps for k in range(steps + 1)))

    @property
    def steps(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class ConditionBundle:
    """Optional guidance inputs handed to the velocity field.

    `mask`/`known` describe frozen content (mask 1 = cell being synthesized),
    `extra_channels` carries channel-concat conditioning, `pluecker` the
    camera-ray field for the frames being denoised.
    """

    mask: Optional[BinaryMask] = None
    known: Optional[LatentVolume] = None
    extra_channels: Optional[LatentVolume] = None
    pluecker: Optional[LatentVolume] = None

    def __post_init__(self):
        if self.mask is not None:
            if self.known is None:
                raise ShapeMismatch("condition mask requires known content")
            if self.mask.shape != self.known.shape[1:]:
                raise ShapeMismatch(
                    f"mask {self.mask.shape} does not match known {self.known.shape}"
                )


@runtime_checkable
class DenoiserInterface(Protocol):
    """Velocity field: same-shaped output, deterministic for fixed inputs."""

    def velocity(
        self, x: LatentVolume, t: float, cond: Optional[ConditionBundle]
    ) -> LatentVolume: ...


@dataclass(frozen=True)
class ToyDenoiser:
    """Closed-form field (x - target)/t: Euler integration lands on `target`
    exactly for any schedule, which makes it the bit-testable oracle for
    every pipeline built on top of the sampler."""

    target: LatentVolume

    def velocity(self, x, t, cond=None) -> LatentVolume:
        if x.shape != self.target.shape:
            raise ShapeMismatch(f"input {x.shape} vs target {self.target.shape}")
        return LatentVolume._wrap((x.data - self.target.data) / np.float32(t))


@dataclass(frozen=True)
class SmoothTargetDenoiser:
    """Pulls synthesized cells toward a box-blurred copy of the known
    content, so inpainted bands bridge their surroundings smoothly.
    Requires cond.known (sample_inpaint provides it)."""

    radius: int = 3

    def velocity(self, x, t, cond=None) -> LatentVolume:
        if cond is None or cond.known is None:
            raise ShapeMismatch("SmoothTargetDenoiser needs cond.known")
        if cond.known.shape != x.shape:
            raise ShapeMismatch(f"known {cond.known.shape} vs input {x.shape}")
        target = _box_blur(cond.known.data, self.radius)
        return LatentVolume._wrap((x.data - target) / np.float32(t))


def _box_blur(arr: np.ndarray, radius: int) -> np.ndarray:
    out = arr.astype(np.float32)
    for axis in (2, 3):
        if arr.shape[axis] == 1 or radius < 1:
            continue
        acc = out.copy()
        count = np.ones_like(out)
        for d in range(1, radius + 1):
            for sign in (-1, 1):
                shifted = np.roll(out, sign * d, axis=axis)
                # clamp instead of wrapping at the edges
                idx = [slice(None)] * 4
                if sign == 1:
                    idx[axis] = slice(0, d)
                else:
                    idx[axis] = slice(arr.shape[axis] - d, None)
                shifted[tuple(idx)] = 0.0
                valid = np.ones_like(out)
                valid[tuple(idx)] = 0.0
                acc = acc + shifted
                count = count + valid
        out = acc / count
    return out


def _check_velocity(v: LatentVolume, shape: tuple[int, int, int, int]) -> None:
    if v.shape != shape:
        raise ShapeMismatch(f"velocity shape {v.shape} != state shape {shape}")


def sample(
    denoiser: DenoiserInterface,
    schedule: Schedule,
    shape: tuple[int, int, int, int],
    seed: int,
    cond: Optional[ConditionBundle] = None,
    *,
    noise_origin: tuple[int, int, int, int] = (0, 0, 0, 0),
    on_step: Optional[Callable[[float, LatentVolume], None]] = None,
) -> LatentVolume:
    """Euler-integrate the velocity field from seeded noise at t=1 to t=0.

    `noise_origin` offsets the noise indices, letting a window of a larger
    volume start from exactly the noise the full volume would see there.
    """
    x = SeededNoise(seed).array(shape, noise_origin)
    for t_k, t_next in zip(schedule.times[:-1], schedule.times[1:]):
        v = denoiser.velocity(LatentVolume._wrap(x), t_k, cond)
        _check_velocity(v, tuple(shape))
        x = x - np.float32(t_k - t_next) * v.data
        if on_step is not None:
            on_step(t_next, LatentVolume._wrap(x))
    return LatentVolume(x)


def sample_inpaint(
    denoiser: DenoiserInterface,
    schedule: Schedule,
    known: LatentVolume,
    mask: BinaryMask,
    seed: int,
    cond: Optional[ConditionBundle] = None,
    *,
    noise_origin: tuple[int, int, int, int] = (0, 0, 0, 0),
    on_step: Optional[Callable[[float, LatentVolume], None]] = None,
) -> LatentVolume:
    """Masked sampling: mask==1 cells are synthesized, mask==0 cells are
    re-blended to s*eps + (1-s)*known after every step landing at time s,
    which leaves them bit-equal to `known` at s=0."""
    if mask.shape != known.shape[1:]:
        raise ShapeMismatch(f"mask {mask.shape} vs known {known.shape}")
    shape = known.shape
    keep = (mask.bits == 0)[None, :, :, :]
    eps_known = SeededNoise(derive_seed(seed, 0x6B65_6570)).array(shape, noise_origin)
    if cond is None:
        cond = ConditionBundle(mask=mask, known=known)
    else:
        cond = replace(cond, mask=mask, known=known)
    x = SeededNoise(seed).array(shape, noise_origin)
    for t_k, t_next in zip(schedule.times[:-1], schedule.times[1:]):
        v = denoiser.velocity(LatentVolume._wrap(x), t_k, cond)
        _check_velocity(v, tuple(shape))
        x = x - np.float32(t_k - t_next) * v.data
        if t_next == 0.0:
            x = np.where(keep, known.data, x)
        else:
            s = np.float32(t_next)
            renoised = s * eps_known + (np.float32(1.0) - s) * known.data
            x = np.where(keep, renoised, x)
        if on_step is not None:
            on_step(t_next, LatentVolume._wrap(x))
    return LatentVolume(x)
