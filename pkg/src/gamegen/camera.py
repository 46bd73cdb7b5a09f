"""Keyboard actions, 6-DoF camera poses, and per-pixel ray embeddings.

Convention (declared once, asserted everywhere): right-handed world with y
up; the camera looks down its -z axis; yaw is positive turning right
(about world up), pitch positive looking up (about camera right), roll is
always zero; pixel rays are sampled at pixel centers, with image v growing
downward.

W/A/S/D translate along the current heading, the arrow keys change the
view angles, Space is a ballistic vertical hop that returns to its
baseline. Each key expands to a fixed number of frames with pre-declared
speed and turn rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import LatentVolume
from .errors import GamegenError

PITCH_LIMIT = math.pi / 2 - 1e-6

TRAJECTORY_HEADER = "# t r00 r01 r02 r10 r11 r12 r20 r21 r22 cx cy cz fx fy cx cy"

DEFAULT_INTRINSICS = (64.0, 64.0, 32.0, 32.0)


class EmptyKeyList(GamegenError):
    pass


class UnknownKey(GamegenError):
    pass


class DegenerateIntrinsics(GamegenError):
    pass


class NonDivisibleShape(GamegenError):
    pass


class BadPose(GamegenError):
    pass


class ActionKey(str, Enum):
    W = "W"
    A = "A"
    S = "S"
    D = "D"
    UP = "Up"
    LEFT = "Left"
    DOWN = "Down"
    RIGHT = "Right"
    SPACE = "Space"

    @classmethod
    def parse(cls, token: str) -> "ActionKey":
        aliases = {
            "↑": cls.UP, "←": cls.LEFT, "↓": cls.DOWN, "→": cls.RIGHT,
            " ": cls.SPACE,
            "arrowup": cls.UP, "arrowleft": cls.LEFT,
            "arrowdown": cls.DOWN, "arrowright": cls.RIGHT,
        }
        if token in aliases:
            return aliases[token]
        low = token.strip().lower()
        if low in aliases:
            return aliases[low]
        for key in cls:
            if key.value.lower() == low:
                return key
        raise UnknownKey(f"unknown action key {token!r}")


TRANSLATION_KEYS = {ActionKey.W, ActionKey.A, ActionKey.S, ActionKey.D}
VIEW_KEYS = {ActionKey.UP, ActionKey.LEFT, ActionKey.DOWN, ActionKey.RIGHT}


@dataclass(frozen=True)
class MotionParams:
    speed: float = 0.1            # world units per frame
    yaw_rate: float = math.pi / 64    # radians per frame
    pitch_rate: float = math.pi / 64  # radians per frame
    jump_height: float = 0.5      # world units at arc peak
    gravity: float = 0.2          # world units per frame^2 (reserved)
    segment_frames: int = 8       # frames emitted per key press

    def __post_init__(self):
        if self.speed <= 0 or self.yaw_rate <= 0 or self.pitch_rate <= 0:
            raise BadPose("speed and turn rates must be positive")
        if self.segment_frames < 1:
            raise BadPose(f"segment_frames must be >= 1, got {self.segment_frames}")


def rotation_from_yaw_pitch(yaw: float, pitch: float) -> np.ndarray:
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    r_yaw = np.array([[cy, 0.0, -sy], [0.0, 1.0, 0.0], [sy, 0.0, cy]])
    r_pitch = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    return r_yaw @ r_pitch


def orthonormalize(rot: np.ndarray) -> np.ndarray:
    """Gram-Schmidt re-orthonormalization of a near-rotation matrix."""
    a, b, c = rot[:, 0], rot[:, 1], rot[:, 2]
    a = a / np.linalg.norm(a)
    b = b - (b @ a) * a
    b = b / np.linalg.norm(b)
    c = c - (c @ a) * a - (c @ b) * b
    c = c / np.linalg.norm(c)
    return np.stack([a, b, c], axis=1)


@dataclass(frozen=True)
class CameraPose:
    """Camera-to-world rotation, world-space center, pinhole intrinsics."""

    rotation: np.ndarray
    center: np.ndarray
    intrinsics: tuple[float, float, float, float] = DEFAULT_INTRINSICS

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=np.float64, copy=True)
        ctr = np.array(self.center, dtype=np.float64, copy=True)
        if rot.shape != (3, 3) or ctr.shape != (3,):
            raise BadPose(f"rotation {rot.shape} / center {ctr.shape} malformed")
        if not np.allclose(rot.T @ rot, np.eye(3), atol=1e-6):
            raise BadPose("rotation is not orthonormal within 1e-6")
        if not math.isclose(float(np.linalg.det(rot)), 1.0, abs_tol=1e-6):
            raise BadPose("rotation determinant must be +1")
        rot.flags.writeable = False
        ctr.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "center", ctr)
        object.__setattr__(self, "intrinsics", tuple(float(v) for v in self.intrinsics))

    @classmethod
    def looking(
        cls,
        yaw: float = 0.0,
        pitch: float = 0.0,
        center: Sequence[float] = (0.0, 0.0, 0.0),
        intrinsics: tuple[float, float, float, float] = DEFAULT_INTRINSICS,
    ) -> "CameraPose":
        return cls(rotation_from_yaw_pitch(yaw, pitch), np.asarray(center, dtype=np.float64), intrinsics)

    @property
    def forward(self) -> np.ndarray:
        return self.rotation @ np.array([0.0, 0.0, -1.0])

    @property
    def right(self) -> np.ndarray:
        return self.rotation @ np.array([1.0, 0.0, 0.0])

    @property
    def up(self) -> np.ndarray:
        return self.rotation @ np.array([0.0, 1.0, 0.0])

    def yaw_pitch(self) -> tuple[float, float]:
        f = self.forward
        pitch = math.asin(max(-1.0, min(1.0, f[1])))
        yaw = math.atan2(f[0], -f[2])
        return yaw, pitch


@dataclass(frozen=True)
class CameraTrajectory:
    poses: tuple[CameraPose, ...]

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        if not self.poses:
            raise BadPose("trajectory needs at least one pose")

    @property
    def frame_count(self) -> int:
        return len(self.poses)

    def extended(self, more: Iterable[CameraPose]) -> "CameraTrajectory":
        return CameraTrajectory(self.poses + tuple(more))

    def to_lines(self) -> list[str]:
        lines = [TRAJECTORY_HEADER]
        lines.extend(pose_line(i, p) for i, p in enumerate(self.poses))
        return lines

    def save_text(self, path) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "CameraTrajectory":
        poses = []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            poses.append(parse_pose_line(line))
        return cls(tuple(poses))

    @classmethod
    def load_text(cls, path) -> "CameraTrajectory":
        return cls.from_lines(Path(path).read_text().splitlines())


def pose_line(frame: int, pose: CameraPose) -> str:
    vals = list(pose.rotation.reshape(-1)) + list(pose.center) + list(pose.intrinsics)
    return " ".join([str(frame)] + [repr(float(v)) for v in vals])


def pose_line_range(trajectory: "CameraTrajectory", start: int, end: int) -> list[str]:
    """Trajectory text lines for frames [start, end)."""
    return [pose_line(i, trajectory.poses[i]) for i in range(start, end)]


def parse_pose_line(line: str) -> CameraPose:
    parts = line.split()
    if len(parts) != 17:
        raise BadPose(f"trajectory line needs 17 fields, got {len(parts)}")
    vals = [float(v) for v in parts[1:]]
    rot = orthonormalize(np.array(vals[:9]).reshape(3, 3))
    return CameraPose(rot, np.array(vals[9:12]), tuple(vals[12:16]))


def fold_actions(
    start: CameraPose, keys: Sequence[ActionKey], params: MotionParams
) -> CameraTrajectory:
    """Expand key presses into per-frame poses, starting from `start` as
    frame 0. Translations follow the heading current at each frame; view
    keys integrate yaw/pitch per frame with the pitch clamped strictly
    inside +-pi/2; Space follows a symmetric parabolic arc that lands back
    on its segment's starting height."""
    if not keys:
        raise EmptyKeyList("no keys to fold")
    keys = [k if isinstance(k, ActionKey) else ActionKey.parse(k) for k in keys]
    yaw, pitch = start.yaw_pitch()
    center = np.array(start.center, dtype=np.float64)
    poses = [start]
    f_count = params.segment_frames
    for key in keys:
        base_y = center[1]
        for k in range(1, f_count + 1):
            if key in TRANSLATION_KEYS:
                rot = rotation_from_yaw_pitch(yaw, pitch)
                fwd = rot @ np.array([0.0, 0.0, -1.0])
                rgt = rot @ np.array([1.0, 0.0, 0.0])
                step = {
                    ActionKey.W: params.speed * fwd,
                    ActionKey.S: -params.speed * fwd,
                    ActionKey.A: -params.speed * rgt,
                    ActionKey.D: params.speed * rgt,
                }[key]
                center = center + step
            elif key == ActionKey.LEFT:
                yaw -= params.yaw_rate
            elif key == ActionKey.RIGHT:
                yaw += params.yaw_rate
            elif key == ActionKey.UP:
                pitch = min(pitch + params.pitch_rate, PITCH_LIMIT)
            elif key == ActionKey.DOWN:
                pitch = max(pitch - params.pitch_rate, -PITCH_LIMIT)
            elif key == ActionKey.SPACE:
                frac = k / f_count
                center = center.copy()
                center[1] = base_y + params.jump_height * 4.0 * frac * (1.0 - frac)
            poses.append(
                CameraPose(
                    rotation_from_yaw_pitch(yaw, pitch),
                    center.copy(),
                    start.intrinsics,
                )
            )
    return CameraTrajectory(tuple(poses))


def pluecker_field(pose: CameraPose, h: int, w: int) -> np.ndarray:
    """Per-pixel oriented-line embedding, channels (m_x, m_y, m_z, d_x,
    d_y, d_z) with d the unit ray direction and m = center x d. Computed
    and returned in float64; casts to float32 only at the volume/export
    boundary (pluecker_stack)."""
    fx, fy, cx, cy = pose.intrinsics
    if fx == 0 or fy == 0:
        raise DegenerateIntrinsics(f"fx/fy must be nonzero, got ({fx}, {fy})")
    xs = (np.arange(w, dtype=np.float64) + 0.5 - cx) / fx
    ys = -(np.arange(h, dtype=np.float64) + 0.5 - cy) / fy
    dirs = np.empty((3, h, w), dtype=np.float64)
    dirs[0] = xs[None, :]
    dirs[1] = ys[:, None]
    dirs[2] = -1.0
    d_world = np.einsum("ij,jhw->ihw", pose.rotation, dirs)
    d_world = d_world / np.linalg.norm(d_world, axis=0, keepdims=True)
    c = pose.center
    m = np.empty_like(d_world)
    m[0] = c[1] * d_world[2] - c[2] * d_world[1]
    m[1] = c[2] * d_world[0] - c[0] * d_world[2]
    m[2] = c[0] * d_world[1] - c[1] * d_world[0]
    return np.concatenate([m, d_world], axis=0)


def pluecker_stack(poses: Sequence[CameraPose], h: int, w: int) -> LatentVolume:
    """Stack per-frame embeddings into a (6, frames, h, w) float32 volume."""
    fields = [pluecker_field(p, h, w) for p in poses]
    return LatentVolume._wrap(np.stack(fields, axis=1).astype(np.float32))


def compress_actions(
    field: LatentVolume,
    spatial_factor: int = 8,
    temporal_factor: int = 4,
    pad: bool = False,
    zero_init: bool = False,
) -> LatentVolume:
    """Average-pool the ray field over (temporal x spatial x spatial)
    blocks, standing in for the learned action encoder's compression
    contract. `zero_init` returns an all-zero volume of the contracted
    shape, modeling the encoder before any training."""
    fs, ft = int(spatial_factor), int(temporal_factor)
    if fs < 1 or ft < 1:
        raise NonDivisibleShape(f"factors must be >= 1, got fs={fs} ft={ft}")
    c, f, h, w = field.shape
    if pad:
        f2 = -(-f // ft) * ft
        h2 = -(-h // fs) * fs
        w2 = -(-w // fs) * fs
    else:
        for name, dim, factor in (("frames", f, ft), ("height", h, fs), ("width", w, fs)):
            if dim % factor != 0:
                raise NonDivisibleShape(
                    f"{name}={dim} not divisible by factor {factor} (padding disabled)"
                )
        f2, h2, w2 = f, h, w
    out_shape = (c, f2 // ft, h2 // fs, w2 // fs)
    if zero_init:
        return LatentVolume.zeros(out_shape)
    arr = field.data
    if (f2, h2, w2) != (f, h, w):
        arr = np.pad(arr, ((0, 0), (0, f2 - f), (0, h2 - h), (0, w2 - w)), mode="edge")
    pooled = arr.reshape(c, f2 // ft, ft, h2 // fs, fs, w2 // fs, fs).mean(axis=(2, 4, 6))
    return LatentVolume._wrap(pooled.astype(np.float32))


def estimate_trajectory_from_video(volume: LatentVolume) -> CameraTrajectory:
    """Placeholder for learned 6-DoF trajectory reconstruction from video;
    not available in this toolkit."""
    raise NotImplementedError(
        "trajectory reconstruction from video requires an external estimator"
    )
