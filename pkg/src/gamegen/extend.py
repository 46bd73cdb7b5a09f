"""Autoregressive timeline extension and loop clips.

A session owns a growing latent timeline paired with a camera trajectory.
Each extension folds key presses into new poses, compresses their ray
field into action conditioning, and denoises (history head + new frames)
jointly along the time axis: head frames carry mask 1 and are re-frozen at
every step, new frames carry mask 0 and are synthesized. The sampler's
inpaint convention is inverted (1 = synthesize), so HybridInput converts
explicitly. Loop clips pin the first and last frame to the same encoded
image, which makes them bit-identical in the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .camera import (
    ActionKey,
    CameraPose,
    CameraTrajectory,
    EmptyKeyList,
    MotionParams,
    fold_actions,
    pluecker_stack,
    compress_actions,
)
from .core import (
    BinaryMask,
    LatentVolume,
    Rgba8Image,
    encode,
    load_volume,
    save_volume,
)
from .denoise import (
    ConditionBundle,
    DenoiserInterface,
    Schedule,
    derive_seed,
    sample_inpaint,
)
from .errors import GamegenError

_SEGMENT_TAG = 0x5345_474D


class InvalidKind(GamegenError):
    pass


class TooFewFrames(GamegenError):
    pass


class EmptySession(GamegenError):
    pass


@dataclass(frozen=True)
class SingleFrame:
    """Condition on the most recent frame only."""


@dataclass(frozen=True)
class PreviousLatents:
    """Condition on the last `count` frames."""

    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidKind(f"previous-latents count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class FullClip:
    """Condition on the entire timeline so far."""


ConditionKind = Union[SingleFrame, PreviousLatents, FullClip]


def head_length(kind: ConditionKind, history: int) -> int:
    if history < 1:
        raise InvalidKind("session has no history frames")
    if isinstance(kind, SingleFrame):
        return 1
    if isinstance(kind, PreviousLatents):
        if kind.count > history:
            raise InvalidKind(
                f"previous-latents count {kind.count} exceeds history {history}"
            )
        return kind.count
    if isinstance(kind, FullClip):
        return history
    raise InvalidKind(f"unknown condition kind {kind!r}")


def format_condition_kind(kind: ConditionKind) -> str:
    if isinstance(kind, SingleFrame):
        return "single_frame"
    if isinstance(kind, PreviousLatents):
        return f"previous:{kind.count}"
    if isinstance(kind, FullClip):
        return "full_clip"
    raise InvalidKind(f"unknown condition kind {kind!r}")


def parse_condition_kind(text: str) -> ConditionKind:
    text = text.strip().lower()
    if text == "single_frame":
        return SingleFrame()
    if text == "full_clip":
        return FullClip()
    if text.startswith("previous:"):
        try:
            return PreviousLatents(int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise InvalidKind(f"bad previous-latents count in {text!r}") from exc
    raise InvalidKind(f"unknown condition kind {text!r}")


@dataclass(frozen=True)
class HybridInput:
    """Head + new frames with the history mask (1 = history, 0 = to denoise);
    whole frames only, history strictly leading."""

    latents: LatentVolume
    mask: BinaryMask
    head_frames: int
    new_frames: int

    def __post_init__(self):
        if self.latents.frames != self.head_frames + self.new_frames:
            raise InvalidKind("latent frames must equal head + new frames")
        if self.mask.shape != self.latents.shape[1:]:
            raise InvalidKind("mask shape must match latents")
        bits = self.mask.bits
        per_frame = bits.reshape(bits.shape[0], -1)
        if not ((per_frame == per_frame[:, :1]).all()):
            raise InvalidKind("history mask must be constant per frame")
        frame_flags = per_frame[:, 0]
        expected = np.concatenate(
            [np.ones(self.head_frames, dtype=np.uint8), np.zeros(self.new_frames, dtype=np.uint8)]
        )
        if not np.array_equal(frame_flags, expected):
            raise InvalidKind("mask must be 1 on head frames, 0 on trailing new frames")

    def inpaint_mask(self) -> BinaryMask:
        """Adapter to the sampler's convention (1 = synthesize)."""
        return self.mask.inverted()


@dataclass(frozen=True)
class SessionConfig:
    motion: MotionParams = field(default_factory=MotionParams)
    steps: int = 8
    seed: int = 0
    kind: ConditionKind = field(default_factory=SingleFrame)
    denoiser: str = "repeat-last"
    spatial_factor: int = 8
    temporal_factor: int = 4

    def schedule(self) -> Schedule:
        return Schedule.uniform(self.steps)

    def to_dict(self) -> dict:
        return {
            "motion": {
                "speed": self.motion.speed,
                "yaw_rate": self.motion.yaw_rate,
                "pitch_rate": self.motion.pitch_rate,
                "jump_height": self.motion.jump_height,
                "gravity": self.motion.gravity,
                "segment_frames": self.motion.segment_frames,
            },
            "steps": self.steps,
            "seed": self.seed,
            "kind": format_condition_kind(self.kind),
            "denoiser": self.denoiser,
            "spatial_factor": self.spatial_factor,
            "temporal_factor": self.temporal_factor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        motion = MotionParams(**data.get("motion", {}))
        return cls(
            motion=motion,
            steps=int(data.get("steps", 8)),
            seed=int(data.get("seed", 0)),
            kind=parse_condition_kind(data.get("kind", "single_frame")),
            denoiser=data.get("denoiser", "repeat-last"),
            spatial_factor=int(data.get("spatial_factor", 8)),
            temporal_factor=int(data.get("temporal_factor", 4)),
        )


@dataclass(frozen=True)
class SegmentRecord:
    keys: tuple[ActionKey, ...]
    start: int
    end: int
    kind: ConditionKind


@dataclass(frozen=True)
class SessionState:
    timeline: LatentVolume
    trajectory: CameraTrajectory
    config: SessionConfig
    segments: tuple[SegmentRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.timeline.frames != self.trajectory.frame_count:
            raise InvalidKind(
                f"timeline frames {self.timeline.frames} != trajectory frames "
                f"{self.trajectory.frame_count}"
            )

    @property
    def frame_count(self) -> int:
        return self.timeline.frames


@dataclass(frozen=True)
class RepeatLastFrameDenoiser:
    """Toy field whose target repeats the newest history frame across the
    whole window: the world stays put while the camera moves. Requires
    cond.known and cond.mask (sample_inpaint provides both)."""

    def velocity(self, x, t, cond=None) -> LatentVolume:
        from .denoise import ShapeMismatch

        if cond is None or cond.known is None or cond.mask is None:
            raise ShapeMismatch("RepeatLastFrameDenoiser needs cond.known and cond.mask")
        frame_is_known = cond.mask.bits.reshape(cond.mask.frames, -1).max(axis=1) == 0
        known_idx = np.nonzero(frame_is_known)[0]
        last = known_idx[-1] if known_idx.size else 0
        target = np.broadcast_to(
            cond.known.data[:, last : last + 1], x.shape
        )
        return LatentVolume._wrap((x.data - target) / np.float32(t))


def start_session(
    image: Rgba8Image, pose: CameraPose, config: SessionConfig
) -> SessionState:
    if image.height < 1 or image.width < 1:
        raise EmptySession("cannot start a session from an empty image")
    return SessionState(
        timeline=encode(image),
        trajectory=CameraTrajectory((pose,)),
        config=config,
        segments=(),
    )


def build_hybrid_input(
    session: SessionState, kind: ConditionKind, new_frames: int
) -> HybridInput:
    history = session.timeline.frames
    head = head_length(kind, history)
    head_data = session.timeline.data[:, history - head :]
    zeros = np.zeros(
        (session.timeline.channels, new_frames) + session.timeline.shape[2:],
        dtype=np.float32,
    )
    latents = LatentVolume._wrap(np.concatenate([head_data, zeros], axis=1))
    bits = np.zeros((head + new_frames,) + session.timeline.shape[2:], dtype=np.uint8)
    bits[:head] = 1
    return HybridInput(latents, BinaryMask(bits), head, new_frames)


def extend(
    session: SessionState,
    keys: Sequence[ActionKey],
    kind: Optional[ConditionKind],
    denoiser: DenoiserInterface,
) -> SessionState:
    """Append one steered segment; frames already on the timeline are
    bit-identical afterwards."""
    if not keys:
        raise EmptyKeyList("extension needs at least one key")
    kind = kind if kind is not None else session.config.kind
    head_length(kind, session.timeline.frames)  # validates kind up front
    keys = tuple(k if isinstance(k, ActionKey) else ActionKey.parse(k) for k in keys)

    seg_traj = fold_actions(session.trajectory.poses[-1], keys, session.config.motion)
    new_poses = seg_traj.poses[1:]
    n_new = len(new_poses)

    rays = pluecker_stack(new_poses, session.timeline.height, session.timeline.width)
    action_lat = compress_actions(
        rays,
        spatial_factor=session.config.spatial_factor,
        temporal_factor=session.config.temporal_factor,
        pad=True,
    )

    hybrid = build_hybrid_input(session, kind, n_new)
    seg_seed = derive_seed(session.config.seed, _SEGMENT_TAG + len(session.segments))
    out = sample_inpaint(
        denoiser,
        session.config.schedule(),
        hybrid.latents,
        hybrid.inpaint_mask(),
        seg_seed,
        cond=ConditionBundle(extra_channels=action_lat, pluecker=rays),
    )

    new_data = out.data[:, hybrid.head_frames :]
    timeline = LatentVolume._wrap(
        np.concatenate([session.timeline.data, new_data], axis=1)
    )
    start = session.timeline.frames
    segment = SegmentRecord(keys, start, start + n_new, kind)
    return replace(
        session,
        timeline=timeline,
        trajectory=session.trajectory.extended(new_poses),
        segments=session.segments + (segment,),
    )


def make_loop(
    image: Rgba8Image,
    total_frames: int,
    denoiser: DenoiserInterface,
    schedule: Schedule,
    seed: int,
) -> LatentVolume:
    """Clip whose first and last frame are pinned to the encoded image and
    therefore come out bit-identical; interior frames are synthesized."""
    if total_frames < 3:
        raise TooFewFrames(
            f"loop needs >= 3 frames to have an interior, got {total_frames}"
        )
    frame = encode(image)
    known = np.zeros(
        (4, total_frames, image.height, image.width), dtype=np.float32
    )
    known[:, 0] = frame.data[:, 0]
    known[:, total_frames - 1] = frame.data[:, 0]
    bits = np.ones((total_frames, image.height, image.width), dtype=np.uint8)
    bits[0] = 0
    bits[total_frames - 1] = 0
    return sample_inpaint(
        denoiser, schedule, LatentVolume._wrap(known), BinaryMask(bits), seed
    )


SESSION_TIMELINE = "timeline.fglv"
SESSION_TRAJECTORY = "trajectory.txt"
SESSION_MANIFEST = "manifest.json"


def save_session(session: SessionState, directory) -> Path:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    save_volume(session.timeline, root / SESSION_TIMELINE)
    session.trajectory.save_text(root / SESSION_TRAJECTORY)
    manifest = {
        "config": session.config.to_dict(),
        "frame_count": session.frame_count,
        "segments": [
            {
                "keys": [k.value for k in seg.keys],
                "start": seg.start,
                "end": seg.end,
                "kind": format_condition_kind(seg.kind),
            }
            for seg in session.segments
        ],
    }
    (root / SESSION_MANIFEST).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return root


def load_session(directory) -> SessionState:
    root = Path(directory)
    manifest = json.loads((root / SESSION_MANIFEST).read_text())
    timeline = load_volume(root / SESSION_TIMELINE)
    trajectory = CameraTrajectory.load_text(root / SESSION_TRAJECTORY)
    config = SessionConfig.from_dict(manifest["config"])
    segments = tuple(
        SegmentRecord(
            keys=tuple(ActionKey.parse(k) for k in seg["keys"]),
            start=int(seg["start"]),
            end=int(seg["end"]),
            kind=parse_condition_kind(seg["kind"]),
        )
        for seg in manifest.get("segments", [])
    )
    return SessionState(timeline, trajectory, config, segments)
