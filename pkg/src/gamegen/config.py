"""Run configuration.

One strict-schema config drives the CLI and the service: unknown keys are
rejected, every run logs its resolved config verbatim, and all randomness
derives from the configured seed. Environment variables are deliberately
not consulted, so a logged config replays a run exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict

from .camera import MotionParams
from .curation.pipeline import CurationConfig
from .curation.records import TierThresholds
from .denoise import SmoothTargetDenoiser
from .errors import GamegenError
from .extend import RepeatLastFrameDenoiser, SessionConfig, parse_condition_kind
from .tiled_sr import ConditionTargetDenoiser


class UnknownDenoiser(GamegenError):
    pass


class BadConfig(GamegenError):
    pass


class MotionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    speed: float = 0.1
    yaw_rate: float = math.pi / 64
    pitch_rate: float = math.pi / 64
    jump_height: float = 0.5
    gravity: float = 0.2
    segment_frames: int = 8

    def to_params(self) -> MotionParams:
        return MotionParams(**self.model_dump())


class TilingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tile: tuple[int, int, int] = (9, 96, 96)
    overlap: tuple[int, int, int] = (1, 24, 24)
    feather: bool = False


class CurationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    style_min: float = 0.5
    clarity_min: float = 0.05
    aesthetic_min: float = 0.5
    min_dimension: int = 1024
    cut_threshold: float = 0.5
    grad_threshold: float = 0.5
    min_clip_len: int = 5
    luminance_min: float = 0.4
    fps: float = 8.0

    def to_config(self, seed: int) -> CurationConfig:
        return CurationConfig(
            thresholds=TierThresholds(
                style=self.style_min,
                clarity=self.clarity_min,
                aesthetic=self.aesthetic_min,
                min_dimension=self.min_dimension,
            ),
            cut_threshold=self.cut_threshold,
            grad_threshold=self.grad_threshold,
            min_clip_len=self.min_clip_len,
            luminance_min=self.luminance_min,
            fps=self.fps,
            seed=seed,
        )


class SessionSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str = "single_frame"
    denoiser: str = "repeat-last"
    spatial_factor: int = 8
    temporal_factor: int = 4
    camera_height: float = 1.2
    camera_distance: float = 6.0


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    steps: int = 8
    direction: str = "horizontal"
    band_width: int = 8
    scale: int = 2
    loop_frames: int = 9
    denoiser: str = "smooth"
    export_root: str = "exports"
    steer_port: Optional[int] = None
    motion: MotionConfig = MotionConfig()
    tiling: TilingConfig = TilingConfig()
    curation: CurationSettings = CurationSettings()
    session: SessionSettings = SessionSettings()

    def session_config(self) -> SessionConfig:
        return SessionConfig(
            motion=self.motion.to_params(),
            steps=self.steps,
            seed=self.seed,
            kind=parse_condition_kind(self.session.kind),
            denoiser=self.session.denoiser,
            spatial_factor=self.session.spatial_factor,
            temporal_factor=self.session.temporal_factor,
        )

    def resolved_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus explicit overrides
    (flag values win over the file, the file over defaults)."""
    data: dict = {}
    if path:
        raw = Path(path).read_text()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise BadConfig(f"config {path} must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if "." in key:
            group, leaf = key.split(".", 1)
            data.setdefault(group, {})[leaf] = value
        else:
            data[key] = value
    try:
        return RunConfig(**data)
    except Exception as exc:
        raise BadConfig(f"invalid configuration: {exc}") from exc


def resolve_denoiser(name: str):
    """Named toy denoisers available to the CLI and the service."""
    table = {
        "smooth": SmoothTargetDenoiser,
        "repeat-last": RepeatLastFrameDenoiser,
        "condition-target": ConditionTargetDenoiser,
    }
    if name not in table:
        raise UnknownDenoiser(
            f"unknown denoiser {name!r}; available: {sorted(table)}"
        )
    return table[name]()
