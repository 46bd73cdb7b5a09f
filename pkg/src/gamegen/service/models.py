"""Request/response schemas for the HTTP API."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict


class ErrorInfo(BaseModel):
    kind: str
    detail: str


class ErrorBody(BaseModel):
    error: ErrorInfo


class OkReply(BaseModel):
    status: str = "ok"
    output_path: str


class SeamlessRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input_path: str
    output_path: str
    direction: str = "horizontal"
    band_width: int = 8
    steps: int = 8
    seed: int = 0
    denoiser: str = "smooth"


class UpscaleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input_path: str
    output_path: str
    scale: int = 2
    tile: tuple[int, int, int] = (9, 96, 96)
    overlap: tuple[int, int, int] = (1, 24, 24)
    steps: int = 8
    seed: int = 0
    denoiser: str = "condition-target"
    feather: bool = False


class UpscaleReply(OkReply):
    shape: tuple[int, int, int, int]


class LoopRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input_path: str
    output_path: str
    frames: int = 9
    steps: int = 8
    seed: int = 0
    denoiser: str = "repeat-last"


class PlueckerRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trajectory_path: str
    output_path: str
    height: int = 64
    width: int = 64


class PlueckerReply(OkReply):
    frames: int


class CurateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    corpus_dir: str
    output_dir: str
    seed: int = 0
    style_min: Optional[float] = None
    clarity_min: Optional[float] = None
    aesthetic_min: Optional[float] = None
    cut_threshold: Optional[float] = None
    grad_threshold: Optional[float] = None
    min_clip_len: Optional[int] = None
    luminance_min: Optional[float] = None
    fps: Optional[float] = None


class CurateReply(BaseModel):
    status: str = "ok"
    manifest_path: str
    summary_path: str
    summary: dict


class ExtendRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    session_dir: str
    keys: list[str]
    kind: Optional[str] = None
    start_image: Optional[str] = None  # initialize the session dir from this PNG
    denoiser: str = "repeat-last"


class ExtendReply(BaseModel):
    status: str = "ok"
    session_dir: str
    frame_count: int
    new_frames: tuple[int, int]


class SessionStartRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    image_b64: str
    session: Optional[str] = None


class SessionKeyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    key: str


class SessionExportRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None


class SteerReplyModel(BaseModel):
    session: str
    status: str
    frames: tuple[int, int]
    frame_count: int
    poses: list[str]
    previews: list[str]  # base64 PNG
    queue_depth: int
    path: Optional[str] = None
    error: Optional[ErrorInfo] = None


class SessionInfo(BaseModel):
    session: str
    frame_count: int
    segments: int


class HealthReply(BaseModel):
    status: str = "ok"
    sessions: int = 0
