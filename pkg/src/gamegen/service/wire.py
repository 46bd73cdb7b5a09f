"""Steering wire protocol.

Messages are JSON objects; over TCP each message travels as a 4-byte
big-endian length prefix followed by the UTF-8 payload, over WebSocket as
one text frame per message. Replies always carry the server-authoritative
frame count; clients never compute state.
"""

from __future__ import annotations

import asyncio
import base64
import json
from dataclasses import dataclass
from typing import Optional

from ..errors import GamegenError

MAX_FRAME_BYTES = 64 * 1024 * 1024
VERBS = ("start", "key", "reset", "export")


class BadMessage(GamegenError):
    pass


class UnknownSession(GamegenError):
    pass


class QueueOverflow(GamegenError):
    pass


@dataclass(frozen=True)
class SteerMessage:
    verb: str
    session: str = ""
    key: Optional[str] = None
    image: Optional[bytes] = None  # PNG bytes for verb=start
    path: Optional[str] = None  # optional export destination

    def to_payload(self) -> dict:
        payload: dict = {"verb": self.verb, "session": self.session}
        if self.key is not None:
            payload["key"] = self.key
        if self.image is not None:
            payload["image"] = base64.b64encode(self.image).decode("ascii")
        if self.path is not None:
            payload["path"] = self.path
        return payload


@dataclass(frozen=True)
class SteerReply:
    session: str
    status: str = "ok"
    frames: tuple[int, int] = (0, 0)  # half-open range of frames this reply added
    frame_count: int = 0
    poses: tuple[str, ...] = ()
    previews: tuple[bytes, ...] = ()
    queue_depth: int = 0
    path: Optional[str] = None
    error: Optional[dict] = None

    def to_payload(self) -> dict:
        payload: dict = {
            "session": self.session,
            "status": self.status,
            "frames": list(self.frames),
            "frame_count": self.frame_count,
            "poses": list(self.poses),
            "previews": [base64.b64encode(p).decode("ascii") for p in self.previews],
            "queue_depth": self.queue_depth,
        }
        if self.path is not None:
            payload["path"] = self.path
        if self.error is not None:
            payload["error"] = self.error
        return payload


def error_reply(session: str, exc: Exception) -> SteerReply:
    kind = exc.kind if isinstance(exc, GamegenError) else type(exc).__name__
    return SteerReply(
        session=session,
        status="error",
        error={"kind": kind, "detail": str(exc)},
    )


def message_from_payload(payload: dict) -> SteerMessage:
    if not isinstance(payload, dict):
        raise BadMessage("message payload must be a JSON object")
    verb = payload.get("verb")
    if verb not in VERBS:
        raise BadMessage(f"unknown verb {verb!r}; expected one of {VERBS}")
    image = None
    if payload.get("image") is not None:
        try:
            image = base64.b64decode(payload["image"], validate=True)
        except Exception as exc:
            raise BadMessage(f"image field is not valid base64: {exc}") from exc
    session = payload.get("session", "")
    if not isinstance(session, str):
        raise BadMessage("session must be a string")
    key = payload.get("key")
    if key is not None and not isinstance(key, str):
        raise BadMessage("key must be a string")
    path = payload.get("path")
    if path is not None and not isinstance(path, str):
        raise BadMessage("path must be a string")
    return SteerMessage(verb=verb, session=session, key=key, image=image, path=path)


def reply_from_payload(payload: dict) -> SteerReply:
    return SteerReply(
        session=payload.get("session", ""),
        status=payload.get("status", "ok"),
        frames=tuple(payload.get("frames", (0, 0))),  # type: ignore[arg-type]
        frame_count=int(payload.get("frame_count", 0)),
        poses=tuple(payload.get("poses", ())),
        previews=tuple(
            base64.b64decode(p) for p in payload.get("previews", ())
        ),
        queue_depth=int(payload.get("queue_depth", 0)),
        path=payload.get("path"),
        error=payload.get("error"),
    )


def encode_json(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def encode_frame(payload: dict) -> bytes:
    body = encode_json(payload)
    if len(body) > MAX_FRAME_BYTES:
        raise BadMessage(f"frame of {len(body)} bytes exceeds limit")
    return len(body).to_bytes(4, "big") + body


def decode_json(body: bytes) -> dict:
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadMessage(f"payload is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise BadMessage("payload must be a JSON object")
    return payload


async def read_frame(reader: asyncio.StreamReader) -> Optional[dict]:
    """Read one length-prefixed message; None on clean EOF."""
    try:
        header = await reader.readexactly(4)
    except (asyncio.IncompleteReadError, ConnectionResetError):
        return None
    length = int.from_bytes(header, "big")
    if length > MAX_FRAME_BYTES:
        raise BadMessage(f"declared frame of {length} bytes exceeds limit")
    try:
        body = await reader.readexactly(length)
    except asyncio.IncompleteReadError as exc:
        raise BadMessage("connection closed mid-frame") from exc
    return decode_json(body)
