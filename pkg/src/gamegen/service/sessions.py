"""Server-side steering sessions.

Each session owns a bounded FIFO job queue (depth 32) drained by a single
worker thread, so extensions within a session are strictly ordered with at
most one in flight; distinct sessions run concurrently. submit() enqueues
in call order and returns a future, which lets transports pipeline
requests while replies keep request order. Queue overflow is an explicit
error reply, never a silent drop.
"""

from __future__ import annotations

import queue
import threading
from concurrent.futures import Future
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..camera import CameraPose, UnknownKey, pose_line_range
from ..config import RunConfig, resolve_denoiser
from ..core import Rgba8Image, png_bytes, png_from_bytes
from ..errors import GamegenError
from ..extend import SessionState, extend, save_session, start_session
from .preview import render_preview
from .wire import (
    BadMessage,
    QueueOverflow,
    SteerMessage,
    SteerReply,
    UnknownSession,
    error_reply,
)

QUEUE_DEPTH = 32
MAX_PREVIEWS_PER_REPLY = 16


@dataclass
class _Entry:
    session_id: str
    state: SessionState
    start_image: Rgba8Image
    start_pose: CameraPose
    jobs: "queue.Queue[tuple[SteerMessage, Future]]"
    worker: threading.Thread
    lock: threading.Lock


class SessionManager:
    def __init__(self, config: Optional[RunConfig] = None, export_root=None):
        self.config = config or RunConfig()
        self.export_root = Path(export_root or self.config.export_root)
        self._sessions: dict[str, _Entry] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._closed = False

    # -- public API ------------------------------------------------------

    def submit(self, msg: SteerMessage) -> "Future[SteerReply]":
        """Enqueue a message in call order; the future resolves with the
        reply. Errors resolve the future immediately."""
        fut: Future = Future()
        try:
            if msg.verb == "start":
                fut.set_result(self._do_start(msg))
                return fut
            entry = self._entry_for(msg.session)
            try:
                entry.jobs.put_nowait((msg, fut))
            except queue.Full:
                raise QueueOverflow(
                    f"session {msg.session} queue full (depth {QUEUE_DEPTH})"
                )
        except Exception as exc:
            fut.set_result(error_reply(msg.session, exc))
        return fut

    def handle(self, msg: SteerMessage) -> SteerReply:
        return self.submit(msg).result()

    def frame_count(self, session_id: str) -> int:
        return self._entry_for(session_id).state.frame_count

    def close(self) -> None:
        with self._lock:
            entries = list(self._sessions.values())
            self._closed = True
        for entry in entries:
            entry.jobs.put((None, None))  # type: ignore[arg-type]
        for entry in entries:
            entry.worker.join(timeout=5)

    # -- internals ---------------------------------------------------------

    def _entry_for(self, session_id: str) -> _Entry:
        with self._lock:
            entry = self._sessions.get(session_id)
        if entry is None:
            raise UnknownSession(f"no session {session_id!r}")
        return entry

    def _default_pose(self, image: Rgba8Image) -> CameraPose:
        h, w = image.height, image.width
        intrinsics = (float(min(h, w)), float(min(h, w)), w / 2.0, h / 2.0)
        return CameraPose.looking(
            center=(
                0.0,
                self.config.session.camera_height,
                self.config.session.camera_distance,
            ),
            intrinsics=intrinsics,
        )

    def _do_start(self, msg: SteerMessage) -> SteerReply:
        if msg.image is None:
            raise BadMessage("start requires a PNG image")
        try:
            image = png_from_bytes(msg.image)
        except GamegenError:
            raise
        except Exception as exc:
            raise BadMessage(f"start image is not a decodable PNG: {exc}") from exc
        with self._lock:
            if self._closed:
                raise BadMessage("manager is shut down")
            if msg.session:
                session_id = msg.session
                if session_id in self._sessions:
                    raise BadMessage(f"session {session_id!r} already exists")
            else:
                self._counter += 1
                session_id = f"s{self._counter:04d}"
            pose = self._default_pose(image)
            state = start_session(image, pose, self.config.session_config())
            jobs: queue.Queue = queue.Queue(maxsize=QUEUE_DEPTH)
            worker = threading.Thread(
                target=self._worker_loop, args=(session_id,), daemon=True
            )
            entry = _Entry(
                session_id=session_id,
                state=state,
                start_image=image,
                start_pose=pose,
                jobs=jobs,
                worker=worker,
                lock=threading.Lock(),
            )
            self._sessions[session_id] = entry
        worker.start()
        return self._reply(entry, new_start=0)

    def _worker_loop(self, session_id: str) -> None:
        entry = self._entry_for(session_id)
        while True:
            msg, fut = entry.jobs.get()
            if msg is None:
                return
            try:
                if msg.verb == "key":
                    reply = self._do_key(entry, msg)
                elif msg.verb == "reset":
                    reply = self._do_reset(entry)
                elif msg.verb == "export":
                    reply = self._do_export(entry, msg)
                else:
                    raise BadMessage(f"verb {msg.verb!r} not handled")
            except Exception as exc:
                reply = error_reply(entry.session_id, exc)
            fut.set_result(reply)

    def _do_key(self, entry: _Entry, msg: SteerMessage) -> SteerReply:
        if msg.key is None:
            raise BadMessage("key verb requires a key field")
        try:
            from ..camera import ActionKey

            key = ActionKey.parse(msg.key)
        except UnknownKey as exc:
            raise BadMessage(str(exc)) from exc
        denoiser = resolve_denoiser(self.config.session.denoiser)
        with entry.lock:
            before = entry.state.frame_count
            entry.state = extend(entry.state, [key], None, denoiser)
        return self._reply(entry, new_start=before)

    def _do_reset(self, entry: _Entry) -> SteerReply:
        with entry.lock:
            entry.state = start_session(
                entry.start_image, entry.start_pose, self.config.session_config()
            )
        return self._reply(entry, new_start=0)

    def _do_export(self, entry: _Entry, msg: SteerMessage) -> SteerReply:
        target = Path(msg.path) if msg.path else self.export_root / entry.session_id
        with entry.lock:
            save_session(entry.state, target)
            reply = self._reply(entry, new_start=entry.state.frame_count)
        return SteerReply(**{**reply.__dict__, "path": str(target)})

    def _reply(self, entry: _Entry, new_start: int) -> SteerReply:
        state = entry.state
        end = state.frame_count
        poses = pose_line_range(state.trajectory, new_start, end)
        image = entry.start_image
        previews = []
        preview_poses = state.trajectory.poses[new_start:end][-MAX_PREVIEWS_PER_REPLY:]
        for pose in preview_poses:
            previews.append(
                png_bytes(
                    render_preview(pose, height=image.height, width=image.width)
                )
            )
        return SteerReply(
            session=entry.session_id,
            status="ok",
            frames=(new_start, end),
            frame_count=end,
            poses=tuple(poses),
            previews=tuple(previews),
            queue_depth=entry.jobs.qsize(),
        )
