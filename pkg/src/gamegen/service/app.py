"""HTTP/WebSocket application wrapping the library.

Every pipeline is an endpoint with a pydantic schema; the steering session
protocol is additionally exposed over a WebSocket carrying the same JSON
payloads as the TCP transport. Paths in requests are resolved on the
service host. Validation errors map to HTTP 400 with a structured kind,
missing files to 404.
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..camera import CameraTrajectory, pluecker_stack
from ..config import RunConfig, resolve_denoiser
from ..core import load_png, load_volume, save_png, save_volume
from ..curation.pipeline import MANIFEST_NAME, SUMMARY_NAME, curate_corpus
from ..denoise import Schedule
from ..errors import GamegenError
from ..extend import (
    extend as extend_session,
    load_session,
    make_loop,
    parse_condition_kind,
    save_session,
    start_session,
)
from ..seamless import SeamDirection, SeamSpec, make_seamless
from ..tiled_sr import upscale_video
from . import models
from .sessions import SessionManager
from .tcp import start_tcp_server
from .wire import SteerMessage, decode_json, error_reply, message_from_payload


def create_app(config: Optional[RunConfig] = None) -> FastAPI:
    config = config or RunConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        steer_server = None
        if config.steer_port is not None:
            steer_server = await start_tcp_server(
                app.state.manager, port=config.steer_port
            )
        app.state.steer_server = steer_server
        yield
        if steer_server is not None:
            steer_server.close()
            await steer_server.wait_closed()
        app.state.manager.close()

    app = FastAPI(title="gamegen", lifespan=lifespan)
    app.state.config = config
    app.state.manager = SessionManager(config)

    @app.exception_handler(GamegenError)
    async def _domain_error(request: Request, exc: GamegenError):
        return JSONResponse(
            status_code=400,
            content={"error": {"kind": exc.kind, "detail": str(exc)}},
        )

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request: Request, exc: FileNotFoundError):
        return JSONResponse(
            status_code=404,
            content={"error": {"kind": "FileNotFound", "detail": str(exc)}},
        )

    @app.get("/health", response_model=models.HealthReply)
    def health() -> models.HealthReply:
        return models.HealthReply(sessions=len(app.state.manager._sessions))

    @app.post("/run/seamless", response_model=models.OkReply)
    def run_seamless(req: models.SeamlessRequest) -> models.OkReply:
        image = load_png(req.input_path)
        spec = SeamSpec(SeamDirection(req.direction), req.band_width)
        out = make_seamless(
            image,
            spec,
            resolve_denoiser(req.denoiser),
            Schedule.uniform(req.steps),
            req.seed,
        )
        save_png(out, req.output_path)
        return models.OkReply(output_path=req.output_path)

    @app.post("/run/upscale", response_model=models.UpscaleReply)
    def run_upscale(req: models.UpscaleRequest) -> models.UpscaleReply:
        lr = load_volume(req.input_path)
        hr = upscale_video(
            lr,
            req.scale,
            resolve_denoiser(req.denoiser),
            Schedule.uniform(req.steps),
            req.seed,
            tile=req.tile,
            overlap=req.overlap,
            feather=req.feather,
        )
        save_volume(hr, req.output_path)
        return models.UpscaleReply(output_path=req.output_path, shape=hr.shape)

    @app.post("/run/loop", response_model=models.OkReply)
    def run_loop(req: models.LoopRequest) -> models.OkReply:
        image = load_png(req.input_path)
        clip = make_loop(
            image,
            req.frames,
            resolve_denoiser(req.denoiser),
            Schedule.uniform(req.steps),
            req.seed,
        )
        save_volume(clip, req.output_path)
        return models.OkReply(output_path=req.output_path)

    @app.post("/run/pluecker", response_model=models.PlueckerReply)
    def run_pluecker(req: models.PlueckerRequest) -> models.PlueckerReply:
        trajectory = CameraTrajectory.load_text(req.trajectory_path)
        field = pluecker_stack(trajectory.poses, req.height, req.width)
        save_volume(field, req.output_path)
        return models.PlueckerReply(
            output_path=req.output_path, frames=trajectory.frame_count
        )

    @app.post("/run/curate", response_model=models.CurateReply)
    def run_curate(req: models.CurateRequest) -> models.CurateReply:
        if not Path(req.corpus_dir).is_dir():
            raise FileNotFoundError(f"corpus directory {req.corpus_dir} not found")
        settings = config.curation.model_copy(
            update={
                k: v
                for k, v in {
                    "style_min": req.style_min,
                    "clarity_min": req.clarity_min,
                    "aesthetic_min": req.aesthetic_min,
                    "cut_threshold": req.cut_threshold,
                    "grad_threshold": req.grad_threshold,
                    "min_clip_len": req.min_clip_len,
                    "luminance_min": req.luminance_min,
                    "fps": req.fps,
                }.items()
                if v is not None
            }
        )
        summary = curate_corpus(
            req.corpus_dir, req.output_dir, settings.to_config(req.seed)
        )
        out = Path(req.output_dir)
        return models.CurateReply(
            manifest_path=str(out / MANIFEST_NAME),
            summary_path=str(out / SUMMARY_NAME),
            summary=summary,
        )

    @app.post("/run/extend", response_model=models.ExtendReply)
    def run_extend(req: models.ExtendRequest) -> models.ExtendReply:
        session_dir = Path(req.session_dir)
        if (session_dir / "manifest.json").exists():
            state = load_session(session_dir)
        elif req.start_image:
            image = load_png(req.start_image)
            manager = SessionManager(config)
            state = start_session(
                image, manager._default_pose(image), config.session_config()
            )
        else:
            raise FileNotFoundError(
                f"{session_dir} has no session and no start_image was given"
            )
        kind = parse_condition_kind(req.kind) if req.kind else None
        before = state.frame_count
        state = extend_session(
            state, req.keys, kind, resolve_denoiser(req.denoiser)
        )
        save_session(state, session_dir)
        return models.ExtendReply(
            session_dir=str(session_dir),
            frame_count=state.frame_count,
            new_frames=(before, state.frame_count),
        )

    # -- steering sessions over HTTP --------------------------------------

    def _reply_model(reply) -> models.SteerReplyModel:
        payload = reply.to_payload()
        if reply.status == "error":
            return JSONResponse(status_code=400, content={"error": payload["error"]})  # type: ignore[return-value]
        return models.SteerReplyModel(**payload)

    @app.post("/sessions", response_model=models.SteerReplyModel)
    def session_start(req: models.SessionStartRequest) -> models.SteerReplyModel:
        msg = message_from_payload(
            {"verb": "start", "session": req.session or "", "image": req.image_b64}
        )
        return _reply_model(app.state.manager.handle(msg))

    @app.post("/sessions/{sid}/key", response_model=models.SteerReplyModel)
    def session_key(sid: str, req: models.SessionKeyRequest) -> models.SteerReplyModel:
        msg = SteerMessage(verb="key", session=sid, key=req.key)
        return _reply_model(app.state.manager.handle(msg))

    @app.post("/sessions/{sid}/reset", response_model=models.SteerReplyModel)
    def session_reset(sid: str) -> models.SteerReplyModel:
        return _reply_model(app.state.manager.handle(SteerMessage("reset", sid)))

    @app.post("/sessions/{sid}/export", response_model=models.SteerReplyModel)
    def session_export(
        sid: str, req: models.SessionExportRequest
    ) -> models.SteerReplyModel:
        msg = SteerMessage(verb="export", session=sid, path=req.path)
        return _reply_model(app.state.manager.handle(msg))

    @app.get("/sessions/{sid}", response_model=models.SessionInfo)
    def session_info(sid: str) -> models.SessionInfo:
        entry = app.state.manager._entry_for(sid)
        return models.SessionInfo(
            session=sid,
            frame_count=entry.state.frame_count,
            segments=len(entry.state.segments),
        )

    # -- steering sessions over WebSocket ----------------------------------

    @app.websocket("/ws")
    async def steer_ws(ws: WebSocket) -> None:
        await ws.accept()
        pending: asyncio.Queue = asyncio.Queue()

        async def sender() -> None:
            import json as _json

            while True:
                fut = await pending.get()
                if fut is None:
                    return
                reply = await fut
                await ws.send_text(_json.dumps(reply.to_payload(), sort_keys=True))

        send_task = asyncio.create_task(sender())
        loop = asyncio.get_running_loop()
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = message_from_payload(decode_json(raw.encode()))
                except GamegenError as exc:
                    done: asyncio.Future = loop.create_future()
                    done.set_result(error_reply("", exc))
                    await pending.put(done)
                    continue
                fut = app.state.manager.submit(msg)
                await pending.put(asyncio.wrap_future(fut))
        except WebSocketDisconnect:
            pass
        finally:
            await pending.put(None)
            await send_task

    _mount_frontend(app)
    return app


def _mount_frontend(app: FastAPI) -> None:
    dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if not dist.is_dir():
        dist = Path.cwd() / "frontend" / "dist"
    if dist.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(dist), html=True), name="console")
