"""Command-line client.

Every subcommand builds a request and sends it through the HTTP API: by
default against an in-process application instance (no server needed),
or against a running service when --server is given. Exit codes: 0 on
success, 1 on validation errors, 2 on I/O or transport errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Optional

import httpx

from .config import RunConfig, load_config
from .errors import GamegenError

VALIDATION_STATUS = (400, 422)


def _post(config: RunConfig, server: Optional[str], path: str, payload: dict) -> dict:
    """POST a JSON request either in-process or to a remote service."""
    if server:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            resp = client.post(path, json=payload)
            return _unwrap(resp)

    async def _run() -> dict:
        from .service.app import create_app

        app = create_app(config)
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://gamegen.local", timeout=300.0
        ) as client:
            resp = await client.post(path, json=payload)
            return _unwrap(resp)

    return asyncio.run(_run())


class CliFailure(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _unwrap(resp: httpx.Response) -> dict:
    if resp.status_code == 200:
        return resp.json()
    try:
        body = resp.json()
    except json.JSONDecodeError:
        body = {"error": {"kind": "BadReply", "detail": resp.text[:200]}}
    error = body.get("error") or body.get("detail") or body
    code = 1 if resp.status_code in VALIDATION_STATUS else 2
    raise CliFailure(json.dumps(error), code)


def _emit(reply: dict) -> None:
    print(json.dumps(reply, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamegen",
        description="Toy game-video generation and curation toolkit",
    )
    parser.add_argument("--config", help="JSON config file (strict keys)")
    parser.add_argument("--server", help="base URL of a running service")
    parser.add_argument("--seed", type=int, help="override the config seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seamless", help="make a texture wrap-tileable")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--direction", choices=["horizontal", "vertical", "both"])
    p.add_argument("--band", type=int, help="seam band width in pixels")
    p.add_argument("--steps", type=int)
    p.add_argument("--denoiser")

    p = sub.add_parser("upscale", help="tiled super-resolution of an FGLV volume")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--scale", type=int, choices=[2, 4])
    p.add_argument("--tile", type=int, nargs=3, metavar=("T", "H", "W"))
    p.add_argument("--overlap", type=int, nargs=3, metavar=("T", "H", "W"))
    p.add_argument("--steps", type=int)
    p.add_argument("--denoiser")
    p.add_argument("--feather", action="store_true", default=None)

    p = sub.add_parser("loop", help="closed loop clip from a still image")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--frames", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--denoiser")

    p = sub.add_parser("extend", help="extend a session directory with keys")
    p.add_argument("session_dir")
    p.add_argument("keys", nargs="+", help="action keys (W A S D Up Left Down Right Space)")
    p.add_argument("--kind", help="single_frame | previous:N | full_clip")
    p.add_argument("--start-image", help="initialize the session from this PNG")
    p.add_argument("--denoiser")

    p = sub.add_parser("pluecker", help="ray-embedding volume from a trajectory")
    p.add_argument("trajectory"), p.add_argument("output")
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=64)

    p = sub.add_parser("curate", help="run the curation pipeline over a corpus")
    p.add_argument("corpus"), p.add_argument("output")

    p = sub.add_parser("fixture-corpus", help="write the bundled fixture corpus")
    p.add_argument("output")

    p = sub.add_parser("serve", help="run the HTTP service and TCP steering port")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--steer-port", type=int, help="TCP steering port (default: port+1)")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, {"seed": args.seed})
    except GamegenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"config: {config.resolved_json()}", file=sys.stderr)

    try:
        return _dispatch(args, config)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except GamegenError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 1
    except (OSError, httpx.HTTPError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace, config: RunConfig) -> int:
    if args.command == "seamless":
        reply = _post(config, args.server, "/run/seamless", _clean({
            "input_path": args.input,
            "output_path": args.output,
            "direction": args.direction or config.direction,
            "band_width": args.band if args.band is not None else config.band_width,
            "steps": args.steps if args.steps is not None else config.steps,
            "seed": config.seed,
            "denoiser": args.denoiser or config.denoiser,
        }))
    elif args.command == "upscale":
        reply = _post(config, args.server, "/run/upscale", _clean({
            "input_path": args.input,
            "output_path": args.output,
            "scale": args.scale if args.scale is not None else config.scale,
            "tile": tuple(args.tile) if args.tile else config.tiling.tile,
            "overlap": tuple(args.overlap) if args.overlap else config.tiling.overlap,
            "steps": args.steps if args.steps is not None else config.steps,
            "seed": config.seed,
            "denoiser": args.denoiser or "condition-target",
            "feather": args.feather if args.feather is not None else config.tiling.feather,
        }))
    elif args.command == "loop":
        reply = _post(config, args.server, "/run/loop", _clean({
            "input_path": args.input,
            "output_path": args.output,
            "frames": args.frames if args.frames is not None else config.loop_frames,
            "steps": args.steps if args.steps is not None else config.steps,
            "seed": config.seed,
            "denoiser": args.denoiser or "repeat-last",
        }))
    elif args.command == "extend":
        reply = _post(config, args.server, "/run/extend", _clean({
            "session_dir": args.session_dir,
            "keys": args.keys,
            "kind": args.kind,
            "start_image": args.start_image,
            "denoiser": args.denoiser or config.session.denoiser,
        }))
    elif args.command == "pluecker":
        reply = _post(config, args.server, "/run/pluecker", {
            "trajectory_path": args.trajectory,
            "output_path": args.output,
            "height": args.height,
            "width": args.width,
        })
    elif args.command == "curate":
        reply = _post(config, args.server, "/run/curate", {
            "corpus_dir": args.corpus,
            "output_dir": args.output,
            "seed": config.seed,
        })
    elif args.command == "fixture-corpus":
        from .curation.fixtures import build_fixture_corpus

        reply = build_fixture_corpus(args.output)
    elif args.command == "serve":
        return _serve(args, config)
    else:  # pragma: no cover - argparse enforces the choices
        raise CliFailure(f"unknown command {args.command}", 1)
    _emit(reply)
    return 0


def _clean(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if v is not None}


def _serve(args: argparse.Namespace, config: RunConfig) -> int:
    import uvicorn

    from .service.app import create_app

    steer_port = args.steer_port if args.steer_port is not None else args.port + 1
    config = config.model_copy(update={"steer_port": steer_port})
    app = create_app(config)
    print(
        f"serving HTTP on {args.host}:{args.port}, steering TCP on {steer_port}",
        file=sys.stderr,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
