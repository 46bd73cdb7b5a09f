"""Length-prefixed TCP transport for the steering protocol.

Each connection reads framed JSON messages, submits them to the session
manager in arrival order, and writes replies back in that same order;
because submission is immediate and replies are awaited FIFO, clients may
pipeline messages and still observe ordered replies.
"""

from __future__ import annotations

import asyncio

from ..errors import GamegenError
from .sessions import SessionManager
from .wire import (
    SteerReply,
    encode_frame,
    error_reply,
    message_from_payload,
    read_frame,
)


async def _handle_connection(
    manager: SessionManager,
    reader: asyncio.StreamReader,
    writer: asyncio.StreamWriter,
) -> None:
    pending: asyncio.Queue = asyncio.Queue()
    loop = asyncio.get_running_loop()

    async def writer_task() -> None:
        while True:
            fut = await pending.get()
            if fut is None:
                return
            reply: SteerReply = await fut
            writer.write(encode_frame(reply.to_payload()))
            await writer.drain()

    sender = asyncio.create_task(writer_task())
    try:
        while True:
            try:
                payload = await read_frame(reader)
            except GamegenError as exc:
                done: asyncio.Future = loop.create_future()
                done.set_result(error_reply("", exc))
                await pending.put(done)
                break
            if payload is None:
                break
            try:
                msg = message_from_payload(payload)
            except GamegenError as exc:
                done = loop.create_future()
                done.set_result(error_reply(str(payload.get("session", "")), exc))
                await pending.put(done)
                continue
            fut = manager.submit(msg)
            await pending.put(asyncio.wrap_future(fut))
    finally:
        await pending.put(None)
        await sender
        writer.close()
        try:
            await writer.wait_closed()
        except (ConnectionError, BrokenPipeError):
            pass


async def start_tcp_server(
    manager: SessionManager, host: str = "127.0.0.1", port: int = 0
) -> asyncio.AbstractServer:
    async def cb(reader, writer):
        await _handle_connection(manager, reader, writer)

    return await asyncio.start_server(cb, host, port)
