"""HTTP/WebSocket front of a running session.

One driver task owns every session mutation: it drains intake lines and
queued client commands between ticks, advances the session, and fans the
resulting frame out to all connected sockets. WebSocket handlers only
enqueue; command replies are delivered by the driver to the issuing
socket.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
import queue
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .session import Session, frame_to_json

log = logging.getLogger(__name__)


def create_app(
    session: Session,
    intake: queue.Queue | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    clients: set[WebSocket] = set()

    async def driver(app: FastAPI) -> None:
        period = 1.0 / session.config.tick_rate
        while True:
            if intake is not None:
                lines = []
                with contextlib.suppress(queue.Empty):
                    while True:
                        lines.append(intake.get_nowait())
                if lines:
                    session.on_article_lines(lines)
            while not app.state.commands.empty():
                ws, message = app.state.commands.get_nowait()
                for reply in session.handle_message(message):
                    with contextlib.suppress(Exception):
                        await ws.send_text(json.dumps(reply, separators=(",", ":")))
            frame = session.advance()
            text = frame_to_json(frame)
            for ws in list(clients):
                try:
                    await ws.send_text(text)
                except Exception:
                    clients.discard(ws)
            await asyncio.sleep(period)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.commands = asyncio.Queue()
        task = asyncio.create_task(driver(app))
        yield
        task.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await task

    app = FastAPI(lifespan=lifespan)

    @app.get("/status")
    async def status() -> dict:
        return session.status()

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        clients.add(ws)
        try:
            # catch newcomers up with the latest layout immediately
            await ws.send_text(frame_to_json(session.last_frame))
            while True:
                message = await ws.receive_json()
                if isinstance(message, dict):
                    await app.state.commands.put((ws, message))
        except WebSocketDisconnect:
            pass
        finally:
            clients.discard(ws)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
