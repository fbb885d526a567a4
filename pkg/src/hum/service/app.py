"""HTTP surface: create-session, command, network-snapshot, event-stream.

Events are pushed as server-sent events (``data: <json>`` lines); a stream
replays the session's history and then follows live, so any number of
subscribers observe the same sequence. Set ``HUM_UI_DIR`` to serve a built
inspector UI at ``/``.
"""

from __future__ import annotations

import json
import os

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..errors import HumError, ParseError
from .manager import SessionManager, UnknownSession
from .schemas import (CommandRequest, CommandResponse, NetworkSnapshotView,
                      SessionCreated)


def create_app(manager: SessionManager | None = None) -> FastAPI:
    app = FastAPI(title="hum session service", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    mgr = manager or SessionManager()
    app.state.manager = mgr

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", response_model=SessionCreated)
    def create_session():
        return SessionCreated(session_id=mgr.create())

    @app.delete("/sessions/{sid}", status_code=204)
    def end_session(sid: str):
        try:
            mgr.end(sid)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.post("/sessions/{sid}/command", response_model=CommandResponse)
    def command(sid: str, request: CommandRequest):
        try:
            return CommandResponse.model_validate(mgr.handle_command(sid, request.text))
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        except ParseError as err:
            raise HTTPException(status_code=422, detail={
                "error": str(err), "line": err.line, "column": err.column})
        except HumError as err:
            raise HTTPException(status_code=422, detail={"error": str(err)})

    @app.get("/sessions/{sid}/network", response_model=NetworkSnapshotView)
    def network_snapshot(sid: str):
        try:
            return NetworkSnapshotView.model_validate(mgr.network_snapshot(sid))
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.get("/sessions/{sid}/events")
    def event_stream(sid: str):
        try:
            events = mgr.subscribe(sid)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

        def stream():
            for event in events:
                if event is None:
                    yield ": keepalive\n\n"
                else:
                    yield f"data: {json.dumps(event)}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache"})

    ui_dir = os.environ.get("HUM_UI_DIR")
    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
