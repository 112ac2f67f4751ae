"""Network API for the chat UI.

Sessions run in worker threads; posted messages are either a new command
or the answer to the question the session is currently blocked on.
Events stream out via polling (JSON) or server-sent events.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, StreamingResponse
from pydantic import BaseModel

from .dialogue import Dialogue
from .session import COMMAND_PROMPT, ServiceConfig, Session


class _QueueDialogue(Dialogue):
    """Blocks the session thread until an answer is posted."""

    def __init__(self, host: "ApiSession"):
        self.host = host
        self.answers: "queue.Queue[str]" = queue.Queue()

    def ask(self, prompt: str) -> str:
        self.host.waiting = True
        try:
            return self.answers.get()
        finally:
            self.host.waiting = False


class ApiSession:
    def __init__(self, config: ServiceConfig):
        self.dialogue = _QueueDialogue(self)
        self.condition = threading.Condition()
        self.waiting = False
        self.worker: threading.Thread | None = None
        self.session = Session(config, dialogue=self.dialogue,
                               emit=self._on_event)
        self.session.greet()

    def _on_event(self, _event) -> None:
        with self.condition:
            self.condition.notify_all()

    @property
    def busy(self) -> bool:
        return self.worker is not None and self.worker.is_alive()

    def post_message(self, text: str) -> str:
        """Feed an answer if the session is blocked, else start a command."""
        if self.waiting:
            self.dialogue.answers.put(text)
            return "answer"
        if self.busy:
            raise HTTPException(status_code=409,
                                detail="session is busy; wait for a question")
        self.worker = threading.Thread(
            target=self.session.handle_command, args=(text,), daemon=True)
        self.worker.start()
        return "command"

    def events_after(self, after: int) -> list:
        return [e.to_json() for e in self.session.events if e.seq > after]

    def wait_for_events(self, after: int, timeout: float) -> list:
        deadline = time.monotonic() + timeout
        with self.condition:
            while True:
                events = self.events_after(after)
                if events or not self.busy:
                    return events
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return events
                self.condition.wait(timeout=remaining)


class MessageBody(BaseModel):
    text: str


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="mlworkbench", version="0.1.0")
    sessions: dict[str, ApiSession] = {}
    out_dir = Path(config.out_dir)

    def _session(session_id: str) -> ApiSession:
        if session_id not in sessions:
            raise HTTPException(status_code=404, detail="unknown session")
        return sessions[session_id]

    @app.post("/sessions")
    def create_session():
        session_id = uuid.uuid4().hex
        sessions[session_id] = ApiSession(config)
        return {"session_id": session_id, "prompt": COMMAND_PROMPT}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        role = _session(session_id).post_message(body.text)
        return {"accepted": True, "role": role}

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, after: int = -1, wait: float = 0.0):
        host = _session(session_id)
        if wait > 0:
            events = host.wait_for_events(after, min(wait, 30.0))
        else:
            events = host.events_after(after)
        return {"events": events, "busy": host.busy, "waiting": host.waiting}

    @app.get("/sessions/{session_id}/events/stream")
    def stream_events(session_id: str, after: int = -1):
        host = _session(session_id)

        def generate():
            cursor = after
            idle_rounds = 0
            while True:
                events = host.wait_for_events(cursor, timeout=1.0)
                for event in events:
                    cursor = event["seq"]
                    yield f"data: {json.dumps(event)}\n\n"
                if events:
                    idle_rounds = 0
                    continue
                if not host.busy and not host.waiting:
                    idle_rounds += 1
                    yield ": keep-alive\n\n"
                    if idle_rounds >= 2:
                        return

        return StreamingResponse(generate(), media_type="text/event-stream")

    def _artifact_path(request_id: str, relative: str) -> Path:
        base = (out_dir / request_id).resolve()
        target = (base / relative).resolve()
        if not str(base).startswith(str(out_dir.resolve())) or \
                not str(target).startswith(str(base)):
            raise HTTPException(status_code=400, detail="bad artifact path")
        if not target.is_file():
            raise HTTPException(status_code=404, detail="artifact not found")
        return target

    @app.get("/bundles/{request_id}/bundle.json")
    def get_bundle(request_id: str):
        path = _artifact_path(request_id, "bundle.json")
        return json.loads(path.read_text(encoding="utf-8"))

    @app.get("/bundles/{request_id}/{kind}/{filename}")
    def get_artifact(request_id: str, kind: str, filename: str):
        if kind not in ("plots", "tables", "latex"):
            raise HTTPException(status_code=404, detail="unknown artifact kind")
        path = _artifact_path(request_id, f"{kind}/{filename}")
        media = {"svg": "image/svg+xml", "csv": "text/csv",
                 "tex": "text/x-tex"}.get(path.suffix.lstrip("."), "text/plain")
        return FileResponse(path, media_type=media)

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True),
                  name="ui")

    return app


def serve(config: ServiceConfig) -> None:
    """Run the API under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level="info")
