"""HTTP API for the studio: scenario sessions, run control, streaming,
interviews, results.

Route table (all JSON unless noted):

    GET    /                                service info
    POST   /sessions                        {document} -> {session, diagnostics} | 422
    GET    /sessions                        list sessions
    GET    /sessions/{sid}                  session info
    PATCH  /sessions/{sid}/agents           {edits: [{name, ...fields}]} -> {diagnostics}
    POST   /sessions/{sid}/start            {pacing_sps?: number}
    POST   /sessions/{sid}/pause | /resume | /abort
    GET    /sessions/{sid}/events?since=N   polling window of stream items
    GET    /sessions/{sid}/stream?since=N   server-push (SSE) of stream items
    POST   /sessions/{sid}/interview        {agent, question} -> answer
    GET    /sessions/{sid}/results          metrics + survey
    GET    /sessions/{sid}/log              full run log document (download)

Stream items are {seq, type: record|snapshot|gap, payload}; seq is strictly
increasing per session and a client that applies a snapshot and then the
following delta records reconstructs the server's world state.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from teamsim import __version__
from teamsim.errors import PolicyFailure, ScenarioSemanticError, ScenarioSyntaxError
from teamsim.service.sessions import SessionError, SessionManager, stream_sse


class CreateSessionBody(BaseModel):
    document: str


class StartBody(BaseModel):
    pacing_sps: Optional[float] = None


class AgentEditsBody(BaseModel):
    edits: list[dict]


class InterviewBody(BaseModel):
    agent: str
    question: str


def create_app(max_sessions: int = 8, log_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="teamsim studio service", version=__version__)
    # The studio UI is served as static files from anywhere; desk-scale tool,
    # no auth, so a wide-open CORS policy is the intended posture.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    manager = SessionManager(max_sessions=max_sessions, log_dir=log_dir)
    app.state.manager = manager

    @app.exception_handler(SessionError)
    async def _session_error(request: Request, exc: SessionError):
        return JSONResponse(status_code=exc.status, content={"error": str(exc)})

    @app.get("/")
    def root():
        return {"service": "teamsim", "version": __version__, "sessions": len(manager.list())}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            session = manager.create(body.document)
        except ScenarioSyntaxError as exc:
            return JSONResponse(
                status_code=422,
                content={"diagnostics": [{"severity": "error", "path": "", "message": str(exc)}]},
            )
        except ScenarioSemanticError as exc:
            return JSONResponse(
                status_code=422,
                content={"diagnostics": [{"severity": "error", "path": exc.path, "message": str(exc)}]},
            )
        except SessionError as exc:
            if exc.status == 422:
                return JSONResponse(
                    status_code=422,
                    content={"diagnostics": [{"severity": "error", "path": "", "message": str(exc)}]},
                )
            raise
        return {
            "session": session.id,
            "diagnostics": [
                {"severity": d.severity, "path": d.path, "message": d.message}
                for d in session.diagnostics
            ],
        }

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": manager.list()}

    @app.get("/sessions/{sid}")
    def session_info(sid: str):
        return manager.get(sid).info()

    @app.patch("/sessions/{sid}/agents")
    def update_agents(sid: str, body: AgentEditsBody):
        diagnostics = manager.get(sid).update_members(body.edits)
        return {"diagnostics": diagnostics}

    @app.post("/sessions/{sid}/start")
    def start(sid: str, body: StartBody | None = None):
        pacing = body.pacing_sps if body else None
        manager.get(sid).start(pacing)
        return manager.get(sid).info()

    @app.post("/sessions/{sid}/pause")
    def pause(sid: str):
        manager.get(sid).pause()
        return manager.get(sid).info()

    @app.post("/sessions/{sid}/resume")
    def resume(sid: str):
        manager.get(sid).resume()
        return manager.get(sid).info()

    @app.post("/sessions/{sid}/abort")
    def abort(sid: str):
        manager.get(sid).abort()
        return manager.get(sid).info()

    @app.get("/sessions/{sid}/events")
    def events(sid: str, since: Optional[int] = None, wait_s: float = 0.0, limit: int = 2000):
        session = manager.get(sid)
        items = session.read_items(since, limit=limit, wait_s=min(wait_s, 10.0))
        next_seq = items[-1]["seq"] + 1 if items else (since or 0)
        return {"items": items, "next": next_seq, "state": session.state}

    @app.get("/sessions/{sid}/stream")
    def stream(sid: str, since: Optional[int] = None):
        session = manager.get(sid)
        return StreamingResponse(stream_sse(session, since), media_type="text/event-stream")

    @app.post("/sessions/{sid}/interview")
    def interview(sid: str, body: InterviewBody):
        try:
            answer = manager.get(sid).interview_agent(body.agent, body.question)
        except PolicyFailure as exc:
            return JSONResponse(status_code=502, content={"error": str(exc)})
        return answer.to_doc()

    @app.get("/sessions/{sid}/results")
    def results(sid: str):
        return manager.get(sid).results()

    @app.get("/sessions/{sid}/log")
    def log(sid: str):
        return PlainTextResponse(
            manager.get(sid).log_document(), media_type="application/json"
        )

    return app
