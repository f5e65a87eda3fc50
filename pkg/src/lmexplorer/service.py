"""HTTP/JSON API exposing exploration sessions.

Routes (JSON bodies, errors as {code, message, detail}):

    POST /api/sessions                             create a session
    POST /api/sessions/{sid}/expand                expand one node
    GET  /api/sessions/{sid}/tree                  minima-tree snapshot
    GET  /api/sessions/{sid}/scene                 render geometry
    GET  /api/sessions/{sid}/status                {state, progress}
    GET  /api/sessions/{sid}/minima/{node_id}      animation payload
    GET  /api/sessions/{sid}/roadmaps/{level}      vertex/edge arrays

Sample-budget expansions run synchronously; time budgets run in a
worker thread (202, poll status).  One expansion per session at a time;
tree reads always serve the last committed snapshot.  Session replay
records are persisted under EXPLORER_DATA_DIR.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path as FsPath

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from . import explorer, fixtures, pathopt
from .explorer import LevelExhausted, NodeUnknown, Params, SampleBudget, Session, TimeBudget
from .roadmap import GrowStats
from .scene import DiskShape, R1Segment, SceneError, save_scene, workspace_pose


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class CreateSessionRequest(BaseModel):
    scene: str | dict
    bundle: str | dict | list
    params: dict = Field(default_factory=dict)
    seed: int = 0


class BudgetModel(BaseModel):
    samples: int | None = Field(default=None, gt=0)
    seconds: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.samples is None) == (self.seconds is None):
            raise ValueError("specify exactly one of samples or seconds")
        return self


class ExpandRequest(BudgetModel):
    node_id: str


class ExpansionResponse(BaseModel):
    session: str
    report: dict
    snapshot: dict


class SessionHandle:
    """One live session plus its service-side bookkeeping."""

    def __init__(self, session: Session, session_id: str):
        self.session = session
        self.id = session_id
        self.lock = threading.Lock()  # guards expansion + snapshot commit
        self.state = "idle"  # "idle" | "expanding"
        self.snapshot = session.snapshot()
        self.progress: GrowStats | None = None
        self.last_error: str | None = None


class _TrackingPtc:
    """Wraps a budget so the status endpoint can see samples drawn."""

    def __init__(self, inner, handle: SessionHandle):
        self.inner = inner
        self.handle = handle

    def begin(self):
        self.inner.begin()

    def should_stop(self, stats):
        self.handle.progress = stats
        return self.inner.should_stop(stats)


def _data_dir(override: str | None = None) -> FsPath:
    root = override or os.environ.get("EXPLORER_DATA_DIR", "./explorer_data")
    return FsPath(root)


def create_app(data_dir: str | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="local-minima explorer", version="0.1.0")
    sessions: dict[str, SessionHandle] = {}
    app.state.sessions = sessions
    app.state.data_dir = _data_dir(data_dir)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def handle_of(sid: str) -> SessionHandle:
        if sid not in sessions:
            raise ApiError(404, "session_unknown", f"no session {sid!r}")
        return sessions[sid]

    def persist(handle: SessionHandle) -> None:
        try:
            root = app.state.data_dir
            root.mkdir(parents=True, exist_ok=True)
            doc = handle.session.document()
            (root / f"session-{handle.id}.json").write_text(
                json.dumps(doc, sort_keys=True, indent=1)
            )
        except OSError:
            pass  # persistence is best-effort; the API stays live

    @app.post("/api/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            scene_doc = fixtures.scene_doc(req.scene) if isinstance(req.scene, str) else req.scene
            bundle_doc = fixtures.bundle_doc(req.bundle) if isinstance(req.bundle, str) else req.bundle
        except KeyError as exc:
            raise ApiError(400, "fixture_unknown", str(exc)) from None
        try:
            params = Params(**{**Params().__dict__, **req.params})
            session = explorer.new_session(scene_doc, bundle_doc, params, req.seed)
        except (SceneError, TypeError, ValueError) as exc:
            raise ApiError(400, "invalid_session", str(exc)) from None
        sid = uuid.uuid4().hex[:12]
        handle = SessionHandle(session, sid)
        sessions[sid] = handle
        persist(handle)
        return {"session": sid, "snapshot": handle.snapshot}

    def _run_expansion(handle: SessionHandle, node_id: str, ptc) -> dict:
        try:
            report = explorer.expand(handle.session, node_id, _TrackingPtc(ptc, handle))
            handle.snapshot = handle.session.snapshot()
            handle.last_error = None
            return report.to_dict()
        finally:
            handle.progress = None
            handle.state = "idle"
            persist(handle)

    @app.post("/api/sessions/{sid}/expand")
    def expand(sid: str, req: ExpandRequest):
        handle = handle_of(sid)
        with handle.lock:
            if handle.state != "idle":
                raise ApiError(409, "busy", "an expansion is already in flight")
            session = handle.session
            if req.node_id not in session.tree.nodes:
                raise ApiError(404, "node_unknown", f"no node {req.node_id!r}")
            node = session.tree.nodes[req.node_id]
            if node.level >= session.depth:
                raise ApiError(422, "level_exhausted", "node is at the top level; nothing above to grow")
            handle.state = "expanding"
        if req.samples is not None:
            try:
                report = _run_expansion(handle, req.node_id, SampleBudget(req.samples))
            except (NodeUnknown, LevelExhausted) as exc:  # pragma: no cover - preflighted
                raise ApiError(422, "expansion_failed", str(exc)) from None
            return ExpansionResponse(session=sid, report=report, snapshot=handle.snapshot)

        def worker():
            try:
                _run_expansion(handle, req.node_id, TimeBudget(req.seconds))
            except Exception as exc:  # surface via status
                handle.last_error = str(exc)

        threading.Thread(target=worker, daemon=True).start()
        return JSONResponse(status_code=202, content={"session": sid, "status": "expanding"})

    @app.get("/api/sessions/{sid}/tree")
    def get_tree(sid: str):
        return handle_of(sid).snapshot

    @app.get("/api/sessions/{sid}/status")
    def get_status(sid: str):
        handle = handle_of(sid)
        progress = handle.progress
        return {
            "state": handle.state,
            "iteration": handle.session.iteration,
            "samples": progress.samples if progress else 0,
            "error": handle.last_error,
        }

    @app.get("/api/sessions/{sid}/scene")
    def get_scene(sid: str):
        session = handle_of(sid).session
        doc = save_scene(session.scene)
        robots = []
        for i, spec in enumerate(session.scene.robots):
            shape = (
                {"type": "disk", "radius": spec.shape.radius}
                if isinstance(spec.shape, DiskShape)
                else {"type": "polygon", "points": spec.shape.points.tolist()}
            )
            robots.append(
                {
                    "name": spec.name,
                    "shape": shape,
                    "start": list(workspace_pose(spec.space, spec.start)),
                    "goal": list(workspace_pose(spec.space, spec.goal)),
                    "track": (
                        {"from": spec.space.start.tolist(), "to": spec.space.end.tolist()}
                        if isinstance(spec.space, R1Segment)
                        else None
                    ),
                }
            )
        doc["render_robots"] = robots
        doc["levels"] = session.depth
        return doc

    @app.get("/api/sessions/{sid}/minima/{node_id}")
    def get_minimum(sid: str, node_id: str, steps: int = 200):
        session = handle_of(sid).session
        if node_id not in session.tree.nodes:
            raise ApiError(404, "node_unknown", f"no node {node_id!r}")
        node = session.tree.nodes[node_id]
        if node.path is None:
            raise ApiError(404, "node_unknown", "the root has no path")
        space = session.seq.levels[node.path.level]
        traj = pathopt.robot_trajectories(space, node.path, n_steps=steps)
        return {
            "node": node_id,
            "level": node.level,
            "cost": node.cost,
            "steps": steps,
            "robots": {
                session.scene.robots[ridx].name: poses.tolist() for ridx, poses in traj.items()
            },
        }

    @app.get("/api/sessions/{sid}/roadmaps/{level}")
    def get_roadmap(sid: str, level: int):
        session = handle_of(sid).session
        if not 1 <= level <= session.depth:
            raise ApiError(404, "level_unknown", f"levels run 1..{session.depth}")
        pair = session.pairs[level - 1]
        sparse = pair.sparse
        live = sorted(sparse.graph.nodes())
        return {
            "level": level,
            "dense": {
                "vertices": pair.dense.coords.tolist(),
                "edges": [[a, b] for a, b, _ in pair.dense.edges],
            },
            "sparse": {
                "vertices": {str(i): sparse.vertex(i).tolist() for i in live},
                "edges": [[a, b] for a, b in sparse.edge_list()],
            },
        }

    if static_dir and FsPath(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
