"""HTTP/JSON facade over the review store.

The service owns no business rules: it translates requests into store
calls and store errors into {code, message, field?} bodies. Reviews are
blind by default; a reviewer sees only their own verdicts unless the
service was started unblinded.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from sts.mining import ScenarioInstance
from sts.scene import Scene, SceneParseError, SceneValidationError, load_scene
from sts.verifier.store import ReviewStore
from sts.verifier.types import (
    ConflictError,
    MergePolicy,
    NotFoundError,
    Review,
    ValidationError,
)

EXCERPT_RADIUS_M = 60.0

SceneSource = Callable[[str], Scene | None]


class SceneDirectory:
    """Lazy scene loader over a directory of <scene_id>.scene.json
    files, with a small cache keyed by scene id."""

    def __init__(self, root: str | Path) -> None:
        self._root = Path(root)
        self._cache: dict[str, Scene | None] = {}

    def __call__(self, scene_id: str) -> Scene | None:
        if scene_id not in self._cache:
            path = self._root / f"{scene_id}.scene.json"
            try:
                self._cache[scene_id] = load_scene(path)
            except (FileNotFoundError, SceneParseError,
                    SceneValidationError):
                self._cache[scene_id] = None
        return self._cache[scene_id]


def _state_dict(state) -> dict:
    doc = {"frame": state.frame, "x": state.x, "y": state.y,
           "yaw": state.yaw, "speed": state.speed}
    visibility = getattr(state, "visibility", None)
    if visibility is not None:
        doc["visibility"] = visibility
    return doc


def _near(points, origin: tuple[float, float], radius: float) -> bool:
    ox, oy = origin
    return any(math.hypot(x - ox, y - oy) <= radius
               for x, y in points)


def scene_excerpt(instance: ScenarioInstance, scene: Scene,
                  radius: float = EXCERPT_RADIUS_M) -> dict:
    """The slice of a scene a reviewer needs: subject trajectories over
    the window, map geometry near the ego, and per-frame view names."""
    lo, hi = instance.frame_start, instance.frame_end
    ego_states = [s for s in scene.ego if lo <= s.frame <= hi]
    origin = (ego_states[0].x, ego_states[0].y)
    subjects = {}
    for track in scene.agents:
        if track.agent_id not in instance.agent_ids:
            continue
        subjects[track.agent_id] = {
            "agent_class": track.agent_class,
            "size": [track.size.length, track.size.width,
                     track.size.height],
            "states": [_state_dict(s) for s in track.states
                       if lo <= s.frame <= hi],
        }
    lanes = [lane for lane in scene.map.lanes
             if _near(lane.centerline, origin, radius)]
    boundary_ids = {lane.left_boundary_id for lane in lanes}
    boundary_ids |= {lane.right_boundary_id for lane in lanes}
    boundaries = [b for b in scene.map.boundaries
                  if b.boundary_id in boundary_ids
                  or _near(b.polyline, origin, radius)]
    crosswalks = [c for c in scene.map.crosswalks
                  if _near(c.polygon, origin, radius)]
    return {
        "scene_id": scene.scene_id,
        "frames": [{"index": f.index, "timestamp_us": f.timestamp_us}
                   for f in scene.frames if lo <= f.index <= hi],
        "ego": [_state_dict(s) for s in ego_states],
        "subjects": subjects,
        "map": {
            "lanes": [{"lane_id": lane.lane_id,
                       "centerline": [list(p)
                                      for p in lane.centerline]}
                      for lane in lanes],
            "boundaries": [{"boundary_id": b.boundary_id,
                            "crossable": b.crossable,
                            "polyline": [list(p) for p in b.polyline]}
                           for b in boundaries],
            "crosswalks": [{"id": c.id,
                            "polygon": [list(p) for p in c.polygon]}
                           for c in crosswalks],
        },
        "views": list(instance.views),
    }


class SessionBody(BaseModel):
    reviewer: str
    scenario_ids: list[str] | None = None


class ReviewBody(BaseModel):
    reviewer: str
    positive: bool
    invalid_negatives: list[str] = Field(default_factory=list)
    elapsed_ms: int = 0
    scenario_id: str | None = None


class MergeBody(BaseModel):
    positive_rule: str = "majority"
    negative_rule: str = "full_agreement"
    quorum: int = 3


def _error(status: int, code: str, message: str,
           field: str | None = None) -> JSONResponse:
    body = {"code": code, "message": message}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(store: ReviewStore, *,
               scenes: SceneSource | str | Path | None = None,
               unblind: bool = False,
               media_index: dict | None = None) -> FastAPI:
    """Wire the review endpoints around one open store.

    scenes supplies full trajectories for the detail endpoint; without
    it the excerpt field is null. media_index maps scene ids to opaque
    image path payloads passed straight through to the client.
    """
    if isinstance(scenes, (str, Path)):
        scenes = SceneDirectory(scenes)
    app = FastAPI(title="scenario review service", docs_url=None,
                  redoc_url=None)

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(ValidationError)
    async def _invalid(request: Request, exc: ValidationError):
        return _error(422, "validation", str(exc), exc.field)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request,
                           exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", ())
                         if part != "body") or None
        return _error(422, "validation",
                      first.get("msg", "invalid request body"), field)

    def _summary(inst: ScenarioInstance) -> dict:
        return {
            "scenario_id": inst.scenario_id,
            "scene_id": inst.scene_id,
            "type": inst.type,
            "category": inst.category,
            "frame_start": inst.frame_start,
            "frame_end": inst.frame_end,
            "status": inst.status,
            "review_count": len(store.reviews(inst.scenario_id)),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody) -> dict:
        session = store.create_session(
            body.reviewer,
            None if body.scenario_ids is None
            else tuple(body.scenario_ids))
        return session.to_dict()

    @app.get("/scenarios")
    def list_scenarios(status: str | None = None,
                       reviewer: str | None = None,
                       page: int = Query(default=1, ge=1),
                       page_size: int = Query(default=50, ge=1,
                                              le=500)) -> dict:
        if status is not None and status not in ("mined", "accepted",
                                                 "rejected"):
            raise ValidationError(f"unknown status '{status}'",
                                  field="status")
        found = store.instances(status=status, pending_for=reviewer)
        start = (page - 1) * page_size
        return {
            "items": [_summary(i)
                      for i in found[start:start + page_size]],
            "page": page,
            "page_size": page_size,
            "total": len(found),
        }

    @app.get("/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str,
                     reviewer: str | None = None) -> dict:
        inst = store.instance(scenario_id)
        if unblind:
            visible = store.reviews(scenario_id)
        elif reviewer is not None:
            visible = [r for r in store.reviews(scenario_id)
                       if r.reviewer == reviewer]
        else:
            visible = []
        scene = scenes(inst.scene_id) if scenes is not None else None
        doc = {
            "instance": inst.to_dict(),
            "reviews": [r.to_dict() for r in visible],
            "excerpt": (scene_excerpt(inst, scene)
                        if scene is not None else None),
        }
        if media_index is not None:
            doc["images"] = media_index.get(inst.scene_id)
        return doc

    @app.post("/scenarios/{scenario_id}/review", status_code=201)
    def post_review(scenario_id: str, body: ReviewBody) -> dict:
        if body.scenario_id is not None \
                and body.scenario_id != scenario_id:
            raise ValidationError(
                f"body scenario_id '{body.scenario_id}' does not "
                f"match path '{scenario_id}'", field="scenario_id")
        review = Review(scenario_id=scenario_id,
                        reviewer=body.reviewer,
                        positive=body.positive,
                        invalid_negatives=tuple(body.invalid_negatives),
                        elapsed_ms=body.elapsed_ms)
        return store.submit_review(review).to_dict()

    @app.post("/merge")
    def post_merge(body: MergeBody | None = None) -> dict:
        body = body or MergeBody()
        policy = MergePolicy(positive_rule=body.positive_rule,
                             negative_rule=body.negative_rule,
                             quorum=body.quorum)
        return store.merge(policy).to_dict()

    @app.get("/stats")
    def get_stats() -> dict:
        return store.stats()

    return app
