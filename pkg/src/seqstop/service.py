"""HTTP service hosting live sequential trials.

Each trial session is persisted as an append-only JSON-lines file under the
data directory (``SEQPRT_DATA_DIR``); the in-memory state is always the
fold of that event log through the stopping-rule engine, so a restart
reconstructs every session exactly.  Appends carry an optional idempotency
key: retrying a delivery never double-counts an observation.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import dp
from .design import DesignResult, design
from .engine import Decision, DecisionKind, new_trial, step
from .likelihood import TrialState
from .spec import (
    DegenerateSampleError,
    InfeasibleDesignError,
    SpecError,
    TestSpec,
    UsageError,
)

DATA_DIR_ENV = "SEQPRT_DATA_DIR"
BIND_ADDR_ENV = "SEQPRT_BIND_ADDR"
DEFAULT_BIND = "127.0.0.1:8474"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _spec_from_payload(payload: dict) -> TestSpec:
    if not isinstance(payload, dict):
        raise ApiError(400, "invalid_spec", "spec must be an object")
    allowed = {"family", "side", "null_value", "alpha", "beta", "n_max",
               "n1_max", "n2_max", "sigma0"}
    unknown = set(payload) - allowed
    if unknown:
        raise ApiError(400, "invalid_spec", f"unknown spec fields: {sorted(unknown)}")
    try:
        return TestSpec(**payload)
    except (SpecError, TypeError, ValueError) as exc:
        raise ApiError(400, "invalid_spec", str(exc)) from exc


def _spec_payload(spec: TestSpec) -> dict:
    out = {
        "family": spec.family.value,
        "side": spec.side.value,
        "null_value": spec.null_value,
        "alpha": spec.alpha,
        "beta": spec.beta,
    }
    if spec.is_two_sample:
        out["n1_max"] = spec.n1_max
        out["n2_max"] = spec.n2_max
    else:
        out["n_max"] = spec.n_max
    if spec.sigma0 is not None:
        out["sigma0"] = spec.sigma0
    return out


def _alt_payload(alt) -> Any:
    from .alternatives import DataDependentTAlt, MixtureAlt, PointAlt

    if isinstance(alt, tuple):
        return {"right": _alt_payload(alt[0]), "left": _alt_payload(alt[1])}
    if isinstance(alt, PointAlt):
        return {"theta1": alt.theta1, "delta": alt.delta}
    if isinstance(alt, DataDependentTAlt):
        return {"null_value": alt.null_value, "slope": alt.slope, "delta": alt.delta}
    if isinstance(alt, MixtureAlt):
        w = alt.weights
        return {"p_low": alt.p_low, "p_high": alt.p_high, "psi": alt.psi,
                "weights": [w[0], w[1]]}
    return None


@dataclass
class Session:
    id: str
    design: DesignResult
    trial: Any
    created_at: float
    updated_at: float
    path: Path
    deleted: bool = False
    decision: Decision | None = None
    observations: int = 0
    seen_keys: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def status(self) -> str:
        if self.decision is None or not self.decision.terminal:
            return "active"
        if self.decision.kind is DecisionKind.REJECT_NULL:
            return "rejected_H0"
        return "accepted_H0"

    def trajectory(self) -> list[list[float]]:
        trial = self.trial
        if isinstance(trial, TrialState):
            pts = trial.trajectory
        else:
            merged: dict[int, float] = {}
            for n, lg in trial.right.trajectory:
                merged[n] = lg
            for n, lg in trial.left.trajectory:
                merged[n] = max(merged.get(n, -math.inf), lg)
            pts = sorted(merged.items())
        return [[n, math.exp(lg)] for n, lg in pts]


class TrialStore:
    """Registry of sessions backed by one JSONL event file each."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self.create_keys: dict[str, str] = {}
        self.lock = threading.Lock()
        self._load()

    # -- persistence -------------------------------------------------------

    def _append_event(self, session: Session, event: dict) -> None:
        with open(session.path, "a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _load(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            try:
                with open(path) as fh:
                    events = [json.loads(line) for line in fh if line.strip()]
            except (OSError, json.JSONDecodeError):
                continue
            if not events or events[0].get("type") != "create":
                continue
            session = self._fold(events, path)
            self.sessions[session.id] = session
            key = events[0].get("idempotency_key")
            if key:
                self.create_keys[key] = session.id

    def _fold(self, events: list[dict], path: Path) -> Session:
        head = events[0]
        spec = TestSpec(**head["spec"])
        d = DesignResult.from_gamma(spec, head["gamma"])
        session = Session(
            id=head["id"],
            design=d,
            trial=new_trial(d),
            created_at=head["ts"],
            updated_at=head["ts"],
            path=path,
        )
        for ev in events[1:]:
            if ev.get("type") == "delete":
                session.deleted = True
                continue
            if ev.get("type") != "obs":
                continue
            decision = self._apply_obs(session, ev["value"])
            session.updated_at = ev["ts"]
            key = ev.get("idempotency_key")
            if key:
                session.seen_keys[key] = self._obs_response(session, decision)
        return session

    # -- engine glue -------------------------------------------------------

    @staticmethod
    def _apply_obs(session: Session, value) -> Decision:
        obs = tuple(value) if isinstance(value, list) else value
        decision = step(session.trial, obs, session.design)
        session.observations += 1
        if decision.terminal:
            session.decision = decision
        return decision

    @staticmethod
    def _obs_response(session: Session, decision: Decision) -> dict:
        traj = session.trajectory()
        point = traj[-1] if traj else None
        d = session.design
        return {
            "n": decision.at_n,
            "decision": {
                "kind": decision.kind.value,
                "at_n": decision.at_n,
                "cause": decision.cause.value if decision.cause else None,
            },
            "trajectory_point": point,
            "L": point[1] if point else None,
            "A": d.boundaries.A,
            "B": d.boundaries.B,
            "gamma": d.gamma,
            "status": session.status,
        }

    # -- public operations -------------------------------------------------

    def create(self, body: dict) -> dict:
        key = body.get("idempotency_key")
        if key:
            with self.lock:
                existing = self.create_keys.get(key)
            if existing is not None:
                return self.snapshot(existing)
        spec = _spec_from_payload(body.get("spec"))
        gamma = body.get("gamma")
        calibrate = bool(body.get("calibrate", False))
        if gamma is None and not calibrate:
            raise ApiError(400, "invalid_request",
                           "provide either gamma or calibrate=true")
        if gamma is not None:
            if not (isinstance(gamma, (int, float)) and gamma > 0):
                raise ApiError(400, "invalid_request", "gamma must be positive")
            d = DesignResult.from_gamma(spec, float(gamma))
        else:
            try:
                if body.get("exact"):
                    d = dp.design_exact_prop(spec)
                else:
                    d = design(
                        spec,
                        n_reps=int(body.get("reps", 100_000)),
                        seed=int(body.get("seed", 0)),
                        threads=int(body.get("threads", 1)),
                    )
            except InfeasibleDesignError as exc:
                raise ApiError(422, "infeasible_design", str(exc)) from exc
            if not d.feasible:
                raise ApiError(422, "infeasible_design",
                               "early boundary crossings alone exceed alpha")
        now = time.time()
        session_id = uuid.uuid4().hex[:12]
        session = Session(
            id=session_id,
            design=d,
            trial=new_trial(d),
            created_at=now,
            updated_at=now,
            path=self.data_dir / f"{session_id}.jsonl",
        )
        event = {
            "type": "create",
            "id": session_id,
            "ts": now,
            "spec": _spec_payload(spec),
            "gamma": d.gamma,
            "method": d.method,
            "idempotency_key": key,
        }
        self._append_event(session, event)
        with self.lock:
            self.sessions[session_id] = session
            if key:
                self.create_keys[key] = session_id
        return self.snapshot(session_id)

    def _get(self, session_id: str) -> Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None or session.deleted:
            raise ApiError(404, "unknown_trial", f"no trial {session_id!r}")
        return session

    def append(self, session_id: str, body: dict) -> dict:
        session = self._get(session_id)
        if "value" in body and "values" in body:
            raise ApiError(400, "malformed_value", "send value or values, not both")
        if "values" in body:
            values = body["values"]
            if not (isinstance(values, list) and len(values) == 2):
                raise ApiError(400, "malformed_value", "values must be a pair [a, b]")
            value = values
        elif "value" in body:
            value = body["value"]
        else:
            raise ApiError(400, "malformed_value", "missing value")
        key = body.get("idempotency_key")
        with session.lock:
            if key and key in session.seen_keys:
                return session.seen_keys[key]
            if session.status != "active":
                raise ApiError(409, "trial_terminal",
                               "trial already reached a terminal decision")
            now = time.time()
            event = {"type": "obs", "value": value, "ts": now,
                     "idempotency_key": key}
            # persist first: a crash after this line loses no observation
            self._append_event(session, event)
            try:
                decision = self._apply_obs(session, value)
            except (SpecError, DegenerateSampleError, UsageError, TypeError,
                    ValueError) as exc:
                raise ApiError(400, "malformed_value", str(exc)) from exc
            session.updated_at = now
            response = self._obs_response(session, decision)
            if key:
                session.seen_keys[key] = response
            return response

    def snapshot(self, session_id: str) -> dict:
        session = self._get(session_id)
        d = session.design
        decision = session.decision
        return {
            "id": session.id,
            "spec": _spec_payload(d.spec),
            "boundaries": {"A": d.boundaries.A, "B": d.boundaries.B},
            "gamma": d.gamma,
            "umpbt_alt": _alt_payload(d.alternative),
            "status": session.status,
            "decision": None if decision is None or not decision.terminal else {
                "kind": decision.kind.value,
                "at_n": decision.at_n,
                "cause": decision.cause.value if decision.cause else None,
            },
            "n": session.observations,
            "trajectory": session.trajectory(),
            "created_at": session.created_at,
            "updated_at": session.updated_at,
        }

    def list_summaries(self) -> list[dict]:
        with self.lock:
            live = [s for s in self.sessions.values() if not s.deleted]
        live.sort(key=lambda s: s.updated_at, reverse=True)
        return [{
            "id": s.id,
            "family": s.design.spec.family.value,
            "status": s.status,
            "n": s.observations,
            "gamma": s.design.gamma,
            "trajectory": s.trajectory(),
            "created_at": s.created_at,
            "updated_at": s.updated_at,
        } for s in live]

    def delete(self, session_id: str) -> dict:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            return {"id": session_id, "deleted": True}
        with session.lock:
            if not session.deleted:
                session.deleted = True
                self._append_event(session, {"type": "delete", "ts": time.time()})
        return {"id": session_id, "deleted": True}


def create_app(data_dir: str | os.PathLike | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV, "./seqstop-data")
    store = TrialStore(Path(data_dir))
    app = FastAPI(title="seqstop session service")
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception as exc:
            raise ApiError(400, "malformed_json", "request body must be JSON") from exc
        if not isinstance(body, dict):
            raise ApiError(400, "malformed_json", "request body must be an object")
        return body

    @app.post("/trials", status_code=201)
    async def create_trial(request: Request):
        return store.create(await _json_body(request))

    @app.get("/trials")
    async def list_trials():
        return store.list_summaries()

    @app.get("/trials/{trial_id}")
    async def get_trial(trial_id: str):
        return store.snapshot(trial_id)

    @app.post("/trials/{trial_id}/observations")
    async def append_observation(trial_id: str, request: Request):
        return store.append(trial_id, await _json_body(request))

    @app.delete("/trials/{trial_id}")
    async def delete_trial(trial_id: str):
        return store.delete(trial_id)

    return app


def main() -> None:
    import uvicorn

    bind = os.environ.get(BIND_ADDR_ENV, DEFAULT_BIND)
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
