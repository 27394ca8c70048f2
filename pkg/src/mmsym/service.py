"""HTTP control plane for one live sparsification session.

One session, one worker: commands execute strictly serially off a
single-flight slot (a second command while one runs is rejected with
409).  Reads never block: GET /api/session returns the latest published
snapshot, which is only replaced when a command completes.  Completed
iterations are fanned out to every /api/session/events subscriber as
server-sent events; a slow subscriber drops events and receives an
explicit gap marker instead.

The session state lives in the projected cyclic representation between
commands; a Step is an ALS burst whose deviation from the cyclic
structure is folded back at the burst boundary (and, within a burst,
wherever the schedule projects).
"""

from __future__ import annotations

import json
import queue
import threading
from fractions import Fraction
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from . import search
from .catalog import save as save_decomposition

SNAPSHOT_HISTORY = 200
SUBSCRIBER_BUFFER = 4096


def _sig6(value: float) -> float:
    return float(f"{value:.6g}")


class _Subscriber:
    def __init__(self, epoch: int):
        self.queue: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_BUFFER)
        self.epoch = epoch
        self.gap = False
        self.closed = False


class SessionManager:
    """Owns the session state, the single worker, and the event fan-out."""

    def __init__(self, state: Optional[search.SessionState], workdir: str = "."):
        self._state = state
        self._lock = threading.Lock()
        self._busy = False
        self._last_error: Optional[str] = None
        self._epoch = 0
        self._subscribers: list = []
        self.workdir = Path(workdir)

    # -- snapshots -----------------------------------------------------

    def has_session(self) -> bool:
        with self._lock:
            return self._state is not None

    def snapshot(self) -> dict:
        with self._lock:
            state = self._state
            busy = self._busy
            last_error = self._last_error
        if state is None:
            raise LookupError("no session")
        last_round = None
        if state.last_round is not None:
            last_round = {k: v for k, v in state.last_round.items()
                          if k != "decomposition"}
        return {
            "n": state.n,
            "rank": state.rank,
            "p": state.p,
            "q": state.q,
            "busy": busy,
            "last_error": last_error,
            "iteration": state.iteration,
            "objective": _sig6(state.objective),
            "sparsity": state.sparsity,
            "seed": state.seed,
            "factors": {
                name: [[_sig6(v) for v in row] for row in blk.tolist()]
                for name, blk in state.factors.blocks().items()
            },
            "last_round_attempt": last_round,
            "history": [
                {"iter": i, "objective": _sig6(o), "sparsity": s}
                for i, o, s in state.history[-SNAPSHOT_HISTORY:]
            ],
        }

    # -- events --------------------------------------------------------

    def subscribe(self) -> _Subscriber:
        sub = _Subscriber(self._epoch)
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def _broadcast(self, record: dict) -> None:
        with self._lock:
            subs = list(self._subscribers)
        for sub in subs:
            if sub.closed:
                continue
            try:
                if sub.gap:
                    sub.queue.put_nowait({"gap": True})
                    sub.gap = False
                sub.queue.put_nowait(record)
            except queue.Full:
                sub.gap = True

    def _close_streams(self) -> None:
        with self._lock:
            subs = list(self._subscribers)
            self._subscribers.clear()
            self._epoch += 1
        for sub in subs:
            sub.closed = True
            try:
                sub.queue.put_nowait({"closed": True})
            except queue.Full:
                pass

    # -- commands ------------------------------------------------------

    def submit(self, command: dict) -> dict:
        """Validate, claim the single-flight slot, and execute the command
        on a worker thread.  Returns as soon as the command is accepted;
        completion is observed through snapshots and the event stream."""
        kind = command.get("type")
        if kind not in ("step", "project", "round", "reset", "load", "save"):
            raise ValueError(f"unknown command type {kind!r}")
        self._validate(kind, command)
        with self._lock:
            if self._busy:
                raise BlockingIOError("a command is already executing")
            if self._state is None and kind not in ("reset", "load"):
                raise ValueError("no session; load factors or reset first")
            self._busy = True
            self._last_error = None
        threading.Thread(target=self._execute, args=(command,), daemon=True).start()
        return {"status": "accepted", "type": kind}

    @staticmethod
    def _validate(kind: str, command: dict) -> None:
        if kind == "step":
            if int(command.get("iterations", 0)) < 0 \
                    or float(command.get("lambda", 0.0)) < 0 \
                    or int(command.get("zeros", 0)) < 0:
                raise ValueError("step parameters must be nonnegative")
        if kind == "round":
            values = [Fraction(v) for v in command.get("value_set", ["0", "1", "-1"])]
            gaps = [abs(u - v) for i, u in enumerate(values) for v in values[i + 1:]]
            if gaps and float(command.get("tol", 1e-2)) >= min(gaps) / 2:
                raise ValueError("tolerance too large for the value set")
        if kind in ("load", "save") and not command.get("file"):
            raise ValueError("missing file name")

    def wait_idle(self, timeout: float = 30.0) -> None:
        """Block until no command is executing (test and shutdown helper)."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if not self._busy:
                    return
            time.sleep(0.002)
        raise TimeoutError("worker still busy")

    def last_error(self) -> Optional[str]:
        with self._lock:
            return self._last_error

    def _execute(self, command: dict) -> None:
        try:
            handler = getattr(self, f"_cmd_{command['type']}")
            handler(command)
        except Exception as exc:  # noqa: BLE001
            with self._lock:
                self._last_error = str(exc)
        finally:
            with self._lock:
                self._busy = False

    def _publish(self, state: search.SessionState) -> None:
        with self._lock:
            self._state = state

    def _cmd_step(self, command: dict) -> None:
        iterations = int(command.get("iterations", 0))
        lam = float(command.get("lambda", 0.0))
        zeros = int(command.get("zeros", 0))
        if iterations < 0 or lam < 0 or zeros < 0:
            raise ValueError("step parameters must be nonnegative")
        schedule = search.Schedule.single(iterations, lam=lam, zeros=zeros,
                                          project_every=0)
        state, _ = search.run_schedule(self._state, schedule,
                                       on_event=self._broadcast)
        self._publish(state)

    def _cmd_project(self, command: dict) -> None:
        state = self._state
        f = search.cyclic_project(*search.assemble(state.factors), state.p, state.q)
        self._publish(search.SessionState(
            n=state.n, rank=state.rank, p=state.p, q=state.q, factors=f,
            objective=search.objective_cyclic(f), sparsity=search.sparsity_count(f),
            iteration=state.iteration, seed=state.seed, history=state.history,
            last_round=state.last_round))

    def _cmd_round(self, command: dict) -> None:
        state = self._state
        value_set = tuple(Fraction(v) for v in command.get("value_set", ["0", "1", "-1"]))
        tol = float(command.get("tol", 1e-2))
        result = search.round_decomposition(state.factors, value_set, tol)
        record = {"ok": result.ok, "message": result.message,
                  "iteration": state.iteration}
        if result.ok:
            path = self.workdir / f"round_iter{state.iteration}.json"
            save_decomposition(result.decomposition, path)
            record["path"] = str(path)
            record["residual_norm_sq"] = str(result.residual_norm_sq)
        self._publish(search.SessionState(
            n=state.n, rank=state.rank, p=state.p, q=state.q,
            factors=state.factors, objective=state.objective,
            sparsity=state.sparsity, iteration=state.iteration,
            seed=state.seed, history=state.history, last_round=record))

    def _cmd_reset(self, command: dict) -> None:
        state = self._state
        seed = int(command.get("seed", 0))
        if state is None:
            n = int(command["n"])
            rank = int(command["rank"])
            p = int(command["p"])
            q = int(command["q"])
        else:
            n, rank, p, q = state.n, state.rank, state.p, state.q
        self._close_streams()
        self._publish(search.new_session(n, rank, p, q, seed))

    def _cmd_load(self, command: dict) -> None:
        path = self.workdir / str(command["file"])
        self._publish(search.load_factors(path))

    def _cmd_save(self, command: dict) -> None:
        path = self.workdir / str(command["file"])
        search.save_factors(self._state, path)


def build_app(initial: Optional[search.SessionState] = None,
              n: int = 3, rank: int = 23, p: int = 11, q: int = 4,
              seed: int = 0, workdir: str = ".",
              create: bool = True) -> FastAPI:
    """Assemble the FastAPI application around one SessionManager."""
    if initial is None and create:
        initial = search.new_session(n, rank, p, q, seed)
    manager = SessionManager(initial, workdir=workdir)
    app = FastAPI(title="mmsym steering session")
    app.state.manager = manager
    # the dashboard may be served from another origin (or file://)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/session")
    def session():
        try:
            return manager.snapshot()
        except LookupError:
            return JSONResponse(status_code=404, content={"error": "no session"})

    @app.post("/api/session/command")
    def command(body: dict):
        try:
            return manager.submit(body)
        except BlockingIOError as exc:
            return JSONResponse(status_code=409,
                                content={"status": "rejected", "reason": str(exc)})
        except (ValueError, KeyError) as exc:
            return JSONResponse(status_code=422,
                                content={"status": "rejected", "reason": str(exc)})
        except Exception as exc:  # noqa: BLE001
            return JSONResponse(status_code=500,
                                content={"status": "error", "reason": str(exc)})

    @app.get("/api/session/events")
    def events():
        if not manager.has_session():
            return JSONResponse(status_code=404, content={"error": "no session"})
        sub = manager.subscribe()

        def stream():
            try:
                while True:
                    try:
                        record = sub.queue.get(timeout=30.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if record.get("closed"):
                        return
                    yield f"data: {json.dumps(record)}\n\n"
            finally:
                manager.unsubscribe(sub)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
