"""Two-phase numerical search for cyclic-invariant rank decompositions.

Phase 1 minimizes the cyclic-invariant least-squares objective over the
block factors (A, B, C, D) with entries box-constrained to [-1, 1],
using quasi-Newton descent with projected bounds.  Phase 2 alternates
regularized ALS sweeps on the assembled factor matrices with projection
back onto the cyclic-invariant block structure, steering entries toward
a discrete value set, and finishes by rounding to an exact decomposition
that is verified in rational arithmetic.

Factor layout: X = (A B C D), Y = (A D B C), Z = (A C D B) with
A of width P and B, C, D of width Q, P + 3Q = R.  Columns are vectorized
matrices in the same row-major order the exact core uses.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import Decomposition, Mat, RankOneTriple, matmul_tensor, residual
from .symmetry import canonical_triple, is_cube_term, shift_term

DEFAULT_VALUE_SET = (Fraction(0), Fraction(1), Fraction(-1))
DEFAULT_ZERO_THRESHOLD = 1e-3
DEFAULT_MAX_ABS = 1.0


class AlsSingularError(RuntimeError):
    """Singular Gram system in an unregularized ALS update."""


def matmul_tensor_np(n: int) -> np.ndarray:
    m = n * n
    exact = matmul_tensor(n)
    return np.array([float(v) for v in exact.data], dtype=float).reshape(m, m, m)


# ---------------------------------------------------------------------------
# Cyclic factor structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicFactors:
    a: np.ndarray  # (m, P)
    b: np.ndarray  # (m, Q)
    c: np.ndarray  # (m, Q)
    d: np.ndarray  # (m, Q)

    def __post_init__(self):
        m = self.a.shape[0]
        for blk in (self.b, self.c, self.d):
            if blk.shape != (m, self.q):
                raise ValueError("cyclic factor blocks must share shape")

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.a.shape[1]

    @property
    def q(self) -> int:
        return self.b.shape[1]

    @property
    def rank(self) -> int:
        return self.p + 3 * self.q

    def blocks(self) -> dict:
        return {"A": self.a, "B": self.b, "C": self.c, "D": self.d}


def check_pq(rank: int, p: int, q: int) -> None:
    if p < 0 or q < 0 or p + 3 * q != rank:
        raise ValueError(f"need P + 3Q = R, got P={p}, Q={q}, R={rank}")


def assemble(f: CyclicFactors) -> tuple:
    x = np.concatenate([f.a, f.b, f.c, f.d], axis=1)
    y = np.concatenate([f.a, f.d, f.b, f.c], axis=1)
    z = np.concatenate([f.a, f.c, f.d, f.b], axis=1)
    return x, y, z


def _mean3(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    # formulated so that three bit-identical copies average to themselves
    return u + ((v - u) + (w - u)) / 3.0


def cyclic_project(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                   p: int, q: int) -> CyclicFactors:
    """Average the three copies of each block back onto the invariant
    structure; exactly idempotent composed with assemble."""
    if x.shape != y.shape or y.shape != z.shape or x.shape[1] != p + 3 * q:
        raise ValueError("factor shapes do not match the (P, Q) layout")
    s1, s2, s3 = slice(p, p + q), slice(p + q, p + 2 * q), slice(p + 2 * q, p + 3 * q)
    return CyclicFactors(
        a=_mean3(x[:, :p], y[:, :p], z[:, :p]),
        b=_mean3(x[:, s1], y[:, s2], z[:, s3]),
        c=_mean3(x[:, s2], y[:, s3], z[:, s1]),
        d=_mean3(x[:, s3], y[:, s1], z[:, s2]),
    )


# ---------------------------------------------------------------------------
# Objectives and gradients
# ---------------------------------------------------------------------------

def model_tensor(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.einsum("ir,jr,kr->ijk", x, y, z)


def objective_full(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                   target: Optional[np.ndarray] = None) -> float:
    for mat in (x, y, z):
        if not np.all(np.isfinite(mat)):
            raise ValueError("non-finite factor entries")
    if target is None:
        n = int(round(x.shape[0] ** 0.5))
        target = matmul_tensor_np(n)
    diff = target - model_tensor(x, y, z)
    return float(np.sqrt(np.sum(diff * diff)))


def objective_cyclic(f: CyclicFactors, target: Optional[np.ndarray] = None) -> float:
    return objective_full(*assemble(f), target=target)


def gradient_cyclic(f: CyclicFactors, target: Optional[np.ndarray] = None) -> CyclicFactors:
    """Gradient of the squared objective with respect to every block
    entry, via the chain rule through the assembly map."""
    x, y, z = assemble(f)
    if target is None:
        n = int(round(f.m ** 0.5))
        target = matmul_tensor_np(n)
    e = target - model_tensor(x, y, z)
    gx = -2.0 * np.einsum("ijk,jr,kr->ir", e, y, z)
    gy = -2.0 * np.einsum("ijk,ir,kr->jr", e, x, z)
    gz = -2.0 * np.einsum("ijk,ir,jr->kr", e, x, y)
    p, q = f.p, f.q
    s1, s2, s3 = slice(p, p + q), slice(p + q, p + 2 * q), slice(p + 2 * q, p + 3 * q)
    return CyclicFactors(
        a=gx[:, :p] + gy[:, :p] + gz[:, :p],
        b=gx[:, s1] + gy[:, s2] + gz[:, s3],
        c=gx[:, s2] + gy[:, s3] + gz[:, s1],
        d=gx[:, s3] + gy[:, s1] + gz[:, s2],
    )


def _pack(f: CyclicFactors) -> np.ndarray:
    return np.concatenate([f.a.ravel(), f.b.ravel(), f.c.ravel(), f.d.ravel()])


def _unpack(vec: np.ndarray, m: int, p: int, q: int) -> CyclicFactors:
    pa = m * p
    pq = m * q
    return CyclicFactors(
        a=vec[:pa].reshape(m, p),
        b=vec[pa:pa + pq].reshape(m, q),
        c=vec[pa + pq:pa + 2 * pq].reshape(m, q),
        d=vec[pa + 2 * pq:].reshape(m, q),
    )


def random_factors(n: int, p: int, q: int, seed: int) -> CyclicFactors:
    """Seeded uniform initialization on [-1, 1], inside the box constraint."""
    m = n * n
    rng = np.random.default_rng(seed)
    return CyclicFactors(
        a=rng.uniform(-1.0, 1.0, (m, p)),
        b=rng.uniform(-1.0, 1.0, (m, q)),
        c=rng.uniform(-1.0, 1.0, (m, q)),
        d=rng.uniform(-1.0, 1.0, (m, q)),
    )


def phase1_optimize(n: int, rank: int, p: int, q: int, seed: int,
                    budget: int = 2000, max_abs: float = DEFAULT_MAX_ABS,
                    start: Optional[CyclicFactors] = None) -> tuple:
    """Box-constrained quasi-Newton descent on the squared cyclic
    objective.  Returns (best factors, objective); the best-so-far
    objective is non-increasing over the run and the result is
    deterministic given the seed."""
    check_pq(rank, p, q)
    m = n * n
    target = matmul_tensor_np(n)
    f0 = start if start is not None else random_factors(n, p, q, seed)
    best = {"v": _pack(f0), "obj": objective_cyclic(f0, target) ** 2}

    def fun(vec):
        f = _unpack(vec, m, p, q)
        diff = target - model_tensor(*assemble(f))
        val = float(np.sum(diff * diff))
        if val < best["obj"]:
            best["obj"] = val
            best["v"] = vec.copy()
        return val

    def jac(vec):
        return _pack(gradient_cyclic(_unpack(vec, m, p, q), target))

    minimize(
        fun, _pack(f0), jac=jac, method="L-BFGS-B",
        bounds=[(-max_abs, max_abs)] * (m * (p + 3 * q)),
        options={"maxiter": budget, "maxfun": 4 * budget, "ftol": 1e-18, "gtol": 1e-14},
    )
    f = _unpack(best["v"], m, p, q)
    return f, objective_cyclic(f, target)


# ---------------------------------------------------------------------------
# Regularized ALS with target matrices
# ---------------------------------------------------------------------------

def build_targets(factor: np.ndarray, zeros: int,
                  max_abs: float = DEFAULT_MAX_ABS) -> np.ndarray:
    """Smirnov-style target: cap oversized entries at +-max_abs, then set
    the `zeros` smallest-magnitude entries to exactly 0 (ties broken by
    row-major position)."""
    if zeros > factor.size:
        raise ValueError("zeros exceeds entry count")
    tilde = np.clip(factor, -max_abs, max_abs)
    if zeros > 0:
        flat = np.abs(tilde).ravel()
        order = np.lexsort((np.arange(flat.size), flat))
        kill = order[:zeros]
        flat_t = tilde.ravel()
        flat_t[kill] = 0.0
        tilde = flat_t.reshape(factor.shape)
    return tilde


def _khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m1, r = a.shape
    m2, _ = b.shape
    return (a[:, None, :] * b[None, :, :]).reshape(m1 * m2, r)


def als_update(target: np.ndarray, x: np.ndarray, y: np.ndarray, z: np.ndarray,
               slot: int, lam: float, tilde: np.ndarray) -> np.ndarray:
    """Exact minimizer of the ridge-regularized least-squares subproblem
    for one factor, the others held fixed."""
    m = x.shape[0]
    r = x.shape[1]
    if slot == 0:
        unf = target.reshape(m, m * m)
        kr = _khatri_rao(y, z)
        gram = (y.T @ y) * (z.T @ z)
    elif slot == 1:
        unf = target.transpose(1, 0, 2).reshape(m, m * m)
        kr = _khatri_rao(x, z)
        gram = (x.T @ x) * (z.T @ z)
    elif slot == 2:
        unf = target.transpose(2, 0, 1).reshape(m, m * m)
        kr = _khatri_rao(x, y)
        gram = (x.T @ x) * (y.T @ y)
    else:
        raise ValueError("slot must be 0, 1 or 2")
    rhs = unf @ kr + lam * tilde
    system = gram + lam * np.eye(r)
    try:
        if lam == 0.0 and np.linalg.cond(system) > 1e13:
            raise np.linalg.LinAlgError("ill-conditioned")
        sol = np.linalg.solve(system, rhs.T).T
    except np.linalg.LinAlgError:
        raise AlsSingularError(
            "singular Gram system at lambda=0; retry with a positive lambda"
        ) from None
    return sol


# ---------------------------------------------------------------------------
# Rounding to exact decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoundResult:
    ok: bool
    decomposition: Optional[Decomposition] = None
    residual_norm_sq: Optional[Fraction] = None
    failures: tuple = ()
    message: str = ""


def _snap_block(name: str, block: np.ndarray, values: Sequence[Fraction],
                tol: float, failures: list) -> list:
    snapped = []
    for i in range(block.shape[0]):
        row = []
        for j in range(block.shape[1]):
            e = block[i, j]
            best = min(values, key=lambda v: abs(e - float(v)))
            if abs(e - float(best)) > tol:
                failures.append((name, i, j, float(e)))
                row.append(None)
            else:
                row.append(best)
        snapped.append(row)
    return snapped


def _column_matrix(cols: list, col: int, n: int) -> Mat:
    rows = [[cols[i * n + j][col] for j in range(n)] for i in range(n)]
    return Mat.from_rows(rows)


def round_decomposition(f: CyclicFactors, value_set: Sequence = DEFAULT_VALUE_SET,
                        tol: float = 1e-2, allow_nonzero: bool = False) -> RoundResult:
    """Snap every block entry to the nearest value-set member and verify
    the resulting decomposition exactly."""
    values = [Fraction(v) for v in value_set]
    if len(values) != len(set(values)):
        raise ValueError("value set has duplicates")
    gaps = [abs(u - v) for i, u in enumerate(values) for v in values[i + 1:]]
    if gaps and tol >= min(gaps) / 2:
        raise ValueError("tolerance must be below half the minimum value-set gap")
    n = int(round(f.m ** 0.5))
    failures: list = []
    snapped = {name: _snap_block(name, blk, values, tol, failures)
               for name, blk in f.blocks().items()}
    if failures:
        return RoundResult(
            ok=False, failures=tuple(failures),
            message=f"{len(failures)} entries outside tolerance of the value set")
    triples = []
    try:
        for r in range(f.p):
            mat = _column_matrix(snapped["A"], r, n)
            triples.append(RankOneTriple(mat, mat, mat))
        for r in range(f.q):
            b = _column_matrix(snapped["B"], r, n)
            c = _column_matrix(snapped["C"], r, n)
            d = _column_matrix(snapped["D"], r, n)
            triples.extend([
                RankOneTriple(b, d, c),
                RankOneTriple(c, b, d),
                RankOneTriple(d, c, b),
            ])
    except ValueError as exc:
        return RoundResult(ok=False, message=f"rounded factors are degenerate: {exc}")
    dec = Decomposition(n, tuple(triples), name="rounded")
    _, norm_sq = residual(dec)
    if norm_sq != 0 and not allow_nonzero:
        return RoundResult(
            ok=False, residual_norm_sq=norm_sq,
            message=f"rounded decomposition has nonzero residual (norm_sq={norm_sq})")
    return RoundResult(ok=True, decomposition=dec, residual_norm_sq=norm_sq,
                       message="exact decomposition verified" if norm_sq == 0
                       else "rounded with nonzero residual (allowed)")


def factors_from_decomposition(dec: Decomposition, order=None) -> CyclicFactors:
    """Cast an exact cyclic-invariant decomposition to cyclic factors:
    cubes fill A, one representative per 3-orbit fills (B, C, D)."""
    n = dec.n
    m = n * n
    keys = {}
    for i, t in enumerate(dec.terms):
        keys.setdefault(canonical_triple(t), []).append(i)
    used = set()
    cubes, seeds = [], []
    for i, t in enumerate(dec.terms):
        if i in used:
            continue
        if is_cube_term(t):
            used.add(i)
            cubes.append(t)
            continue
        members = [i]
        cur = t
        for _ in range(2):
            cur = shift_term(cur)
            found = next(j for j in keys.get(canonical_triple(cur), []) if j not in used and j not in members)
            members.append(found)
        used.update(members)
        seeds.append(t)
    def vec(mat: Mat) -> np.ndarray:
        return np.array([float(e) for row in mat.rows for e in row])
    a = np.stack([vec(t.x) for t in cubes], axis=1) if cubes else np.zeros((m, 0))
    if seeds:
        b = np.stack([vec(t.x) for t in seeds], axis=1)
        c = np.stack([vec(t.z) for t in seeds], axis=1)
        d = np.stack([vec(t.y) for t in seeds], axis=1)
    else:
        b = c = d = np.zeros((m, 0))
    return CyclicFactors(a, b, c, d)


# ---------------------------------------------------------------------------
# Schedules and session state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchedulePhase:
    iterations: int
    lam: float = 0.0
    zeros: int = 0
    project_every: int = 0      # 0 = never project
    round_attempt: bool = False
    value_set: tuple = DEFAULT_VALUE_SET
    round_tol: float = 1e-2

    def __post_init__(self):
        if self.iterations < 0 or self.lam < 0 or self.zeros < 0:
            raise ValueError("schedule phase parameters must be nonnegative")


@dataclass(frozen=True)
class Schedule:
    phases: tuple

    @staticmethod
    def single(iterations: int, lam: float = 0.0, zeros: int = 0,
               project_every: int = 0, round_attempt: bool = False,
               value_set: tuple = DEFAULT_VALUE_SET, round_tol: float = 1e-2) -> "Schedule":
        return Schedule((SchedulePhase(iterations, lam, zeros, project_every,
                                       round_attempt, value_set, round_tol),))


def schedule_to_json(schedule: Schedule) -> dict:
    return {
        "format": 1,
        "kind": "schedule",
        "phases": [
            {
                "iterations": ph.iterations,
                "lambda": ph.lam,
                "zeros": ph.zeros,
                "project_every": ph.project_every,
                "round_attempt": ph.round_attempt,
                "value_set": [str(Fraction(v)) for v in ph.value_set],
                "round_tol": ph.round_tol,
            }
            for ph in schedule.phases
        ],
    }


def schedule_from_json(doc: dict) -> Schedule:
    if doc.get("kind", "schedule") != "schedule":
        raise ValueError("not a schedule document")
    phases = []
    for ph in doc.get("phases", []):
        phases.append(SchedulePhase(
            iterations=int(ph.get("iterations", 0)),
            lam=float(ph.get("lambda", 0.0)),
            zeros=int(ph.get("zeros", 0)),
            project_every=int(ph.get("project_every", 0)),
            round_attempt=bool(ph.get("round_attempt", False)),
            value_set=tuple(Fraction(v) for v in ph.get("value_set", ["0", "1", "-1"])),
            round_tol=float(ph.get("round_tol", 1e-2)),
        ))
    return Schedule(tuple(phases))


def load_schedule(path) -> Schedule:
    return schedule_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def save_schedule(schedule: Schedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_json(schedule), indent=1) + "\n",
                          encoding="utf-8")


def sparsity_count(f: CyclicFactors, threshold: float = DEFAULT_ZERO_THRESHOLD) -> int:
    return int(sum(int(np.sum(np.abs(blk) < threshold)) for blk in f.blocks().values()))


@dataclass(frozen=True)
class SessionState:
    n: int
    rank: int
    p: int
    q: int
    factors: CyclicFactors
    objective: float
    sparsity: int
    iteration: int = 0
    seed: int = 0
    history: tuple = ()            # ((iteration, objective, sparsity), ...)
    last_round: Optional[dict] = None

    HISTORY_LIMIT = 2000


def new_session(n: int, rank: int, p: int, q: int, seed: int) -> SessionState:
    check_pq(rank, p, q)
    f = random_factors(n, p, q, seed)
    return SessionState(
        n=n, rank=rank, p=p, q=q, factors=f,
        objective=objective_cyclic(f), sparsity=sparsity_count(f),
        iteration=0, seed=seed,
    )


def session_from_factors(n: int, f: CyclicFactors, seed: int = 0,
                         iteration: int = 0) -> SessionState:
    return SessionState(
        n=n, rank=f.rank, p=f.p, q=f.q, factors=f,
        objective=objective_cyclic(f), sparsity=sparsity_count(f),
        iteration=iteration, seed=seed,
    )


def run_schedule(state: SessionState, schedule: Schedule,
                 zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
                 max_abs: float = DEFAULT_MAX_ABS,
                 on_event=None) -> tuple:
    """Execute the phases in order and return (new state, event list).

    Each iteration performs one regularized ALS sweep (X, then Y, then Z
    with fresh target matrices); every ``project_every`` iterations the
    assembled factors are projected back onto the cyclic structure.  The
    final state always carries the projected cyclic view.  Failed round
    attempts are recorded and do not stop the schedule.  ``on_event``,
    when given, is called with each record as it is produced."""
    target = matmul_tensor_np(state.n)
    x, y, z = assemble(state.factors)
    p, q = state.p, state.q
    iteration = state.iteration
    history = list(state.history)
    events = []
    last_round = state.last_round
    for phase_idx, phase in enumerate(schedule.phases):
        for it in range(phase.iterations):
            x = als_update(target, x, y, z, 0, phase.lam,
                           build_targets(x, phase.zeros, max_abs))
            y = als_update(target, x, y, z, 1, phase.lam,
                           build_targets(y, phase.zeros, max_abs))
            z = als_update(target, x, y, z, 2, phase.lam,
                           build_targets(z, phase.zeros, max_abs))
            if phase.project_every and (it + 1) % phase.project_every == 0:
                x, y, z = assemble(cyclic_project(x, y, z, p, q))
            iteration += 1
            obj = objective_full(x, y, z, target)
            spars = sparsity_count(cyclic_project(x, y, z, p, q), zero_threshold)
            record = {"iter": iteration, "objective": obj, "sparsity": spars,
                      "phase": phase_idx}
            history.append((iteration, obj, spars))
            events.append(record)
            if on_event is not None:
                on_event(record)
        if phase.round_attempt:
            result = round_decomposition(cyclic_project(x, y, z, p, q),
                                         phase.value_set, phase.round_tol)
            last_round = {
                "ok": result.ok,
                "message": result.message,
                "iteration": iteration,
            }
            events.append({"iter": iteration, "phase": phase_idx,
                           "round_attempt": dict(last_round)})
            if result.ok:
                last_round["decomposition"] = result.decomposition
    factors = cyclic_project(x, y, z, p, q)
    new_state = SessionState(
        n=state.n, rank=state.rank, p=p, q=q, factors=factors,
        objective=objective_cyclic(factors, target),
        sparsity=sparsity_count(factors, zero_threshold),
        iteration=iteration, seed=state.seed,
        history=tuple(history[-SessionState.HISTORY_LIMIT:]),
        last_round=last_round,
    )
    if not events:
        events.append({"iter": iteration, "objective": new_state.objective,
                       "sparsity": new_state.sparsity, "phase": None,
                       "note": "empty schedule"})
    return new_state, events


# ---------------------------------------------------------------------------
# Bit-exact factor files
# ---------------------------------------------------------------------------

def _float_to_hex(v: float) -> str:
    return struct.pack(">d", v).hex()


def _hex_to_float(s: str) -> float:
    return struct.unpack(">d", bytes.fromhex(s))[0]


def save_factors(state: SessionState, path) -> None:
    doc = {
        "format": 1,
        "kind": "factors",
        "n": state.n,
        "p": state.p,
        "q": state.q,
        "iteration": state.iteration,
        "seed": state.seed,
        "blocks": {
            name: [[_float_to_hex(v) for v in row] for row in blk.tolist()]
            for name, blk in state.factors.blocks().items()
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_factors(path) -> SessionState:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("kind") != "factors":
        raise ValueError("not a factor-matrix file")
    blocks = {}
    for name in ("A", "B", "C", "D"):
        raw = doc["blocks"][name]
        blocks[name] = np.array(
            [[_hex_to_float(v) for v in row] for row in raw], dtype=float
        ).reshape(len(raw), len(raw[0]) if raw and raw[0] else 0)
    n = int(doc["n"])
    m = n * n
    for name in blocks:
        if blocks[name].size == 0:
            blocks[name] = blocks[name].reshape(m, 0)
    f = CyclicFactors(blocks["A"], blocks["B"], blocks["C"], blocks["D"])
    return session_from_factors(n, f, seed=int(doc.get("seed", 0)),
                                iteration=int(doc.get("iteration", 0)))


def events_to_jsonl(events, path) -> None:
    """Write an event list in the line-oriented log format, one JSON
    record per iteration."""
    lines = [json.dumps(record) for record in events]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                          encoding="utf-8")


# ---------------------------------------------------------------------------
# Batch search
# ---------------------------------------------------------------------------

def search_pipeline(n: int, rank: int, p: int, q: int, seed: int,
                    budget: int = 2000,
                    schedule: Optional[Schedule] = None,
                    value_set: Sequence = DEFAULT_VALUE_SET,
                    tol: float = 1e-2) -> tuple:
    """One full restart: phase-1 descent, optional sparsification
    schedule, round attempt.  Returns (objective, RoundResult, factors,
    per-iteration events)."""
    factors, obj = phase1_optimize(n, rank, p, q, seed, budget)
    events: list = []
    if schedule is not None and schedule.phases:
        state = session_from_factors(n, factors, seed=seed)
        state, events = run_schedule(state, schedule)
        factors = state.factors
        obj = state.objective
    result = round_decomposition(factors, value_set, tol)
    return obj, result, factors, events
