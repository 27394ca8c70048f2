#!/usr/bin/env python3
"""End-to-end small-case search: find an exact cyclic-invariant rank-7
decomposition of the 2x2 multiplication tensor from random starts.

Usage: m2_search_demo.py [max_restarts]
"""

import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mmsym import catalog
from mmsym import search as S
from mmsym.core import residual

SCHEDULE = S.Schedule((
    S.SchedulePhase(60, lam=1e-1, zeros=0, project_every=10),
    S.SchedulePhase(150, lam=1e-1, zeros=4, project_every=10),
    S.SchedulePhase(150, lam=1e-1, zeros=8, project_every=10),
    S.SchedulePhase(150, lam=1e-1, zeros=10, project_every=10),
    S.SchedulePhase(150, lam=1e-1, zeros=12, project_every=10),
    S.SchedulePhase(100, lam=1e-2, zeros=12, project_every=10),
    S.SchedulePhase(50, lam=1e-3, zeros=12, project_every=10),
))
VALUE_SET = (Fraction(0), Fraction(1), Fraction(-1),
             Fraction(1, 2), Fraction(-1, 2))


def main():
    max_restarts = int(sys.argv[1]) if len(sys.argv) > 1 else 100
    for seed in range(max_restarts):
        factors, obj = S.phase1_optimize(2, 7, 1, 2, seed=seed, budget=3000)
        print(f"seed {seed}: phase-1 objective {obj:.2e}")
        if obj > 1e-6:
            continue
        state = S.session_from_factors(2, factors, seed=seed)
        state, _ = S.run_schedule(state, SCHEDULE)
        result = S.round_decomposition(state.factors, VALUE_SET, 1e-2)
        if result.ok:
            _, norm_sq = residual(result.decomposition)
            print(f"  exact rank-7 decomposition found (residual {norm_sq})")
            out = Path("m2_rank7.json")
            catalog.save(result.decomposition, out)
            print(f"  written to {out}")
            return 0
        print(f"  rounding failed: {result.message}")
    print("no success within the restart budget")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
