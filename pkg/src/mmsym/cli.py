"""Command-line entry point.

Exit codes: 0 success / verified-true, 1 verified-false, 2 usage error,
3 internal error.  ``--format records`` switches output to one JSON
record per line for scripting.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog, invariants, search
from .core import Mat, ModeError, poly_str, residual
from .symmetry import (
    GroupElement,
    apply_to_decomposition,
    compose,
    conjugation_element,
    cyclic_element,
    decompositions_equal,
    extract_configuration,
    fingerprint,
    incidence_dot,
    incidence_graph,
    orbit_partition,
    pairing_dot,
    pairing_graph,
    rank_triple_partition,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(ValueError):
    pass


def _emit(args, record: dict, human: str) -> None:
    if args.format == "records":
        print(json.dumps(record, default=str))
    else:
        print(human)


def _load_source(spec: str):
    if spec.startswith("builtin:"):
        return catalog.builtin(spec.split(":", 1)[1])
    return catalog.load(spec)


def _load_element(spec: str) -> GroupElement:
    if spec.startswith("builtin:"):
        return catalog.builtin_element(spec.split(":", 1)[1])
    try:
        return catalog.builtin_element(spec)
    except KeyError:
        pass
    doc = json.loads(Path(spec).read_text(encoding="utf-8"))
    return catalog.element_from_json(doc)


def _load_generators(spec: str) -> list:
    if spec == "metadata":
        return []
    doc = json.loads(Path(spec).read_text(encoding="utf-8"))
    raw = doc["generators"] if isinstance(doc, dict) else doc
    return [catalog.element_from_json(g, f"generator {i}") for i, g in enumerate(raw)]


def cmd_verify(args) -> int:
    dec = _load_source(args.source)
    if dec.mode != "exact":
        raise ModeError("verification requires an exact-mode decomposition")
    _, norm_sq = residual(dec)
    triples = {str(k): len(v) for k, v in rank_triple_partition(dec).items()}
    ok = norm_sq == 0
    record = {
        "source": args.source, "terms": dec.rank, "residual_norm_sq": str(norm_sq),
        "exact": ok, "rank_triples": triples,
    }
    status = "residual 0" if ok else f"nonzero residual (norm_sq = {norm_sq})"
    lines = [f"{dec.name or args.source}: {dec.rank} terms, {status}"]
    for key, count in triples.items():
        lines.append(f"  rank triple {key}: {count} terms")
    _emit(args, record, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FALSE


def cmd_analyze(args) -> int:
    dec = _load_source(args.source)
    record = {"source": args.source, "terms": dec.rank}
    lines = [f"{dec.name or args.source}: {dec.rank} terms"]
    if args.graphs is not None:
        outdir = Path(args.graphs)
        outdir.mkdir(parents=True, exist_ok=True)
        ig = incidence_graph(dec)
        pg = pairing_graph(dec)
        stem = dec.name or "decomposition"
        (outdir / f"{stem}_incidence.dot").write_text(incidence_dot(ig, f"{stem}_incidence"))
        (outdir / f"{stem}_pairing.dot").write_text(pairing_dot(pg, f"{stem}_pairing"))
        record["graphs"] = {
            "top": [[list(p), w] for p, w in ig.top],
            "bottom": [[list(p), w] for p, w in ig.bottom],
            "edges": sorted(ig.edges),
            "pairing_cube_edges": sum(1 for e in pg.edges if e[3]),
            "dir": str(outdir),
        }
        lines.append(f"  incidence: {len(ig.top)}+{len(ig.bottom)} vertices, "
                     f"{len(ig.edges)} edges; pairing cube edges: "
                     f"{sum(1 for e in pg.edges if e[3])}; DOT written to {outdir}")
    if args.charpolys:
        fp = fingerprint(dec)
        record["fingerprint"] = {
            "symmetric": [[poly_str(c), n] for c, n in fp.symmetric],
            "triples": [[[poly_str(c) for c in key], n] for key, n in fp.triples],
            "lone": [[[poly_str(c) for c in key], n] for key, n in fp.lone_terms],
        }
        lines.append("  characteristic polynomials:")
        for coeffs, count in fp.symmetric:
            lines.append(f"    cube {poly_str(coeffs)}: {count}")
        for key, count in fp.triples:
            lines.append(f"    triple {{{', '.join(poly_str(c) for c in key)}}}: {count}")
        for key, count in fp.lone_terms:
            lines.append(f"    lone term {{{', '.join(poly_str(c) for c in key)}}}: {count}")
    if args.orbits is not None:
        gens = _load_generators(args.orbits)
        if not gens:
            gens = [catalog.element_from_json(g, "metadata generator")
                    for g in dec.metadata.get("generators", [])]
        orbits = orbit_partition(dec, gens)
        record["orbits"] = orbits
        lines.append(f"  orbit sizes under {len(gens)} generators: "
                     f"{sorted(len(o) for o in orbits)}")
    if args.config:
        pu, pustar = extract_configuration(dec)
        record["configuration"] = {
            "column_points": [[list(p), w] for p, w in pu],
            "row_points": [[list(p), w] for p, w in pustar],
        }
        lines.append("  column points: " + ", ".join(f"{p}x{w}" for p, w in pu))
        lines.append("  row points:    " + ", ".join(f"{p}x{w}" for p, w in pustar))
    _emit(args, record, "\n".join(lines))
    return EXIT_OK


def cmd_dims(args) -> int:
    n = args.n
    record = {"n": n, "group": args.group}
    if args.group == "z3":
        m = n * n
        dim = invariants.z3_invariant_dim(m)
        record["dim"] = dim
        human = f"cyclic-invariant dimension for m={m}: {dim}"
        if args.check_projector:
            rank = invariants.cyclic_projector_rank(m)
            record["projector_rank"] = rank
            human += f"; projector rank {rank} ({'agrees' if rank == dim else 'MISMATCH'})"
            if rank != dim:
                return EXIT_FALSE
    elif args.group == "zn1":
        dim = invariants.znp1_invariant_dim(n)
        record["dim"] = dim
        human = f"order-{n+1} conjugation invariant dimension: {dim}"
        if args.check_projector:
            gen = invariants.znp1_generator(n)
            elems = []
            cur = Mat.identity(n)
            for _ in range(n + 1):
                elems.append(conjugation_element(cur))
                cur = cur @ gen
            rank = invariants.projector_rank(elems, n)
            record["projector_rank"] = rank
            human = f"closed-form {dim} = projector rank {rank}" if rank == dim else \
                f"closed-form {dim} != projector rank {rank}"
            if rank != dim:
                return EXIT_FALSE
    else:  # zn1xz3
        sym, alt, total = invariants.znp1_z3_invariant_dim(n)
        record.update({"sym": sym, "alt": alt, "total": total})
        human = f"joint invariant dimension: {sym}+{alt}={total}"
        if args.check_projector:
            gen = invariants.znp1_generator(n)
            elems = []
            cur = Mat.identity(n)
            for _ in range(n + 1):
                for c in range(3):
                    elems.append(compose(cyclic_element(n, c), conjugation_element(cur)))
                cur = cur @ gen
            rank = invariants.projector_rank(elems, n)
            record["projector_rank"] = rank
            human += f"; projector rank {rank} ({'agrees' if rank == total else 'MISMATCH'})"
            if rank != total:
                return EXIT_FALSE
    _emit(args, record, human)
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        search.check_pq(args.rank, args.p, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    schedule = search.load_schedule(args.schedule) if args.schedule else None
    value_set = tuple(Fraction(v) for v in args.value_set.split(","))

    def run_one(seed):
        obj, result, _, events = search.search_pipeline(
            args.n, args.rank, args.p, args.q, seed,
            budget=args.budget, schedule=schedule,
            value_set=value_set, tol=args.tol)
        return seed, obj, result, events

    seeds = [args.seed + i for i in range(args.restarts)]
    outcomes = []
    if args.jobs > 1 and seeds:
        # all restarts run; aggregation below is order-independent
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = sorted(pool.map(run_one, seeds), key=lambda r: r[0])
    else:
        for seed in seeds:
            outcome = run_one(seed)
            outcomes.append(outcome)
            if outcome[2].ok:
                break
    report = [{"seed": s, "objective": obj, "rounded": res.ok}
              for s, obj, res, _ in outcomes]
    best = None
    found = None
    for seed, obj, result, events in outcomes:
        if best is None or obj < best["objective"]:
            best = {"seed": seed, "objective": obj}
        if result.ok and found is None:
            found = (seed, result.decomposition, events)
    record = {
        "n": args.n, "rank": args.rank, "p": args.p, "q": args.q,
        "restarts_run": len(report), "best": best, "found": found is not None,
        "report": report,
    }
    lines = [f"search n={args.n} R={args.rank} P={args.p} Q={args.q}: "
             f"{len(report)} restart(s)"]
    if best:
        lines.append(f"  best objective {best['objective']:.3e} (seed {best['seed']})")
    if found:
        seed, dec, events = found
        record["seed"] = seed
        if args.out:
            catalog.save(dec, args.out)
            record["out"] = args.out
            lines.append(f"  exact decomposition found (seed {seed}), written to {args.out}")
        else:
            lines.append(f"  exact decomposition found (seed {seed}); no --out given")
        if args.events:
            search.events_to_jsonl(events, args.events)
            record["events"] = args.events
            lines.append(f"  iteration log written to {args.events}")
    elif args.restarts > 0:
        lines.append("  no exact decomposition found")
    if args.report:
        Path(args.report).write_text(
            "\n".join(json.dumps(r) for r in report) + ("\n" if report else ""),
            encoding="utf-8")
        lines.append(f"  restart report written to {args.report}")
    _emit(args, record, "\n".join(lines))
    return EXIT_OK


def cmd_transform(args) -> int:
    dec = _load_source(args.source)
    element = _load_element(args.element)
    moved = apply_to_decomposition(element, dec)
    catalog.save(moved, args.out)
    _emit(args, {"source": args.source, "element": args.element, "out": args.out},
          f"transformed {args.source} -> {args.out}")
    return EXIT_OK


def cmd_equal(args) -> int:
    a = _load_source(args.a)
    b = _load_source(args.b)
    same = decompositions_equal(a, b)
    _emit(args, {"a": args.a, "b": args.b, "equal": same},
          "equal" if same else "not equal")
    return EXIT_OK if same else EXIT_FALSE


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    state = search.load_factors(args.session) if args.session else None
    app = build_app(initial=state, n=args.n, rank=args.rank, p=args.p, q=args.q,
                    seed=args.seed, workdir=args.workdir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except SystemExit as exc:  # uvicorn rethrows socket errors as SystemExit
        raise RuntimeError(f"server failed to start on port {args.port}") from exc
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmsym",
        description="Workbench for symmetric matrix multiplication decompositions")
    parser.add_argument("--format", choices=("human", "records"), default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="exact verification of a decomposition")
    p.add_argument("source", help="path or builtin:NAME")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="graphs, fingerprints, orbits, configurations")
    p.add_argument("source")
    p.add_argument("--graphs", metavar="DIR", default=None)
    p.add_argument("--charpolys", action="store_true")
    p.add_argument("--orbits", metavar="GENFILE", default=None,
                   help="generator file, or 'metadata' for the stored generators")
    p.add_argument("--config", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("dims", help="invariant dimension formulas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--group", choices=("z3", "zn1", "zn1xz3"), default="zn1")
    p.add_argument("--check-projector", action="store_true")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("search", help="batch two-phase search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--schedule", default=None)
    p.add_argument("--value-set", default="0,1,-1")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--events", default=None,
                   help="write the winning restart's per-iteration log (JSONL)")
    p.add_argument("--jobs", type=int, default=1,
                   help="restart parallelism (aggregation is order-independent)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("transform", help="apply a symmetry element")
    p.add_argument("source")
    p.add_argument("--element", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("equal", help="multiset equality of two decompositions")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_equal)

    p = sub.add_parser("serve", help="run the steering session service")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session", default=None, help="factor file to load")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--rank", type=int, default=23)
    p.add_argument("--p", type=int, default=11)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workdir", default=".")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (catalog.ParseError, ModeError, KeyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
