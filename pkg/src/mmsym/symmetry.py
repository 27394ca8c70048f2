"""Symmetry machinery for matrix multiplication decompositions.

A symmetry of the tensor is represented in the normal form

    linear(g, h, k) o cyclic^c o transpose^s,

applied to a triple right-to-left: the transpose flip first, then the
cyclic slot shift, then the linear triple.  The primitive actions are

* transpose:  (x, y, z) -> (x^T, z^T, y^T)
* cyclic:     (x, y, z) -> (z, x, y)
* linear:     (x, y, z) -> (g x h^-1, h y k^-1, k z g^-1)

The linear part is projective: rescaling g, h or k individually changes
the matrix images but not the rank-one tensors, so group elements are
canonicalized by scaling each matrix to have leading entry 1, and term
comparison goes through scale-canonical triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .core import (
    EXACT,
    Decomposition,
    Mat,
    ModeError,
    RankOneTriple,
    evaluate,
    matmul_tensor,
    standard_decomposition,
)


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """Element of the tensor symmetry group in normal form."""

    g: Mat
    h: Mat
    k: Mat
    cyclic: int = 0
    transpose: bool = False

    def __post_init__(self):
        if not (self.g.mode == self.h.mode == self.k.mode == EXACT):
            raise ModeError("group elements are exact")
        if not (self.g.n == self.h.n == self.k.n):
            raise ValueError("g, h, k must share n")
        if self.cyclic not in (0, 1, 2):
            raise ValueError("cyclic power must be 0, 1 or 2")

    @property
    def n(self) -> int:
        return self.g.n


def _scale_canonical(m: Mat) -> Mat:
    lead = next((e for row in m.rows for e in row if e != 0), None)
    if lead is None:
        raise ValueError("zero matrix in group element")
    return m if lead == 1 else m.scale(Fraction(1) / lead)


def canonical_element(e: GroupElement) -> GroupElement:
    """Scale-normalize the linear part; equality of canonical forms is
    equality in the projective group."""
    return GroupElement(
        _scale_canonical(e.g), _scale_canonical(e.h), _scale_canonical(e.k),
        e.cyclic, e.transpose,
    )


def identity_element(n: int) -> GroupElement:
    ident = Mat.identity(n)
    return GroupElement(ident, ident, ident, 0, False)


def linear_element(g: Mat, h: Mat, k: Mat) -> GroupElement:
    return GroupElement(g, h, k, 0, False)


def conjugation_element(g: Mat) -> GroupElement:
    return GroupElement(g, g, g, 0, False)


def cyclic_element(n: int, power: int = 1) -> GroupElement:
    ident = Mat.identity(n)
    return GroupElement(ident, ident, ident, power % 3, False)


def transpose_element(n: int) -> GroupElement:
    ident = Mat.identity(n)
    return GroupElement(ident, ident, ident, 0, True)


def _shift_linear(gh: tuple, times: int) -> tuple:
    # pi o linear(g,h,k) = linear(k,g,h) o pi
    g, h, k = gh
    for _ in range(times % 3):
        g, h, k = k, g, h
    return g, h, k


def _transpose_conj(gh: tuple) -> tuple:
    # T o linear(g,h,k) = linear(h^-T, g^-T, k^-T) o T
    g, h, k = gh
    return (
        h.inverse().transpose(),
        g.inverse().transpose(),
        k.inverse().transpose(),
    )


class _NormalForm:
    """Mutable accumulator: absorbs primitives acting before the current
    operator and keeps the linear/cyclic/transpose normal form."""

    def __init__(self, e: GroupElement):
        self.lin = (e.g, e.h, e.k)
        self.c = e.cyclic
        self.s = e.transpose

    def absorb_linear(self, lin: tuple) -> None:
        if self.s:
            lin = _transpose_conj(lin)
        lin = _shift_linear(lin, self.c)
        g, h, k = self.lin
        bg, bh, bk = lin
        self.lin = (g @ bg, h @ bh, k @ bk)

    def absorb_cyclic(self, power: int) -> None:
        step = 1 if not self.s else 2  # T pi = pi^2 T
        self.c = (self.c + step * (power % 3)) % 3

    def absorb_transpose(self) -> None:
        self.s = not self.s


def compose(e1: GroupElement, e2: GroupElement) -> GroupElement:
    """e1 o e2: apply e2 first, then e1."""
    nf = _NormalForm(e1)
    nf.absorb_linear((e2.g, e2.h, e2.k))
    if e2.cyclic:
        nf.absorb_cyclic(e2.cyclic)
    if e2.transpose:
        nf.absorb_transpose()
    g, h, k = nf.lin
    return canonical_element(GroupElement(g, h, k, nf.c, nf.s))


def inverse(e: GroupElement) -> GroupElement:
    """Inverse in normal form: (L pi^c T^s)^-1 = T^s pi^-c L^-1."""
    nf = _NormalForm(identity_element(e.n))
    if e.transpose:
        nf.absorb_transpose()
    if e.cyclic:
        nf.absorb_cyclic(3 - e.cyclic)
    nf.absorb_linear((e.g.inverse(), e.h.inverse(), e.k.inverse()))
    g, h, k = nf.lin
    return canonical_element(GroupElement(g, h, k, nf.c, nf.s))


def mulclose(generators: Sequence[GroupElement], maxsize: int = 10000) -> list:
    """Closure of a generating set, canonical forms, BFS order."""
    gens = [canonical_element(g) for g in generators]
    seen = {}
    for g in gens:
        seen.setdefault(g, len(seen))
    frontier = list(seen)
    while frontier:
        new = []
        for a in gens:
            for b in frontier:
                c = compose(a, b)
                if c not in seen:
                    seen[c] = len(seen)
                    new.append(c)
                    if len(seen) > maxsize:
                        raise ValueError("group closure exceeded maxsize")
        frontier = new
    out = list(seen)
    ident = canonical_element(identity_element(generators[0].n))
    if ident not in seen:
        out.append(ident)
    out.sort(key=lambda e: seen.get(e, -1))
    return out


# ---------------------------------------------------------------------------
# Action on terms and decompositions
# ---------------------------------------------------------------------------

def apply_element(e: GroupElement, t: RankOneTriple) -> RankOneTriple:
    if e.n != t.n:
        raise ValueError("dimension mismatch between element and term")
    x, y, z = t.x, t.y, t.z
    if e.transpose:
        x, y, z = x.transpose(), z.transpose(), y.transpose()
    for _ in range(e.cyclic):
        x, y, z = z, x, y
    hinv = e.h.inverse()
    kinv = e.k.inverse()
    ginv = e.g.inverse()
    return RankOneTriple(e.g @ x @ hinv, e.h @ y @ kinv, e.k @ z @ ginv)


def apply_to_decomposition(e: GroupElement, dec: Decomposition) -> Decomposition:
    return Decomposition(dec.n, tuple(apply_element(e, t) for t in dec.terms),
                         name=dec.name, metadata=dec.metadata)


def is_tensor_symmetry(e: GroupElement, n: int) -> bool:
    """Whether e preserves the matrix multiplication tensor: transform the
    standard decomposition and compare exactly."""
    moved = apply_to_decomposition(e, standard_decomposition(n))
    return evaluate(moved) == matmul_tensor(n)


# ---------------------------------------------------------------------------
# Scale-canonical triples and multiset equality
# ---------------------------------------------------------------------------

def canonical_triple(t: RankOneTriple) -> tuple:
    """Scale-canonical form: x and y scaled to leading entry 1, the
    compensating factor pushed into z.  Two triples are the same rank-one
    tensor iff their canonical forms are entrywise equal."""
    if t.mode != EXACT:
        raise ModeError("canonical triples are exact-mode only")
    alpha = next(e for row in t.x.rows for e in row if e != 0)
    beta = next(e for row in t.y.rows for e in row if e != 0)
    x = t.x.scale(Fraction(1) / alpha)
    y = t.y.scale(Fraction(1) / beta)
    z = t.z.scale(alpha * beta)
    return (x.rows, y.rows, z.rows)


def decompositions_equal(s1: Decomposition, s2: Decomposition) -> bool:
    """Multiset equality of rank-one tensors (terms compared up to the
    alpha*beta*gamma = 1 scale ambiguity, order ignored)."""
    if s1.mode != EXACT or s2.mode != EXACT:
        raise ModeError("decomposition equality is exact-mode only")
    if s1.n != s2.n or s1.rank != s2.rank:
        return False
    return sorted(map(canonical_triple, s1.terms)) == sorted(map(canonical_triple, s2.terms))


def is_decomposition_symmetry(e: GroupElement, dec: Decomposition) -> bool:
    return decompositions_equal(apply_to_decomposition(e, dec), dec)


def orbit_partition(dec: Decomposition, generators: Sequence[GroupElement]) -> list:
    """Orbits of the generated group on the terms, as sorted index lists.

    Every generator must preserve the decomposition; a violating generator
    is reported together with the first term it maps outside."""
    index_of = {}
    for i, t in enumerate(dec.terms):
        key = canonical_triple(t)
        if key in index_of:
            raise ValueError("duplicate term in decomposition")
        index_of[key] = i
    parent = list(range(dec.rank))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for gi, e in enumerate(generators):
        for i, t in enumerate(dec.terms):
            key = canonical_triple(apply_element(e, t))
            j = index_of.get(key)
            if j is None:
                raise ValueError(
                    f"generator #{gi} does not preserve the decomposition "
                    f"(term {i} maps outside)")
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    orbits = {}
    for i in range(dec.rank):
        orbits.setdefault(find(i), []).append(i)
    return sorted((sorted(v) for v in orbits.values()), key=lambda o: (len(o), o))


def rank_triple_partition(dec: Decomposition) -> dict:
    """Map from sorted (rank x, rank y, rank z) to the list of term indices."""
    if dec.mode != EXACT:
        raise ModeError("rank triples are exact-mode only")
    out: dict = {}
    for i, t in enumerate(dec.terms):
        key = tuple(sorted(m.rank() for m in t.mats()))
        out.setdefault(key, []).append(i)
    return dict(sorted(out.items()))


def shift_term(t: RankOneTriple) -> RankOneTriple:
    return RankOneTriple(t.z, t.x, t.y)


def is_cube_term(t: RankOneTriple) -> bool:
    """Whether the term is a symmetric cube: x, y, z pairwise proportional."""
    return canonical_triple(t) == canonical_triple(shift_term(t))


# ---------------------------------------------------------------------------
# Projective points and rank-one factors
# ---------------------------------------------------------------------------

def primitive_point(vec: Sequence[Fraction]) -> tuple:
    """Canonical projective representative: primitive integer vector with
    positive leading nonzero coordinate."""
    fracs = [Fraction(v) for v in vec]
    if all(v == 0 for v in fracs):
        raise ValueError("zero vector has no projective class")
    denom = 1
    for v in fracs:
        denom = denom * v.denominator // gcd(denom, v.denominator)
    ints = [int(v * denom) for v in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def rank_one_factors(m: Mat) -> Optional[tuple]:
    """(column point, row point) of a rank-one matrix, else None."""
    row_vec = None
    for row in m.rows:
        if any(e != 0 for e in row):
            row_vec = row
            break
    if row_vec is None:
        return None
    j = next(j for j, e in enumerate(row_vec) if e != 0)
    col_vec = tuple(r[j] for r in m.rows)
    # rank-one check: every row proportional to row_vec
    for i, row in enumerate(m.rows):
        f = Fraction(col_vec[i], row_vec[j]) if row_vec[j] else None
        for e, base in zip(row, row_vec):
            if e != f * base:
                return None
    return primitive_point(col_vec), primitive_point(row_vec)


@dataclass(frozen=True)
class IncidenceGraph:
    """Weighted bipartite incidence graph: top vertices are projective
    column points, bottom vertices projective row points, an edge where
    the row functional annihilates the column vector."""

    top: tuple       # ((point, weight), ...) ordered by weight desc, point
    bottom: tuple
    edges: frozenset  # {(top_idx, bottom_idx)}


@dataclass(frozen=True)
class PairingGraph:
    """Same vertex sets; one edge per rank-one first-slot occurrence,
    colored by cyclic orbit, cubes flagged (multiplicity-3 edges)."""

    top: tuple
    bottom: tuple
    edges: tuple      # ((top_idx, bottom_idx, color, cube), ...)


def _sorted_vertices(counts: dict) -> list:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def _point_occurrences(dec: Decomposition, rank_one_terms_only: bool = False) -> tuple:
    """Column points from third-slot matrices, row points from first-slot
    matrices, rank-one occurrences only, counted per term.  With
    ``rank_one_terms_only`` the count is restricted to terms all three of
    whose matrices are rank one (the untilded point sets)."""
    cols: dict = {}
    rows: dict = {}
    for t in dec.terms:
        fx = rank_one_factors(t.x)
        fz = rank_one_factors(t.z)
        if rank_one_terms_only and (fx is None or fz is None
                                    or rank_one_factors(t.y) is None):
            continue
        if fx is not None:
            rows[fx[1]] = rows.get(fx[1], 0) + 1
        if fz is not None:
            cols[fz[0]] = cols.get(fz[0], 0) + 1
    return cols, rows


def extract_configuration(dec: Decomposition,
                          rank_one_terms_only: bool = False) -> tuple:
    """The two weighted projective point sets cut out by the rank-one
    factors: (points of P(U) with weights, points of P(U*) with weights).
    By default every rank-one occurrence counts; the flag restricts to
    terms of rank triple (1,1,1)."""
    cols, rows = _point_occurrences(dec, rank_one_terms_only)
    return tuple(_sorted_vertices(cols)), tuple(_sorted_vertices(rows))


def incidence_graph(dec: Decomposition) -> IncidenceGraph:
    top, bottom = extract_configuration(dec)
    edges = set()
    for ti, (u, _) in enumerate(top):
        for bi, (v, _) in enumerate(bottom):
            if sum(a * b for a, b in zip(v, u)) == 0:
                edges.add((ti, bi))
    return IncidenceGraph(top, bottom, frozenset(edges))


def cyclic_orbit_ids(dec: Decomposition) -> list:
    """Color index per term: terms in one cyclic-shift orbit share an id."""
    keys = [canonical_triple(t) for t in dec.terms]
    index_of = {}
    for i, k in enumerate(keys):
        index_of.setdefault(k, []).append(i)
    color = [-1] * dec.rank
    next_color = 0
    for i, t in enumerate(dec.terms):
        if color[i] >= 0:
            continue
        members = {i}
        cur = t
        for _ in range(2):
            cur = shift_term(cur)
            for j in index_of.get(canonical_triple(cur), []):
                if color[j] < 0:
                    members.add(j)
                    break
        for j in members:
            color[j] = next_color
        next_color += 1
    return color


def pairing_graph(dec: Decomposition) -> PairingGraph:
    top, bottom = extract_configuration(dec)
    top_idx = {p: i for i, (p, _) in enumerate(top)}
    bottom_idx = {p: i for i, (p, _) in enumerate(bottom)}
    colors = cyclic_orbit_ids(dec)
    edges = []
    for i, t in enumerate(dec.terms):
        fx = rank_one_factors(t.x)
        if fx is None:
            continue
        col_pt, row_pt = fx
        ti = top_idx.get(col_pt)
        bi = bottom_idx.get(row_pt)
        if ti is None or bi is None:
            # factor point never occurs in the slot defining that side
            # (possible only without cyclic invariance); skip the edge
            continue
        edges.append((ti, bi, colors[i], is_cube_term(t)))
    return PairingGraph(top, bottom, tuple(edges))


def graphs_isomorphic(g1: IncidenceGraph, g2: IncidenceGraph) -> Optional[dict]:
    """Weight- and edge-preserving bijection (top->top, bottom->bottom) or
    None; brute force over weight-class-respecting assignments, returning
    the lexicographically smallest bijection."""
    for side in ("top", "bottom"):
        if len(getattr(g1, side)) > 10 or len(getattr(g2, side)) > 10:
            raise ValueError("graph too large for brute-force isomorphism")
    if len(g1.top) != len(g2.top) or len(g1.bottom) != len(g2.bottom):
        return None
    if sorted(w for _, w in g1.top) != sorted(w for _, w in g2.top):
        return None
    if sorted(w for _, w in g1.bottom) != sorted(w for _, w in g2.bottom):
        return None

    def candidates(side1, side2):
        # per-vertex candidate lists in index order, weight must match
        return [
            [j for j, (_, w2) in enumerate(side2) if w2 == w1]
            for _, w1 in side1
        ]

    top_cand = candidates(g1.top, g2.top)
    bot_cand = candidates(g1.bottom, g2.bottom)
    e1 = g1.edges
    e2 = g2.edges

    def backtrack(side, assign_top, assign_bot, used):
        if side == 0:
            i = len(assign_top)
            if i == len(top_cand):
                return backtrack(1, assign_top, assign_bot, set())
            for j in top_cand[i]:
                if j not in used:
                    used.add(j)
                    res = backtrack(0, assign_top + [j], assign_bot, used)
                    if res is not None:
                        return res
                    used.discard(j)
            return None
        i = len(assign_bot)
        if i == len(bot_cand):
            mapped = {(assign_top[a], assign_bot[b]) for a, b in e1}
            return (assign_top, assign_bot) if mapped == e2 else None
        for j in bot_cand[i]:
            if j not in used:
                # partial edge consistency against already-assigned tops
                ok = True
                for a in range(len(assign_top)):
                    if ((a, i) in e1) != ((assign_top[a], j) in e2):
                        ok = False
                        break
                if not ok:
                    continue
                used.add(j)
                res = backtrack(1, assign_top, assign_bot + [j], used)
                if res is not None:
                    return res
                used.discard(j)
        return None

    res = backtrack(0, [], [], set())
    if res is None:
        return None
    assign_top, assign_bot = res
    return {
        "top": {i: j for i, j in enumerate(assign_top)},
        "bottom": {i: j for i, j in enumerate(assign_bot)},
    }


# ---------------------------------------------------------------------------
# Characteristic polynomial fingerprints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fingerprint:
    """Multisets of characteristic polynomials: one polynomial per cube,
    one sorted 3-multiset per cyclic orbit of non-cube terms (or per lone
    term when a decomposition is not cyclic invariant)."""

    symmetric: tuple   # ((coeffs, count), ...)
    triples: tuple     # (((coeffs, coeffs, coeffs), count), ...)
    lone_terms: tuple  # same shape as triples; nonempty only without cyclic invariance

    def total_terms(self) -> int:
        return (
            sum(c for _, c in self.symmetric)
            + 3 * sum(c for _, c in self.triples)
            + sum(c for _, c in self.lone_terms)
        )


def fingerprint(dec: Decomposition) -> Fingerprint:
    if dec.mode != EXACT:
        raise ModeError("fingerprints are exact-mode only")
    sym: dict = {}
    trip: dict = {}
    lone: dict = {}
    colors = cyclic_orbit_ids(dec)
    orbit_members: dict = {}
    for i, c in enumerate(colors):
        orbit_members.setdefault(c, []).append(i)
    for members in orbit_members.values():
        rep = dec.terms[members[0]]
        if len(members) == 1 and is_cube_term(rep):
            sym_poly = rep.x.charpoly()
            sym[sym_poly] = sym.get(sym_poly, 0) + 1
            continue
        polys = tuple(sorted(m.charpoly() for m in rep.mats()))
        if len(members) == 3:
            trip[polys] = trip.get(polys, 0) + 1
        else:
            for i in members:
                p = tuple(sorted(m.charpoly() for m in dec.terms[i].mats()))
                lone[p] = lone.get(p, 0) + 1
    return Fingerprint(
        tuple(sorted(sym.items())),
        tuple(sorted(trip.items())),
        tuple(sorted(lone.items())),
    )


# ---------------------------------------------------------------------------
# Framings of the projective plane
# ---------------------------------------------------------------------------

DEFAULT_FRAMING = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(-1), Fraction(-1)),
)


def normalize_framing(points: Sequence[Sequence[Fraction]]) -> GroupElement:
    """The unique projective class carrying 4 points of P^2 in general
    position (in order) to the default framing e1, e2, e3, -(1,1,1)."""
    if len(points) != 4:
        raise ValueError("a framing consists of 4 points")
    pts = [tuple(Fraction(v) for v in p) for p in points]
    base = Mat.from_rows([[pts[j][i] for j in range(3)] for i in range(3)])
    try:
        base_inv = base.inverse()
    except ValueError:
        raise ValueError("degenerate position: first three points are dependent")
    alpha = [sum(base_inv.rows[i][j] * pts[3][j] for j in range(3)) for i in range(3)]
    if any(a == 0 for a in alpha):
        raise ValueError("degenerate position: some 3-subset is dependent")
    scaled = Mat.from_rows([[alpha[j] * pts[j][i] for j in range(3)] for i in range(3)])
    g = scaled.inverse()
    return conjugation_element(g)


def apply_to_point(e: GroupElement, point: Sequence[Fraction]) -> tuple:
    """Image of a column point under the linear g-part, as a projective
    canonical representative."""
    vec = [sum(e.g.rows[i][j] * Fraction(point[j]) for j in range(len(point)))
           for i in range(e.g.n)]
    return primitive_point(vec)


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

_PALETTE = (
    "black", "blue", "red", "green", "olive", "purple", "orange", "cyan",
    "brown", "magenta", "darkgreen", "navy", "gold",
)


def _vec_str(p: tuple) -> str:
    return "(" + ",".join(str(v) for v in p) + ")"


def incidence_dot(g: IncidenceGraph, name: str = "incidence") -> str:
    lines = [f'graph "{name}" {{', "  node [shape=box];"]
    for i, (p, w) in enumerate(g.top):
        lines.append(f'  t{i} [label="{_vec_str(p)} w={w}"];')
    for i, (p, w) in enumerate(g.bottom):
        lines.append(f'  b{i} [label="{_vec_str(p)} w={w}"];')
    for ti, bi in sorted(g.edges):
        lines.append(f"  t{ti} -- b{bi};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def pairing_dot(g: PairingGraph, name: str = "pairing") -> str:
    lines = [f'graph "{name}" {{', "  node [shape=box];"]
    for i, (p, w) in enumerate(g.top):
        lines.append(f'  t{i} [label="{_vec_str(p)} w={w}"];')
    for i, (p, w) in enumerate(g.bottom):
        lines.append(f'  b{i} [label="{_vec_str(p)} w={w}"];')
    for ti, bi, color, cube in g.edges:
        attrs = [f'color={_PALETTE[color % len(_PALETTE)]}', f'term={color}']
        if cube:
            attrs.append("style=dashed")
        lines.append(f"  t{ti} -- b{bi} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
