"""Invariant subspaces of the triple tensor square of the matrix algebra:
closed-form dimension counts for the cyclic slot shift, the diagonal
order-(n+1) conjugation, and their product, plus exact averaging
projectors, exact projector ranks, and the isotypic component norms of
the 3x3 matrix multiplication tensor.

All projector work stays in rational (or Gaussian-rational) arithmetic;
ranks come from exact incremental row reduction over the integers.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Optional, Sequence

from .core import EXACT, Mat, Tensor3, matmul_tensor
from .symmetry import GroupElement, canonical_element, compose

# ---------------------------------------------------------------------------
# Closed-form dimensions
# ---------------------------------------------------------------------------


def z3_invariant_dim(m: int) -> int:
    """Dimension of the cyclic-shift invariants in an m^3 tensor space."""
    if m < 1:
        raise ValueError("m must be positive")
    value, rem = divmod(m ** 3 + 2 * m, 3)
    assert rem == 0
    return value


def znp1_invariant_dim(n: int) -> int:
    """Invariant dimension for the diagonal order-(n+1) conjugation."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return n ** 5 - n ** 4 + n ** 3 - n ** 2 + n


def znp1_summand_table(n: int) -> list:
    """The three weight-type contributions whose sum must equal the
    closed form: (label, count, dim_each)."""
    return [
        ("A0xB0xC0", 1, n ** 3),
        ("A0xBjxC(-j) + cyclic", 3 * n, n * (n - 1) ** 2),
        ("AixBjxCk, all nonzero", n * (n - 1), (n - 1) ** 3),
    ]


SUMMAND_TYPES = ("cube0", "cubej", "pair0j", "pairj0", "pairjk", "mixed0", "mixed")


def znp1_z3_type_dims(n: int) -> dict:
    """Per-type dimensions of the symmetric/alternating summands."""
    return {
        "cube0": (comb(n + 2, 3), comb(n, 3)),
        "cubej": (comb(n + 1, 3), comb(n - 1, 3)),
        "pair0j": (n * comb(n, 2), n * comb(n - 1, 2)),
        "pairj0": (0, 0),
        "pairjk": ((n - 1) * comb(n, 2), (n - 1) * comb(n - 1, 2)),
        "mixed0": (n * (n - 1) ** 2, n * (n - 1) ** 2),
        "mixed": ((n - 1) ** 3, (n - 1) ** 3),
    }


def znp1_z3_summands(n: int) -> list:
    """All summands of the joint invariant space as
    (type, weight multiset, sym dim, alt dim) tuples, following the
    divisibility conditions on the weight indices mod n+1."""
    if n < 2:
        raise ValueError("n must be at least 2")
    mod = n + 1
    dims = znp1_z3_type_dims(n)
    out = [("cube0", (0, 0, 0)) + dims["cube0"]]
    for j in range(1, n + 1):
        if (3 * j) % mod == 0:
            out.append(("cubej", (j, j, j)) + dims["cubej"])
        if (2 * j) % mod == 0:
            out.append(("pair0j", (0, j, j)) + dims["pair0j"])
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            if j != k and (j + 2 * k) % mod == 0:
                out.append(("pairjk", (j, k, k)) + dims["pairjk"])
    for i in range(1, n + 1):
        if i < mod - i:
            out.append(("mixed0", (0, i, mod - i)) + dims["mixed0"])
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            k = (-i - j) % mod
            if j < k <= n:
                out.append(("mixed", (i, j, k)) + dims["mixed"])
    return out


def znp1_z3_invariant_dim(n: int) -> tuple:
    """(symmetric part, alternating part, total) of the joint invariants."""
    sym = alt = 0
    for _, _, s, a in znp1_z3_summands(n):
        sym += s
        alt += a
    return sym, alt, sym + alt


# ---------------------------------------------------------------------------
# Averaging operators
# ---------------------------------------------------------------------------


def znp1_generator(n: int) -> Mat:
    """Integer matrix of order n+1 generating the diagonal conjugation:
    the companion matrix of 1 + t + ... + t^n."""
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -1
    return Mat.from_rows(rows)


def shift_tensor(t: Tensor3, power: int = 1) -> Tensor3:
    """Cyclic slot permutation: power 1 sends x(x)y(x)z to z(x)x(x)y."""
    m = t.m
    power %= 3
    if power == 0:
        return t
    data = list(t.data)
    out = [None] * len(data)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                if power == 1:
                    src = (b * m + c) * m + a
                else:
                    src = (c * m + a) * m + b
                out[(a * m + b) * m + c] = data[src]
    return Tensor3(m, tuple(out), t.mode)


def cyclic_average(t: Tensor3) -> Tensor3:
    """Projection onto the cyclic-shift invariants: mean of the three
    slot rotations."""
    s1 = shift_tensor(t, 1)
    s2 = shift_tensor(t, 2)
    third = Fraction(1, 3) if t.mode == EXACT else (1.0 / 3.0)
    return Tensor3(
        t.m,
        tuple((a + b + c) * third for a, b, c in zip(t.data, s1.data, s2.data)),
        t.mode,
    )


def _slot_maps(e: GroupElement) -> tuple:
    """The three n^2 x n^2 matrices acting on the slots, as row dicts."""
    n = e.n
    hinv = e.h.inverse()
    kinv = e.k.inverse()
    ginv = e.g.inverse()
    maps = []
    for left, right in ((e.g, hinv), (e.h, kinv), (e.k, ginv)):
        rows = {}
        for i in range(n):
            for j in range(n):
                row = {}
                for p in range(n):
                    lv = left.rows[i][p]
                    if lv == 0:
                        continue
                    for q in range(n):
                        rv = right.rows[q][j]
                        if rv != 0:
                            row[p * n + q] = row.get(p * n + q, Fraction(0)) + lv * rv
                rows[i * n + j] = {k: v for k, v in row.items() if v != 0}
        maps.append(rows)
    return tuple(maps)


def tensor_transform(e: GroupElement, t: Tensor3) -> Tensor3:
    """Extend the term action linearly to whole tensors (exact mode)."""
    if t.mode != EXACT:
        raise ValueError("tensor transforms are exact-mode only")
    n = e.n
    m = n * n
    if t.m != m:
        raise ValueError("tensor shape does not match group element")
    data = list(t.data)
    if e.transpose:
        out = [Fraction(0)] * len(data)
        for a in range(m):
            ta = (a % n) * n + a // n
            for b in range(m):
                tb = (b % n) * n + b // n
                for c in range(m):
                    tc = (c % n) * n + c // n
                    # x(x)y(x)z -> x^T(x)z^T(x)y^T
                    out[(ta * m + tc) * m + tb] = data[(a * m + b) * m + c]
        data = out
    if e.cyclic:
        shifted = shift_tensor(Tensor3(m, tuple(data), EXACT), e.cyclic)
        data = list(shifted.data)
    maps = _slot_maps(e)
    for mode, rows in enumerate(maps):
        out = [Fraction(0)] * len(data)
        for dst in range(m):
            row = rows[dst]
            if not row:
                continue
            for src, coeff in row.items():
                if mode == 0:
                    for b in range(m):
                        base_src = (src * m + b) * m
                        base_dst = (dst * m + b) * m
                        for c in range(m):
                            v = data[base_src + c]
                            if v:
                                out[base_dst + c] += coeff * v
                elif mode == 1:
                    for a in range(m):
                        base_src = (a * m + src) * m
                        base_dst = (a * m + dst) * m
                        for c in range(m):
                            v = data[base_src + c]
                            if v:
                                out[base_dst + c] += coeff * v
                else:
                    for a in range(m):
                        for b in range(m):
                            v = data[(a * m + b) * m + src]
                            if v:
                                out[(a * m + b) * m + dst] += coeff * v
        data = out
    return Tensor3(m, tuple(data), EXACT)


def check_closed(elements: Sequence[GroupElement]) -> None:
    canon = {canonical_element(e) for e in elements}
    for a in canon:
        for b in canon:
            if compose(a, b) not in canon:
                raise ValueError("element list is not closed under composition")


def group_average(t: Tensor3, elements: Sequence[GroupElement]) -> Tensor3:
    """Mean of the translates of t under a closed element list."""
    check_closed(elements)
    total = None
    for e in elements:
        image = tensor_transform(e, t)
        total = image if total is None else total + image
    frac = Fraction(1, len(elements))
    return Tensor3(t.m, tuple(v * frac for v in total.data), EXACT)


# ---------------------------------------------------------------------------
# Exact projector rank
# ---------------------------------------------------------------------------


class Cancelled(RuntimeError):
    """Cooperative cancellation of a long-running rank computation."""


def _sparse_term_image(maps, perm_spec, m: int, basis: tuple) -> dict:
    """Image of a basis tensor under one group element, as a sparse dict."""
    transpose, cyclic = perm_spec
    a, b, c = basis
    n = int(round(m ** 0.5))
    if transpose:
        tp = lambda i: (i % n) * n + i // n
        a, b, c = tp(a), tp(c), tp(b)
    for _ in range(cyclic):
        a, b, c = c, a, b
    cols = []
    for mode, src in enumerate((a, b, c)):
        col = {}
        for dst in range(m):
            coeff = maps[mode][dst].get(src)
            if coeff:
                col[dst] = coeff
        cols.append(col)
    out = {}
    for i, vi in cols[0].items():
        for j, vj in cols[1].items():
            vij = vi * vj
            base = (i * m + j) * m
            for k, vk in cols[2].items():
                out[base + k] = vij * vk
    return out


def _strip_row(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def projector_rank(elements: Sequence[GroupElement], n: int,
                   cancel: Optional[threading.Event] = None) -> int:
    """Exact rank of the group-averaging projector on the n^2-cubed tensor
    space, by incremental integer row reduction of the projector columns."""
    check_closed(elements)
    m = n * n
    dim = m ** 3
    elems = [(e, _slot_maps(e), (bool(e.transpose), e.cyclic)) for e in elements]

    # echelon basis: pivot column -> integer row dict
    pivots: dict = {}
    for a in range(m):
        for b in range(m):
            for c in range(m):
                if cancel is not None and cancel.is_set():
                    raise Cancelled("projector rank computation cancelled")
                acc: dict = {}
                for _, maps, perm in elems:
                    for idx, v in _sparse_term_image(maps, perm, m, (a, b, c)).items():
                        acc[idx] = acc.get(idx, 0) + v
                # clear denominators (the 1/|G| factor does not change rank)
                denom = 1
                for v in acc.values():
                    fv = Fraction(v)
                    denom = denom * fv.denominator // gcd(denom, fv.denominator)
                row = {}
                for idx, v in acc.items():
                    iv = int(Fraction(v) * denom)
                    if iv:
                        row[idx] = iv
                row = _strip_row(row)
                while row:
                    lead = min(row)
                    piv = pivots.get(lead)
                    if piv is None:
                        pivots[lead] = row
                        break
                    pv = piv[lead]
                    rv = row[lead]
                    new = {}
                    for kcol in set(row) | set(piv):
                        val = row.get(kcol, 0) * pv - piv.get(kcol, 0) * rv
                        if val:
                            new[kcol] = val
                    row = _strip_row(new)
    return len(pivots)


def cyclic_projector_rank(m: int) -> int:
    """Exact rank of the slot-shift averaging projector on an m^3 space,
    by row reduction of the symmetrized basis images."""
    dim = m ** 3
    pivots: dict = {}
    for a in range(m):
        for b in range(m):
            for c in range(m):
                row = {}
                for i, j, k in (((a, b, c)), ((c, a, b)), ((b, c, a))):
                    idx = (i * m + j) * m + k
                    row[idx] = row.get(idx, 0) + 1
                row = _strip_row({k: v for k, v in row.items() if v})
                while row:
                    lead = min(row)
                    piv = pivots.get(lead)
                    if piv is None:
                        pivots[lead] = row
                        break
                    pv, rv = piv[lead], row[lead]
                    new = {}
                    for kcol in set(row) | set(piv):
                        val = row.get(kcol, 0) * pv - piv.get(kcol, 0) * rv
                        if val:
                            new[kcol] = val
                    row = _strip_row(new)
    return len(pivots)


# ---------------------------------------------------------------------------
# Isotypic component norms of the 3x3 multiplication tensor
# ---------------------------------------------------------------------------

# Weight projections need the cyclotomic value omega = i, so this one
# operation runs over Gaussian rationals (pairs of Fractions).


class GaussianFraction:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        return GaussianFraction(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussianFraction(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return GaussianFraction(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __eq__(self, other):
        return self.re == other.re and self.im == other.im

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __repr__(self):
        return f"GaussianFraction({self.re}, {self.im})"


_I_POWERS = (
    GaussianFraction(1, 0), GaussianFraction(0, 1),
    GaussianFraction(-1, 0), GaussianFraction(0, -1),
)

# Order-4 generator used for the component norms: a real orthogonal matrix
# with the same characteristic polynomial (t+1)(t^2+1) as the integer
# generator used elsewhere.  Conjugation by an orthogonal matrix makes the
# weight decomposition orthogonal, so the component norms add up to the
# squared tensor norm; zero/nonzero of each component is unchanged by the
# choice of representative.
W4 = Mat.from_rows([[0, -1, 0], [1, 0, 0], [0, 0, -1]])


def _weight_projectors(gen: Mat) -> list:
    """The four weight projectors of conjugation by an order-4 generator,
    as dense Gaussian m x m matrices (m = n^2)."""
    n = gen.n
    m = n * n
    powers = [Mat.identity(n)]
    for _ in range(3):
        powers.append(powers[-1] @ gen)
    assert powers[-1] @ gen == Mat.identity(n), "generator must have order 4"
    invs = [p.inverse() for p in powers]
    ks = []
    for t in range(4):
        k = [[Fraction(0)] * m for _ in range(m)]
        for i in range(n):
            for j in range(n):
                for p in range(n):
                    lv = powers[t].rows[i][p]
                    if lv == 0:
                        continue
                    for q in range(n):
                        rv = invs[t].rows[q][j]
                        if rv != 0:
                            k[i * n + j][p * n + q] += lv * rv
        ks.append(k)
    projs = []
    quarter = Fraction(1, 4)
    for u in range(4):
        proj = [[GaussianFraction(0) for _ in range(m)] for _ in range(m)]
        for t in range(4):
            w = _I_POWERS[(-u * t) % 4]
            for i in range(m):
                for j in range(m):
                    v = ks[t][i][j]
                    if v:
                        proj[i][j] = proj[i][j] + GaussianFraction(w.re * v * quarter,
                                                                   w.im * v * quarter)
        projs.append(proj)
    return projs


def _mode_multiply(data: list, proj: list, mode: int, m: int) -> list:
    out = [GaussianFraction(0) for _ in range(m ** 3)]
    for dst in range(m):
        row = [(src, proj[dst][src]) for src in range(m) if not proj[dst][src].is_zero()]
        if not row:
            continue
        for src, coeff in row:
            if mode == 0:
                for b in range(m):
                    bs, bd = (src * m + b) * m, (dst * m + b) * m
                    for c in range(m):
                        v = data[bs + c]
                        if not v.is_zero():
                            out[bd + c] = out[bd + c] + coeff * v
            elif mode == 1:
                for a in range(m):
                    bs, bd = (a * m + src) * m, (a * m + dst) * m
                    for c in range(m):
                        v = data[bs + c]
                        if not v.is_zero():
                            out[bd + c] = out[bd + c] + coeff * v
            else:
                for a in range(m):
                    for b in range(m):
                        v = data[(a * m + b) * m + src]
                        if not v.is_zero():
                            out[(a * m + b) * m + dst] = out[(a * m + b) * m + dst] + coeff * v
    return out


def _slot_permute(data: list, perm: tuple, m: int) -> list:
    out = [GaussianFraction(0) for _ in range(m ** 3)]
    for a in range(m):
        for b in range(m):
            for c in range(m):
                idx = (a, b, c)
                src = (idx[perm[0]] * m + idx[perm[1]]) * m + idx[perm[2]]
                out[(a * m + b) * m + c] = data[src]
    return out


def summand_label(weights: tuple, part: str) -> str:
    u = sorted(weights)
    if u[0] == u[1] == u[2]:
        return f"{'S3' if part == 'sym' else 'L3'}A{u[0]}"
    if u[0] == u[1] or u[1] == u[2]:
        rep = u[1]
        other = u[0] if u[1] == u[2] else u[2]
        return f"A{other}x{'S2' if part == 'sym' else 'L2'}A{rep}"
    inner = f"A{u[0]}xA{u[1]}xA{u[2]}"
    return f"({inner})^{'S' if part == 'sym' else 'L'}"


def m3_component_norms() -> dict:
    """Exact squared norms of the projections of the 3x3 multiplication
    tensor onto the ten joint invariant summands (n = 3)."""
    n = 3
    m = n * n
    target = matmul_tensor(n)
    data = [GaussianFraction(v) for v in target.data]
    projs = _weight_projectors(W4)

    mode0 = {u: _mode_multiply(data, projs[u], 0, m) for u in range(4)}
    components = {}
    for u in range(4):
        for v in range(4):
            w = (-u - v) % 4
            t_uv = _mode_multiply(mode0[u], projs[v], 1, m)
            components[(u, v, w)] = _mode_multiply(t_uv, projs[w], 2, m)

    by_multiset: dict = {}
    for (u, v, w), tensor in components.items():
        key = tuple(sorted((u, v, w)))
        if key in by_multiset:
            by_multiset[key] = [a + b for a, b in zip(by_multiset[key], tensor)]
        else:
            by_multiset[key] = list(tensor)

    sixth = GaussianFraction(Fraction(1, 6))
    neg = GaussianFraction(Fraction(-1, 6))
    perms = (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
             ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1))
    out = {}
    for key, tensor in by_multiset.items():
        sym = [GaussianFraction(0) for _ in range(m ** 3)]
        alt = [GaussianFraction(0) for _ in range(m ** 3)]
        for perm, sign in perms:
            moved = _slot_permute(tensor, perm, m)
            factor = sixth if sign > 0 else neg
            for i, v in enumerate(moved):
                if not v.is_zero():
                    sym[i] = sym[i] + sixth * v
                    alt[i] = alt[i] + factor * v
        out[summand_label(key, "sym")] = sum((v.abs_sq() for v in sym), Fraction(0))
        out[summand_label(key, "alt")] = sum((v.abs_sq() for v in alt), Fraction(0))
    return out
