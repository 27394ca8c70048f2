"""Exact and floating-point core: matrices, order-3 tensors, rank-one
decompositions, and the matrix multiplication tensor itself.

Scalars come in two modes that never mix silently:

* ``"exact"``  -- arbitrary-precision rationals (``fractions.Fraction``),
  the carrier for all verification work;
* ``"float"``  -- 64-bit floats, the carrier for numerical search.

Matrices are stored row-major: ``entry(i, j)`` is row ``i``, column ``j``,
0-based, standing in for the usual superscript/subscript index pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"


class ModeError(ValueError):
    """Raised when exact and float values meet where they must not."""


def _coerce(entry, mode: str) -> Scalar:
    if mode == EXACT:
        if isinstance(entry, float):
            raise ModeError("float entry in exact-mode value")
        return entry if isinstance(entry, Fraction) else Fraction(entry)
    value = float(entry)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError("non-finite float entry")
    return value


def flat_index(i: int, j: int, n: int) -> int:
    """Row-major slot index of matrix position (i, j) in an n*n grid."""
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"matrix index ({i},{j}) out of range for n={n}")
    return i * n + j


@dataclass(frozen=True)
class Mat:
    """Immutable n x n matrix over one scalar mode."""

    rows: tuple
    mode: str = EXACT

    @staticmethod
    def from_rows(rows: Sequence[Sequence], mode: str = EXACT) -> "Mat":
        n = len(rows)
        grid = []
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
            grid.append(tuple(_coerce(e, mode) for e in row))
        return Mat(tuple(grid), mode)

    @staticmethod
    def zero(n: int, mode: str = EXACT) -> "Mat":
        fill = Fraction(0) if mode == EXACT else 0.0
        return Mat(tuple((fill,) * n for _ in range(n)), mode)

    @staticmethod
    def identity(n: int, mode: str = EXACT) -> "Mat":
        one = Fraction(1) if mode == EXACT else 1.0
        zero = Fraction(0) if mode == EXACT else 0.0
        return Mat(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), mode)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(e == 0 for row in self.rows for e in row)

    def transpose(self) -> "Mat":
        n = self.n
        return Mat(tuple(tuple(self.rows[j][i] for j in range(n)) for i in range(n)), self.mode)

    def __neg__(self) -> "Mat":
        return Mat(tuple(tuple(-e for e in row) for row in self.rows), self.mode)

    def scale(self, c) -> "Mat":
        c = _coerce(c, self.mode)
        return Mat(tuple(tuple(c * e for e in row) for row in self.rows), self.mode)

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)),
            self.mode,
        )

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        n = self.n
        cols = other.transpose().rows
        return Mat(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows),
            self.mode,
        )

    def _check(self, other: "Mat") -> None:
        if self.mode != other.mode:
            raise ModeError("mixed scalar modes")
        if self.n != other.n:
            raise ValueError("dimension mismatch")

    def rank(self) -> int:
        """Exact rank by fraction-free row elimination (exact mode only)."""
        if self.mode != EXACT:
            raise ModeError("rank is computed in exact mode only")
        rows = [list(r) for r in self.rows]
        n = self.n
        rank = 0
        for col in range(n):
            pivot = next((r for r in range(rank, n) if rows[r][col] != 0), None)
            if pivot is None:
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            p = rows[rank][col]
            for r in range(rank + 1, n):
                f = rows[r][col] / p
                if f:
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
            rank += 1
        return rank

    def inverse(self) -> "Mat":
        """Exact inverse by Gauss-Jordan elimination."""
        if self.mode != EXACT:
            raise ModeError("inverse is computed in exact mode only")
        n = self.n
        aug = [list(self.rows[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise ValueError("singular matrix")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            p = aug[col][col]
            aug[col] = [e / p for e in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return Mat(tuple(tuple(row[n:]) for row in aug), EXACT)

    def charpoly(self) -> tuple:
        """Monic characteristic polynomial det(tI - M), coefficients from
        constant term up to the leading 1 (Faddeev-LeVerrier, exact)."""
        if self.mode != EXACT:
            raise ModeError("charpoly is computed in exact mode only")
        n = self.n
        coeffs = [Fraction(0)] * n + [Fraction(1)]  # c[k] multiplies t^k
        m = Mat.zero(n)
        ident = Mat.identity(n)
        c = Fraction(1)
        for k in range(1, n + 1):
            m = (self @ m) + ident.scale(c)
            trace = sum((self @ m).rows[i][i] for i in range(n))
            c = -trace / k
            coeffs[n - k] = c
        return tuple(coeffs)


def poly_str(coeffs: Sequence) -> str:
    """Human-readable form of a coefficient tuple (constant term first)."""
    parts = []
    for power, c in enumerate(coeffs):
        if c == 0:
            continue
        if power == 0:
            term = str(c)
        else:
            base = "t" if power == 1 else f"t^{power}"
            if c == 1:
                term = base
            elif c == -1:
                term = f"-{base}"
            else:
                term = f"{c}*{base}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for term in parts[1:]:
        out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
    return out


@dataclass(frozen=True)
class Tensor3:
    """Dense order-3 tensor of shape m x m x m, flat row-major storage."""

    m: int
    data: tuple
    mode: str = EXACT

    @staticmethod
    def zero(m: int, mode: str = EXACT) -> "Tensor3":
        fill = Fraction(0) if mode == EXACT else 0.0
        return Tensor3(m, (fill,) * (m ** 3), mode)

    def __getitem__(self, abc):
        a, b, c = abc
        m = self.m
        return self.data[(a * m + b) * m + c]

    def __add__(self, other: "Tensor3") -> "Tensor3":
        self._check(other)
        return Tensor3(self.m, tuple(x + y for x, y in zip(self.data, other.data)), self.mode)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        self._check(other)
        return Tensor3(self.m, tuple(x - y for x, y in zip(self.data, other.data)), self.mode)

    def _check(self, other: "Tensor3") -> None:
        if self.mode != other.mode:
            raise ModeError("mixed scalar modes")
        if self.m != other.m:
            raise ValueError("dimension mismatch")

    def norm_sq(self):
        return sum(x * x for x in self.data)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.data)


@dataclass(frozen=True)
class RankOneTriple:
    """One rank-one summand x (x) y (x) z of n x n matrices."""

    x: Mat
    y: Mat
    z: Mat

    def __post_init__(self):
        if not (self.x.n == self.y.n == self.z.n):
            raise ValueError("matrices in a term must share n")
        if not (self.x.mode == self.y.mode == self.z.mode):
            raise ModeError("matrices in a term must share scalar mode")
        if self.x.is_zero() or self.y.is_zero() or self.z.is_zero():
            raise ValueError("zero matrix in a rank-one term")

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def mode(self) -> str:
        return self.x.mode

    def mats(self) -> tuple:
        return (self.x, self.y, self.z)

    def is_cube(self) -> bool:
        return self.x == self.y == self.z


@dataclass(frozen=True)
class Decomposition:
    """Ordered list of rank-one triples claimed to sum to a target tensor."""

    n: int
    terms: tuple
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for t in self.terms:
            if t.n != self.n:
                raise ValueError(f"term dimension {t.n} != decomposition n={self.n}")
        modes = {t.mode for t in self.terms}
        if len(modes) > 1:
            raise ModeError("mixed scalar modes across terms")

    @property
    def rank(self) -> int:
        return len(self.terms)

    @property
    def mode(self) -> str:
        return self.terms[0].mode if self.terms else EXACT


def make_decomposition(n: int, triples: Iterable, name: str = "", mode: str = EXACT,
                       metadata: dict | None = None) -> Decomposition:
    """Build a Decomposition from raw (x, y, z) row-grids."""
    terms = tuple(
        RankOneTriple(
            Mat.from_rows(x, mode), Mat.from_rows(y, mode), Mat.from_rows(z, mode)
        )
        for x, y, z in triples
    )
    return Decomposition(n, terms, name, metadata or {})


def matmul_tensor(n: int) -> Tensor3:
    """The n x n matrix multiplication tensor, exact, with the row-major
    flattening convention: entry 1 at (flat(i,j), flat(j,k), flat(k,i))."""
    if n < 1:
        raise ValueError("n must be positive")
    m = n * n
    data = [Fraction(0)] * (m ** 3)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = flat_index(i, j, n)
                b = flat_index(j, k, n)
                c = flat_index(k, i, n)
                data[(a * m + b) * m + c] = Fraction(1)
    return Tensor3(m, tuple(data), EXACT)


def standard_decomposition(n: int) -> Decomposition:
    """The size-n^3 decomposition of matmul_tensor(n) into basis outer products."""
    terms = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                def basis(a, b):
                    return [[1 if (r, c) == (a, b) else 0 for c in range(n)] for r in range(n)]
                terms.append((basis(i, j), basis(j, k), basis(k, i)))
    return make_decomposition(n, terms, name=f"standard{n}")


def evaluate(dec: Decomposition) -> Tensor3:
    """Sum of the rank-one tensors of a decomposition."""
    n = dec.n
    m = n * n
    mode = dec.mode
    fill = Fraction(0) if mode == EXACT else 0.0
    data = [fill] * (m ** 3)
    for term in dec.terms:
        xs = [e for row in term.x.rows for e in row]
        ys = [e for row in term.y.rows for e in row]
        zs = [e for row in term.z.rows for e in row]
        for a in range(m):
            xa = xs[a]
            if xa == 0:
                continue
            base_a = a * m
            for b in range(m):
                v = xa * ys[b]
                if v == 0:
                    continue
                base = (base_a + b) * m
                for c in range(m):
                    zc = zs[c]
                    if zc != 0:
                        data[base + c] += v * zc
    return Tensor3(m, tuple(data), mode)


def residual(dec: Decomposition) -> tuple:
    """(matmul_tensor(n) - evaluate(dec), squared Frobenius norm)."""
    target = matmul_tensor(dec.n)
    got = evaluate(dec)
    if got.mode == FLOAT:
        target = Tensor3(target.m, tuple(float(x) for x in target.data), FLOAT)
    diff = target - got
    return diff, diff.norm_sq()


def trilinear_form(t: Tensor3, x: Mat, y: Mat, z: Mat):
    """Contract an m x m x m tensor (m = n^2) with three n x n matrices."""
    n = x.n
    if t.m != n * n:
        raise ValueError("tensor shape does not match matrices")
    xs = [e for row in x.rows for e in row]
    ys = [e for row in y.rows for e in row]
    zs = [e for row in z.rows for e in row]
    total = 0
    m = t.m
    for a in range(m):
        if xs[a] == 0:
            continue
        for b in range(m):
            v = xs[a] * ys[b]
            if v == 0:
                continue
            base = (a * m + b) * m
            for c in range(m):
                if zs[c] != 0:
                    total += v * zs[c] * t.data[base + c]
    return total
