"""Built-in decompositions, orbit-notation expansion, and file storage.

The seven catalog entries ship as JSON data files (see ``data/``), which
doubles as conformance coverage for the file format.  The compact orbit
presentations of the two published 23-term decompositions with larger
symmetry groups are kept here in source form so the expansion can be
cross-checked against the explicit triplet listings.

Orbit expansion order is: seed first, then generator powers ascending;
for product groups the cyclic power is the outermost loop.  The source
presentations do not fix an ordering, so none of this is canonical; all
comparisons go through multiset equality.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .core import (
    EXACT,
    FLOAT,
    Decomposition,
    Mat,
    ModeError,
    RankOneTriple,
    make_decomposition,
    standard_decomposition,
)
from .symmetry import (
    GroupElement,
    apply_element,
    canonical_element,
    canonical_triple,
    compose,
    conjugation_element,
    cyclic_element,
    linear_element,
    mulclose,
)

BUILTIN_NAMES = (
    "standard3", "z4z3", "lader_z3", "twofix_z3", "addtl1", "addtl2", "addtl3",
)

CATALOG_DIR_ENV = "MMSYM_CATALOG_DIR"

FILE_FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed decomposition or element file."""


# ---------------------------------------------------------------------------
# Named matrices and group elements from the source presentations
# ---------------------------------------------------------------------------

A0 = Mat.from_rows([[0, 0, -1], [1, 0, -1], [0, 1, -1]])
TAU12 = Mat.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
TAU13 = Mat.from_rows([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
TAU23 = Mat.from_rows([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
EPS2 = Mat.from_rows([[1, 0, 0], [0, -1, 0], [0, 0, 1]])


def a0_conjugation(power: int = 1) -> GroupElement:
    g = Mat.identity(3)
    for _ in range(power % 4):
        g = g @ A0
    return conjugation_element(g)


def lader_phi() -> GroupElement:
    # x -> s x s^-1, y -> s y, z -> z s^-1 with s = t13 eps2 (the
    # determinant-one dressing of the plain t13 swap; the undressed swap
    # does not preserve the decomposition)
    s = TAU13 @ EPS2
    return linear_element(s, s, Mat.identity(3))


def lader_zeta() -> GroupElement:
    # x(x)y(x)z -> eps2 y^T eps2 (x) eps2 x^T eps2 (x) eps2 z^T eps2
    return GroupElement(EPS2, EPS2, EPS2, cyclic=1, transpose=True)


def lader_exchange() -> GroupElement:
    # x -> t12 x, y -> y eps2 t12, z -> t12 eps2 z t12
    return linear_element(TAU12, Mat.identity(3), TAU12 @ EPS2)


def builtin_element(name: str, n: int = 3) -> GroupElement:
    table = {
        "identity": lambda: canonical_element(cyclic_element(n, 0)),
        "cyclic": lambda: cyclic_element(n, 1),
        "transpose": lambda: GroupElement(
            Mat.identity(n), Mat.identity(n), Mat.identity(n), 0, True),
        "a0conj": a0_conjugation,
        "lader_phi": lader_phi,
        "lader_zeta": lader_zeta,
        "lader_exchange": lader_exchange,
    }
    if name not in table:
        raise KeyError(f"unknown builtin element {name!r}")
    return table[name]()


# ---------------------------------------------------------------------------
# Orbit specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    """A seed term together with the explicit group elements to apply."""

    seed: RankOneTriple
    elements: tuple


def expand_orbit(spec: OrbitSpec) -> list:
    """Images of the seed under the listed elements, order preserved,
    no deduplication."""
    for e in spec.elements:
        if e.n != spec.seed.n:
            raise ValueError("element dimension does not match seed")
    return [apply_element(e, spec.seed) for e in spec.elements]


def group_orbit(seed: RankOneTriple, elements: Sequence[GroupElement]) -> list:
    """Distinct images of the seed under a full element list (coset
    expansion), first-seen order, terms compared up to scale."""
    seen = set()
    out = []
    for e in elements:
        image = apply_element(e, seed)
        key = canonical_triple(image)
        if key not in seen:
            seen.add(key)
            out.append(image)
    return out


def _triple(x, y, z) -> RankOneTriple:
    return RankOneTriple(Mat.from_rows(x), Mat.from_rows(y), Mat.from_rows(z))


def _cube(m) -> RankOneTriple:
    mat = Mat.from_rows(m)
    return RankOneTriple(mat, mat, mat)


def _z3_orbit(seed: RankOneTriple) -> OrbitSpec:
    return OrbitSpec(seed, tuple(cyclic_element(3, p) for p in range(3)))


# ---------------------------------------------------------------------------
# Compact presentations
# ---------------------------------------------------------------------------

def compact_z4z3_orbits() -> list:
    """The five-orbit presentation of the 23-term decomposition with
    Z4 x Z3 symmetry.  Orbit sizes 1, 2, 4, 4, 12."""
    z4 = [a0_conjugation(q) for q in range(4)]
    mixed = tuple(
        compose(cyclic_element(3, p), a0_conjugation(q))
        for p in range(3) for q in range(4)
    )
    return [
        OrbitSpec(_cube([[0, 0, 1], [-1, 0, 1], [0, -1, 1]]),      # -(a0 cube)
                  (canonical_element(cyclic_element(3, 0)),)),
        OrbitSpec(_cube([[0, 1, 0], [0, 1, 0], [0, 0, 0]]), tuple(z4[:2])),
        OrbitSpec(_cube([[1, 0, 0], [0, 0, 0], [0, 0, 0]]), tuple(z4)),
        OrbitSpec(_cube([[0, -1, 0], [1, -1, 0], [0, 0, 0]]), tuple(z4)),
        OrbitSpec(_triple([[0, 0, 0], [0, 0, 1], [0, 0, 0]],
                          [[0, 0, 0], [0, 0, 0], [-1, 1, 0]],
                          [[0, 0, 0], [0, 1, -1], [0, 1, -1]]), mixed),
    ]


def compact_z4z3() -> Decomposition:
    terms = []
    for spec in compact_z4z3_orbits():
        terms.extend(expand_orbit(spec))
    return Decomposition(3, tuple(terms), name="z4z3-compact")


def lader_group() -> list:
    """The order-24 group generated by the cyclic shift and the two extra
    symmetries of the cyclic-invariant member of the Laderman family."""
    return mulclose([cyclic_element(3, 1), lader_phi(), lader_zeta()])


def compact_lader_z3() -> Decomposition:
    """Coset-orbit presentation of the cyclic-invariant Laderman-family
    decomposition.  Orbit sizes 1, 4, 4, 6, 8."""
    gamma = lader_group()
    seeds = [
        _cube([[0, 0, 0], [0, 1, 0], [0, 0, 0]]),
        _cube([[0, 0, 0], [0, 0, 0], [0, 0, 1]]),
        _cube([[-1, 1, 0], [-1, 0, 0], [0, 0, 0]]),
        _triple([[0, -1, 0], [0, 0, 0], [0, 0, 0]],
                [[1, -1, 0], [1, -1, -1], [0, 1, 1]],
                [[0, 0, 0], [1, 0, 0], [0, 0, 0]]),
        _cube([[1, 0, 0], [1, 0, 0], [0, 0, 0]]),
    ]
    terms = []
    for i, seed in enumerate(seeds):
        orbit = group_orbit(seed, gamma) if i > 0 else [seed]
        terms.extend(orbit)
    return Decomposition(3, tuple(terms), name="lader_z3-compact")


# ---------------------------------------------------------------------------
# Explicit triplet listings (the cross-check fixtures for z4z3 / lader_z3,
# and the only published form of the remaining entries)
# ---------------------------------------------------------------------------

def explicit_z4z3_terms() -> list:
    cubes = [
        [[0, 0, 1], [-1, 0, 1], [0, -1, 1]],
        [[0, 1, 0], [0, 1, 0], [0, 0, 0]],
        [[0, 0, 0], [-1, 0, 1], [-1, 0, 1]],
        [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [-1, 1, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 0], [0, -1, 1]],
        [[0, 0, 1], [0, 0, 1], [0, 0, 1]],
        [[0, -1, 0], [1, -1, 0], [0, 0, 0]],
        [[0, 0, 0], [1, 0, -1], [0, 1, -1]],
        [[0, 0, -1], [0, 0, -1], [0, 1, -1]],
        [[0, 0, -1], [1, 0, -1], [1, 0, -1]],
    ]
    orbits = [
        ([[0, 0, 0], [0, 0, 1], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 0], [-1, 1, 0]],
         [[0, 0, 0], [0, 1, -1], [0, 1, -1]]),
        ([[0, 0, 0], [0, 0, 0], [-1, 0, 0]],
         [[0, 1, -1], [0, 1, -1], [0, 1, -1]],
         [[0, 0, -1], [0, 0, -1], [0, 0, 0]]),
        ([[-1, 1, 0], [-1, 1, 0], [-1, 1, 0]],
         [[0, 0, -1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [1, 0, 0], [1, 0, 0]]),
        ([[0, 1, -1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [1, 0, 0], [0, 0, 0]],
         [[1, -1, 0], [1, -1, 0], [0, 0, 0]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def explicit_lader_terms() -> list:
    cubes = [
        [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
        [[-1, 1, 0], [-1, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [1, 0, 0], [0, 0, 0]],
        [[1, -1, 0], [0, 0, 0], [0, 0, 0]],
    ]
    orbits = [
        ([[1, 0, 0], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 0], [1, 0, 0]]),
        ([[0, 0, 0], [0, 0, 1], [0, -1, -1]],
         [[0, 0, 0], [1, 0, 0], [-1, 1, 0]],
         [[0, -1, -1], [0, 0, -1], [0, 0, 0]]),
        ([[0, -1, 0], [0, 0, 0], [0, 0, 0]],
         [[1, -1, 0], [1, -1, -1], [0, 1, 1]],
         [[0, 0, 0], [1, 0, 0], [0, 0, 0]]),
        ([[0, 0, 0], [0, 0, 0], [0, -1, 0]],
         [[0, 1, 1], [-1, 1, 1], [1, -1, 0]],
         [[0, 0, 0], [0, 0, -1], [0, 0, 0]]),
        ([[0, 0, 0], [0, 0, -1], [0, 0, 1]],
         [[0, 0, 0], [-1, 0, 0], [1, 0, 0]],
         [[0, 0, 1], [0, 0, 1], [0, 0, 0]]),
        ([[0, 0, 0], [0, 0, 0], [0, 1, 1]],
         [[0, 0, 0], [0, 0, 0], [1, -1, 0]],
         [[0, 1, 1], [0, 0, 0], [0, 0, 0]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def twofix_terms() -> list:
    cubes = [
        [[1, 0, 0], [0, 0, 1], [0, 0, 1]],
        [[0, 0, 0], [0, 1, -1], [0, 0, 0]],
    ]
    orbits = [
        ([[0, 1, 0], [0, 0, 1], [0, 0, 0]],
         [[0, 0, 0], [0, 1, -1], [0, 1, -1]],
         [[0, 0, 0], [1, 0, -1], [0, 0, 0]]),
        ([[0, -1, 1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
         [[0, 0, 0], [0, 0, 0], [1, 0, 0]]),
        ([[1, 0, 0], [1, 0, 0], [0, 0, 0]],
         [[0, -1, 1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 0], [0, 1, 0]]),
        ([[1, 0, 0], [0, 0, 1], [0, 0, 0]],
         [[0, 1, 0], [0, 0, 1], [0, 0, 1]],
         [[0, 0, 0], [1, 0, -1], [0, 1, -1]]),
        ([[1, 0, 0], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 1], [0, 0, 1], [0, 0, 1]],
         [[0, 0, 0], [0, 0, 0], [1, -1, 0]]),
        ([[0, 0, 0], [0, 0, 1], [0, 0, 0]],
         [[0, 1, 0], [0, 1, 0], [0, 1, 0]],
         [[0, 0, 0], [-1, 1, 0], [0, 0, 0]]),
        ([[0, 0, 0], [0, 0, 1], [0, 0, 1]],
         [[1, 0, 0], [1, 0, 0], [1, 0, 0]],
         [[-1, 1, 0], [0, 0, 0], [0, 0, 0]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def addtl1_terms() -> list:
    cubes = [
        [[0, 0, 0], [0, 0, 0], [0, -1, 1]],
        [[1, 0, 0], [1, 0, 0], [0, 0, 0]],
        [[1, -1, 0], [0, 0, 0], [0, -1, 0]],
        [[0, 0, 0], [0, 1, 0], [0, 1, 0]],
        [[-1, 1, 0], [-1, 0, 0], [0, 1, 0]],
    ]
    orbits = [
        ([[0, 0, 0], [0, 0, 1], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 0], [-1, 0, 0]],
         [[0, -1, 1], [0, 0, 0], [0, 0, 0]]),
        ([[0, 0, 0], [0, -1, 1], [0, -1, 1]],
         [[1, 0, -1], [-1, -1, 1], [0, -1, 0]],
         [[0, 0, 0], [0, 0, 0], [0, -1, 0]]),
        ([[0, 0, 0], [1, 1, -1], [1, 1, -1]],
         [[-1, 0, 1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [0, 0, 1], [0, 0, 1]]),
        ([[0, 0, 0], [0, 0, 1], [0, -1, 1]],
         [[0, 0, 0], [1, 1, -1], [0, 1, -1]],
         [[1, 0, -1], [0, 0, 0], [0, -1, 0]]),
        ([[0, 0, 0], [0, 0, 0], [1, 0, 0]],
         [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 1], [0, 0, 1], [0, 0, 1]]),
        ([[0, -1, 0], [0, 0, 0], [0, -1, 0]],
         [[1, -1, 0], [1, -1, 0], [0, -1, 0]],
         [[0, 0, 0], [1, 0, 0], [0, 0, 0]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def addtl2_terms() -> list:
    cubes = [
        [[0, 1, -1], [0, 1, 0], [0, 0, 0]],
        [[0, 0, 0], [-1, 1, 1], [0, 0, 0]],
        [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
        [[0, -1, 1], [1, -1, -1], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
    ]
    orbits = [
        ([[-1, 0, 1], [0, 0, 0], [-1, 0, 1]],
         [[0, 0, 0], [0, 1, 0], [0, 1, 0]],
         [[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
        ([[0, -1, 1], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [-1, 0, 1], [0, 0, 0]],
         [[1, -1, 0], [1, -1, -1], [0, 0, 0]]),
        ([[0, 0, 0], [1, 0, 0], [1, 0, 0]],
         [[-1, 0, 0], [0, 0, 0], [-1, 0, 0]],
         [[0, -1, 0], [0, -1, 0], [0, -1, 0]]),
        ([[0, 0, 0], [0, 0, -1], [0, 0, 0]],
         [[0, 1, -1], [0, 0, 0], [0, 1, -1]],
         [[0, 0, 0], [0, -1, 0], [0, 0, 0]]),
        ([[1, 0, -1], [0, 0, 0], [1, 0, 0]],
         [[0, 1, -1], [0, 1, 0], [0, 1, 0]],
         [[0, 0, 0], [-1, 0, 1], [-1, 0, 0]]),
        ([[0, -1, 1], [-1, -1, 1], [-1, -1, 1]],
         [[0, 0, 0], [0, 0, 0], [-1, 0, 0]],
         [[0, 0, -1], [0, 0, 0], [0, 0, 0]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def addtl3_terms() -> list:
    cubes = [
        [[0, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
    ]
    orbits = [
        ([[0, 0, 0], [0, 0, 0], [0, 0, 1]],
         [[0, 0, 0], [0, -1, 0], [0, 1, 0]],
         [[0, 0, 0], [0, 1, 1], [0, 0, 0]]),
        ([[0, 0, 0], [1, 1, 0], [0, 0, 0]],
         [[-1, 0, -1], [0, 0, 0], [0, 0, 0]],
         [[0, -1, 0], [0, 0, 0], [0, 0, 0]]),
        ([[0, 0, 0], [0, 0, 0], [-1, 0, 0]],
         [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
         [[0, 0, 0], [0, -1, -1], [0, 0, 0]]),
        ([[0, 0, -1], [0, 0, 0], [0, 0, 0]],
         [[0, 1, 0], [0, 0, 0], [-1, -1, 0]],
         [[0, 0, 0], [1, 0, 0], [-1, 0, 0]]),
        ([[0, 1, 1], [0, 0, 0], [0, -1, -1]],
         [[0, 0, 0], [0, 0, 0], [1, 0, 0]],
         [[1, 0, 0], [-1, 0, 0], [1, 0, 0]]),
        ([[0, 0, 0], [0, 0, 0], [0, 1, 1]],
         [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
         [[-1, 0, -1], [1, 0, 1], [-1, 0, -1]]),
        ([[0, 0, 0], [0, -1, 0], [-1, 0, 0]],
         [[1, 0, 1], [-1, 0, 0], [1, 0, 0]],
         [[0, 1, 0], [0, 0, 0], [0, -1, -1]]),
    ]
    terms = [_cube(m) for m in cubes]
    for x, y, z in orbits:
        terms.extend(expand_orbit(_z3_orbit(_triple(x, y, z))))
    return terms


def _generator_descriptors(names: Sequence[str]) -> list:
    return [{"name": n, **element_to_json(builtin_element(n))} for n in names]


def source_decompositions() -> dict:
    """All seven entries built from their source presentations, with the
    claimed symmetry generators attached."""
    std = standard_decomposition(3)
    entries = {
        "standard3": Decomposition(
            3, std.terms, name="standard3",
            metadata={"generators": _generator_descriptors(["cyclic", "transpose"]),
                      "provenance": "basis outer products"}),
        "z4z3": Decomposition(
            3, tuple(explicit_z4z3_terms()), name="z4z3",
            metadata={"generators": _generator_descriptors(["a0conj", "cyclic"]),
                      "provenance": "23 terms, symmetry group Z4 x Z3"}),
        "lader_z3": Decomposition(
            3, tuple(explicit_lader_terms()), name="lader_z3",
            metadata={"generators": _generator_descriptors(
                ["cyclic", "lader_phi", "lader_zeta"]),
                "provenance": "cyclic-invariant member of the Laderman family"}),
        "twofix_z3": Decomposition(
            3, tuple(twofix_terms()), name="twofix_z3",
            metadata={"generators": _generator_descriptors(["cyclic"]),
                      "provenance": "23 terms with two cyclic-fixed cubes"}),
        "addtl1": Decomposition(
            3, tuple(addtl1_terms()), name="addtl1",
            metadata={"generators": _generator_descriptors(["cyclic"]),
                      "provenance": "additional decomposition #1 (five fixed cubes)"}),
        "addtl2": Decomposition(
            3, tuple(addtl2_terms()), name="addtl2",
            metadata={"generators": _generator_descriptors(["cyclic"]),
                      "provenance": "additional decomposition #2 (five fixed cubes)"}),
        "addtl3": Decomposition(
            3, tuple(addtl3_terms()), name="addtl3",
            metadata={"generators": _generator_descriptors(["cyclic"]),
                      "provenance": "additional decomposition #3 (two fixed cubes)"}),
    }
    return entries


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------

def format_exact(value: Fraction):
    return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_exact(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise ParseError(f"{where}: boolean is not a scalar")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            value = Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad rational {raw!r} ({exc})") from None
        return value
    raise ParseError(f"{where}: expected integer or 'p/q' string, got {type(raw).__name__}")


def _grid_to_json(m: Mat) -> list:
    if m.mode == EXACT:
        return [[format_exact(e) for e in row] for row in m.rows]
    return [[float(e) for e in row] for row in m.rows]


def _grid_from_json(raw, n: int, mode: str, where: str) -> Mat:
    if not isinstance(raw, list) or len(raw) != n:
        raise ParseError(f"{where}: expected {n} rows")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{where}, row {i}: expected {n} entries")
        if mode == EXACT:
            rows.append([parse_exact(e, f"{where}, entry ({i},{j})")
                         for j, e in enumerate(row)])
        else:
            try:
                rows.append([float(e) for e in row])
            except (TypeError, ValueError):
                raise ParseError(f"{where}, row {i}: bad float entry") from None
    return Mat.from_rows(rows, mode)


def element_to_json(e: GroupElement) -> dict:
    return {
        "g": _grid_to_json(e.g),
        "h": _grid_to_json(e.h),
        "k": _grid_to_json(e.k),
        "cyclic": e.cyclic,
        "transpose": bool(e.transpose),
    }


def element_from_json(raw: dict, where: str = "element") -> GroupElement:
    for key in ("g", "h", "k"):
        if key not in raw:
            raise ParseError(f"{where}: missing matrix {key!r}")
    n = len(raw["g"])
    return GroupElement(
        _grid_from_json(raw["g"], n, EXACT, f"{where}.g"),
        _grid_from_json(raw["h"], n, EXACT, f"{where}.h"),
        _grid_from_json(raw["k"], n, EXACT, f"{where}.k"),
        int(raw.get("cyclic", 0)),
        bool(raw.get("transpose", False)),
    )


def decomposition_to_json(dec: Decomposition) -> dict:
    doc = {
        "format": FILE_FORMAT_VERSION,
        "kind": "decomposition",
        "n": dec.n,
        "mode": dec.mode,
        "name": dec.name,
        "terms": [
            {"x": _grid_to_json(t.x), "y": _grid_to_json(t.y), "z": _grid_to_json(t.z)}
            for t in dec.terms
        ],
    }
    doc.update({k: v for k, v in dec.metadata.items() if k in ("generators", "provenance")})
    return doc


def decomposition_from_json(doc: dict, require_mode: str | None = None) -> Decomposition:
    if doc.get("kind", "decomposition") != "decomposition":
        raise ParseError(f"not a decomposition file (kind={doc.get('kind')!r})")
    if doc.get("format", 1) != FILE_FORMAT_VERSION:
        raise ParseError(f"unsupported format version {doc.get('format')!r}")
    mode = doc.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise ParseError(f"unknown scalar mode {mode!r}")
    if require_mode is not None and mode != require_mode:
        raise ModeError(f"{require_mode}-mode decomposition required, file is {mode}-mode")
    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise ParseError("missing or invalid n")
    terms = []
    for i, term in enumerate(doc.get("terms", [])):
        mats = []
        for slot in ("x", "y", "z"):
            if slot not in term:
                raise ParseError(f"term {i}: missing slot {slot!r}")
            mats.append(_grid_from_json(term[slot], n, mode, f"term {i}, slot {slot}"))
        try:
            terms.append(RankOneTriple(*mats))
        except ValueError as exc:
            raise ParseError(f"term {i}: {exc}") from None
    metadata = {}
    if "generators" in doc:
        metadata["generators"] = doc["generators"]
    if "provenance" in doc:
        metadata["provenance"] = doc["provenance"]
    return Decomposition(n, tuple(terms), name=doc.get("name", ""), metadata=metadata)


def save(dec: Decomposition, path) -> None:
    Path(path).write_text(json.dumps(decomposition_to_json(dec), indent=1) + "\n",
                          encoding="utf-8")


def load(path, require_mode: str | None = None) -> Decomposition:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return decomposition_from_json(doc, require_mode)


def catalog_dir() -> Path:
    override = os.environ.get(CATALOG_DIR_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def builtin(name: str) -> Decomposition:
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return load(catalog_dir() / f"{name}.json", require_mode=EXACT)


def regenerate_data(directory=None) -> list:
    """Rewrite the shipped catalog files from the source presentations."""
    directory = Path(directory) if directory else Path(__file__).parent / "data"
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, dec in source_decompositions().items():
        path = directory / f"{name}.json"
        save(dec, path)
        written.append(path)
    return written
