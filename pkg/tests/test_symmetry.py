import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mmsym import catalog
from mmsym.core import Mat, RankOneTriple, evaluate, matmul_tensor
from mmsym.symmetry import (
    GroupElement,
    apply_element,
    apply_to_decomposition,
    apply_to_point,
    canonical_element,
    canonical_triple,
    compose,
    conjugation_element,
    cyclic_element,
    decompositions_equal,
    extract_configuration,
    fingerprint,
    graphs_isomorphic,
    identity_element,
    incidence_dot,
    incidence_graph,
    inverse,
    is_decomposition_symmetry,
    is_tensor_symmetry,
    linear_element,
    mulclose,
    normalize_framing,
    orbit_partition,
    pairing_dot,
    pairing_graph,
    primitive_point,
    rank_triple_partition,
    transpose_element,
    DEFAULT_FRAMING,
)

from reference_data import (
    FINGERPRINT_TABLES,
    KNOWN_INCIDENCE_GRAPHS,
    PAIRING_CUBE_EDGE_COUNTS,
    graph_as_point_edges,
    graph_weights,
)


def rand_invertible(rng, n):
    while True:
        m = Mat.from_rows([[rng.randrange(-3, 4) for _ in range(n)] for _ in range(n)])
        if m.rank() == n:
            return m


def rand_element(rng, n):
    return GroupElement(
        rand_invertible(rng, n), rand_invertible(rng, n), rand_invertible(rng, n),
        rng.randrange(3), bool(rng.randrange(2)),
    )


def rand_triple(rng, n):
    def mat():
        while True:
            m = Mat.from_rows([[rng.randrange(-2, 3) for _ in range(n)] for _ in range(n)])
            if not m.is_zero():
                return m
    return RankOneTriple(mat(), mat(), mat())


class TestApplyElement:
    def test_identity(self, builtins):
        t = builtins["z4z3"].terms[5]
        assert apply_element(identity_element(3), t) == t

    def test_cyclic_shift(self, builtins):
        t = builtins["twofix_z3"].terms[4]
        moved = apply_element(cyclic_element(3, 1), t)
        assert moved.x == t.z and moved.y == t.x and moved.z == t.y

    def test_a0_conjugation_of_cube(self):
        e11 = Mat.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
        t = RankOneTriple(e11, e11, e11)
        moved = apply_element(catalog.a0_conjugation(), t)
        expected = catalog.A0 @ e11 @ catalog.A0.inverse()
        assert moved.x == expected and moved.y == expected and moved.z == expected

    def test_singular_linear_part_rejected(self):
        sing = Mat.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
        e = linear_element(sing, Mat.identity(3), Mat.identity(3))
        t = rand_triple(random.Random(0), 3)
        with pytest.raises(ValueError):
            apply_element(e, t)

    def test_group_law_on_triples(self):
        rng = random.Random(42)
        for _ in range(50):
            n = rng.choice((2, 3))
            e1, e2 = rand_element(rng, n), rand_element(rng, n)
            t = rand_triple(rng, n)
            via_compose = apply_element(compose(e1, e2), t)
            via_apply = apply_element(e1, apply_element(e2, t))
            assert canonical_triple(via_compose) == canonical_triple(via_apply)

    def test_inverse(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.choice((2, 3))
            e = rand_element(rng, n)
            assert compose(e, inverse(e)) == canonical_element(identity_element(n))
            assert compose(inverse(e), e) == canonical_element(identity_element(n))

    def test_a0_has_order_four(self):
        a = catalog.A0
        assert a @ a @ a @ a == Mat.identity(3)
        assert a @ a @ a == a.inverse()
        powers = {canonical_element(catalog.a0_conjugation(q)) for q in range(4)}
        assert len(powers) == 4


class TestTensorSymmetry:
    def test_random_linear_triples(self):
        rng = random.Random(5)
        for n in (2, 3):
            for _ in range(20):
                e = linear_element(*(rand_invertible(rng, n) for _ in range(3)))
                assert is_tensor_symmetry(e, n)

    def test_transpose_flip(self):
        for n in (2, 3):
            assert is_tensor_symmetry(transpose_element(n), n)

    def test_cyclic(self):
        for n in (2, 3):
            assert is_tensor_symmetry(cyclic_element(n, 1), n)

    def test_laderman_exchange(self):
        assert is_tensor_symmetry(catalog.lader_exchange(), 3)

    def test_random_composites(self):
        rng = random.Random(17)
        for _ in range(10):
            assert is_tensor_symmetry(rand_element(rng, 3), 3)


class TestDecompositionsEqual:
    def test_permute_and_rescale(self, builtins):
        dec = builtins["twofix_z3"]
        terms = list(dec.terms)
        random.Random(1).shuffle(terms)
        t = terms[0]
        terms[0] = RankOneTriple(t.x.scale(2), t.y.scale(3), t.z.scale(Fraction(1, 6)))
        from mmsym.core import Decomposition
        assert decompositions_equal(dec, Decomposition(3, tuple(terms)))

    def test_non_unit_rescale_breaks_equality(self, builtins):
        dec = builtins["twofix_z3"]
        terms = list(dec.terms)
        t = terms[0]
        terms[0] = RankOneTriple(t.x.scale(2), t.y, t.z)
        from mmsym.core import Decomposition
        assert not decompositions_equal(dec, Decomposition(3, tuple(terms)))

    def test_z4z3_invariant_under_a0(self, builtins):
        moved = apply_to_decomposition(catalog.a0_conjugation(), builtins["z4z3"])
        assert decompositions_equal(moved, builtins["z4z3"])

    def test_equivalence_on_catalog(self, builtins):
        names = list(builtins)
        for a in names:
            assert decompositions_equal(builtins[a], builtins[a])
        for a, b in zip(names, names[1:]):
            same = decompositions_equal(builtins[a], builtins[b])
            assert not same


class TestDecompositionSymmetry:
    def test_cyclic_on_all_cyclic_invariant(self, builtins):
        pi = cyclic_element(3, 1)
        for name in ("z4z3", "lader_z3", "twofix_z3", "addtl1", "addtl2", "addtl3"):
            assert is_decomposition_symmetry(pi, builtins[name]), name
        assert len(mulclose([pi])) == 3

    def test_a0_not_symmetry_of_twofix(self, builtins):
        assert not is_decomposition_symmetry(catalog.a0_conjugation(), builtins["twofix_z3"])

    def test_mixed_generator_on_z4z3(self, builtins):
        e = compose(catalog.a0_conjugation(), cyclic_element(3, 1))
        assert is_decomposition_symmetry(e, builtins["z4z3"])

    def test_lader_generators(self, builtins):
        for name in ("lader_phi", "lader_zeta"):
            assert is_decomposition_symmetry(catalog.builtin_element(name),
                                             builtins["lader_z3"]), name


class TestOrbitPartition:
    def test_z4z3_sizes(self, builtins):
        gens = [catalog.a0_conjugation(), cyclic_element(3, 1)]
        sizes = [len(o) for o in orbit_partition(builtins["z4z3"], gens)]
        assert sizes == [1, 2, 4, 4, 12]
        assert len(mulclose(gens)) == 12

    def test_lader_sizes(self, builtins):
        gens = [cyclic_element(3, 1), catalog.lader_phi(), catalog.lader_zeta()]
        sizes = [len(o) for o in orbit_partition(builtins["lader_z3"], gens)]
        assert sizes == [1, 4, 4, 6, 8]

    def test_empty_generators(self, builtins):
        orbits = orbit_partition(builtins["twofix_z3"], [])
        assert [len(o) for o in orbits] == [1] * 23

    def test_violating_generator_reported(self, builtins):
        with pytest.raises(ValueError) as info:
            orbit_partition(builtins["twofix_z3"], [catalog.a0_conjugation()])
        assert "generator #0" in str(info.value)


class TestRankTriples:
    def test_z4z3_unique_full_rank(self, builtins):
        part = rank_triple_partition(builtins["z4z3"])
        assert len(part[(3, 3, 3)]) == 1

    def test_twofix_unique_112_orbit(self, builtins):
        part = rank_triple_partition(builtins["twofix_z3"])
        assert len(part[(1, 1, 2)]) == 3

    def test_standard_all_rank_one(self, builtins):
        part = rank_triple_partition(builtins["standard3"])
        assert set(part) == {(1, 1, 1)}
        assert len(part[(1, 1, 1)]) == 27


class TestGraphs:
    @pytest.mark.parametrize("name", sorted(KNOWN_INCIDENCE_GRAPHS))
    def test_incidence_matches_reference(self, builtins, name):
        ref = KNOWN_INCIDENCE_GRAPHS[name]
        g = incidence_graph(builtins[name])
        assert graph_weights(g, "top") == ref["top"]
        assert graph_weights(g, "bottom") == ref["bottom"]
        assert graph_as_point_edges(g) == ref["edges"]

    @pytest.mark.parametrize("name", sorted(PAIRING_CUBE_EDGE_COUNTS))
    def test_pairing_cube_edges(self, builtins, name):
        pg = pairing_graph(builtins[name])
        assert sum(1 for e in pg.edges if e[3]) == PAIRING_CUBE_EDGE_COUNTS[name]

    def test_standard_pairing_edge_count(self, builtins):
        pg = pairing_graph(builtins["standard3"])
        assert len(pg.edges) == 27

    def test_isomorphic_to_self(self, builtins):
        g = incidence_graph(builtins["z4z3"])
        result = graphs_isomorphic(g, g)
        assert result is not None
        assert result["top"] == {i: i for i in range(len(g.top))}

    def test_different_graphs_not_isomorphic(self, builtins):
        g1 = incidence_graph(builtins["z4z3"])
        g2 = incidence_graph(builtins["lader_z3"])
        assert graphs_isomorphic(g1, g2) is None

    def test_relabeled_graph_isomorphic(self, builtins):
        from mmsym.symmetry import IncidenceGraph
        g = incidence_graph(builtins["twofix_z3"])
        rng = random.Random(9)
        perm_top = list(range(len(g.top)))
        perm_bot = list(range(len(g.bottom)))
        rng.shuffle(perm_top)
        rng.shuffle(perm_bot)
        g2 = IncidenceGraph(
            tuple(g.top[perm_top[i]] for i in range(len(g.top))),
            tuple(g.bottom[perm_bot[i]] for i in range(len(g.bottom))),
            frozenset((perm_top.index(t), perm_bot.index(b)) for t, b in g.edges),
        )
        assert graphs_isomorphic(g, g2) is not None

    def test_invariant_under_diagonal_conjugation(self, builtins):
        diag = Mat.from_rows([[2, 0, 0], [0, 3, 0], [0, 0, 5]])
        moved = apply_to_decomposition(conjugation_element(diag), builtins["z4z3"])
        g1 = incidence_graph(builtins["z4z3"])
        g2 = incidence_graph(moved)
        assert graphs_isomorphic(g1, g2) is not None
        # pairing structure is preserved too: cube edges, color-class
        # sizes, and endpoint weight pairs all coincide
        p1 = pairing_graph(builtins["z4z3"])
        p2 = pairing_graph(moved)
        def signature(pg):
            classes = {}
            for ti, bi, color, cube in pg.edges:
                classes.setdefault(color, []).append(
                    (pg.top[ti][1], pg.bottom[bi][1], cube))
            return sorted(sorted(edges) for edges in classes.values())
        assert signature(p1) == signature(p2)

    def test_dot_export(self, builtins):
        g = incidence_graph(builtins["standard3"])
        dot = incidence_dot(g, "std")
        assert dot.startswith('graph "std"')
        assert "t0" in dot and "b2" in dot and "--" in dot
        pg = pairing_graph(builtins["z4z3"])
        pdot = pairing_dot(pg)
        assert "style=dashed" in pdot and "color=" in pdot
        # stable ordering: weights descending within each side
        weights = [w for _, w in pg.top]
        assert weights == sorted(weights, reverse=True)


class TestFingerprints:
    @pytest.mark.parametrize("name", sorted(FINGERPRINT_TABLES))
    def test_tables(self, builtins, name):
        fp = fingerprint(builtins[name])
        table = FINGERPRINT_TABLES[name]
        assert dict(fp.symmetric) == table["symmetric"], name
        assert dict(fp.triples) == table["triples"], name
        assert fp.lone_terms == ()

    def test_totals(self, builtins):
        for name, dec in builtins.items():
            assert fingerprint(dec).total_terms() == dec.rank, name


class TestConfiguration:
    def test_standard_basis_points(self, builtins):
        cols, rows = extract_configuration(builtins["standard3"])
        assert {p for p, _ in cols} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
        assert {p for p, _ in rows} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
        assert all(w == 9 for _, w in cols + rows)

    def test_z4z3_points(self, builtins):
        cols, rows = extract_configuration(builtins["z4z3"])
        assert dict(cols) == KNOWN_INCIDENCE_GRAPHS["z4z3"]["top"]
        assert dict(rows) == KNOWN_INCIDENCE_GRAPHS["z4z3"]["bottom"]

    def test_twofix_six_points_each_side(self, builtins):
        cols, rows = extract_configuration(builtins["twofix_z3"])
        assert len(cols) == 6 and len(rows) == 6
        # the row side is the six lines dual to the default framing
        assert {p for p, _ in rows} == {
            (0, 0, 1), (0, 1, 0), (0, 1, -1), (1, 0, 0), (1, 0, -1), (1, -1, 0)}

    def test_rank_one_terms_only_variant(self, builtins):
        # restricting to rank-(1,1,1) terms drops the points contributed
        # by mixed-rank terms and never adds new ones
        full_cols, full_rows = extract_configuration(builtins["lader_z3"])
        sub_cols, sub_rows = extract_configuration(builtins["lader_z3"],
                                                   rank_one_terms_only=True)
        assert {p for p, _ in sub_cols} <= {p for p, _ in full_cols}
        assert {p for p, _ in sub_rows} <= {p for p, _ in full_rows}
        assert sum(w for _, w in sub_cols) < sum(w for _, w in full_cols)
        # standard decomposition is all rank one: the variants agree
        assert extract_configuration(builtins["standard3"], True) \
            == extract_configuration(builtins["standard3"])


class TestFraming:
    def test_default_framing_fixed(self):
        e = normalize_framing(DEFAULT_FRAMING)
        assert canonical_element(e) == canonical_element(identity_element(3))

    def test_transposition(self):
        u1, u2, u3, u4 = DEFAULT_FRAMING
        e = normalize_framing((u2, u1, u3, u4))
        tau = Mat.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        assert canonical_element(e) == canonical_element(conjugation_element(tau))

    def test_random_general_position(self):
        rng = random.Random(23)
        done = 0
        while done < 10:
            pts = [tuple(Fraction(rng.randrange(-5, 6)) for _ in range(3))
                   for _ in range(4)]
            try:
                e = normalize_framing(pts)
            except ValueError:
                continue
            done += 1
            images = [apply_to_point(e, p) for p in pts]
            assert images == [primitive_point(u) for u in DEFAULT_FRAMING]

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            normalize_framing(((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)))


class TestCanonicalTriple:
    @given(st.integers(1, 9), st.integers(1, 9), st.integers(-9, -1))
    def test_scale_invariance(self, a, b, c):
        dec = catalog.builtin("twofix_z3")
        t = dec.terms[3]
        alpha, beta = Fraction(a), Fraction(b)
        gamma = Fraction(1) / (alpha * beta)
        scaled = RankOneTriple(t.x.scale(alpha * c), t.y.scale(beta),
                               t.z.scale(gamma / c))
        assert canonical_triple(scaled) == canonical_triple(t)

    @given(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
           st.integers(1, 5))
    def test_primitive_point_scale_invariant(self, vec, k):
        if all(v == 0 for v in vec):
            with pytest.raises(ValueError):
                primitive_point(vec)
            return
        p = primitive_point(vec)
        assert primitive_point([v * k for v in vec]) == p
        assert primitive_point([-v for v in vec]) == p
        lead = next(v for v in p if v != 0)
        assert lead > 0
