from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mmsym.core import (
    Decomposition,
    Mat,
    ModeError,
    RankOneTriple,
    Tensor3,
    evaluate,
    flat_index,
    make_decomposition,
    matmul_tensor,
    residual,
    standard_decomposition,
    trilinear_form,
)


def basis(n, i, j):
    return [[1 if (r, c) == (i, j) else 0 for c in range(n)] for r in range(n)]


def rand_mat(rng, n):
    return Mat.from_rows(
        [[Fraction(rng.randrange(-4, 5), rng.randrange(1, 4)) for _ in range(n)]
         for _ in range(n)])


class TestFlatIndex:
    def test_examples(self):
        assert flat_index(0, 0, 3) == 0
        assert flat_index(1, 2, 3) == 5
        assert flat_index(2, 2, 3) == 8

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            flat_index(3, 0, 3)
        with pytest.raises(IndexError):
            flat_index(0, -1, 3)

    @given(st.integers(1, 6))
    def test_bijective(self, n):
        seen = {flat_index(i, j, n) for i in range(n) for j in range(n)}
        assert seen == set(range(n * n))


class TestMatmulTensor:
    def test_n1(self):
        t = matmul_tensor(1)
        assert t.m == 1 and t.data == (Fraction(1),)

    def test_n2_entry_count(self):
        t = matmul_tensor(2)
        ones = [v for v in t.data if v != 0]
        assert len(ones) == 8 and all(v == 1 for v in ones)
        # oracle: enumerate the defining summands directly
        expected = set()
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    expected.add((i * 2 + j, j * 2 + k, k * 2 + i))
        got = {(a, b, c) for a in range(4) for b in range(4) for c in range(4)
               if t[a, b, c] == 1}
        assert got == expected

    def test_n3_entry_count(self):
        t = matmul_tensor(3)
        assert sum(1 for v in t.data if v == 1) == 27
        assert all(v in (0, 1) for v in t.data)

    def test_trilinear_form_is_trace(self):
        import random
        rng = random.Random(20240301)
        for n in (1, 2, 3):
            t = matmul_tensor(n)
            for _ in range(20):
                x, y, z = (rand_mat(rng, n) for _ in range(3))
                prod = x @ y @ z
                trace = sum(prod.rows[i][i] for i in range(n))
                assert trilinear_form(t, x, y, z) == trace


class TestEvaluate:
    def test_standard_matches_tensor(self):
        for n in (1, 2, 3):
            assert evaluate(standard_decomposition(n)) == matmul_tensor(n)

    def test_empty_sum(self):
        dec = Decomposition(2, ())
        assert evaluate(dec) == Tensor3.zero(4)

    def test_single_term(self):
        dec = make_decomposition(2, [(basis(2, 0, 0),) * 3])
        t = evaluate(dec)
        assert t[0, 0, 0] == 1
        assert sum(1 for v in t.data if v != 0) == 1

    def test_linearity_in_terms(self):
        import random
        rng = random.Random(7)
        for _ in range(5):
            terms = [tuple([[rng.randrange(-2, 3) for _ in range(2)] for _ in range(2)]
                           for _ in range(3)) for _ in range(4)]
            terms = [t for t in terms
                     if all(any(v for row in m for v in row) for m in t)]
            if len(terms) < 2:
                continue
            half = len(terms) // 2
            d1 = make_decomposition(2, terms[:half])
            d2 = make_decomposition(2, terms[half:])
            dall = make_decomposition(2, terms)
            assert evaluate(dall) == evaluate(d1) + evaluate(d2)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            make_decomposition(2, [(basis(2, 0, 0), [[0, 0], [0, 0]], basis(2, 1, 1))])

    def test_mixed_modes_rejected(self):
        exact = Mat.from_rows(basis(2, 0, 0))
        floaty = Mat.from_rows(basis(2, 0, 0), mode="float")
        with pytest.raises(ModeError):
            RankOneTriple(exact, exact, floaty)


class TestResidual:
    def test_standard_residual_zero(self):
        for n in (1, 2, 3):
            _, nsq = residual(standard_decomposition(n))
            assert nsq == 0

    def test_one_term_removed(self):
        std = standard_decomposition(3)
        dec = Decomposition(3, std.terms[1:])
        _, nsq = residual(dec)
        assert nsq == 1

    def test_empty_decomposition(self):
        _, nsq = residual(Decomposition(3, ()))
        assert nsq == 27


class TestMat:
    def test_charpoly_idempotent(self):
        e11 = Mat.from_rows(basis(3, 0, 0))
        assert e11.charpoly() == (Fraction(0), Fraction(0), Fraction(-1), Fraction(1))

    def test_charpoly_nilpotent(self):
        e12 = Mat.from_rows(basis(3, 0, 1))
        assert e12.charpoly() == (Fraction(0), Fraction(0), Fraction(0), Fraction(1))

    def test_inverse_roundtrip(self):
        import random
        rng = random.Random(3)
        for _ in range(10):
            m = rand_mat(rng, 3)
            if m.rank() < 3:
                continue
            assert m @ m.inverse() == Mat.identity(3)

    def test_rank(self):
        assert Mat.from_rows([[1, 2], [2, 4]]).rank() == 1
        assert Mat.identity(3).rank() == 3
        assert Mat.zero(2).rank() == 0

    def test_exact_arithmetic_roundtrip(self):
        a = Fraction(1, 3)
        b = Fraction(2, 7)
        assert (a + b) - b == a
