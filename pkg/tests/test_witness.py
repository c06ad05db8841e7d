import random
from fractions import Fraction

import numpy as np
import pytest

from graphprod.errors import NotFiniteOrderError, PreconditionError, RankDeficientError
from graphprod.witness import (det_exact, echelon, exponent_matrix, filter_max_order_blocks, rank_exact,
                               reduce_witnesses, select_transversal, to_cyclically_reduced_witnesses)
from graphprod.words import parse_word

from helpers import graph, has_transversal


def fraction_det(rows):
    """Gaussian elimination over the rationals."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[p], a[c] = a[c], a[p]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(det)


def random_matrix(rng, k, r, lo=-5, hi=5, density=0.6):
    return [[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(r)] for _ in range(k)]


def test_rank_and_det_examples():
    assert rank_exact([[1, 2], [2, 4]]) == 1
    assert rank_exact([[0, 0], [0, 0]]) == 0
    assert det_exact([[2, 1], [1, 3]]) == 5
    assert det_exact([[0, 1], [1, 0]]) == -1
    assert det_exact([]) == 1


def test_echelon_pivots():
    rows, pivots, _ = echelon([[0, 1, 2], [0, 2, 4], [1, 0, 0]])
    assert pivots == [0, 1]


def test_rank_and_det_against_oracles():
    rng = random.Random(53)
    for _ in range(300):
        k, r = rng.randint(1, 6), rng.randint(1, 8)
        m = random_matrix(rng, k, r)
        assert rank_exact(m) == np.linalg.matrix_rank(np.array(m, dtype=float))
        square = [row[:k] for row in random_matrix(rng, k, k)]
        assert det_exact(square) == fraction_det(square)


def test_transversal_examples():
    assert select_transversal([[1, 0], [0, 1]]).columns == (0, 1)
    assert select_transversal([[1, 1], [1, 0]]).columns == (1, 0)
    with pytest.raises(RankDeficientError):
        select_transversal([[1, 1], [2, 2]])
    assert select_transversal([]).columns == ()


def test_transversal_on_full_rank_matrices():
    rng = random.Random(59)
    full = 0
    for _ in range(500):
        k, r = rng.randint(1, 6), rng.randint(1, 8)
        m = random_matrix(rng, k, r)
        if rank_exact(m) < k:
            with pytest.raises(RankDeficientError):
                select_transversal(m)
            continue
        full += 1
        cols = select_transversal(m).columns
        assert len(set(cols)) == k
        assert all(m[i][j] != 0 for i, j in enumerate(cols))
        assert has_transversal(m)
    assert full > 100


Z2_FREE = graph([2, 2])
# c commutes with a and b; d isolated
H = graph([4, 2, 3, 2], [("a", "c"), ("b", "c"), ("a", "b")])


def test_cyclic_reduction_of_witnesses():
    cores = to_cyclically_reduced_witnesses([parse_word("b a b", Z2_FREE)])
    assert str(cores[0]) == "a"
    with pytest.raises(NotFiniteOrderError):
        to_cyclically_reduced_witnesses([parse_word("a b", Z2_FREE)])


def test_filter_max_order_blocks():
    c = parse_word("a b", H)  # orders 4 and 2
    assert str(filter_max_order_blocks(c, 4)) == "a"
    c = parse_word("a^2 b c", H)  # orders 2, 2, 3 -> lcm 6
    assert str(filter_max_order_blocks(c, 6)) == ""
    with pytest.raises(PreconditionError):
        filter_max_order_blocks(parse_word("a", H), 2)


def test_exponent_matrix():
    m = exponent_matrix([parse_word("a^3 b", H), parse_word("c^2", H)], H)
    assert m.entries == ((3, 1, 0, 0), (0, 0, 2, 0))
    assert m.columns == ("a", "b", "c", "d")
    with pytest.raises(PreconditionError):
        exponent_matrix([parse_word("a d", H)], H)


def test_reduce_witnesses_pipeline():
    source = graph([2, 3], [("a", "b")])
    a1 = parse_word("d a^2 b d", H)  # conjugate of a^2 b by d
    a2 = parse_word("c", H)
    red = reduce_witnesses([a1, a2], source, H)
    assert [str(h) for h in red.h] == ["a^2", "c"]
    assert red.transversal.columns == (0, 2)
    out = red.to_json()
    assert set(out) == {"h", "matrix", "transversal", "diagnostics"}
    assert out["matrix"] == [[2, 1, 0, 0], [0, 0, 1, 0]]
    assert any("cyclically reduced" in d for d in out["diagnostics"])


def test_reduce_single_witness_in_direct_product():
    source = graph([2])
    target = graph([2, 2], [("a", "b")])
    red = reduce_witnesses([parse_word("a b", target)], source, target)
    assert red.matrix.entries == ((1, 1),)
    assert red.transversal.columns == (0,)
    assert [str(h) for h in red.h] == ["a"]


def test_small_examples():
    assert rank_exact([[1, 1, 0], [1, 1, 1]]) == 2
    assert select_transversal([[0, 2], [3, 0]]).columns == (1, 0)
    z4z4 = graph([4, 4], [("a", "b")])
    assert exponent_matrix([parse_word("a^2 b^3", z4z4)], z4z4).entries == ((2, 3),)
    assert exponent_matrix([parse_word("a", Z2_FREE), parse_word("b", Z2_FREE)], Z2_FREE).entries == ((1, 0), (0, 1))
    z4 = graph([4])
    assert [str(h) for h in reduce_witnesses([parse_word("a^2", z4)], graph([2]), z4).h] == ["a^2"]
    z2 = graph([2])
    assert [str(h) for h in reduce_witnesses([parse_word("a", z2)], z2, z2).h] == ["a"]


def test_reduce_witnesses_errors():
    source = graph([2, 2])
    with pytest.raises(PreconditionError):
        reduce_witnesses([parse_word("b", H)], source, H)
    with pytest.raises(PreconditionError):
        reduce_witnesses([parse_word("a", H), parse_word("b", H)], source, H)  # a has order 4
    with pytest.raises(RankDeficientError):
        reduce_witnesses([parse_word("b", H), parse_word("b", H)], source, H)
