import random

import pytest

from graphprod.blocks import (block_decomposition, centralizer, commutes, link_subgroup,
                              primitive_root)
from graphprod.errors import PreconditionError
from graphprod.oracle import ball_enumerate, bounded_subgroup_closure
from graphprod.words import NormalForm, canonical, cyclically_reduce, format_word, parse_word, power

from helpers import graph, random_marked_graph

Z2_FREE = graph([2, 2])
# a - b - c path plus isolated d
PATH_D = graph([2, 2, 2, 2], [("a", "b"), ("b", "c")])


def w(text, g):
    return parse_word(text, g)


def test_blocks_of_commuting_product():
    g = graph([2, 3], [("a", "b")])
    bd = block_decomposition(w("a b", g))
    assert [b.kind for b in bd.blocks] == ["singular", "singular"]
    assert [format_word(b.element) for b in bd.blocks] == ["a", "b"]


def test_blocks_of_free_product_word():
    bd = block_decomposition(w("a b", Z2_FREE))
    assert [b.kind for b in bd.blocks] == ["regular"]
    assert bd.regular[0].vertices == {0, 1}


def test_blocks_split_by_commutation():
    # a and c do not commute with each other; b commutes with both
    bd = block_decomposition(w("a c b", PATH_D))
    assert sorted(format_word(b.element) for b in bd.blocks) == ["a c", "b"]
    assert bd.product() == w("a c b", PATH_D)


def test_blocks_require_cyclically_reduced():
    with pytest.raises(PreconditionError):
        block_decomposition(w("a b a", Z2_FREE))


def test_block_product_recovers_core():
    rng = random.Random(31)
    for _ in range(200):
        g = random_marked_graph(rng, rng.randint(1, 5))
        u = NormalForm(g, canonical([(rng.randrange(len(g)), rng.randint(1, 3)) for _ in range(6)], g))
        core = cyclically_reduce(u).core
        bd = block_decomposition(core)
        assert bd.product() == core
        blocks = bd.blocks
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                assert commutes(blocks[i].element, blocks[j].element)
                assert not blocks[i].vertices & blocks[j].vertices


def test_link():
    assert link_subgroup(w("a", PATH_D)) == {"b"}
    assert link_subgroup(w("a c", PATH_D)) == {"b"}
    assert link_subgroup(w("b", PATH_D)) == {"a", "c"}
    assert link_subgroup(w("d", PATH_D)) == frozenset()


def test_primitive_root():
    assert primitive_root(w("a b a b", Z2_FREE)) == w("a b", Z2_FREE)
    assert primitive_root(w("a b", Z2_FREE)) == w("a b", Z2_FREE)
    g = graph([3, 3])
    x = w("a b^2 a^2 b", g)
    assert primitive_root(power(x, 3)) == x


def test_centralizer_examples():
    desc = centralizer(w("a b", Z2_FREE))
    assert desc.cyclic_factors == (w("a b", Z2_FREE),)
    assert desc.vertex_factors == frozenset() and desc.link_vertices == frozenset()
    desc = centralizer(w("a b a b", Z2_FREE))
    assert desc.cyclic_factors == (w("a b", Z2_FREE),)
    desc = centralizer(w("a", PATH_D))
    assert desc.vertex_factors == {"a"} and desc.link_vertices == {"b"}
    assert [format_word(x) for x in desc.generators()] == ["a", "b"]


def _centralizer_agrees(g, core, radius=4):
    ball = ball_enumerate(g, radius)
    brute = {u.word for u in ball if canonical(u.word + core.word, g) == canonical(core.word + u.word, g)}
    closure = {u.word for u in bounded_subgroup_closure(centralizer(core).generators(), radius, graph=g)}
    return brute == closure


def test_centralizer_against_brute_force_small():
    for g in (Z2_FREE, PATH_D, graph([2, 3, 2], [("a", "b")])):
        for u in ball_enumerate(g, 3):
            core = cyclically_reduce(u).core
            assert _centralizer_agrees(g, core, 3), format_word(core)


def test_commutes():
    assert commutes(w("a", PATH_D), w("b", PATH_D))
    assert not commutes(w("a", PATH_D), w("c", PATH_D))
    assert commutes(w("a b", Z2_FREE), w("b a b a", Z2_FREE).__invert__())
