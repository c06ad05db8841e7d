"""Brute-force ground truth used to cross-check the structural algorithms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .errors import InfiniteGroupError, LimitExceededError
from .marked_graph import MarkedGraph, as_marked_graph
from .words import NormalForm, canonical, invert, multiply

MAX_BALL = 10**6
MAX_CARRIER = 1 << 15
MAX_NAIVE_VERTICES = 8


@dataclass(frozen=True)
class Ball:
    radius: int
    elements: tuple[NormalForm, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def all_syllables(g: MarkedGraph) -> list[tuple[int, int]]:
    return [(v, e) for v in range(len(g)) for e in range(1, g.orders[v])]


def ball_enumerate(spec, radius: int, limit: int = MAX_BALL) -> Ball:
    """All elements of syllable length at most ``radius``, sorted by (length, word)."""
    g = as_marked_graph(spec)
    syllables = all_syllables(g)
    seen = {()}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for s in syllables:
                c = canonical(w + (s,), g)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > limit:
                        raise LimitExceededError(f"ball exceeds {limit} elements")
        if not nxt:
            break
        frontier = nxt
    words = sorted(seen, key=lambda w: (len(w), w))
    return Ball(radius, tuple(NormalForm(g, w) for w in words))


class FiniteCarrier:
    """Direct product of the vertex groups of a complete marked graph, with
    elements stored as exponent vectors (one residue per vertex)."""

    abelian = True

    def __init__(self, graph: MarkedGraph, limit: int = MAX_CARRIER):
        if not graph.is_complete():
            raise InfiniteGroupError("marked graph is not complete; the group is infinite")
        size = prod(graph.orders)
        if size > limit:
            raise LimitExceededError(f"carrier of size {size} exceeds {limit}")
        self.graph = graph
        self.moduli = graph.orders

    def __len__(self):
        return prod(self.moduli)

    def elements(self):
        return itertools.product(*(range(m) for m in self.moduli))

    def identity(self):
        return (0,) * len(self.moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple(-x % m for x, m in zip(a, self.moduli))

    def pow(self, a, n: int):
        return tuple(x * n % m for x, m in zip(a, self.moduli))

    def order(self, a) -> int:
        """Brute force: smallest ``m >= 1`` with ``a**m == 1``."""
        x, m = a, 1
        one = self.identity()
        while x != one:
            x = self.mul(x, a)
            m += 1
        return m

    def to_normal_form(self, a) -> NormalForm:
        return NormalForm(self.graph, canonical([(v, e) for v, e in enumerate(a) if e], self.graph))

    def from_normal_form(self, u: NormalForm):
        vec = [0] * len(self.moduli)
        for v, e in u.word:
            vec[v] = (vec[v] + e) % self.moduli[v]
        return tuple(vec)


def finite_carrier(spec, limit: int = MAX_CARRIER) -> FiniteCarrier:
    return FiniteCarrier(as_marked_graph(spec), limit)


def bounded_subgroup_closure(generators, radius: int, graph: MarkedGraph | None = None,
                             limit: int = MAX_BALL) -> set[NormalForm]:
    """Elements reachable from 1 by multiplying with generators and their
    inverses while never leaving the ball of the given radius."""
    gens = list(generators)
    if graph is None:
        if not gens:
            raise ValueError("graph is required when there are no generators")
        graph = gens[0].graph
    steps = {u for u in gens} | {invert(u) for u in gens}
    steps.discard(NormalForm.identity(graph))
    one = NormalForm.identity(graph)
    found = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for s in steps:
                y = multiply(x, s)
                if len(y) <= radius and y not in found:
                    found.add(y)
                    nxt.append(y)
        if len(found) > limit:
            raise LimitExceededError(f"closure exceeds {limit} elements")
        frontier = nxt
    return found


def naive_marked_iso(a: MarkedGraph, b: MarkedGraph) -> dict[str, str] | None:
    """Exhaustive permutation search for a mark-preserving isomorphism."""
    if max(len(a), len(b)) > MAX_NAIVE_VERTICES:
        raise LimitExceededError(f"naive isomorphism limited to {MAX_NAIVE_VERTICES} vertices")
    if len(a) != len(b):
        return None
    n = len(a)
    edges_a = {frozenset(e) for e in a.edges()}
    edges_b = {frozenset(e) for e in b.edges()}
    for perm in itertools.permutations(range(n)):
        if any(a.marks[i] != b.marks[perm[i]] for i in range(n)):
            continue
        mapping = {a.ids[i]: b.ids[perm[i]] for i in range(n)}
        if {frozenset(mapping[x] for x in e) for e in edges_a} == edges_b:
            return mapping
    return None
