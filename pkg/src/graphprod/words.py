"""Elements of a graph product as canonical geodesic syllable sequences.

A syllable is a pair ``(vertex, exponent)`` standing for the generator of the
vertex group raised to ``exponent`` (a least positive residue modulo the
vertex order).  Internally vertices are integer indices into the owning
``MarkedGraph``; adjacency is read from its bitmasks.

The canonical form of an element is obtained in two passes:

1. reduction: syllables are appended one at a time; a new syllable merges
   into the last syllable of the same vertex if everything after that one
   commutes with it.  This keeps the word geodesic.
2. linearization: among all shuffles of the geodesic by commuting swaps, the
   lexicographically least sequence of vertex indices is emitted greedily.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import ContextError, InvalidSpecError
from .marked_graph import MarkedGraph

Word = tuple  # tuple[tuple[int, int], ...]


def reduce_word(word: Iterable[tuple[int, int]], orders: Sequence[int], adj: Sequence[int]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for v, e in word:
        e %= orders[v]
        if not e:
            continue
        blocker = ~adj[v]
        i = len(out) - 1
        while i >= 0:
            u, f = out[i]
            if u == v:
                e = (e + f) % orders[v]
                if e:
                    out[i] = (v, e)
                else:
                    del out[i]
                break
            if blocker >> u & 1:
                i = -1
                break
            i -= 1
        if i < 0:
            out.append((v, e))
    return out


def linearize(word: Sequence[tuple[int, int]], adj: Sequence[int]) -> Word:
    """Lexicographically least shuffle of a geodesic word."""
    rest = list(word)
    out = []
    while rest:
        seen = 0
        best = -1
        best_v = None
        for pos, (v, _) in enumerate(rest):
            if not seen & ~adj[v] and (best_v is None or v < best_v):
                best, best_v = pos, v
            seen |= 1 << v
        out.append(rest.pop(best))
    return tuple(out)


def canonical(word: Iterable[tuple[int, int]], g: MarkedGraph) -> Word:
    return linearize(reduce_word(word, g.orders, g.adj_mask), g.adj_mask)


class NormalForm:
    """Immutable element of the graph product defined by ``graph``.

    Supports ``*``, ``~`` (inverse), ``**`` and equality.
    """

    __slots__ = ("graph", "word", "_hash")

    def __init__(self, graph: MarkedGraph, word: Word):
        self.graph = graph
        self.word = word
        self._hash = None

    @classmethod
    def identity(cls, graph: MarkedGraph) -> NormalForm:
        return cls(graph, ())

    @classmethod
    def syllable(cls, graph: MarkedGraph, vertex, exp: int = 1) -> NormalForm:
        return normalize([(vertex, exp)], graph)

    @classmethod
    def generators(cls, graph: MarkedGraph) -> list[NormalForm]:
        return [cls(graph, ((i, 1),)) for i in range(len(graph))]

    def __len__(self):
        return len(self.word)

    def __bool__(self):
        return bool(self.word)

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.word == other.word and (self.graph is other.graph or self.graph == other.graph)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.word)
        return self._hash

    def __lt__(self, other):
        return (len(self.word), self.word) < (len(other.word), other.word)

    def __mul__(self, other):
        return multiply(self, other)

    def __invert__(self):
        return invert(self)

    def __pow__(self, m: int):
        return power(self, m)

    @property
    def syllables(self) -> list[tuple[str, int]]:
        return [(self.graph.ids[v], e) for v, e in self.word]

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"NormalForm({format_word(self)!r})"


def _resolve(vertex, g: MarkedGraph) -> int:
    if isinstance(vertex, int) and not isinstance(vertex, bool):
        if 0 <= vertex < len(g):
            return vertex
    elif vertex in g.index:
        return g.index[vertex]
    raise ContextError(f"unknown vertex {vertex!r}")


def normalize(raw: Iterable, g: MarkedGraph) -> NormalForm:
    """Canonical geodesic for a sequence of ``(vertex, exponent)`` syllables.

    Vertices may be given as ids or integer indices; exponents are reduced
    modulo the vertex order and zero exponents are dropped.
    """
    word = [(_resolve(v, g), e) for v, e in raw]
    return NormalForm(g, canonical(word, g))


def _check_context(u: NormalForm, v: NormalForm):
    if u.graph is not v.graph and u.graph != v.graph:
        raise ContextError("elements belong to different graph products")


def multiply(u: NormalForm, v: NormalForm) -> NormalForm:
    _check_context(u, v)
    if not v.word:
        return u
    if not u.word:
        return v
    return NormalForm(u.graph, canonical(u.word + v.word, u.graph))


def invert(u: NormalForm) -> NormalForm:
    orders = u.graph.orders
    rev = [(v, orders[v] - e) for v, e in reversed(u.word)]
    # the reverse of a geodesic is geodesic; only relinearize
    return NormalForm(u.graph, linearize(rev, u.graph.adj_mask))


def power(u: NormalForm, m: int) -> NormalForm:
    if m < 0:
        u, m = invert(u), -m
    result = NormalForm.identity(u.graph)
    base = u
    while m:
        if m & 1:
            result = multiply(result, base)
        m >>= 1
        if m:
            base = multiply(base, base)
    return result


def conjugate(u: NormalForm, g: NormalForm) -> NormalForm:
    """``u ** g = g^-1 u g``."""
    return multiply(multiply(invert(g), u), g)


def alphabet(u: NormalForm) -> frozenset[str]:
    return frozenset(u.graph.ids[v] for v, _ in u.word)


def alphabet_indices(u: NormalForm) -> frozenset[int]:
    return frozenset(v for v, _ in u.word)


def _front_available(word: Word, adj) -> list[int]:
    seen = 0
    out = []
    for pos, (v, _) in enumerate(word):
        if not seen & ~adj[v]:
            out.append(pos)
        seen |= 1 << v
    return out


def _back_available(word: Word, adj) -> list[int]:
    seen = 0
    out = []
    for pos in range(len(word) - 1, -1, -1):
        v = word[pos][0]
        if not seen & ~adj[v]:
            out.append(pos)
        seen |= 1 << v
    return out[::-1]


def _cyclic_step(word: Word, adj) -> int | None:
    """Position of a front-available syllable whose vertex also has a distinct
    back-available syllable; ``None`` if the word is cyclically reduced."""
    back = {}
    for pos in _back_available(word, adj):
        back.setdefault(word[pos][0], []).append(pos)
    best = None
    for pos in _front_available(word, adj):
        v = word[pos][0]
        if any(q != pos for q in back.get(v, ())) and (best is None or v < word[best][0]):
            best = pos
    return best


def is_cyclically_reduced(u: NormalForm) -> bool:
    return _cyclic_step(u.word, u.graph.adj_mask) is None


@dataclass(frozen=True)
class CyclicDecomposition:
    """``element == conjugator^-1 * core * conjugator`` with ``core`` cyclically reduced."""

    core: NormalForm
    conjugator: NormalForm

    def recompose(self) -> NormalForm:
        return conjugate(self.core, self.conjugator)


def cyclically_reduce(u: NormalForm) -> CyclicDecomposition:
    g = u.graph
    core = u
    h = NormalForm.identity(g)
    while True:
        pos = _cyclic_step(core.word, g.adj_mask)
        if pos is None:
            return CyclicDecomposition(core, h)
        s = NormalForm(g, (core.word[pos],))
        s_inv = invert(s)
        # core = s * core' * s^-1, so element = (s^-1 h)^-1 core' (s^-1 h)
        core = multiply(multiply(s_inv, core), s)
        h = multiply(s_inv, h)


def order_of(u: NormalForm) -> int | None:
    """Order of ``u``; ``None`` stands for infinite order."""
    from .blocks import block_decomposition

    core = cyclically_reduce(u).core
    blocks = block_decomposition(core)
    if any(b.kind == "regular" for b in blocks.blocks):
        return None
    orders = core.graph.orders
    return lcm(1, *(orders[v] // gcd(orders[v], e) for v, e in core.word))


def syllable_order(g: MarkedGraph, vertex: int, exp: int) -> int:
    o = g.orders[vertex]
    return o // gcd(o, exp)


def format_word(u: NormalForm) -> str:
    ids = u.graph.ids
    return " ".join(ids[v] if e == 1 else f"{ids[v]}^{e}" for v, e in u.word)


def _lookup_token(name: str, g: MarkedGraph, aliases: dict[str, str] | None) -> int:
    if name in g.index:
        return g.index[name]
    if aliases and name in aliases:
        return g.index[aliases[name]]
    raise ContextError(f"unknown vertex {name!r}")


def vertex_aliases(g: MarkedGraph) -> dict[str, str]:
    """Map ``name`` to ``name.1`` for spec vertices that expand to one factor."""
    groups: dict[str, list[str]] = {}
    for vid in g.ids:
        base, dot, _ = vid.rpartition(".")
        if dot:
            groups.setdefault(base, []).append(vid)
    return {base: ids[0] for base, ids in groups.items() if len(ids) == 1 and base not in g.index}


def parse_word(text: str, g: MarkedGraph, aliases: dict[str, str] | None = None) -> NormalForm:
    """Parse whitespace-separated ``id`` or ``id^e`` tokens into a canonical form."""
    raw = []
    for tok in text.split():
        name, caret, exp = tok.partition("^")
        if caret:
            if not exp.isdigit() or int(exp) < 1:
                raise InvalidSpecError(f"bad exponent in token {tok!r}")
            e = int(exp)
        else:
            e = 1
        raw.append((_lookup_token(name, g, aliases), e))
    return NormalForm(g, canonical(raw, g))
