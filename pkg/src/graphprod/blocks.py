"""Block decomposition of cyclically reduced elements and their centralisers."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .words import NormalForm, canonical, is_cyclically_reduced, multiply, power


@dataclass(frozen=True)
class Block:
    element: NormalForm

    @property
    def kind(self) -> str:
        return "singular" if len(self.element) == 1 else "regular"

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.element.word)


@dataclass(frozen=True)
class BlockDecomposition:
    core: NormalForm
    blocks: tuple[Block, ...]

    def product(self, order=None) -> NormalForm:
        idx = range(len(self.blocks)) if order is None else order
        out = NormalForm.identity(self.core.graph)
        for i in idx:
            out = multiply(out, self.blocks[i].element)
        return out

    @property
    def singular(self) -> list[Block]:
        return [b for b in self.blocks if b.kind == "singular"]

    @property
    def regular(self) -> list[Block]:
        return [b for b in self.blocks if b.kind == "regular"]


def _require_cyclically_reduced(core: NormalForm):
    if not is_cyclically_reduced(core):
        raise PreconditionError(f"{core} is not cyclically reduced")


def _components(vertices: set[int], adj) -> list[frozenset[int]]:
    """Connected components of the complement of ``adj`` restricted to ``vertices``."""
    remaining = set(vertices)
    comps = []
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        remaining.discard(start)
        while stack:
            v = stack.pop()
            for w in list(remaining):
                if not adj[v] >> w & 1:
                    remaining.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return sorted(comps, key=min)


def block_decomposition(core: NormalForm) -> BlockDecomposition:
    """Split ``core`` along the connected components of the non-commutation
    graph on its alphabet.  Blocks are ordered by their smallest vertex."""
    _require_cyclically_reduced(core)
    g = core.graph
    comps = _components({v for v, _ in core.word}, g.adj_mask)
    # subsequences of a canonical word along commuting components stay canonical
    blocks = tuple(
        Block(NormalForm(g, tuple(s for s in core.word if s[0] in comp))) for comp in comps
    )
    return BlockDecomposition(core, blocks)


def link_subgroup(core: NormalForm) -> frozenset[str]:
    """Vertices outside the alphabet of ``core`` adjacent to all of it."""
    _require_cyclically_reduced(core)
    g = core.graph
    alpha = 0
    for v, _ in core.word:
        alpha |= 1 << v
    return frozenset(
        g.ids[i] for i in range(len(g)) if not alpha >> i & 1 and g.adj_mask[i] & alpha == alpha
    )


def primitive_root(block: NormalForm) -> NormalForm:
    """Shortest ``x`` with ``x ** m == block`` for some ``m >= 1``.

    For a cyclically reduced element with connected non-commutation alphabet
    the powers of a root are reduced, so a root ``x`` of ``block = x**m`` holds
    the first ``count(v) / m`` syllables of every vertex ``v``.
    """
    counts: dict[int, int] = {}
    for v, _ in block.word:
        counts[v] = counts.get(v, 0) + 1
    total = len(block.word)
    for m in range(total, 1, -1):
        if total % m or any(c % m for c in counts.values()):
            continue
        taken: dict[int, int] = {}
        part = []
        for v, e in block.word:
            if taken.get(v, 0) < counts[v] // m:
                taken[v] = taken.get(v, 0) + 1
                part.append((v, e))
        x = NormalForm(block.graph, canonical(part, block.graph))
        if power(x, m) == block:
            return x
    return block


@dataclass(frozen=True)
class CentralizerDescription:
    """Generators of ``C(core)``: whole vertex groups of singular blocks, the
    cyclic groups generated by (roots of) regular blocks, and the link."""

    core: NormalForm
    vertex_factors: frozenset[str]
    cyclic_factors: tuple[NormalForm, ...]
    link_vertices: frozenset[str]

    def generators(self) -> list[NormalForm]:
        g = self.core.graph
        ids = sorted(self.vertex_factors | self.link_vertices, key=g.index.__getitem__)
        return [NormalForm(g, ((g.index[v], 1),)) for v in ids] + list(self.cyclic_factors)


def centralizer(core: NormalForm) -> CentralizerDescription:
    decomposition = block_decomposition(core)
    g = core.graph
    vertex_factors = frozenset(g.ids[b.element.word[0][0]] for b in decomposition.singular)
    cyclic = tuple(primitive_root(b.element) for b in decomposition.regular)
    return CentralizerDescription(core, vertex_factors, cyclic, link_subgroup(core))


def commutes(u: NormalForm, v: NormalForm) -> bool:
    return multiply(u, v) == multiply(v, u)
