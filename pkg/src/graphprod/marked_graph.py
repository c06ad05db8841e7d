"""Marked graphs of graph products of finite abelian groups.

A graph product of finite abelian groups is described by a ``GroupProductSpec``
(a simplicial graph whose vertices carry finite abelian groups given as lists
of cyclic orders).  Splitting every vertex group into primary cyclic factors
gives a ``MarkedGraph``; two graph products are isomorphic, and equivalently
elementarily equivalent, exactly when their marked graphs are isomorphic.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidSpecError


@dataclass(frozen=True, order=True)
class Mark:
    """Prime power ``p**n`` labelling a vertex of a marked graph."""

    p: int
    n: int

    def __post_init__(self):
        if not _is_prime(self.p) or self.n < 1:
            raise InvalidSpecError(f"invalid mark {self.p}^{self.n}")

    @property
    def order(self) -> int:
        return self.p**self.n

    def __str__(self):
        return f"{self.p}^{self.n}"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _factorize(m: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def primary_decompose(orders: Iterable[int]) -> list[Mark]:
    """Split a product of cyclic groups ``Z_m`` into primary cyclic factors.

    The result is a multiset (returned as a list sorted by ``(p, n)``).
    """
    marks = []
    for m in orders:
        if not isinstance(m, int) or isinstance(m, bool) or m < 2:
            raise InvalidSpecError(f"cyclic order must be an integer >= 2, got {m!r}")
        marks.extend(Mark(p, e) for p, e in _factorize(m))
    return sorted(marks)


@dataclass(frozen=True)
class GroupProductSpec:
    """Defining graph of a graph product together with its vertex groups.

    ``vertices`` is an ordered tuple of ``(name, orders)``; ``edges`` a set of
    unordered name pairs.
    """

    vertices: tuple[tuple[str, tuple[int, ...]], ...]
    edges: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self):
        names = [name for name, _ in self.vertices]
        if len(set(names)) != len(names):
            raise InvalidSpecError("vertex names must be unique")
        for name, group in self.vertices:
            if not isinstance(name, str) or not name:
                raise InvalidSpecError(f"invalid vertex name {name!r}")
            if not group:
                raise InvalidSpecError(f"vertex {name!r} has an empty group")
            primary_decompose(group)
        known = set(names)
        for e in self.edges:
            if len(e) != 2:
                raise InvalidSpecError(f"self-loop or malformed edge {sorted(e)}")
            if not e <= known:
                raise InvalidSpecError(f"edge {sorted(e)} references an unknown vertex")

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable = ()) -> GroupProductSpec:
        """Convenience constructor accepting lists; rejects duplicate edges."""
        verts = tuple((name, tuple(group)) for name, group in vertices)
        seen = set()
        for pair in edges:
            pair = tuple(pair)
            if len(pair) != 2 or pair[0] == pair[1]:
                raise InvalidSpecError(f"self-loop or malformed edge {list(pair)}")
            key = frozenset(pair)
            if key in seen:
                raise InvalidSpecError(f"duplicate edge {list(pair)}")
            seen.add(key)
        return cls(verts, frozenset(seen))

    @classmethod
    def from_json(cls, data: Mapping) -> GroupProductSpec:
        try:
            vertices = [(v["name"], v["group"]) for v in data["vertices"]]
            edges = data.get("edges", [])
        except (KeyError, TypeError) as exc:
            raise InvalidSpecError(f"malformed group product spec: {exc}") from None
        return cls.build(vertices, edges)

    def to_json(self) -> dict:
        order = {name: i for i, (name, _) in enumerate(self.vertices)}
        edges = sorted((sorted(e, key=order.__getitem__) for e in self.edges),
                       key=lambda pair: (order[pair[0]], order[pair[1]]))
        return {
            "vertices": [{"name": name, "group": list(group)} for name, group in self.vertices],
            "edges": edges,
        }


@dataclass(frozen=True)
class Graph:
    """Plain simplicial graph on named vertices."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edges


class MarkedGraph:
    """Simplicial graph whose vertices carry prime-power marks.

    Vertices keep their insertion order; the position of a vertex in that
    order is its index, which is also the order used for canonical words.
    """

    def __init__(self, vertices: Iterable[tuple[str, Mark]], edges: Iterable = ()):
        ids, marks = [], []
        for vid, mark in vertices:
            if not isinstance(mark, Mark):
                mark = Mark(*mark)
            ids.append(vid)
            marks.append(mark)
        self.ids: tuple[str, ...] = tuple(ids)
        self.marks: tuple[Mark, ...] = tuple(marks)
        self.index = {vid: i for i, vid in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise InvalidSpecError("vertex ids must be unique")
        self.orders = tuple(m.order for m in self.marks)
        adj = [0] * len(self.ids)
        for pair in edges:
            u, v = tuple(pair)
            if u not in self.index or v not in self.index:
                raise InvalidSpecError(f"edge {[u, v]} references an unknown vertex")
            i, j = self.index[u], self.index[v]
            if i == j:
                raise InvalidSpecError(f"self-loop at {u!r}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        # adj_mask[i] has bit j set iff vertices i and j are adjacent (commute)
        self.adj_mask: tuple[int, ...] = tuple(adj)

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return f"MarkedGraph({len(self)} vertices, {self.edge_count()} edges)"

    def __eq__(self, other):
        if not isinstance(other, MarkedGraph):
            return NotImplemented
        return (self is other) or (
            self.ids == other.ids and self.marks == other.marks and self.adj_mask == other.adj_mask
        )

    def __hash__(self):
        return hash((self.ids, self.marks, self.adj_mask))

    def adjacent(self, u: str, v: str) -> bool:
        return bool(self.adj_mask[self.index[u]] >> self.index[v] & 1)

    def neighbors(self, v: str) -> list[str]:
        mask = self.adj_mask[self.index[v]]
        return [w for j, w in enumerate(self.ids) if mask >> j & 1]

    def degree(self, v: str) -> int:
        return bin(self.adj_mask[self.index[v]]).count("1")

    def mark(self, v: str) -> Mark:
        return self.marks[self.index[v]]

    def edges(self) -> list[tuple[str, str]]:
        """Edges as id pairs, ordered by vertex index."""
        out = []
        for i, mask in enumerate(self.adj_mask):
            for j in range(i + 1, len(self.ids)):
                if mask >> j & 1:
                    out.append((self.ids[i], self.ids[j]))
        return out

    def edge_count(self) -> int:
        return sum(bin(m).count("1") for m in self.adj_mask) // 2

    def is_complete(self, vertices: Iterable[int] | None = None) -> bool:
        """True if the given vertex indices (default: all) span a clique."""
        idx = range(len(self.ids)) if vertices is None else list(vertices)
        mask = 0
        for i in idx:
            mask |= 1 << i
        return all((self.adj_mask[i] | 1 << i) & mask == mask for i in idx)

    def underlying(self) -> Graph:
        return Graph(self.ids, frozenset(frozenset(e) for e in self.edges()))

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "p": m.p, "n": m.n} for v, m in zip(self.ids, self.marks)],
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> MarkedGraph:
        try:
            verts = [(v["id"], Mark(int(v["p"]), int(v["n"]))) for v in data["vertices"]]
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpecError(f"malformed marked graph: {exc}") from None
        return cls(verts, edges)

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for v, m in zip(self.ids, self.marks):
            lines.append(f'  "{v}" [label="{v}\\n{m.order}"];')
        for u, v in self.edges():
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_marked_graph(spec: GroupProductSpec) -> MarkedGraph:
    """Expand every vertex of ``spec`` into a clique of primary cyclic factors.

    Factor vertices are named ``name.j`` (1-based) in ascending ``(p, n)`` order.
    """
    vertices, edges = [], []
    expansion: dict[str, list[str]] = {}
    for name, group in spec.vertices:
        ids = []
        for j, mark in enumerate(primary_decompose(group), start=1):
            vid = f"{name}.{j}"
            vertices.append((vid, mark))
            ids.append(vid)
        expansion[name] = ids
        edges.extend((ids[a], ids[b]) for a in range(len(ids)) for b in range(a + 1, len(ids)))
    for e in spec.edges:
        u, v = tuple(e)
        edges.extend((x, y) for x in expansion[u] for y in expansion[v])
    return MarkedGraph(vertices, edges)


def as_marked_graph(obj) -> MarkedGraph:
    if isinstance(obj, MarkedGraph):
        return obj
    if isinstance(obj, GroupProductSpec):
        return build_marked_graph(obj)
    raise TypeError(f"expected GroupProductSpec or MarkedGraph, got {type(obj).__name__}")


def non_commutation_graph(g: MarkedGraph | Graph) -> Graph:
    """Complement graph: distinct vertices are joined iff they do not commute."""
    if isinstance(g, MarkedGraph):
        g = g.underlying()
    vs = g.vertices
    edges = frozenset(
        frozenset((vs[i], vs[j]))
        for i in range(len(vs))
        for j in range(i + 1, len(vs))
        if frozenset((vs[i], vs[j])) not in g.edges
    )
    return Graph(vs, edges)


def _compatible(src: Mark, dst: Mark) -> bool:
    return src.p == dst.p and src.n <= dst.n


def find_marked_embedding(src: MarkedGraph, dst: MarkedGraph, induced: bool = False) -> dict[str, str] | None:
    """First marked embedding of ``src`` into ``dst`` in lexicographic order.

    Adjacency must be preserved; with ``induced=True`` non-adjacency as well.
    Marks must satisfy ``q == p`` and ``n <= m``.
    """
    k, r = len(src), len(dst)
    if k > r:
        return None
    src_deg = [bin(m).count("1") for m in src.adj_mask]
    dst_deg = [bin(m).count("1") for m in dst.adj_mask]
    candidates = [
        [j for j in range(r) if _compatible(src.marks[i], dst.marks[j]) and dst_deg[j] >= src_deg[i]]
        for i in range(k)
    ]
    image = [-1] * k
    used = [False] * r

    def extend(i):
        if i == k:
            return True
        for j in candidates[i]:
            if used[j]:
                continue
            ok = True
            for a in range(i):
                s_adj = src.adj_mask[i] >> a & 1
                d_adj = dst.adj_mask[j] >> image[a] & 1
                if (s_adj and not d_adj) or (induced and d_adj and not s_adj):
                    ok = False
                    break
            if ok:
                image[i] = j
                used[j] = True
                if extend(i + 1):
                    return True
                used[j] = False
        image[i] = -1
        return False

    if not extend(0):
        return None
    return {src.ids[i]: dst.ids[image[i]] for i in range(k)}


def _refined_colors(a: MarkedGraph, b: MarkedGraph) -> tuple[list, list]:
    """Colour refinement run jointly on both graphs so colours are comparable."""
    graphs = (a, b)
    colors = [[(m.p, m.n) for m in g.marks] for g in graphs]
    while True:
        sigs = []
        for g, col in zip(graphs, colors):
            sigs.append([
                (col[i], tuple(sorted(col[j] for j in range(len(g)) if g.adj_mask[i] >> j & 1)))
                for i in range(len(g))
            ])
        palette = {s: n for n, s in enumerate(sorted(set(sigs[0]) | set(sigs[1])))}
        new = [[palette[s] for s in sig] for sig in sigs]
        if _class_count(new) == _class_count(colors):
            return new[0], new[1]
        colors = new


def _class_count(colors) -> int:
    return len(set(colors[0]) | set(colors[1]))


def marked_isomorphic(a: MarkedGraph, b: MarkedGraph) -> dict[str, str] | None:
    """Mark-preserving graph isomorphism ``a -> b`` (first in lexicographic order)."""
    n = len(a)
    if n != len(b) or a.edge_count() != b.edge_count():
        return None
    if sorted(a.marks) != sorted(b.marks):
        return None
    ca, cb = _refined_colors(a, b)
    if sorted(ca) != sorted(cb):
        return None
    candidates = [[j for j in range(n) if cb[j] == ca[i]] for i in range(n)]
    image = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for j in candidates[i]:
            if used[j]:
                continue
            if all((a.adj_mask[i] >> x & 1) == (b.adj_mask[j] >> image[x] & 1) for x in range(i)):
                image[i] = j
                used[j] = True
                if extend(i + 1):
                    return True
                used[j] = False
        return False

    if not extend(0):
        return None
    return {a.ids[i]: b.ids[image[i]] for i in range(n)}


@dataclass
class EEVerdict:
    """Outcome of an elementary-equivalence decision.

    ``witness`` is ``None`` when equivalent; otherwise it names the first
    distinguishing invariant (or ``"exhausted search"``) with both values.
    """

    equivalent: bool
    isomorphism: dict[str, str] | None = None
    witness: dict | None = None

    def to_json(self) -> dict:
        out: dict = {"equivalent": self.equivalent}
        if self.equivalent:
            out["isomorphism"] = self.isomorphism
        else:
            out["witness"] = self.witness
        return out


def _mark_degree_histogram(g: MarkedGraph) -> list:
    counts = Counter((m.p, m.n, g.degree(v)) for v, m in zip(g.ids, g.marks))
    return sorted([list(key) + [c] for key, c in counts.items()])


def _invariants(g: MarkedGraph):
    yield "vertex count", len(g)
    yield "mark multiset", sorted([m.p, m.n] for m in g.marks)
    yield "edge count", g.edge_count()
    yield "mark-degree histogram", _mark_degree_histogram(g)


def decide_elementary_equivalence(a, b) -> EEVerdict:
    """Decide whether two graph products of finite abelian groups are
    elementarily equivalent, i.e. whether their marked graphs are isomorphic."""
    ga, gb = as_marked_graph(a), as_marked_graph(b)
    for (name, left), (_, right) in zip(_invariants(ga), _invariants(gb)):
        if left != right:
            return EEVerdict(False, witness={"invariant": name, "left": left, "right": right})
    iso = marked_isomorphic(ga, gb)
    if iso is None:
        return EEVerdict(False, witness={"invariant": "exhausted search"})
    return EEVerdict(True, isomorphism=iso)


def load_json_graph(data: Mapping) -> tuple[MarkedGraph, GroupProductSpec | None]:
    """Accept either a group product spec or a marked graph JSON document."""
    vertices = data.get("vertices") if isinstance(data, Mapping) else None
    if not isinstance(vertices, list):
        raise InvalidSpecError("expected an object with a 'vertices' list")
    if vertices and isinstance(vertices[0], Mapping) and "id" in vertices[0]:
        return MarkedGraph.from_json(data), None
    spec = GroupProductSpec.from_json(data)
    return build_marked_graph(spec), spec


def load_graph_file(path) -> tuple[MarkedGraph, GroupProductSpec | None]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidSpecError(f"{path}: invalid JSON: {exc}") from None
    return load_json_graph(data)
