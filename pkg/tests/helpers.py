"""Test utilities: random graph products, random words, and naive oracles that
share no code with the normal-form machinery."""

import itertools
import random
from collections import deque

import networkx as nx

from graphprod.marked_graph import GroupProductSpec, Mark, MarkedGraph, build_marked_graph


def graph(marks, edges=()):
    """MarkedGraph on vertices named a, b, c, ... with orders given as ints."""
    verts = []
    for i, order in enumerate(marks):
        p = next(d for d in range(2, order + 1) if order % d == 0)
        n = 0
        while order % p == 0:
            order //= p
            n += 1
        assert order == 1, "marks must be prime powers"
        verts.append((chr(ord("a") + i), Mark(p, n)))
    return MarkedGraph(verts, edges)


def spec(groups, edges=()):
    return GroupProductSpec.build([(chr(ord("a") + i), g) for i, g in enumerate(groups)], edges)


def random_marked_graph(rng, n_vertices, marks=(2, 3, 4), density=0.5):
    edges = [(chr(97 + i), chr(97 + j)) for i in range(n_vertices) for j in range(i + 1, n_vertices)
             if rng.random() < density]
    return graph([rng.choice(marks) for _ in range(n_vertices)], edges)


def random_raw_word(rng, g, length):
    return [(rng.randrange(len(g)), rng.randrange(1, g.orders[0] + 8)) for _ in range(length)]


def commutes_v(g, u, v):
    return u == v or bool(g.adj_mask[u] >> v & 1)


def apply_random_relations(rng, g, word, steps):
    """Rewrite a raw syllable word by defining relations of the group: swap
    adjacent syllables of adjacent vertices, merge or split same-vertex
    syllables, insert or delete trivial syllables and cancelling pairs."""
    w = [(v, e % g.orders[v]) for v, e in word]
    for _ in range(steps):
        move = rng.randrange(6)
        if move == 0 and len(w) >= 2:
            i = rng.randrange(len(w) - 1)
            if w[i][0] != w[i + 1][0] and commutes_v(g, w[i][0], w[i + 1][0]):
                w[i], w[i + 1] = w[i + 1], w[i]
        elif move == 1 and len(w) >= 2:
            i = rng.randrange(len(w) - 1)
            if w[i][0] == w[i + 1][0]:
                v = w[i][0]
                w[i:i + 2] = [(v, (w[i][1] + w[i + 1][1]) % g.orders[v])]
        elif move == 2 and w:
            i = rng.randrange(len(w))
            v, e = w[i]
            a = rng.randrange(g.orders[v])
            w[i:i + 1] = [(v, a), (v, (e - a) % g.orders[v])]
        elif move == 3:
            i = rng.randrange(len(w) + 1)
            v = rng.randrange(len(g))
            a = rng.randrange(1, g.orders[v])
            w[i:i] = [(v, a), (v, g.orders[v] - a)]
        elif move == 4:
            w.insert(rng.randrange(len(w) + 1), (rng.randrange(len(g)), 0))
        elif move == 5 and w:
            i = rng.randrange(len(w))
            if w[i][1] % g.orders[w[i][0]] == 0:
                del w[i]
    return w


def naive_normal_form(g, word):
    """Breadth-first search over all words reachable by commuting swaps and
    merges of adjacent same-vertex syllables; returns the lexicographically
    least word among those of minimal length.  Exponential; short words only."""
    start = tuple((v, e % g.orders[v]) for v, e in word if e % g.orders[v])
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            (u, a), (v, b) = w[i], w[i + 1]
            if u == v:
                c = (a + b) % g.orders[u]
                nxt = w[:i] + (((u, c),) if c else ()) + w[i + 2:]
            elif commutes_v(g, u, v):
                nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    shortest = min(len(w) for w in seen)
    return min(w for w in seen if len(w) == shortest)


def commutation_class(g, word):
    """All shuffles of ``word`` by swaps of adjacent commuting syllables."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            if w[i][0] != w[i + 1][0] and commutes_v(g, w[i][0], w[i + 1][0]):
                nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def validate_embedding(src, dst, mapping, induced=False):
    """Independent check of a marked embedding."""
    if set(mapping) != set(src.ids):
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    for v, w in mapping.items():
        a, b = src.mark(v), dst.mark(w)
        if a.p != b.p or a.n > b.n:
            return False
    for u, v in itertools.combinations(src.ids, 2):
        s = src.adjacent(u, v)
        d = dst.adjacent(mapping[u], mapping[v])
        if s and not d:
            return False
        if induced and d and not s:
            return False
    return True


def validate_isomorphism(a, b, mapping):
    return (len(a) == len(b) and validate_embedding(a, b, mapping, induced=True)
            and all(a.mark(v) == b.mark(w) for v, w in mapping.items()))


_ORDERS = [2, 3, 4, 8, 9, 6, 12, 18, 24, 36, 72]


def _primary_count(order):
    return len(build_marked_graph(GroupProductSpec.build([("v", [order])])))


def random_spec(rng, max_marked=7, name_prefix="v"):
    """Random spec whose marked graph has at most ``max_marked`` vertices and
    marks in {2, 3, 4, 8, 9}."""
    budget = rng.randint(1, max_marked)
    vertices = []
    used = 0
    while used < budget:
        group = []
        for _ in range(rng.choice([1, 1, 1, 2])):
            o = rng.choice(_ORDERS)
            if used + _primary_count(o) <= budget:
                group.append(o)
                used += _primary_count(o)
        if group:
            vertices.append((f"{name_prefix}{len(vertices)}", group))
        if used >= budget or (vertices and rng.random() < 0.1):
            break
    names = [n for n, _ in vertices]
    edges = [(x, y) for x, y in itertools.combinations(names, 2) if rng.random() < 0.5]
    return GroupProductSpec.build(vertices, edges)


def relabel_spec(rng, s):
    """Isomorphic copy: shuffled vertex order, fresh names, same groups."""
    order = list(range(len(s.vertices)))
    rng.shuffle(order)
    names = {s.vertices[i][0]: f"w{pos}" for pos, i in enumerate(order)}
    vertices = [(names[s.vertices[i][0]], list(reversed(s.vertices[i][1]))) for i in order]
    edges = [tuple(names[x] for x in e) for e in s.edges]
    return GroupProductSpec.build(vertices, edges)


def perturb_spec(rng, s):
    """Flip one edge (if possible): usually non-isomorphic, same marks."""
    names = [n for n, _ in s.vertices]
    if len(names) < 2:
        return None
    x, y = rng.sample(names, 2)
    e = frozenset((x, y))
    edges = set(s.edges) ^ {e}
    return GroupProductSpec.build(list(s.vertices), [tuple(sorted(p)) for p in edges])


def corpus(seed=2024, size=36):
    """Deterministic corpus of specs including isomorphic and near-miss pairs."""
    rng = random.Random(seed)
    out = [
        spec([[2], [2]], [("a", "b")]),
        spec([[2], [2]]),
        spec([[12]]),
        spec([[4], [3]], [("a", "b")]),
        spec([[4], [3]]),
        spec([[72]]),
        spec([[8], [9]], [("a", "b")]),
    ]
    while len(out) < size:
        s = random_spec(rng)
        out.append(s)
        if rng.random() < 0.5:
            out.append(relabel_spec(rng, s))
        if rng.random() < 0.3:
            p = perturb_spec(rng, s)
            if p is not None:
                out.append(p)
    return out


def small_graph_shapes(max_vertices=4):
    """All simple graphs on up to ``max_vertices`` vertices, up to isomorphism,
    as ``(n, edges)`` with vertex indices."""
    shapes = []
    for n in range(1, max_vertices + 1):
        pairs = list(itertools.combinations(range(n), 2))
        seen = set()
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            canon = min(
                tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges))
                for p in itertools.permutations(range(n))
            )
            if canon not in seen:
                seen.add(canon)
                shapes.append((n, list(canon)))
    return shapes


def has_transversal(rows):
    """Perfect matching of rows into columns along nonzero entries."""
    k = len(rows)
    g = nx.Graph()
    g.add_nodes_from((("r", i) for i in range(k)), bipartite=0)
    g.add_edges_from((("r", i), ("c", j)) for i, row in enumerate(rows) for j, x in enumerate(row) if x)
    matching = nx.bipartite.maximum_matching(g, top_nodes=[("r", i) for i in range(k)])
    return sum(1 for n in matching if n[0] == "r") == k
