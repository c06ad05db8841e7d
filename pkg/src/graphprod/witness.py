"""Reduction of Phi_G witnesses to single-syllable witnesses.

Given elements ``a_1..a_k`` of a target graph product H satisfying Phi_G:

* each ``a_i`` has finite order, so its cyclic core ``c_i`` is a product of
  pairwise commuting syllables (singular blocks);
* keeping only the blocks of ``c_i`` whose order equals ``ord(a_i)`` gives
  ``d_i``;
* the exponents of the syllables of ``d_i`` form a k x r matrix over the
  vertices of H, which has rank k; a nonzero transversal of it picks one
  syllable ``h_i`` per row at pairwise distinct vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .blocks import block_decomposition
from .errors import NotFiniteOrderError, PreconditionError, RankDeficientError
from .marked_graph import MarkedGraph, as_marked_graph
from .words import NormalForm, cyclically_reduce, order_of, syllable_order


@dataclass(frozen=True)
class ExponentMatrix:
    entries: tuple[tuple[int, ...], ...]
    columns: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.columns)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class Transversal:
    """Pairwise distinct (0-based) columns ``columns[i]`` with nonzero entry in row ``i``."""

    columns: tuple[int, ...]


def to_cyclically_reduced_witnesses(a: Sequence[NormalForm]) -> list[NormalForm]:
    cores = []
    for i, u in enumerate(a):
        core = cyclically_reduce(u).core
        if any(b.kind == "regular" for b in block_decomposition(core).blocks):
            raise NotFiniteOrderError(f"witness {i + 1} ({u}) has a regular block and infinite order")
        cores.append(core)
    return cores


def filter_max_order_blocks(c: NormalForm, target_order: int) -> NormalForm:
    """Product of the blocks of ``c`` whose order equals ``target_order``."""
    blocks = block_decomposition(c).blocks
    if any(b.kind == "regular" for b in blocks):
        raise PreconditionError(f"{c} has a regular block")
    if order_of(c) != target_order:
        raise PreconditionError(f"{c} has order {order_of(c)}, expected {target_order}")
    g = c.graph
    kept = tuple(s for s in c.word if syllable_order(g, *s) == target_order)
    return NormalForm(g, kept)


def exponent_matrix(d: Sequence[NormalForm], target: MarkedGraph) -> ExponentMatrix:
    rows = []
    for u in d:
        if len({v for v, _ in u.word}) != len(u.word) or not target.is_complete(v for v, _ in u.word):
            raise PreconditionError(f"{u} is not a product of singular blocks")
        row = [0] * len(target)
        for v, e in u.word:
            row[v] = e
        rows.append(tuple(row))
    return ExponentMatrix(tuple(rows), target.ids)


def _as_rows(m) -> list[list[int]]:
    if isinstance(m, ExponentMatrix):
        return m.to_lists()
    return [list(row) for row in m]


def echelon(m) -> tuple[list[list[int]], list[int], int]:
    """Fraction-free (Bareiss) row echelon form.

    Returns ``(rows, pivot_columns, swaps)``; every intermediate division is
    exact, so all arithmetic stays in the integers.
    """
    a = _as_rows(m)
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    prev = 1
    r = 0
    swaps = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[p], a[r] = a[r], a[p]
            swaps += 1
        piv = a[r][c]
        for i in range(r + 1, nrows):
            lead = a[i][c]
            for j in range(c + 1, ncols):
                a[i][j] = (piv * a[i][j] - lead * a[r][j]) // prev
            a[i][c] = 0
        # rows above the pivot row are untouched, the pivot row is kept as-is
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots, swaps


def rank_exact(m) -> int:
    return len(echelon(m)[1])


def det_exact(m) -> int:
    rows = _as_rows(m)
    n = len(rows)
    if n == 0:
        return 1
    a, pivots, swaps = echelon(rows)
    if len(pivots) < n:
        return 0
    return (-1) ** swaps * a[n - 1][n - 1]


def select_transversal(m) -> Transversal:
    """Nonzero entries in pairwise distinct columns, one per row.

    First ``k`` independent columns are chosen by elimination; then the
    determinant of that square submatrix is expanded along its first row:
    a nonzero determinant forces some column ``j`` with nonzero entry and
    nonzero complementary minor, and the descent continues in that minor.
    The least such ``j`` is taken at every step.
    """
    rows = _as_rows(m)
    k = len(rows)
    if k == 0:
        return Transversal(())
    _, pivots, _ = echelon(rows)
    if len(pivots) < k:
        raise RankDeficientError(f"rank {len(pivots)} < {k}: rows are linearly dependent")
    square = [[row[c] for c in pivots] for row in rows]

    def descend(sub_rows: list[int], cols: list[int]) -> list[int]:
        if not sub_rows:
            return []
        top, rest = sub_rows[0], sub_rows[1:]
        for j in cols:
            if square[top][j] == 0:
                continue
            others = [c for c in cols if c != j]
            minor = [[square[r][c] for c in others] for r in rest]
            if det_exact(minor) != 0:
                return [j] + descend(rest, others)
        raise AssertionError("nonzero determinant without a nonzero cofactor term")

    local = descend(list(range(k)), list(range(k)))
    return Transversal(tuple(pivots[j] for j in local))


@dataclass
class WitnessReduction:
    h: list[NormalForm]
    cores: list[NormalForm]
    filtered: list[NormalForm]
    matrix: ExponentMatrix
    transversal: Transversal
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "h": [str(u) for u in self.h],
            "matrix": self.matrix.to_lists(),
            "transversal": list(self.transversal.columns),
            "diagnostics": self.diagnostics,
        }


def reduce_witnesses(a: Sequence[NormalForm], source, target) -> WitnessReduction:
    """Full pipeline, keeping every intermediate stage."""
    source = as_marked_graph(source)
    target = as_marked_graph(target)
    if len(a) != len(source):
        raise PreconditionError(f"expected {len(source)} witnesses, got {len(a)}")
    if any(u.graph != target for u in a):
        raise PreconditionError("witnesses must be elements of the target graph product")
    diagnostics = []
    cores = to_cyclically_reduced_witnesses(a)
    for i, (u, c) in enumerate(zip(a, cores)):
        if c != u:
            diagnostics.append(f"witness {i + 1}: conjugated to cyclically reduced {c}")
    filtered = []
    for i, (c, mark) in enumerate(zip(cores, source.marks)):
        if order_of(c) != mark.order:
            raise PreconditionError(
                f"witness {i + 1} has order {order_of(c)}, expected {mark.order}: violates condition (1)")
        d = filter_max_order_blocks(c, mark.order)
        if d != c:
            diagnostics.append(f"witness {i + 1}: dropped blocks of order below {mark.order}, kept {d}")
        filtered.append(d)
    matrix = exponent_matrix(filtered, target)
    try:
        transversal = select_transversal(matrix)
    except RankDeficientError as exc:
        raise RankDeficientError(f"witnesses violate condition (3): {exc}") from None
    h = [NormalForm(target, ((j, matrix.entries[i][j]),)) for i, j in enumerate(transversal.columns)]
    return WitnessReduction(h, cores, filtered, matrix, transversal, diagnostics)


def singular_witnesses(a: Sequence[NormalForm], source, target) -> list[NormalForm]:
    return reduce_witnesses(a, source, target).h
