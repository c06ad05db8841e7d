"""First-order formulas in the language of groups and the sentence Phi_G.

Phi_G asserts the existence of elements ``x1..xk`` (one per vertex of a marked
graph G) such that

1. ``xi`` has order ``p_i ** n_i``;
2. ``xi`` and ``xj`` commute whenever ``i`` and ``j`` are adjacent;
3. for all ``g1..g(k-1)``, no power ``xi**s`` equals a product of conjugates
   ``(xi1**t1)**g1 ... (xil**tl)**gl`` of powers of other ``x``'s.

A tuple of generators of the vertex groups satisfies Phi_G in G; any tuple
satisfying it in H can be pushed to single-syllable witnesses in H, which
forces a marked embedding of G into H.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import lcm, prod
from typing import Iterator, Sequence

from .errors import FormulaSyntaxError, InvalidSentenceError, InvalidSpecError, LimitExceededError
from .marked_graph import MarkedGraph, as_marked_graph, find_marked_embedding
from .oracle import FiniteCarrier, ball_enumerate
from .words import NormalForm, invert, multiply, power, syllable_order

# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Prod:
    factors: tuple


@dataclass(frozen=True)
class Inv:
    term: object


@dataclass(frozen=True)
class Pow:
    term: object
    exp: int


ONE = One()


def pw(term, n: int):
    """``term ** n`` with the trivial exponents 0 and 1 simplified away."""
    if n == 0:
        return ONE
    if n == 1:
        return term
    return Pow(term, n)


def mul(*terms):
    """Flattened product; drops identity factors."""
    flat = []
    for t in terms:
        if isinstance(t, Prod):
            flat.extend(t.factors)
        elif not isinstance(t, One):
            flat.append(t)
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Prod(tuple(flat))


def conj(term, g):
    return mul(Inv(g), term, g)


def commutator(a, b):
    return mul(Inv(a), Inv(b), a, b)


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: object


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: object


def neq(a, b):
    return Not(Eq(a, b))


# ---------------------------------------------------------------- emission


def _term_sexpr(t) -> str:
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Prod):
        return "(* " + " ".join(_term_sexpr(f) for f in t.factors) + ")"
    if isinstance(t, Inv):
        return f"(inv {_term_sexpr(t.term)})"
    if isinstance(t, Pow):
        return f"(pow {_term_sexpr(t.term)} {t.exp})"
    raise TypeError(f"not a term: {t!r}")


def iter_sexpr(f) -> Iterator[str]:
    """Yield the s-expression of ``f`` in chunks."""
    if isinstance(f, Eq):
        yield f"(= {_term_sexpr(f.lhs)} {_term_sexpr(f.rhs)})"
    elif isinstance(f, Not):
        yield "(not "
        yield from iter_sexpr(f.body)
        yield ")"
    elif isinstance(f, (And, Or)):
        yield "(and" if isinstance(f, And) else "(or"
        for p in f.parts:
            yield " "
            yield from iter_sexpr(p)
        yield ")"
    elif isinstance(f, (Exists, Forall)):
        head = "exists" if isinstance(f, Exists) else "forall"
        yield f"({head} ({' '.join(f.vars)}) "
        yield from iter_sexpr(f.body)
        yield ")"
    else:
        raise TypeError(f"not a formula: {f!r}")


def _term_pretty(t, top=True) -> str:
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Prod):
        s = " ".join(_term_pretty(f, False) for f in t.factors)
        return s if top else f"({s})"
    if isinstance(t, Inv):
        return f"{_term_pretty(t.term, False)}^-1"
    if isinstance(t, Pow):
        return f"{_term_pretty(t.term, False)}^{t.exp}"
    raise TypeError(f"not a term: {t!r}")


def iter_pretty(f, depth=0) -> Iterator[str]:
    pad = "  " * depth
    if isinstance(f, Eq):
        yield f"{pad}{_term_pretty(f.lhs)} = {_term_pretty(f.rhs)}\n"
    elif isinstance(f, Not) and isinstance(f.body, Eq):
        yield f"{pad}{_term_pretty(f.body.lhs)} ≠ {_term_pretty(f.body.rhs)}\n"
    elif isinstance(f, Not):
        yield f"{pad}¬\n"
        yield from iter_pretty(f.body, depth + 1)
    elif isinstance(f, (And, Or)):
        yield f"{pad}{'∧' if isinstance(f, And) else '∨'}\n"
        for p in f.parts:
            yield from iter_pretty(p, depth + 1)
    elif isinstance(f, (Exists, Forall)):
        q = "∃" if isinstance(f, Exists) else "∀"
        yield f"{pad}{q} {' '.join(f.vars)}\n"
        yield from iter_pretty(f.body, depth + 1)
    else:
        raise TypeError(f"not a formula: {f!r}")


def emit(f, format: str = "sexpr") -> str:
    if isinstance(f, PhiSentence):
        chunks = f.iter_sexpr() if format == "sexpr" else iter_pretty(f.formula)
    elif format == "sexpr":
        chunks = iter_sexpr(f)
    elif format == "pretty":
        chunks = iter_pretty(f)
    else:
        raise ValueError(f"unknown format {format!r}")
    return "".join(chunks)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_VAR = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
_INT = re.compile(r"-?[0-9]+\Z")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.lastindex is None:
            break
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        if self.i >= len(self.tokens):
            return None, len(self.text)
        return self.tokens[self.i]

    def take(self, expected=None):
        tok, pos = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", pos)
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, got {tok!r}", pos)
        self.i += 1
        return tok, pos

    def var(self):
        tok, pos = self.take()
        if not _VAR.match(tok):
            raise FormulaSyntaxError(f"invalid variable {tok!r}", pos)
        return tok

    def formula(self):
        self.take("(")
        head, pos = self.take()
        if head in ("exists", "forall"):
            self.take("(")
            names = [self.var()]
            while self.peek()[0] != ")":
                names.append(self.var())
            self.take(")")
            body = self.formula()
            node = (Exists if head == "exists" else Forall)(tuple(names), body)
        elif head in ("and", "or"):
            parts = [self.formula()]
            while self.peek()[0] != ")":
                parts.append(self.formula())
            node = (And if head == "and" else Or)(tuple(parts))
        elif head == "not":
            node = Not(self.formula())
        elif head == "=":
            node = Eq(self.term(), self.term())
        else:
            raise FormulaSyntaxError(f"unknown connective {head!r}", pos)
        self.take(")")
        return node

    def term(self):
        tok, pos = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", pos)
        if tok != "(":
            self.take()
            if tok == "1":
                return ONE
            if _VAR.match(tok):
                return Var(tok)
            raise FormulaSyntaxError(f"invalid term {tok!r}", pos)
        self.take("(")
        head, pos = self.take()
        if head == "*":
            factors = [self.term(), self.term()]
            while self.peek()[0] != ")":
                factors.append(self.term())
            node = Prod(tuple(factors))
        elif head == "inv":
            node = Inv(self.term())
        elif head == "pow":
            base = self.term()
            tok, pos = self.take()
            if not _INT.match(tok):
                raise FormulaSyntaxError(f"expected integer exponent, got {tok!r}", pos)
            node = Pow(base, int(tok))
        else:
            raise FormulaSyntaxError(f"unknown term constructor {head!r}", pos)
        self.take(")")
        return node


def parse_formula(text: str):
    parser = _Parser(text)
    node = parser.formula()
    tok, pos = parser.peek()
    if tok is not None:
        raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
    return node


# ---------------------------------------------------------------- the sentence Phi_G


@dataclass(frozen=True)
class Condition3:
    """One instance ``x_i**s != prod_j (x_{subset[j]} ** ts[j]) ** g_{j+1}``
    (0-based vertex indices)."""

    i: int
    s: int
    subset: tuple[int, ...]
    ts: tuple[int, ...]

    def formula(self):
        lhs = pw(Var(f"x{self.i + 1}"), self.s)
        rhs = mul(*(conj(pw(Var(f"x{j + 1}"), t), Var(f"g{pos + 1}"))
                    for pos, (j, t) in enumerate(zip(self.subset, self.ts))))
        return neq(lhs, rhs)


@dataclass
class PhiSentence:
    graph: MarkedGraph
    k: int
    orders: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    _formula: object = field(default=None, repr=False, compare=False)

    @property
    def xs(self) -> tuple[str, ...]:
        return tuple(f"x{i + 1}" for i in range(self.k))

    @property
    def gs(self) -> tuple[str, ...]:
        return tuple(f"g{j + 1}" for j in range(self.k - 1))

    def order_clauses(self) -> Iterator:
        for i, mark in enumerate(self.graph.marks):
            x = Var(f"x{i + 1}")
            yield Eq(pw(x, mark.order), ONE)
            yield neq(pw(x, mark.p ** (mark.n - 1)), ONE)

    def commutation_clauses(self) -> Iterator:
        for i, j in self.edges:
            yield Eq(commutator(Var(f"x{i + 1}"), Var(f"x{j + 1}")), ONE)

    def condition3_instances(self, i: int | None = None) -> Iterator[Condition3]:
        rows = range(self.k) if i is None else (i,)
        for i in rows:
            others = [j for j in range(self.k) if j != i]
            for s in range(self.orders[i]):
                for size in range(1, self.k):
                    for subset in itertools.combinations(others, size):
                        for ts in itertools.product(*(range(1, self.orders[j]) for j in subset)):
                            yield Condition3(i, s, subset, ts)

    def condition3_count(self) -> int:
        total = 0
        for i in range(self.k):
            others = prod(self.orders[j] for j in range(self.k) if j != i)
            total += self.orders[i] * (others - 1)
        return total

    def clauses(self) -> Iterator:
        yield from self.order_clauses()
        yield from self.commutation_clauses()
        for c in self.condition3_instances():
            yield c.formula()

    def _wrap(self, matrix):
        inner = Forall(self.gs, matrix) if self.k > 1 else matrix
        return Exists(self.xs, inner)

    @property
    def formula(self):
        """Materialized formula; refuses beyond 10**6 condition-(3) instances."""
        if self._formula is None:
            if self.condition3_count() > 10**6:
                raise LimitExceededError("Phi too large to materialize; stream with iter_sexpr()")
            self._formula = self._wrap(And(tuple(self.clauses())))
        return self._formula

    def iter_sexpr(self) -> Iterator[str]:
        """Stream the s-expression without materializing the conjunction."""
        yield f"(exists ({' '.join(self.xs)}) "
        if self.k > 1:
            yield f"(forall ({' '.join(self.gs)}) "
        yield "(and"
        for c in self.clauses():
            yield " "
            yield from iter_sexpr(c)
        yield ")"
        if self.k > 1:
            yield ")"
        yield ")"


def build_phi(g) -> PhiSentence:
    g = as_marked_graph(g)
    if len(g) == 0:
        raise InvalidSpecError("Phi needs a nonempty marked graph")
    edges = tuple((g.index[u], g.index[v]) for u, v in g.edges())
    return PhiSentence(g, len(g), g.orders, edges)


def quantifier_prefix(f) -> list[tuple[str, str]]:
    out = []
    while isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        out.extend((q, v) for v in f.vars)
        f = f.body
    return out


# ---------------------------------------------------------------- evaluation


class ProductGroup:
    """Group operations on normal forms, for evaluating terms in a graph product."""

    def __init__(self, graph: MarkedGraph):
        self.graph = graph
        self.abelian = graph.is_complete()

    def identity(self):
        return NormalForm.identity(self.graph)

    def mul(self, a, b):
        return multiply(a, b)

    def inv(self, a):
        return invert(a)

    def pow(self, a, n):
        return power(a, n)


def eval_term(t, group, env):
    if isinstance(t, One):
        return group.identity()
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise InvalidSentenceError(f"free variable {t.name!r}") from None
    if isinstance(t, Prod):
        acc = eval_term(t.factors[0], group, env)
        for f in t.factors[1:]:
            acc = group.mul(acc, eval_term(f, group, env))
        return acc
    if isinstance(t, Inv):
        return group.inv(eval_term(t.term, group, env))
    if isinstance(t, Pow):
        return group.pow(eval_term(t.term, group, env), t.exp)
    raise TypeError(f"not a term: {t!r}")


def _exponent_sums(t, sign=1, acc=None) -> dict:
    acc = {} if acc is None else acc
    if isinstance(t, Var):
        acc[t.name] = acc.get(t.name, 0) + sign
    elif isinstance(t, Prod):
        for f in t.factors:
            _exponent_sums(f, sign, acc)
    elif isinstance(t, Inv):
        _exponent_sums(t.term, -sign, acc)
    elif isinstance(t, Pow):
        _exponent_sums(t.term, sign * t.exp, acc)
    return acc


def _term_vars(t, acc: set):
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Prod):
        for f in t.factors:
            _term_vars(f, acc)
    elif isinstance(t, (Inv, Pow)):
        _term_vars(t.term, acc)


class Evaluator:
    """Exact evaluation of formulas over a finite carrier.

    Quantifiers are expanded over all elements, with two truth-preserving
    shortcuts: a universal quantifier distributes over conjunction and skips
    variables its body does not depend on; an existential quantifier over a
    conjunction is expanded by backtracking, checking each conjunct as soon as
    its variables are bound.  Over an abelian carrier dependence is read off
    exponent sums (so conjugating variables drop out).
    """

    def __init__(self, group):
        self.group = group
        self.abelian = getattr(group, "abelian", False)
        moduli = getattr(group, "moduli", None)
        self.exponent = lcm(*moduli) if (self.abelian and moduli) else 0
        self._fv: dict[int, frozenset] = {}
        self._sv: dict[int, frozenset] = {}
        self._conj: dict[int, list] = {}
        self._keep: list = []

    def _memo(self, table, f, compute):
        key = id(f)
        if key not in table:
            table[key] = compute(f)
            self._keep.append(f)
        return table[key]

    def free_vars(self, f) -> frozenset:
        """Variables the truth value of ``f`` actually depends on."""
        return self._memo(self._fv, f, self._free_vars)

    def _free_vars(self, f) -> frozenset:
        if isinstance(f, Eq):
            if self.abelian:
                sums = _exponent_sums(f.lhs)
                _exponent_sums(f.rhs, -1, sums)
                m = self.exponent
                return frozenset(v for v, c in sums.items() if (c % m if m else c))
            return self.syntactic_vars(f)
        if isinstance(f, Not):
            return self.free_vars(f.body)
        if isinstance(f, (And, Or)):
            return frozenset().union(*(self.free_vars(p) for p in f.parts))
        if isinstance(f, (Exists, Forall)):
            return self.free_vars(f.body) - set(f.vars)
        raise TypeError(f"not a formula: {f!r}")

    def syntactic_vars(self, f) -> frozenset:
        """Free variables occurring in ``f``."""
        return self._memo(self._sv, f, self._syntactic_vars)

    def _syntactic_vars(self, f) -> frozenset:
        if isinstance(f, Eq):
            acc: set = set()
            _term_vars(f.lhs, acc)
            _term_vars(f.rhs, acc)
            return frozenset(acc)
        if isinstance(f, Not):
            return self.syntactic_vars(f.body)
        if isinstance(f, (And, Or)):
            return frozenset().union(*(self.syntactic_vars(p) for p in f.parts))
        if isinstance(f, (Exists, Forall)):
            return self.syntactic_vars(f.body) - set(f.vars)
        raise TypeError(f"not a formula: {f!r}")

    def conjuncts(self, f) -> list:
        """Split ``f`` into conjuncts, pushing universal quantifiers inward."""
        return self._memo(self._conj, f, self._conjuncts)

    def _conjuncts(self, f) -> list:
        if isinstance(f, And):
            return [c for p in f.parts for c in self.conjuncts(p)]
        if isinstance(f, Forall):
            out = []
            for c in self.conjuncts(f.body):
                needed = tuple(v for v in f.vars if v in self.syntactic_vars(c))
                out.append(Forall(needed, c) if needed else c)
            return out
        return [f]

    def evaluate(self, f, env=None) -> bool:
        env = {} if env is None else env
        if isinstance(f, Eq):
            return eval_term(f.lhs, self.group, env) == eval_term(f.rhs, self.group, env)
        if isinstance(f, Not):
            return not self.evaluate(f.body, env)
        if isinstance(f, And):
            return all(self.evaluate(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self.evaluate(p, env) for p in f.parts)
        if isinstance(f, Forall):
            return all(self._forall(c, f.vars, env) for c in self.conjuncts(f.body))
        if isinstance(f, Exists):
            return self.find_witness(f, env) is not None
        raise TypeError(f"not a formula: {f!r}")

    def _forall(self, body, names, env) -> bool:
        relevant = [v for v in names if v in self.free_vars(body)]
        # the body's truth value does not depend on these; any binding will do
        idle = [v for v in names if v not in relevant and v in self.syntactic_vars(body)]
        touched = relevant + idle
        saved = {v: env[v] for v in touched if v in env}
        try:
            one = self.group.identity()
            env.update((v, one) for v in idle)
            if not relevant:
                return self.evaluate(body, env)
            elements = list(self.group.elements())
            for values in itertools.product(elements, repeat=len(relevant)):
                env.update(zip(relevant, values))
                if not self.evaluate(body, env):
                    return False
            return True
        finally:
            for v in touched:
                env.pop(v, None)
            env.update(saved)

    def find_witness(self, f: Exists, env=None) -> dict | None:
        """First satisfying assignment (lexicographic over carrier order) of the
        existential block of ``f``, or ``None``."""
        env = {} if env is None else env
        names = list(f.vars)
        clauses = self.conjuncts(f.body)
        level: list[list] = [[] for _ in range(len(names) + 1)]
        for c in clauses:
            fv = self.syntactic_vars(c)
            depth = max((names.index(v) + 1 for v in names if v in fv), default=0)
            level[depth].append(c)
        if not all(self.evaluate(c, env) for c in level[0]):
            return None
        elements = list(self.group.elements())
        saved = {v: env[v] for v in names if v in env}

        def extend(d):
            if d == len(names):
                return True
            for x in elements:
                env[names[d]] = x
                if all(self.evaluate(c, env) for c in level[d + 1]) and extend(d + 1):
                    return True
            del env[names[d]]
            return False

        try:
            if extend(0):
                return {v: env[v] for v in names}
            return None
        finally:
            for v in names:
                env.pop(v, None)
            env.update(saved)


def eval_formula_finite(f, carrier) -> bool:
    """Truth value of the sentence ``f`` in a finite carrier."""
    _check_no_free_vars(f, set())
    return Evaluator(carrier).evaluate(f)


def _check_no_free_vars(f, bound: set):
    if isinstance(f, Eq):
        acc: set = set()
        _term_vars(f.lhs, acc)
        _term_vars(f.rhs, acc)
        if acc - bound:
            raise InvalidSentenceError(f"free variables {sorted(acc - bound)}")
    elif isinstance(f, Not):
        _check_no_free_vars(f.body, bound)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            _check_no_free_vars(p, bound)
    elif isinstance(f, (Exists, Forall)):
        _check_no_free_vars(f.body, bound | set(f.vars))


# ---------------------------------------------------------------- checking Phi in a target


@dataclass
class CheckResult:
    """Outcome of checking Phi_G in a target graph product.

    ``kind`` is one of ``certified_true``, ``certified_false``,
    ``no_counterexample`` (witnesses pass (1),(2) exactly and (3) for all
    conjugators in the ball of ``radius``) or ``no_witness_found``.
    """

    kind: str
    witnesses: list[NormalForm] | None = None
    reason: str = ""
    radius: int | None = None
    condition3: str | None = None

    @property
    def certified(self) -> bool:
        return self.kind.startswith("certified")

    def to_json(self) -> dict:
        out: dict = {"result": self.kind, "reason": self.reason}
        if self.witnesses is not None:
            out["witnesses"] = [str(w) for w in self.witnesses]
        if self.radius is not None:
            out["radius"] = self.radius
        if self.condition3 is not None:
            out["condition3"] = self.condition3
        return out


def abelian_image(u: NormalForm) -> tuple[int, ...]:
    """Image of ``u`` in the abelianization, the direct sum of the vertex groups."""
    vec = [0] * len(u.graph)
    for v, e in u.word:
        vec[v] = (vec[v] + e) % u.graph.orders[v]
    return tuple(vec)


def check_conditions_12(phi: PhiSentence, witnesses: Sequence[NormalForm]) -> bool:
    """Exact check of the order and commutation clauses for a witness tuple."""
    if len(witnesses) != phi.k:
        raise ValueError(f"expected {phi.k} witnesses, got {len(witnesses)}")
    group = ProductGroup(witnesses[0].graph)
    env = dict(zip(phi.xs, witnesses))
    ev = Evaluator(group)
    return all(ev.evaluate(c, env) for c in itertools.chain(phi.order_clauses(), phi.commutation_clauses()))


class _ConjugacyBall:
    """Conjugates of elements by a fixed ball of conjugators (memoized)."""

    def __init__(self, graph: MarkedGraph, radius: int, limit: int):
        self.ball = ball_enumerate(graph, radius)
        self.radius = radius
        self.limit = limit
        self._inv = [invert(g) for g in self.ball]
        self._cache: dict = {}

    def conjugates(self, u: NormalForm) -> frozenset:
        if u not in self._cache:
            self._cache[u] = frozenset(multiply(multiply(gi, u), g) for gi, g in zip(self._inv, self.ball))
        return self._cache[u]

    def products(self, elements: Sequence[NormalForm]) -> set:
        acc = {NormalForm.identity(self.ball.elements[0].graph)}
        for u in elements:
            conj_set = self.conjugates(u)
            if len(acc) * len(conj_set) > self.limit:
                raise LimitExceededError("condition (3) product set too large; lower the radius")
            acc = {multiply(a, c) for a in acc for c in conj_set}
        return acc

    def represents(self, target: NormalForm, factors: Sequence[NormalForm]) -> bool:
        """Is ``target`` a product of conjugates of ``factors`` by ball elements?"""
        if len(factors) == 1:
            return target in self.conjugates(factors[0])
        half = len(factors) // 2
        left = self.products(factors[:half])
        right = self.products(factors[half:])
        return any(multiply(invert(a), target) in right for a in left)


@dataclass
class Condition3Report:
    counterexample: Condition3 | None
    separated: int = 0
    searched: int = 0

    @property
    def method(self) -> str:
        return "bounded" if self.searched else "abelianization"


def find_condition3_counterexample(phi: PhiSentence, witnesses: Sequence[NormalForm], radius: int,
                                   prefilter: bool = True, limit: int = 2 * 10**6,
                                   balls: _ConjugacyBall | None = None) -> Condition3Report:
    """Look for a condition-(3) instance violated with conjugators in the ball
    of ``radius``.

    With ``prefilter`` an instance whose two sides have different images in
    the abelianization is skipped: it holds for every choice of conjugators.
    The report counts skipped and searched instances.
    """
    graph = witnesses[0].graph
    images = [abelian_image(w) for w in witnesses]
    orders = graph.orders

    def image(vec_terms):
        out = [0] * len(graph)
        for vec, t in vec_terms:
            for v, x in enumerate(vec):
                out[v] = (out[v] + x * t) % orders[v]
        return tuple(out)

    report = Condition3Report(None)
    for inst in phi.condition3_instances():
        if prefilter:
            lhs_img = image([(images[inst.i], inst.s)])
            rhs_img = image([(images[j], t) for j, t in zip(inst.subset, inst.ts)])
            if lhs_img != rhs_img:
                report.separated += 1
                continue
        if balls is None:
            balls = _ConjugacyBall(graph, radius, limit)
        report.searched += 1
        lhs = power(witnesses[inst.i], inst.s)
        factors = [power(witnesses[j], t) for j, t in zip(inst.subset, inst.ts)]
        if balls.represents(lhs, factors):
            report.counterexample = inst
            return report
    return report


def _witness_candidates(phi: PhiSentence, target: MarkedGraph) -> list[list[NormalForm]]:
    out = []
    for mark in phi.graph.marks:
        out.append([
            NormalForm(target, ((v, e),))
            for v in range(len(target))
            for e in range(1, target.orders[v])
            if syllable_order(target, v, e) == mark.order
        ])
    return out


def bounded_witness_search(phi: PhiSentence, target, radius: int, prefilter: bool = True):
    """First tuple of single syllables (lexicographic) passing conditions (1)
    and (2) exactly and (3) at conjugator radius ``radius``.

    Returns ``(witnesses, condition3 report)`` or ``(None, None)``.
    """
    target = as_marked_graph(target)
    candidates = _witness_candidates(phi, target)
    adj = target.adj_mask
    neighbours = [[j for (a, j) in phi.edges if a == i] + [a for (a, j) in phi.edges if j == i]
                  for i in range(phi.k)]
    chosen: list[NormalForm] = []
    reports: list[Condition3Report] = []
    balls = None if prefilter else _ConjugacyBall(target, radius, 2 * 10**6)

    def syllables_commute(x: NormalForm, y: NormalForm) -> bool:
        u, v = x.word[0][0], y.word[0][0]
        return u == v or bool(adj[u] >> v & 1)

    def extend(i):
        if i == phi.k:
            if not check_conditions_12(phi, chosen):
                return False
            report = find_condition3_counterexample(phi, chosen, radius, prefilter, balls=balls)
            reports.append(report)
            return report.counterexample is None
        for cand in candidates[i]:
            if all(syllables_commute(cand, chosen[j]) for j in neighbours[i] if j < i):
                chosen.append(cand)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    if extend(0):
        return list(chosen), reports[-1]
    return None, None


def check_phi(phi: PhiSentence, target, conjugator_radius: int = 3, prefilter: bool = True) -> CheckResult:
    """Check ``target |= Phi``.

    A complete target graph gives a finite group, evaluated exactly.  Otherwise
    a missing marked embedding refutes Phi; failing that, single-syllable
    witness tuples are searched with condition (3) bounded by the radius.
    """
    if conjugator_radius < 0:
        raise ValueError("conjugator radius must be >= 0")
    h = as_marked_graph(target)
    if h.is_complete():
        carrier = FiniteCarrier(h)
        found = Evaluator(carrier).find_witness(phi.formula)
        if found is None:
            return CheckResult("certified_false",
                               reason=f"exhaustive evaluation over all {len(carrier)} elements")
        wit = [carrier.to_normal_form(found[x]) for x in phi.xs]
        return CheckResult("certified_true", wit,
                           reason=f"exhaustive evaluation over all {len(carrier)} elements")
    if find_marked_embedding(phi.graph, h) is None:
        return CheckResult("certified_false", reason="source marked graph does not embed in the target")
    wit, report = bounded_witness_search(phi, h, conjugator_radius, prefilter)
    if wit is None:
        return CheckResult("no_witness_found", radius=conjugator_radius,
                           reason="no tuple of single syllables passes (1), (2) and bounded (3)")
    return CheckResult("no_counterexample", wit, radius=conjugator_radius, condition3=report.method,
                       reason="witnesses pass (1) and (2) exactly and (3) within the conjugator ball")
