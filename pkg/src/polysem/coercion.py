"""Coercive subtyping: declared base-sort coercions and derived structural
coercions between complex types.

The usability condition is coherence: at most one directed path between any
ordered pair of sorts (and no cycles).  Under coherence the derived coercion
between any two complex types is unique up to alpha-equivalence, so
find_coercion can search greedily.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import BrokenChain, IncoherentGraph
from .syntax import (
    App,
    Arrow,
    Base,
    Const,
    Lam,
    Signature,
    Sort,
    Term,
    Type,
    Var,
    fresh_name,
    free_vars,
)
from .kernel import substitute


@dataclass(frozen=True)
class BaseCoercion:
    """A declared coercion constant between two distinct entity sorts."""

    name: str
    source: Sort
    target: Sort

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"coercion {self.name} must relate distinct sorts")

    def arrow(self) -> Type:
        return Arrow(Base(self.source), Base(self.target))

    def const(self) -> Const:
        return Const(self.name, self.arrow())


@dataclass(frozen=True)
class PathConflict:
    source: Sort
    target: Sort
    first: tuple[BaseCoercion, ...]
    second: tuple[BaseCoercion, ...]


@dataclass(frozen=True)
class CoherenceReport:
    ok: bool
    conflicts: tuple[PathConflict, ...] = ()
    cycles: tuple[tuple[BaseCoercion, ...], ...] = ()

    def describe(self) -> str:
        parts = []
        for cyc in self.cycles:
            names = " -> ".join(e.name for e in cyc)
            parts.append(f"cycle through {names}")
        for c in self.conflicts:
            p1 = "∘".join(e.name for e in reversed(c.first))
            p2 = "∘".join(e.name for e in reversed(c.second))
            parts.append(f"two paths {c.source}~>{c.target}: {p1} and {p2}")
        return "; ".join(parts) if parts else "coherent"


@dataclass(frozen=True)
class CoercionGraph:
    edges: tuple[BaseCoercion, ...] = ()

    @property
    def nodes(self) -> frozenset[Sort]:
        out = set()
        for e in self.edges:
            out.add(e.source)
            out.add(e.target)
        return frozenset(out)

    def outgoing(self, sort: Sort) -> list[BaseCoercion]:
        return [e for e in self.edges if e.source == sort]

    def incoming(self, sort: Sort) -> list[BaseCoercion]:
        return [e for e in self.edges if e.target == sort]


def _find_cycle(g: CoercionGraph) -> Optional[tuple[BaseCoercion, ...]]:
    """First directed cycle found, as its edge sequence, or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[Sort, int] = {n: WHITE for n in g.nodes}
    trail: list[BaseCoercion] = []

    def visit(node: Sort) -> Optional[tuple[BaseCoercion, ...]]:
        color[node] = GREY
        for edge in g.outgoing(node):
            if color[edge.target] == GREY:
                start = next(i for i, e in enumerate(trail) if e.source == edge.target)
                return tuple(trail[start:]) + (edge,)
            if color[edge.target] == WHITE:
                trail.append(edge)
                found = visit(edge.target)
                if found is not None:
                    return found
                trail.pop()
        color[node] = BLACK
        return None

    for node in sorted(g.nodes, key=str):
        if color[node] == WHITE:
            found = visit(node)
            if found is not None:
                return found
    return None


def _paths(g: CoercionGraph, source: Sort, target: Sort, limit: int) -> list[tuple[BaseCoercion, ...]]:
    """Up to `limit` directed edge-paths from source to target (acyclic g)."""
    out: list[tuple[BaseCoercion, ...]] = []

    def walk(node: Sort, acc: tuple[BaseCoercion, ...]):
        if len(out) >= limit:
            return
        if node == target and acc:
            out.append(acc)
            if len(out) >= limit:
                return
        for edge in g.outgoing(node):
            walk(edge.target, acc + (edge,))

    walk(source, ())
    return out


def check_coherence(g: CoercionGraph) -> CoherenceReport:
    """ok iff the graph is acyclic and has at most one directed path between
    every ordered pair of sorts.  Violations list both witness paths."""
    cycle = _find_cycle(g)
    if cycle is not None:
        return CoherenceReport(ok=False, cycles=(cycle,))
    conflicts = []
    nodes = sorted(g.nodes, key=str)
    for a in nodes:
        for b in nodes:
            if a == b:
                continue
            paths = _paths(g, a, b, limit=2)
            if len(paths) > 1:
                conflicts.append(PathConflict(a, b, paths[0], paths[1]))
    return CoherenceReport(ok=not conflicts, conflicts=tuple(conflicts))


def compose_path(edges: list[BaseCoercion]) -> Term:
    """Materialize a chained edge path as a term.

    A singleton path is the coercion constant itself; longer paths become
    lam x. e_n (... (e_1 x)).  Empty paths are rejected: reflexivity is
    find_coercion's business.
    """
    if not edges:
        raise BrokenChain("empty coercion path")
    for left, right in zip(edges, edges[1:]):
        if left.target != right.source:
            raise BrokenChain(f"{left.name}: ...->{left.target} does not chain with {right.name}: {right.source}->...")
    if len(edges) == 1:
        return edges[0].const()
    body: Term = Var("x")
    for edge in edges:
        body = App(edge.const(), body)
    return Lam("x", Base(edges[0].source), body)


def _identity(ty: Type) -> Term:
    return Lam("x", ty, Var("x"))


def _is_identity(term: Term) -> bool:
    return isinstance(term, Lam) and isinstance(term.body, Var) and term.body.name == term.binder


def coerce_app(co: Term, arg: Term) -> Term:
    """Apply a coercion term to an argument, contracting the redex when the
    coercion is a lambda so that inserted coercions stay beta-normal."""
    if isinstance(co, Lam):
        return substitute(co.body, co.binder, arg)
    return App(co, arg)


def find_coercion(g: CoercionGraph, sig: Signature, source: Type, target: Type,
                  _checked: bool = False) -> Optional[Term]:
    """The unique coercion term of type source -> target, or None.

    Built from reflexivity (identity), composition of base edges, and arrow
    lifting (contravariant domain, covariant codomain).  No lifting under
    universal quantifiers.  Requires a coherent graph.
    """
    if not _checked and not check_coherence(g).ok:
        raise IncoherentGraph("find_coercion requires a coherent graph")
    return _find(g, source, target)


def _find(g: CoercionGraph, source: Type, target: Type) -> Optional[Term]:
    if source == target:
        return _identity(source)
    if isinstance(source, Base) and isinstance(target, Base):
        if source.sort.kind != "entity" or target.sort.kind != "entity":
            return None
        paths = _paths(g, source.sort, target.sort, limit=1)
        if not paths:
            return None
        return compose_path(list(paths[0]))
    if isinstance(source, Arrow) and isinstance(target, Arrow):
        # from c: A'->A and d: B->B' build lam f lam x. d (f (c x))
        c = _find(g, target.domain, source.domain)
        d = _find(g, source.codomain, target.codomain)
        if c is None or d is None:
            return None
        f = "f"
        x = fresh_name("x", free_vars(c) | free_vars(d) | {f})
        body = coerce_app(d, App(Var(f), coerce_app(c, Var(x))))
        return Lam(f, source, Lam(x, target.domain, body))
    return None


# ---------------------------------------------------------------------------
# Enumeration of coercion targets/sources (used by the composer's search)


def sort_targets(g: CoercionGraph, sort: Sort) -> list[tuple[Term, Type]]:
    """All (coercion term, target type) reachable from `sort` by >= 1 edge,
    ordered by path length then edge declaration order."""
    found: list[tuple[tuple[int, tuple[int, ...]], Term, Type]] = []
    order = {e: i for i, e in enumerate(g.edges)}

    def walk(node: Sort, acc: list[BaseCoercion]):
        for edge in g.outgoing(node):
            path = acc + [edge]
            key = (len(path), tuple(order[e] for e in path))
            found.append((key, compose_path(path), Base(edge.target)))
            walk(edge.target, path)

    walk(sort, [])
    found.sort(key=lambda item: item[0])
    return [(term, ty) for _, term, ty in found]


def sort_sources(g: CoercionGraph, sort: Sort) -> list[tuple[Term, Type]]:
    """All (coercion term, source type) that coerce INTO `sort` by >= 1 edge."""
    found: list[tuple[tuple[int, tuple[int, ...]], Term, Type]] = []
    order = {e: i for i, e in enumerate(g.edges)}

    def walk(node: Sort, acc: list[BaseCoercion]):
        for edge in g.incoming(node):
            path = [edge] + acc
            key = (len(path), tuple(order[e] for e in path))
            found.append((key, compose_path(path), Base(edge.source)))
            walk(edge.source, path)

    walk(sort, [])
    found.sort(key=lambda item: item[0])
    return [(term, ty) for _, term, ty in found]


def coercion_targets(g: CoercionGraph, ty: Type) -> list[tuple[Term, Type]]:
    """Non-identity structural coercions out of `ty`: base-sort paths, and
    arrow lifts combining domain sources with codomain targets."""
    match ty:
        case Base(sort) if sort.kind == "entity":
            return sort_targets(g, sort)
        case Arrow(dom, cod):
            dom_opts = [(None, dom)] + [(t, s) for t, s in sort_sources_for(g, dom)]
            cod_opts = [(None, cod)] + coercion_targets(g, cod)
            out = []
            for c, new_dom in dom_opts:
                for d, new_cod in cod_opts:
                    if c is None and d is None:
                        continue
                    f = "f"
                    x = fresh_name("x", (free_vars(c) if c is not None else frozenset())
                                   | (free_vars(d) if d is not None else frozenset()) | {f})
                    inner = App(Var(f), Var(x)) if c is None else App(Var(f), coerce_app(c, Var(x)))
                    body = inner if d is None else coerce_app(d, inner)
                    out.append((Lam(f, ty, Lam(x, new_dom, body)), Arrow(new_dom, new_cod)))
            return out
        case _:
            return []


def sort_sources_for(g: CoercionGraph, ty: Type) -> list[tuple[Term, Type]]:
    """Coercions into `ty` (contravariant side of arrow lifting); only
    base-sort sources are enumerated."""
    match ty:
        case Base(sort) if sort.kind == "entity":
            return sort_sources(g, sort)
        case _:
            return []
