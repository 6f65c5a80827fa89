"""Coercion graphs: coherence, path composition, derived coercions.

The coherence oracle here is independent of the implementation: networkx
simple-path enumeration over an explicitly built multigraph.
"""

import random

import networkx as nx
import pytest

from polysem.coercion import (
    BaseCoercion,
    CoercionGraph,
    check_coherence,
    compose_path,
    coercion_targets,
    find_coercion,
)
from polysem.errors import BrokenChain, IncoherentGraph
from polysem.kernel import typecheck
from polysem.lexicon import builtin_signature
from polysem.syntax import (
    Arrow,
    Const,
    Lam,
    Var,
    alpha_eq,
    entity_sort,
    etype,
    parse_term,
    parse_type,
)


def _graph(*triples):
    return CoercionGraph(tuple(BaseCoercion(n, entity_sort(a), entity_sort(b))
                               for n, a, b in triples))


def _sig_for(graph, extra_sorts=()):
    sorts = [e.source for e in graph.edges] + [e.target for e in graph.edges]
    sorts += [entity_sort(s) for s in extra_sorts]
    consts = {e.name: e.arrow() for e in graph.edges}
    return builtin_signature().extend(sorts=sorts, constants=consts)


# ---------------------------------------------------------------------------
# check_coherence


def test_linear_chain_coherent():
    g = _graph(("c1", "human", "animal"), ("c2", "animal", "phys"))
    assert check_coherence(g).ok


def test_empty_graph_coherent():
    assert check_coherence(CoercionGraph()).ok


def test_diamond_incoherent():
    # Exhaustive enumeration on the 4-node diamond, done by hand:
    # paths book->obj: [bookPhys, physObj] and [bookInfo, infoObj]; every
    # other ordered pair has at most one path.
    g = _graph(
        ("bookPhys", "book", "phys"),
        ("bookInfo", "book", "info"),
        ("physObj", "phys", "obj"),
        ("infoObj", "info", "obj"),
    )
    report = check_coherence(g)
    assert not report.ok
    assert len(report.conflicts) == 1
    conflict = report.conflicts[0]
    assert (conflict.source, conflict.target) == (entity_sort("book"), entity_sort("obj"))
    witnessed = {tuple(e.name for e in conflict.first), tuple(e.name for e in conflict.second)}
    assert witnessed == {("bookPhys", "physObj"), ("bookInfo", "infoObj")}


def test_cycle_detected():
    g = _graph(("up", "a", "b"), ("down", "b", "a"))
    report = check_coherence(g)
    assert not report.ok
    assert report.cycles
    assert {e.name for e in report.cycles[0]} == {"up", "down"}


def test_parallel_edges_incoherent():
    g = _graph(("one", "a", "b"), ("two", "a", "b"))
    report = check_coherence(g)
    assert not report.ok
    assert report.conflicts


# ---------------------------------------------------------------------------
# compose_path


def test_compose_singleton_is_the_constant():
    e = BaseCoercion("humanAni", entity_sort("human"), entity_sort("animal"))
    assert compose_path([e]) == Const("humanAni", e.arrow())


def test_compose_two_step():
    e1 = BaseCoercion("c1", entity_sort("human"), entity_sort("animal"))
    e2 = BaseCoercion("c2", entity_sort("animal"), entity_sort("phys"))
    out = compose_path([e1, e2])
    expected = parse_term(
        "(lam (x e:human) (app c2 (app c1 x)))",
        _sig_for(_graph(("c1", "human", "animal"), ("c2", "animal", "phys"))),
    )
    assert alpha_eq(out, expected)


def test_compose_empty_is_broken():
    with pytest.raises(BrokenChain):
        compose_path([])
    e1 = BaseCoercion("c1", entity_sort("a"), entity_sort("b"))
    e2 = BaseCoercion("c2", entity_sort("c"), entity_sort("d"))
    with pytest.raises(BrokenChain):
        compose_path([e1, e2])


# ---------------------------------------------------------------------------
# find_coercion


def test_find_base_edge_is_constant():
    g = _graph(("f0", "book", "phys"))
    sig = _sig_for(g)
    out = find_coercion(g, sig, etype("book"), etype("phys"))
    assert out == Const("f0", Arrow(etype("book"), etype("phys")))


def test_find_reflexivity():
    g = CoercionGraph()
    sig = builtin_signature().extend(sorts=[entity_sort("a")])
    out = find_coercion(g, sig, etype("a"), etype("a"))
    assert alpha_eq(out, Lam("x", etype("a"), Var("x")))


def test_find_arrow_lift():
    # contravariant lift of f0: book->phys over the predicate arrow; the
    # codomain t lifts by identity, so the result is exactly
    # lam P^{phys->t}. lam x^{book}. P (f0 x)   (hand application of the rule)
    g = _graph(("f0", "book", "phys"))
    sig = _sig_for(g)
    out = find_coercion(g, sig, parse_type("(-> e:phys t)"), parse_type("(-> e:book t)"))
    expected = parse_term("(lam (P (-> e:phys t)) (lam (x e:book) (app P (app f0 x))))", sig)
    assert alpha_eq(out, expected)
    assert typecheck(out, sig) == parse_type("(-> (-> e:phys t) (-> e:book t))")


def test_find_requires_coherence():
    g = _graph(("one", "a", "b"), ("two", "a", "b"))
    sig = _sig_for(g)
    with pytest.raises(IncoherentGraph):
        find_coercion(g, sig, etype("a"), etype("b"))


def test_find_no_path(lex):
    out = find_coercion(lex.coercions, lex.signature, etype("chair"), etype("dog"))
    assert out is None


# ---------------------------------------------------------------------------
# randomized agreement with the networkx oracle


def _random_dag(rng, n_sorts):
    names = [f"s{i}" for i in range(n_sorts)]
    edges = []
    k = 0
    for i in range(n_sorts):
        for j in range(i + 1, n_sorts):
            if rng.random() < 0.3:
                edges.append((f"e{k}", names[i], names[j]))
                k += 1
    return _graph(*edges)


def _nx_multigraph(g):
    m = nx.MultiDiGraph()
    for s in g.nodes:
        m.add_node(s.name)
    for e in g.edges:
        m.add_edge(e.source.name, e.target.name, key=e.name)
    return m


def _oracle_coherent(g):
    m = _nx_multigraph(g)
    if not nx.is_directed_acyclic_graph(m):
        return False
    for a in m.nodes:
        for b in m.nodes:
            if a == b:
                continue
            paths = list(nx.all_simple_edge_paths(m, a, b))
            if len(paths) > 1:
                return False
    return True


def test_coherence_matches_oracle_on_random_dags():
    rng = random.Random(42)
    seen_ok = seen_bad = 0
    for _ in range(60):
        g = _random_dag(rng, rng.randrange(3, 9))
        ours = check_coherence(g).ok
        oracle = _oracle_coherent(g)
        assert ours == oracle
        seen_ok += ours
        seen_bad += not ours
    assert seen_ok and seen_bad  # the family exercises both answers


def test_find_coercion_iff_reachable():
    rng = random.Random(17)
    tried = 0
    while tried < 25:
        g = _random_dag(rng, rng.randrange(3, 9))
        if not check_coherence(g).ok or not g.edges:
            continue
        tried += 1
        sig = _sig_for(g)
        m = _nx_multigraph(g)
        for a in sorted(m.nodes):
            for b in sorted(m.nodes):
                if a == b:
                    continue
                out = find_coercion(g, sig, etype(a), etype(b))
                reachable = nx.has_path(m, a, b)
                assert (out is not None) == reachable
                if out is not None:
                    assert typecheck(out, sig) == Arrow(etype(a), etype(b))


def test_find_coercion_unique_under_search_order():
    rng = random.Random(3)
    tried = 0
    while tried < 15:
        g = _random_dag(rng, rng.randrange(3, 8))
        if not check_coherence(g).ok or not g.edges:
            continue
        tried += 1
        sig = _sig_for(g)
        reversed_g = CoercionGraph(tuple(reversed(g.edges)))
        for a in sorted(s.name for s in g.nodes):
            for b in sorted(s.name for s in g.nodes):
                one = find_coercion(g, sig, etype(a), etype(b))
                two = find_coercion(reversed_g, sig, etype(a), etype(b))
                assert (one is None) == (two is None)
                if one is not None:
                    assert alpha_eq(one, two)


def test_arrow_lift_soundness():
    rng = random.Random(23)
    g = _graph(("d2a", "dd", "aa"), ("a2p", "aa", "pp"), ("c2p", "cc", "pp"))
    sig = _sig_for(g)
    sorts = ["dd", "aa", "pp", "cc"]
    for _ in range(100):
        a, a2, b, b2 = (etype(rng.choice(sorts)) for _ in range(4))
        src, dst = Arrow(a, b), Arrow(a2, b2)
        out = find_coercion(g, sig, src, dst)
        if out is not None:
            assert typecheck(out, sig) == Arrow(src, dst)


def test_coercion_targets_ordering(lex):
    # dog coerces to ani (one edge) before phys (two edges)
    targets = coercion_targets(lex.coercions, etype("dog"))
    tys = [ty for _, ty in targets]
    assert tys == [etype("ani"), etype("phys")]
    for co, ty in targets:
        assert typecheck(co, lex.signature) == Arrow(etype("dog"), ty)
