"""The mining pipeline against the bundled graphs, values pinned exactly."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import mined_as_set, random_graph
from owlminer.errors import EmptyTargetSet, FetchError
from owlminer.index import build_index
from owlminer.mining import (
    MiningScope,
    initial_call,
    mine_closed_conjunctions,
    mine_some,
    sldm,
)
from owlminer.model import CancellationToken, MinedPattern, MinerConfig, Weighting
from owlminer.oracle import LocalGraph
from owlminer.patterns import (
    And,
    AndRange,
    Datatype,
    Enum,
    MaxInclusive,
    MinInclusive,
    NamedClass,
    SomeData,
    SomeObject,
    ValueData,
    ValueObject,
    depth,
)
from owlminer.terms import XSD_NS, BlankNode, Iri, Literal, Triple
from owlminer.turtle import load_turtle
from test_index import BOOKS, SUBJECT, u1_triples

DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/property/"
RES = "http://dbpedia.org/resource/"
SKOS_CONCEPT = Iri("http://www.w3.org/2004/02/skos/core#Concept")


def books_local(books_graph):
    return LocalGraph(books_graph.triples)


def test_worked_example_exact(books_graph):
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)
    results, partial = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    assert not partial
    assert len(results) == 1
    only = results[0]
    assert only.support == Fraction(1)
    assert only.proof_set == frozenset(BOOKS)
    assert only.depth == 2
    assert isinstance(only.pattern, And)
    assert set(only.pattern.operands) == {
        NamedClass(Iri(DBO + "Book")),
        NamedClass(Iri(DBO + "CreativeWork")),
        ValueData(Iri(DBP + "language"), Literal("English")),
        SomeObject(Iri("http://purl.org/dc/terms/subject"), NamedClass(SKOS_CONCEPT)),
    }


def test_worked_example_recursive_weights(books_graph):
    # the redistribution rule: each book's 1/5 splits evenly over its
    # category objects
    idx = build_index(u1_triples(books_graph))
    counts = idx.object_counts_by_subject(SUBJECT)
    w = Weighting.uniform(BOOKS)
    redistributed = {}
    for obj, subs in idx.objects(SUBJECT).items():
        redistributed[obj] = sum((w[s] / counts[s] for s in subs), Fraction(0))
    cat = "http://dbpedia.org/resource/Category:"
    assert redistributed == {
        Iri(cat + "1937_novels"): Fraction(6, 30),
        Iri(cat + "1954_novels"): Fraction(5, 30),
        Iri(cat + "1955_novels"): Fraction(3, 30),
        Iri(cat + "1977_books"): Fraction(3, 30),
        Iri(cat + "The_Silmarillion"): Fraction(3, 30),
        Iri(cat + "The_Lord_of_the_Rings"): Fraction(8, 30),
        Iri(cat + "Novels_adapted_into_plays"): Fraction(2, 30),
    }
    assert sum(redistributed.values()) == Fraction(1)


def test_sparse_predicate_never_surfaces(books_graph):
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)
    results, _ = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    text = " ".join(str(r.pattern) for r in results)
    assert "illustrator" not in text


def test_lower_threshold_splits_output(books_graph):
    cfg = MinerConfig(min_support=Fraction(3, 5), max_depth=2)
    results, _ = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    assert len(results) == 2
    by_support = {r.support: r for r in results}
    full = by_support[Fraction(1)]
    assert set(full.pattern.operands) == {
        NamedClass(Iri(DBO + "Book")),
        NamedClass(Iri(DBO + "CreativeWork")),
        ValueData(Iri(DBP + "language"), Literal("English")),
    }
    partial_one = by_support[Fraction(3, 5)]
    assert partial_one.pattern == ValueObject(
        SUBJECT, Iri(RES + "Category:The_Lord_of_the_Rings")
    )
    assert len(partial_one.proof_set) == 3


@pytest.mark.parametrize("max_depth", [1, 2, 3, 5])
def test_two_node_cycle_terminates(cycle_path, max_depth):
    parsed = load_turtle(cycle_path)
    g = LocalGraph(parsed.triples)
    a, b = Iri("http://example.org/loop/a"), Iri("http://example.org/loop/b")
    cfg = MinerConfig(min_support=Fraction(1), max_depth=max_depth)
    results, partial = initial_call([a, b], cfg, g.triples_for)
    assert results == [] and not partial


def test_cycle_low_threshold_gives_nominal_conjunctions(cycle_path):
    parsed = load_turtle(cycle_path)
    g = LocalGraph(parsed.triples)
    a, b = Iri("http://example.org/loop/a"), Iri("http://example.org/loop/b")
    p = Iri("http://example.org/loop/p")
    cfg = MinerConfig(min_support=Fraction(1, 2), max_depth=2)
    results, _ = initial_call([a, b], cfg, g.triples_for)
    got = {r.pattern for r in results}
    assert got == {
        And((ValueObject(p, b), Enum(a))),
        And((ValueObject(p, a), Enum(b))),
    } or got == {
        And((Enum(a), ValueObject(p, b))),
        And((Enum(b), ValueObject(p, a))),
    }
    assert all(r.support == Fraction(1, 2) and r.depth == 1 for r in results)


def test_emitted_depth_never_exceeds_limit(cycle_path, books_graph):
    for graph, subjects in [
        (LocalGraph(books_graph.triples), BOOKS),
    ]:
        for d in (1, 2, 3):
            cfg = MinerConfig(min_support=Fraction(1, 2), max_depth=d)
            results, _ = initial_call(subjects, cfg, graph.triples_for)
            assert all(r.depth <= d for r in results)


def test_ratings_bounds(ratings_path):
    parsed = load_turtle(ratings_path)
    g = LocalGraph(parsed.triples)
    widgets = [Iri("http://example.org/shop/widget%d" % i) for i in range(1, 6)]
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)
    results, _ = initial_call(widgets, cfg, g.triples_for)
    assert len(results) == 1
    pattern = results[0].pattern
    assert isinstance(pattern, And)
    decimal = Iri(XSD_NS + "decimal")
    rating = Iri("http://example.org/shop/rating")
    some = [c for c in pattern.operands if isinstance(c, SomeData)]
    assert len(some) == 1 and some[0].prop == rating
    rng = some[0].range
    assert isinstance(rng, AndRange)
    assert set(rng.operands) == {
        Datatype(decimal),
        MinInclusive(decimal, Literal("1.0", datatype=decimal.value)),
        MaxInclusive(decimal, Literal("5.0", datatype=decimal.value)),
    }
    assert results[0].support == Fraction(1)


def test_depth_one_forbids_recursion(books_graph):
    # at θd=1 nothing may recurse: no existential ever fits
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=1)
    results, _ = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    assert all(depth(r.pattern) == 1 for r in results)
    flat = {c for r in results for c in (r.pattern.operands if isinstance(r.pattern, And) else (r.pattern,))}
    assert SomeObject(SUBJECT, NamedClass(SKOS_CONCEPT)) not in flat


def test_recursion_skipped_when_flat_pattern_exists(books_graph):
    # at θσ=3/5 dct:subject already has a frequent flat pattern, so no
    # existential appears even though depth would allow one
    cfg = MinerConfig(min_support=Fraction(3, 5), max_depth=2)
    results, _ = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    for r in results:
        for c in r.pattern.operands if isinstance(r.pattern, And) else (r.pattern,):
            assert not isinstance(c, SomeObject)


def test_ignore_predicates_regex(books_graph):
    cfg = MinerConfig(
        min_support=Fraction(4, 5), max_depth=2,
        ignore_predicates=(r"purl\.org/dc/terms",),
    )
    results, _ = initial_call(BOOKS, cfg, books_local(books_graph).triples_for)
    assert len(results) == 1
    assert set(results[0].pattern.operands) == {
        NamedClass(Iri(DBO + "Book")),
        NamedClass(Iri(DBO + "CreativeWork")),
        ValueData(Iri(DBP + "language"), Literal("English")),
    }


def test_initial_call_rejects_empty():
    with pytest.raises(EmptyTargetSet):
        initial_call([], MinerConfig(min_support=Fraction(1), max_depth=1), lambda s: [])


def test_initial_call_drops_blank_subjects(books_graph):
    g = books_local(books_graph)
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)
    with_blank = list(BOOKS) + [BlankNode("stray")]
    results, _ = initial_call(with_blank, cfg, g.triples_for)
    assert results and results[0].proof_set == frozenset(BOOKS)


def test_fetch_failure_yields_partial(books_graph):
    def broken(subjects):
        raise FetchError("endpoint gone")

    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)
    results, partial = initial_call(BOOKS, cfg, broken)
    assert partial
    # scope-level patterns (enumerations/datatypes) never fetch, so the
    # result set is simply empty here
    assert results == []


def test_cancellation_streams_a_strict_prefix(books_graph):
    g = books_local(books_graph)
    cfg = MinerConfig(min_support=Fraction(4, 5), max_depth=2)

    emissions = []
    initial_call(BOOKS, cfg, g.triples_for,
                 progress=lambda lvl, p, items: emissions.append((lvl, p, tuple(items))))

    token = CancellationToken()
    seen = []

    def cancel_after_first(lvl, p, items):
        seen.append((lvl, p, tuple(items)))
        if items:
            token.cancel()

    results, partial = initial_call(BOOKS, cfg, g.triples_for,
                                    token=token, progress=cancel_after_first)
    assert partial
    assert len(seen) < len(emissions)
    assert seen == emissions[: len(seen)]
    assert seen  # the first nonempty emission did happen


def test_closed_conjunction_merges_equal_proofs():
    a = Iri("http://x.org/A")
    s1, s2 = Iri("http://x.org/s1"), Iri("http://x.org/s2")
    proofs = frozenset({s1, s2})
    items = [
        MinedPattern(NamedClass(a), proofs, Fraction(1)),
        MinedPattern(ValueData(Iri("http://x.org/p"), Literal("v")), proofs, Fraction(1)),
        MinedPattern(Enum(s1), frozenset({s1}), Fraction(1, 2)),
    ]
    merged = mine_closed_conjunctions(items)
    assert len(merged) == 2
    ands = [m for m in merged if isinstance(m.pattern, And)]
    assert len(ands) == 1 and len(ands[0].pattern.operands) == 2


def test_closed_conjunction_never_mixes_class_and_range():
    s = Iri("http://x.org/s")
    proofs = frozenset({s})
    items = [
        MinedPattern(NamedClass(Iri("http://x.org/A")), proofs, Fraction(1)),
        MinedPattern(Datatype(Iri(XSD_NS + "integer")), proofs, Fraction(1)),
    ]
    merged = mine_closed_conjunctions(items)
    assert len(merged) == 2  # one class pattern, one range pattern


def test_mine_some_blank_objects_share_lost():
    # a subject splitting between a blank and an IRI forwards only half
    s = Iri("http://x.org/s")
    p = Iri("http://x.org/p")
    o = Iri("http://x.org/o")
    idx = build_index([
        Triple(s, p, o),
        Triple(s, p, BlankNode("anon")),
        Triple(o, Iri("http://x.org/q"), Literal("1", datatype=XSD_NS + "integer")),
    ])
    scope = MiningScope(
        uris=frozenset({s}), literals=frozenset(),
        weighting=Weighting.uniform([s]), level=0,
    )
    cfg = MinerConfig(min_support=Fraction(1, 4), max_depth=3)
    g = LocalGraph([Triple(o, Iri("http://x.org/q"),
                           Literal("1", datatype=XSD_NS + "integer"))])
    results, _ = mine_some(idx, p, scope, cfg, g.triples_for)
    # deeper patterns carry proofs mapped back to s either way; the blank
    # share must not inflate any support beyond s's own weight
    assert all(r.support <= Fraction(1) for r in results)
    assert all(r.proof_set == frozenset({s}) for r in results)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_redistribution_conserves_mass(seed):
    graph, scope_subjects = random_graph(seed, max_triples=60)
    idx = build_index(graph.triples_for(scope_subjects))
    w = Weighting.uniform(scope_subjects)
    for p in idx.predicates():
        counts = idx.object_counts_by_subject(p)
        forwarded = Fraction(0)
        blank_loss = Fraction(0)
        for obj, subs in idx.objects(p).items():
            share = sum((w[s] / counts[s] for s in subs), Fraction(0))
            if isinstance(obj, BlankNode):
                blank_loss += share
            else:
                forwarded += share
        carriers = idx.subject_union(p)
        assert forwarded + blank_loss == w.support_of(carriers)
