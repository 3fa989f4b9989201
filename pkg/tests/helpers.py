"""Shared test utilities: shape-graph isomorphism and random graph generation."""

from __future__ import annotations

import random
from fractions import Fraction

from owlminer.oracle import LocalGraph
from owlminer.shacl import DEFAULT_SHAPE_NAMESPACE, SH_SHAPE
from owlminer.terms import RDF_NS, RDF_TYPE, XSD_NS, BlankNode, Iri, Literal, Triple

RDF_TYPE_IRI = RDF_TYPE


def _is_structural(term, shape_ns: str) -> bool:
    if isinstance(term, BlankNode):
        return True
    return isinstance(term, Iri) and term.value.startswith(shape_ns)


def _fingerprint(term, outgoing, shape_ns, seen):
    """Structure-only digest: blank labels and shape names don't matter."""
    if isinstance(term, Literal):
        return ("lit", term.lexical, term.datatype, term.language)
    if not _is_structural(term, shape_ns):
        return ("iri", term.value)
    if term in seen:
        return ("cycle",)
    seen = seen | {term}
    rows = sorted(
        (
            (pred.value, _fingerprint(obj, outgoing, shape_ns, seen))
            for pred, obj in outgoing.get(term, ())
        ),
        key=repr,
    )
    return ("node", tuple(rows))


def shape_fingerprints(triples, shape_ns: str = DEFAULT_SHAPE_NAMESPACE):
    """One fingerprint per declared shape, sorted; equal lists <=> isomorphic."""
    outgoing: dict = {}
    roots = []
    for t in triples:
        outgoing.setdefault(t.subject, []).append((t.predicate, t.object))
        if t.predicate == RDF_TYPE and t.object == SH_SHAPE:
            roots.append(t.subject)
    prints = [
        _fingerprint(r, outgoing, shape_ns, frozenset()) for r in roots
    ]
    return sorted(prints, key=repr)


def shapes_isomorphic(a, b, shape_ns: str = DEFAULT_SHAPE_NAMESPACE) -> bool:
    return shape_fingerprints(a, shape_ns) == shape_fingerprints(b, shape_ns)


# --- random graphs for the oracle-equivalence suite -------------------------

_EX = "http://example.org/"


def random_graph(seed: int, max_triples: int = 200, max_predicates: int = 8):
    """Seeded graph with IRIs, typed/untyped literals, rdf:type triples,
    the occasional self-loop and blank node — the shapes the miner must
    handle.  Returns (LocalGraph, scope subjects)."""
    rng = random.Random(seed)
    n_subjects = rng.randint(3, 10)
    subjects = [Iri(_EX + "s%d" % i) for i in range(n_subjects)]
    others = [Iri(_EX + "o%d" % i) for i in range(rng.randint(2, 6))]
    classes = [Iri(_EX + "C%d" % i) for i in range(rng.randint(1, 4))]
    preds = [Iri(_EX + "p%d" % i) for i in range(rng.randint(1, max_predicates - 1))]

    def random_literal():
        kind = rng.randrange(5)
        if kind == 0:
            return Literal(str(rng.randint(-20, 20)), datatype=XSD_NS + "integer")
        if kind == 1:
            return Literal("%d.%d" % (rng.randint(0, 9), rng.randint(0, 99)),
                           datatype=XSD_NS + "decimal")
        if kind == 2:
            return Literal(rng.choice(["red", "green", "blue"]),
                           datatype=XSD_NS + "string")
        if kind == 3:
            return Literal(rng.choice(["maybe", "42", "x y"]))  # untyped
        return Literal(rng.choice(["hello", "salut"]), language="en")

    triples = set()
    budget = rng.randint(10, max_triples)
    pool = subjects + others
    while len(triples) < budget:
        s = rng.choice(pool)
        roll = rng.random()
        if roll < 0.15:
            triples.add(Triple(s, Iri(RDF_NS + "type"), rng.choice(classes)))
        elif roll < 0.25:
            triples.add(Triple(s, rng.choice(preds), random_literal()))
        elif roll < 0.3:
            triples.add(Triple(s, rng.choice(preds), s))  # self loop
        elif roll < 0.35:
            triples.add(Triple(s, rng.choice(preds), BlankNode("b%d" % rng.randrange(3))))
        else:
            triples.add(Triple(s, rng.choice(preds), rng.choice(pool)))
        if len(triples) >= max_triples:
            break
    graph = LocalGraph(triples)
    scope = [s for s in subjects if graph.subject_triples(s)]
    if not scope:  # ensure a non-empty run
        only = subjects[0]
        graph.add(Triple(only, preds[0], others[0]))
        scope = [only]
    return graph, scope


def mined_as_set(results):
    """Comparable view of miner/oracle output: pattern key, proofs, support."""
    from owlminer.patterns import canonical_key

    return {
        (canonical_key(r.pattern), r.proof_set, Fraction(r.support)) for r in results
    }


# --- hypothesis strategies over the pattern algebra -------------------------

def pattern_strategies():
    from hypothesis import strategies as st

    from owlminer.patterns import (
        And,
        AndRange,
        Datatype,
        Enum,
        EnumLiteral,
        MaxInclusive,
        MinInclusive,
        NamedClass,
        SelfRestriction,
        SomeData,
        SomeObject,
        ValueData,
        ValueObject,
    )

    classes = st.sampled_from([Iri(_EX + n) for n in ("Alpha", "Beta", "Gamma")])
    props = st.sampled_from([Iri(_EX + n) for n in ("knows", "rates", "has")])
    individuals = st.sampled_from([Iri(_EX + n) for n in ("i1", "i2")])
    plain = st.sampled_from([
        Literal("red"),
        Literal("7", datatype=XSD_NS + "integer"),
        Literal("hi", language="en"),
    ])
    numeric_dt = st.sampled_from([Iri(XSD_NS + "integer"), Iri(XSD_NS + "decimal")])
    bound = st.builds(
        lambda n, dt: (dt, Literal(str(n), datatype=dt.value)),
        st.integers(-9, 9),
        numeric_dt,
    )
    range_base = st.one_of(
        st.builds(Datatype, numeric_dt),
        st.builds(EnumLiteral, plain),
        bound.map(lambda p: MinInclusive(*p)),
        bound.map(lambda p: MaxInclusive(*p)),
    )
    ranges = st.one_of(
        range_base,
        st.lists(range_base, min_size=2, max_size=3, unique=True).map(
            lambda xs: AndRange(tuple(xs))
        ),
    )
    base = st.one_of(
        st.builds(NamedClass, classes),
        st.builds(Enum, individuals),
        st.builds(ValueObject, props, individuals),
        st.builds(ValueData, props, plain),
        st.builds(SelfRestriction, props),
        st.builds(SomeData, props, ranges),
    )
    patterns = st.recursive(
        base,
        lambda inner: st.one_of(
            st.builds(SomeObject, props, inner),
            st.lists(inner, min_size=2, max_size=3, unique=True).map(
                lambda xs: And(tuple(xs))
            ),
        ),
        max_leaves=6,
    )
    return patterns, ranges
