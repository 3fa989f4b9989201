from fractions import Fraction

import pytest

from helpers import mined_as_set, random_graph
from owlminer.diagnostics import Diagnostics
from owlminer.errors import ProofVerificationFailed
from owlminer.mining import initial_call
from owlminer.model import MinedPattern, MinerConfig, Weighting
from owlminer.oracle import (
    LocalGraph,
    enumerate_shallowest_frequent,
    matches,
    matching_terms,
    verify_proof_sets,
)
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
from owlminer.terms import RDF_TYPE, XSD_NS, Iri, Literal, Triple

EX = "http://example.org/"


def iri(n):
    return Iri(EX + n)


@pytest.fixture()
def zoo():
    t = [
        Triple(iri("rex"), RDF_TYPE, iri("Dog")),
        Triple(iri("rex"), iri("likes"), iri("ada")),
        Triple(iri("rex"), iri("likes"), iri("rex")),
        Triple(iri("rex"), iri("age"), Literal("7", datatype=XSD_NS + "integer")),
        Triple(iri("ada"), RDF_TYPE, iri("Cat")),
        Triple(iri("ada"), iri("age"), Literal("3", datatype=XSD_NS + "integer")),
        Triple(iri("ada"), iri("name"), Literal("Ada", language="en")),
    ]
    return LocalGraph(t)


class TestMatches:
    def test_named_class(self, zoo):
        assert matches(zoo, iri("rex"), NamedClass(iri("Dog")))
        assert not matches(zoo, iri("rex"), NamedClass(iri("Cat")))

    def test_enum_is_identity(self, zoo):
        assert matches(zoo, iri("rex"), Enum(iri("rex")))
        assert not matches(zoo, iri("ada"), Enum(iri("rex")))

    def test_value_object(self, zoo):
        assert matches(zoo, iri("rex"), ValueObject(iri("likes"), iri("ada")))
        assert not matches(zoo, iri("ada"), ValueObject(iri("likes"), iri("ada")))

    def test_self_restriction_needs_a_loop(self, zoo):
        assert matches(zoo, iri("rex"), SelfRestriction(iri("likes")))
        assert not matches(zoo, iri("ada"), SelfRestriction(iri("likes")))

    def test_some_object_follows_edges(self, zoo):
        p = SomeObject(iri("likes"), NamedClass(iri("Cat")))
        assert matches(zoo, iri("rex"), p)
        assert not matches(zoo, iri("ada"), p)

    def test_some_data_with_datatype(self, zoo):
        p = SomeData(iri("age"), Datatype(Iri(XSD_NS + "integer")))
        assert matches(zoo, iri("rex"), p)
        assert matches(zoo, iri("ada"), p)
        # declared type is the only candidate: decimal does not match
        q = SomeData(iri("age"), Datatype(Iri(XSD_NS + "decimal")))
        assert not matches(zoo, iri("rex"), q)

    def test_bounds(self, zoo):
        dt = Iri(XSD_NS + "integer")
        low = SomeData(iri("age"), MinInclusive(dt, Literal("5", datatype=dt.value)))
        assert matches(zoo, iri("rex"), low)
        assert not matches(zoo, iri("ada"), low)
        # inclusive at the boundary
        exact = SomeData(iri("age"), MinInclusive(dt, Literal("7", datatype=dt.value)))
        assert matches(zoo, iri("rex"), exact)
        high = SomeData(iri("age"), MaxInclusive(dt, Literal("3", datatype=dt.value)))
        assert matches(zoo, iri("ada"), high)
        assert not matches(zoo, iri("rex"), high)

    def test_and_range_on_literal_terms(self, zoo):
        dt = Iri(XSD_NS + "integer")
        rng = AndRange((Datatype(dt), MinInclusive(dt, Literal("3", datatype=dt.value))))
        assert matches(zoo, Literal("7", datatype=dt.value), rng)
        assert not matches(zoo, Literal("2", datatype=dt.value), rng)

    def test_enum_literal(self, zoo):
        assert matches(zoo, Literal("x"), EnumLiteral(Literal("x")))
        assert not matches(zoo, Literal("x"), EnumLiteral(Literal("y")))

    def test_language_tag_is_plain_literal(self, zoo):
        plain = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#PlainLiteral")
        p = SomeData(iri("name"), Datatype(plain))
        assert matches(zoo, iri("ada"), p)

    def test_conjunction(self, zoo):
        p = And((NamedClass(iri("Dog")), SelfRestriction(iri("likes"))))
        assert matches(zoo, iri("rex"), p)
        assert not matches(zoo, iri("ada"), p)


def test_matching_terms_restricted_to_scope(zoo):
    scope = {iri("rex"), iri("ada")}
    got = matching_terms(zoo, SomeData(iri("age"), Datatype(Iri(XSD_NS + "integer"))), scope)
    assert got == frozenset(scope)
    got = matching_terms(zoo, NamedClass(iri("Dog")), {iri("ada")})
    assert got == frozenset()


def test_verify_proof_sets_passes_on_truth(zoo):
    pattern = NamedClass(iri("Dog"))
    ok = MinedPattern(pattern, frozenset({iri("rex")}), Fraction(1, 2))
    diag = Diagnostics()
    verify_proof_sets(zoo, [ok], diag)  # should not raise


def test_verify_proof_sets_detects_wrong_proofs(zoo):
    pattern = NamedClass(iri("Dog"))
    bad = MinedPattern(pattern, frozenset({iri("ada")}), Fraction(1, 2))
    with pytest.raises(ProofVerificationFailed):
        verify_proof_sets(zoo, [bad])


def test_oracle_equivalence_sweep():
    # the miner must agree with brute-force enumeration: pattern set,
    # proof sets and supports, across thresholds and depth limits
    for seed in range(50):
        graph, scope = random_graph(seed)
        for min_support in (Fraction(1, 2), Fraction(4, 5), Fraction(1)):
            for max_depth in (1, 2):
                cfg = MinerConfig(min_support=min_support, max_depth=max_depth)
                mined, partial = initial_call(scope, cfg, graph.triples_for)
                assert not partial
                reference = enumerate_shallowest_frequent(
                    graph, set(scope), set(),
                    Weighting.uniform(scope), min_support, max_depth,
                )
                assert mined_as_set(mined) == mined_as_set(reference), (
                    seed, min_support, max_depth,
                )


def test_oracle_equivalence_depth_three():
    # a deeper limit exercises chained recursion on both sides
    for seed in (3, 11, 27):
        graph, scope = random_graph(seed, max_triples=60)
        cfg = MinerConfig(min_support=Fraction(1, 2), max_depth=3)
        mined, _ = initial_call(scope, cfg, graph.triples_for)
        reference = enumerate_shallowest_frequent(
            graph, set(scope), set(), Weighting.uniform(scope), Fraction(1, 2), 3,
        )
        assert mined_as_set(mined) == mined_as_set(reference)
