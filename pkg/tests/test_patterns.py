from fractions import Fraction

import pytest
from hypothesis import given, settings

from helpers import pattern_strategies
from owlminer.errors import ParseError
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
    canonical_key,
    canonicalize,
    conjuncts,
    depth,
    is_range,
    parse,
    serialize,
)
from owlminer.terms import Iri, Literal, PrefixMap, XSD_NS

EX = "http://example.org/"
A = NamedClass(Iri(EX + "A"))
B = NamedClass(Iri(EX + "B"))
P = Iri(EX + "p")

patterns_st, ranges_st = pattern_strategies()


def test_depth_counts_nesting():
    assert depth(A) == 1
    assert depth(And((A, B))) == 1
    assert depth(SomeObject(P, A)) == 2
    assert depth(SomeObject(P, SomeObject(P, A))) == 3
    assert depth(SomeData(P, Datatype(Iri(XSD_NS + "integer")))) == 2


def test_and_requires_two_operands():
    with pytest.raises(ValueError):
        And((A,))
    with pytest.raises(ValueError):
        AndRange((Datatype(Iri(XSD_NS + "integer")),))


def test_serialize_basics():
    pm = PrefixMap({"ex": EX})
    assert serialize(A, pm) == "ex:A"
    assert serialize(And((A, B)), pm) == "ex:A and ex:B"
    assert serialize(Enum(Iri(EX + "i")), pm) == "{ex:i}"
    assert serialize(ValueObject(P, Iri(EX + "i")), pm) == "ex:p value ex:i"
    assert serialize(SelfRestriction(P), pm) == "ex:p Self"
    assert serialize(ValueData(P, Literal("hi")), pm) == 'ex:p value "hi"'


def test_serialize_nested_conjunction_parenthesizes():
    pm = PrefixMap({"ex": EX})
    inner = And((A, B))
    assert serialize(SomeObject(P, inner), pm) == "ex:p some (ex:A and ex:B)"


def test_serialize_bounds():
    pm = PrefixMap({"ex": EX, "xsd": XSD_NS})
    rng = MaxInclusive(Iri(XSD_NS + "decimal"), Literal("5.0", datatype=XSD_NS + "decimal"))
    assert serialize(SomeData(P, rng), pm) == 'ex:p some xsd:decimal[<= "5.0"^^xsd:decimal]'
    # an untyped numeric bound renders bare
    rng = MinInclusive(Iri(XSD_NS + "integer"), Literal("1"))
    assert serialize(SomeData(P, rng), pm) == "ex:p some xsd:integer[>= 1]"


def test_parse_precedence_some_binds_tighter_than_and():
    pm = PrefixMap({"ex": EX})
    got = parse("ex:p some ex:A and ex:B", pm)
    # the existential grabs only ex:A; operand order is canonical
    assert got == canonicalize(And((SomeObject(P, A), B)))
    assert set(got.operands) == {SomeObject(P, A), B}


def test_parse_absolute_iris_without_prefixes():
    got = parse("<%sA> and <%sB>" % (EX, EX), None)
    assert got == And((A, B))


def test_parse_rejects_garbage():
    for text in ("", "and", "ex:A and", "{", 'ex:p value "unclosed', "ex:A )"):
        with pytest.raises(ParseError):
            parse(text, PrefixMap({"ex": EX}))


def test_parse_unknown_prefix():
    # "nope:A" would still parse as an absolute IRI with scheme "nope";
    # a bare word cannot
    with pytest.raises(ParseError):
        parse("Widget", PrefixMap())


def test_canonicalize_flattens_sorts_dedups():
    c = canonicalize(And((And((B, A)), A)))
    assert isinstance(c, And)
    assert len(c.operands) == 2
    assert set(c.operands) == {A, B}
    # deterministic operand order
    assert [canonical_key(o) for o in c.operands] == sorted(
        canonical_key(o) for o in c.operands
    )


def test_canonicalize_collapses_singleton():
    assert canonicalize(And((A, A))) == A


def test_conjuncts_view():
    assert conjuncts(A) == (A,)
    assert set(conjuncts(And((A, B)))) == {A, B}


@given(patterns_st)
@settings(max_examples=200)
def test_canonicalize_idempotent(p):
    c = canonicalize(p)
    assert canonicalize(c) == c


@given(patterns_st)
@settings(max_examples=200)
def test_serialize_parse_fixed_point(p):
    c = canonicalize(p)
    pm = PrefixMap({"ex": EX, "xsd": XSD_NS})
    assert parse(serialize(c, pm), pm) == c
    # and with no prefix table at all
    assert parse(serialize(c, None), None) == c


@given(patterns_st, patterns_st)
@settings(max_examples=200)
def test_canonical_key_identifies_equivalent_conjunctions(p, q):
    # keys are injective on canonical forms
    assert (canonical_key(canonicalize(p)) == canonical_key(canonicalize(q))) == (
        canonicalize(p) == canonicalize(q)
    )


@given(ranges_st)
@settings(max_examples=100)
def test_ranges_are_ranges(r):
    assert is_range(r)
    c = canonicalize(r)
    pm = PrefixMap({"ex": EX, "xsd": XSD_NS})
    # ranges survive a serialize/parse trip inside a data restriction
    host = SomeData(P, c)
    assert parse(serialize(host, pm), pm) == host
