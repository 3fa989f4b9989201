from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from owlminer import datatypes as dts
from owlminer.diagnostics import Diagnostics
from owlminer.errors import IncomparableLiterals
from owlminer.terms import Iri, Literal, XSD_NS


def xsd(name):
    return Iri(XSD_NS + name)


def test_hierarchy_chain():
    assert dts.is_subtype(xsd("integer"), xsd("decimal"))
    assert dts.is_subtype(xsd("integer"), dts.OWL_REAL)
    assert dts.is_subtype(xsd("nonNegativeInteger"), xsd("integer"))
    assert not dts.is_subtype(xsd("decimal"), xsd("integer"))
    assert dts.is_subtype(xsd("dateTimeStamp"), xsd("dateTime"))
    # everything sits under the root
    for dt in dts.ALL_DATATYPES:
        assert dts.is_subtype(dt, dts.RDFS_LITERAL)


def test_ancestors_reflexive():
    assert xsd("integer") in dts.ancestors(xsd("integer"))


@pytest.mark.parametrize("dt,good,bad", [
    ("integer", ["0", "-7", "+12"], ["1.5", "1e3", "", "one"]),
    ("decimal", ["1.5", "-0.25", "3"], ["1/2", "1e3", "."]),
    ("nonNegativeInteger", ["0", "42"], ["-1", "4.0"]),
    ("dateTime", ["2002-05-30T09:00:00", "2002-05-30T09:30:10.5Z",
                  "2002-05-30T09:30:10-06:00"],
     ["2002-05-30", "2002-13-01T00:00:00", "2002-02-30T00:00:00",
      "2002-05-30T24:30:00"]),
    ("dateTimeStamp", ["2002-05-30T09:30:10Z"], ["2002-05-30T09:30:10"]),
    ("hexBinary", ["0FB7", ""], ["0FB", "GG"]),
    ("base64Binary", ["MTIz", "TWFu", ""], ["TQ=", "!!!!"]),
    ("anyURI", ["http://example.org/a"], ["a b"]),
    ("NCName", ["name", "_x1"], ["two words", "a:b", "1st"]),
    ("NMTOKEN", ["tok-1", "1st"], ["sp ace", ""]),
])
def test_lexical_spaces(dt, good, bad):
    for s in good:
        assert dts.lexically_valid(xsd(dt), s), (dt, s)
    for s in bad:
        assert not dts.lexically_valid(xsd(dt), s), (dt, s)


def test_owl_rational_form():
    assert dts.lexically_valid(dts.OWL_RATIONAL, "1/3")
    assert not dts.lexically_valid(dts.OWL_RATIONAL, "1.5")


def test_leap_day_validation():
    assert dts.lexically_valid(xsd("dateTime"), "2004-02-29T00:00:00")
    assert not dts.lexically_valid(xsd("dateTime"), "2003-02-29T00:00:00")


def test_candidates_typed_literal_is_singleton():
    lit = Literal("5", datatype=XSD_NS + "integer")
    assert dts.candidate_datatypes(lit) == frozenset({xsd("integer")})


def test_candidates_malformed_typed_literal_warns_but_keeps_type():
    diag = Diagnostics()
    lit = Literal("abc", datatype=XSD_NS + "integer")
    assert dts.candidate_datatypes(lit, diag) == frozenset({xsd("integer")})
    assert diag.counts.get("malformed-typed-literal") == 1


def test_candidates_language_tagged():
    lit = Literal("bonjour", language="fr")
    assert dts.candidate_datatypes(lit) == frozenset({dts.RDF_PLAIN_LITERAL})


def test_candidates_untyped_closed_upward():
    got = dts.candidate_datatypes(Literal("42"))
    # an integer-looking string is everything up the numeric chain...
    for name in ("integer", "nonNegativeInteger", "decimal"):
        assert xsd(name) in got
    assert dts.OWL_REAL in got and dts.OWL_RATIONAL in got
    # ...and a string too
    assert dts.XSD_STRING in got
    assert dts.RDFS_LITERAL in got
    # upward closure: parents always along for the ride
    for dt in got:
        assert dts.ancestors(dt) <= got


def test_candidates_untyped_negative_number_not_nonneg():
    got = dts.candidate_datatypes(Literal("-3"))
    assert xsd("integer") in got
    assert xsd("nonNegativeInteger") not in got


def test_value_compare_numeric_across_forms():
    dt = xsd("decimal")
    assert dts.value_compare(Literal("1.50"), Literal("1.5"), dt) == 0
    assert dts.value_compare(Literal("2"), Literal("10"), dt) == -1
    assert dts.value_compare(Literal("-0.1"), Literal("-0.2"), dt) == 1


def test_value_compare_rational():
    assert dts.value_compare(Literal("1/3"), Literal("0.4"), dts.OWL_RATIONAL) == -1


def test_value_compare_datetime_and_timezone_warning():
    dt = xsd("dateTime")
    assert dts.value_compare(
        Literal("2002-05-30T09:00:00Z"), Literal("2002-05-30T10:00:00Z"), dt
    ) == -1
    # UTC offset normalization
    assert dts.value_compare(
        Literal("2002-05-30T09:00:00-01:00"), Literal("2002-05-30T10:00:00Z"), dt
    ) == 0
    diag = Diagnostics()
    dts.value_compare(
        Literal("2002-05-30T09:00:00"), Literal("2002-05-30T09:00:00Z"), dt, diag
    )
    assert diag.counts.get("mixed-timezone-comparison") == 1


def test_value_compare_rejects_unordered_datatype():
    with pytest.raises(IncomparableLiterals):
        dts.value_compare(Literal("a"), Literal("b"), dts.XSD_STRING)


def test_value_compare_rejects_unparseable():
    with pytest.raises(IncomparableLiterals):
        dts.value_compare(Literal("x"), Literal("1"), xsd("integer"))


_numbers = st.one_of(
    st.integers(-1000, 1000).map(str),
    st.builds(lambda a, b: "%d.%02d" % (a, b), st.integers(-50, 50), st.integers(0, 99)),
)


@given(_numbers, _numbers, _numbers)
def test_value_compare_is_a_total_order(a, b, c):
    dt = xsd("decimal")
    la, lb, lc = Literal(a), Literal(b), Literal(c)
    cab = dts.value_compare(la, lb, dt)
    # antisymmetry
    assert cab == -dts.value_compare(lb, la, dt)
    # transitivity of <=
    if cab <= 0 and dts.value_compare(lb, lc, dt) <= 0:
        assert dts.value_compare(la, lc, dt) <= 0


def test_literal_value_fraction_exact():
    assert dts.literal_value(xsd("decimal"), Literal("0.1")) == Fraction(1, 10)
