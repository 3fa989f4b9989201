"""Datatype hierarchy, lexical grammars and value-space comparison.

The supported datatypes form a tree rooted at rdfs:Literal.  An untyped
literal is assigned every datatype whose lexical grammar accepts it, closed
upward through the tree; a typed literal is assigned exactly its declared
type; a language-tagged literal is assigned rdf:PlainLiteral.

Ordering is defined for the numeric chain (owl:real down to
xsd:nonNegativeInteger) and for xsd:dateTime / xsd:dateTimeStamp.  All
numeric values are exact fractions; instants are exact fractions of seconds
since the epoch, with timezone-less forms read as UTC.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction

from .diagnostics import Diagnostics, warn
from .errors import IncomparableLiterals
from .terms import RDF_NS, RDFS_NS, XSD_NS, OWL_NS, Iri, Literal

RDFS_LITERAL = Iri(RDFS_NS + "Literal")
RDF_PLAIN_LITERAL = Iri(RDF_NS + "PlainLiteral")
RDF_XML_LITERAL = Iri(RDF_NS + "XMLLiteral")
OWL_REAL = Iri(OWL_NS + "real")
OWL_RATIONAL = Iri(OWL_NS + "rational")
XSD_DECIMAL = Iri(XSD_NS + "decimal")
XSD_INTEGER = Iri(XSD_NS + "integer")
XSD_NON_NEGATIVE_INTEGER = Iri(XSD_NS + "nonNegativeInteger")
XSD_STRING = Iri(XSD_NS + "string")
XSD_NORMALIZED_STRING = Iri(XSD_NS + "normalizedString")
XSD_TOKEN = Iri(XSD_NS + "token")
XSD_NMTOKEN = Iri(XSD_NS + "NMTOKEN")
XSD_NAME = Iri(XSD_NS + "Name")
XSD_NCNAME = Iri(XSD_NS + "NCName")
XSD_DATE_TIME = Iri(XSD_NS + "dateTime")
XSD_DATE_TIME_STAMP = Iri(XSD_NS + "dateTimeStamp")
XSD_HEX_BINARY = Iri(XSD_NS + "hexBinary")
XSD_BASE64_BINARY = Iri(XSD_NS + "base64Binary")
XSD_ANY_URI = Iri(XSD_NS + "anyURI")

# child -> parent; rdfs:Literal is the root
PARENT: dict[Iri, Iri] = {
    OWL_REAL: RDFS_LITERAL,
    OWL_RATIONAL: OWL_REAL,
    XSD_DECIMAL: OWL_RATIONAL,
    XSD_INTEGER: XSD_DECIMAL,
    XSD_NON_NEGATIVE_INTEGER: XSD_INTEGER,
    XSD_STRING: RDFS_LITERAL,
    XSD_NORMALIZED_STRING: XSD_STRING,
    XSD_TOKEN: XSD_NORMALIZED_STRING,
    XSD_NMTOKEN: XSD_TOKEN,
    XSD_NAME: XSD_TOKEN,
    XSD_NCNAME: XSD_NAME,
    XSD_DATE_TIME: RDFS_LITERAL,
    XSD_DATE_TIME_STAMP: XSD_DATE_TIME,
    RDF_PLAIN_LITERAL: RDFS_LITERAL,
    RDF_XML_LITERAL: RDFS_LITERAL,
    XSD_HEX_BINARY: RDFS_LITERAL,
    XSD_BASE64_BINARY: RDFS_LITERAL,
    XSD_ANY_URI: RDFS_LITERAL,
}

ALL_DATATYPES: tuple[Iri, ...] = (RDFS_LITERAL,) + tuple(PARENT)

# Datatypes usable with a lower bound; the same set minus
# xsd:nonNegativeInteger is usable with an upper bound.
GT_DATATYPES = frozenset(
    {OWL_REAL, OWL_RATIONAL, XSD_DECIMAL, XSD_INTEGER,
     XSD_NON_NEGATIVE_INTEGER, XSD_DATE_TIME, XSD_DATE_TIME_STAMP}
)
LT_DATATYPES = GT_DATATYPES - {XSD_NON_NEGATIVE_INTEGER}

_NUMERIC = frozenset(
    {OWL_REAL, OWL_RATIONAL, XSD_DECIMAL, XSD_INTEGER, XSD_NON_NEGATIVE_INTEGER}
)
_TEMPORAL = frozenset({XSD_DATE_TIME, XSD_DATE_TIME_STAMP})


def ancestors(dt: Iri) -> frozenset[Iri]:
    """Reflexive-transitive closure up the tree."""
    out = {dt}
    while dt in PARENT:
        dt = PARENT[dt]
        out.add(dt)
    return frozenset(out)


def is_subtype(a: Iri, b: Iri) -> bool:
    return b in ancestors(a)


# --- lexical grammars -------------------------------------------------------

_INTEGER_re = re.compile(r"[+-]?\d+\Z")
_DECIMAL_re = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)\Z")
_RATIONAL_re = re.compile(r"[+-]?\d+/\d+\Z")
_HEX_re = re.compile(r"(?:[0-9a-fA-F]{2})*\Z")
# after single internal spaces are removed, base64 content is whole quads
# with XSD's constraints on the padded tail
_BASE64_re = re.compile(
    r"(?:[A-Za-z0-9+/]{4})*"
    r"(?:[A-Za-z0-9+/]{2}[AEIMQUYcgkosw048]=|[A-Za-z0-9+/][AQgw]==)?\Z"
)

# XML 1.0 (5th ed.) name productions
_NAME_START = (
    "A-Za-z_\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D"
    "\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF"
    "\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF"
)
_NAME_EXTRA = "\\-.0-9\u00B7\u0300-\u036F\u203F-\u2040"
_NMTOKEN_re = re.compile("[:%s%s]+\\Z" % (_NAME_START, _NAME_EXTRA))
_NAME_re = re.compile("[:%s][:%s%s]*\\Z" % (_NAME_START, _NAME_START, _NAME_EXTRA))
_NCNAME_re = re.compile("[%s][%s%s]*\\Z" % (_NAME_START, _NAME_START, _NAME_EXTRA))

_DATETIME_re = re.compile(
    r"(-?\d{4,})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d+)?"
    r"(Z|[+-]\d{2}:\d{2})?\Z"
)

_URI_FORBIDDEN = set(' <>"{}|\\^`')


def _valid_normalized(s: str) -> bool:
    return not any(c in s for c in "\t\n\r")


def _valid_token(s: str) -> bool:
    return (
        _valid_normalized(s)
        and not s.startswith(" ")
        and not s.endswith(" ")
        and "  " not in s
    )


def _valid_nonneg(s: str) -> bool:
    return bool(_INTEGER_re.match(s)) and int(s) >= 0


def _valid_rational(s: str) -> bool:
    if not _RATIONAL_re.match(s):
        return False
    return int(s.partition("/")[2]) != 0


def _valid_base64(s: str) -> bool:
    if s.startswith(" ") or s.endswith(" ") or "  " in s:
        return False
    return bool(_BASE64_re.match(s.replace(" ", "")))


def _valid_any_uri(s: str) -> bool:
    return not any(c in _URI_FORBIDDEN or ord(c) < 0x20 for c in s)


def _valid_xml(s: str) -> bool:
    # every plain string is well-formed XML character content, so demand
    # actual markup before calling something an XML literal
    if "<" not in s:
        return False
    try:
        ET.fromstring("<x>%s</x>" % s)
        return True
    except ET.ParseError:
        return False


_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _is_leap(y: int) -> bool:
    return y % 4 == 0 and (y % 100 != 0 or y % 400 == 0)


def _days_from_civil(y: int, m: int, d: int) -> int:
    """Proleptic-Gregorian day number (1970-01-01 is day 0); arbitrary years."""
    y -= m <= 2
    era = (y if y >= 0 else y - 399) // 400
    yoe = y - era * 400
    mp = m + (-3 if m > 2 else 9)
    doy = (153 * mp + 2) // 5 + d - 1
    doe = yoe * 365 + yoe // 4 - yoe // 100 + doy
    return era * 146097 + doe - 719468


def _parse_datetime(s: str) -> tuple[Fraction, bool] | None:
    """Return (seconds since epoch as exact Fraction, timezone present)."""
    m = _DATETIME_re.match(s)
    if not m:
        return None
    ys, mos, ds, hs, mins, secs, frac, tz = m.groups()
    year_digits = ys.lstrip("-")
    if len(year_digits) > 4 and year_digits.startswith("0"):
        return None
    year, month, day = int(ys), int(mos), int(ds)
    hour, minute, second = int(hs), int(mins), int(secs)
    if not 1 <= month <= 12:
        return None
    limit = _DAYS_IN_MONTH[month - 1] + (1 if month == 2 and _is_leap(year) else 0)
    if not 1 <= day <= limit:
        return None
    fraction = Fraction(0)
    if frac:
        fraction = Fraction(int(frac[1:]), 10 ** (len(frac) - 1))
    if hour == 24:
        if minute or second or fraction:
            return None
    elif hour > 23:
        return None
    if minute > 59 or second > 59:
        return None
    offset = 0
    if tz and tz != "Z":
        th, tm = int(tz[1:3]), int(tz[4:6])
        if th > 14 or tm > 59 or (th == 14 and tm != 0):
            return None
        offset = (th * 3600 + tm * 60) * (-1 if tz[0] == "-" else 1)
    days = _days_from_civil(year, month, day)
    seconds = days * 86400 + hour * 3600 + minute * 60 + second
    return Fraction(seconds) + fraction - offset, tz is not None


def _valid_datetime(s: str) -> bool:
    return _parse_datetime(s) is not None


def _valid_datetime_stamp(s: str) -> bool:
    parsed = _parse_datetime(s)
    return parsed is not None and parsed[1]


# own lexical production per datatype; acceptance is closed upward through
# PARENT afterwards, which is what gives owl:real/owl:rational their
# decimal-shaped members
_GRAMMAR = {
    RDFS_LITERAL: lambda s: True,
    RDF_PLAIN_LITERAL: lambda s: True,
    XSD_STRING: lambda s: True,
    XSD_NORMALIZED_STRING: _valid_normalized,
    XSD_TOKEN: _valid_token,
    XSD_NMTOKEN: lambda s: bool(_NMTOKEN_re.match(s)),
    XSD_NAME: lambda s: bool(_NAME_re.match(s)),
    XSD_NCNAME: lambda s: bool(_NCNAME_re.match(s)),
    XSD_DECIMAL: lambda s: bool(_DECIMAL_re.match(s)),
    XSD_INTEGER: lambda s: bool(_INTEGER_re.match(s)),
    XSD_NON_NEGATIVE_INTEGER: _valid_nonneg,
    OWL_RATIONAL: _valid_rational,
    OWL_REAL: lambda s: False,
    XSD_DATE_TIME: _valid_datetime,
    XSD_DATE_TIME_STAMP: _valid_datetime_stamp,
    RDF_XML_LITERAL: _valid_xml,
    XSD_HEX_BINARY: lambda s: bool(_HEX_re.match(s)),
    XSD_BASE64_BINARY: _valid_base64,
    XSD_ANY_URI: _valid_any_uri,
}


def lexically_valid(dt: Iri, lexical: str) -> bool:
    """Does the datatype's own production accept the string?"""
    check = _GRAMMAR.get(dt)
    return check(lexical) if check else True


def declared_form_ok(dt: Iri, lexical: str) -> bool:
    """Validity check for a *declared* type: owl:real has no production of
    its own, so any numeric-chain form counts; unknown types are not judged."""
    if dt == OWL_REAL:
        return _valid_rational(lexical) or bool(_DECIMAL_re.match(lexical))
    return lexically_valid(dt, lexical)


def candidate_datatypes(
    literal: Literal, diagnostics: Diagnostics | None = None
) -> frozenset[Iri]:
    """Datatypes a literal is assigned for mining and matching.

    Typed literals keep exactly their declared type (a malformed lexical form
    is only warned about); language-tagged literals are rdf:PlainLiteral;
    untyped literals get every accepting grammar, closed upward.
    """
    if literal.language is not None:
        return frozenset({RDF_PLAIN_LITERAL})
    if literal.datatype is not None:
        declared = Iri(literal.datatype)
        if not declared_form_ok(declared, literal.lexical):
            warn(
                diagnostics,
                "malformed-typed-literal",
                "%r is not a valid %s" % (literal.lexical, literal.datatype),
            )
        return frozenset({declared})
    hits = {dt for dt in ALL_DATATYPES if _GRAMMAR[dt](literal.lexical)}
    closed = set()
    for dt in hits:
        closed |= ancestors(dt)
    return frozenset(closed)


# --- value space ------------------------------------------------------------

def _parse_numeric(lexical: str) -> Fraction | None:
    if _valid_rational(lexical):
        num, _, den = lexical.partition("/")
        return Fraction(int(num), int(den))
    m = _DECIMAL_re.match(lexical)
    if not m:
        return None
    sign = -1 if lexical.lstrip().startswith("-") else 1
    body = lexical.lstrip("+-")
    whole, _, frac = body.partition(".")
    scaled = int((whole or "0") + frac) if (whole or frac) else 0
    return Fraction(sign * scaled, 10 ** len(frac))


def literal_value(dt: Iri, literal: Literal):
    """The literal's value in dt's value space; IncomparableLiterals if none.

    Numeric datatypes yield a Fraction, temporal ones an (instant, has_tz)
    pair whose first component orders instants (timezone-less forms as UTC).
    """
    if dt in _NUMERIC:
        value = _parse_numeric(literal.lexical)
        if value is None:
            raise IncomparableLiterals(
                "%r has no value in %s" % (literal.lexical, dt.value)
            )
        return value
    if dt in _TEMPORAL:
        parsed = _parse_datetime(literal.lexical)
        if parsed is None:
            raise IncomparableLiterals(
                "%r has no value in %s" % (literal.lexical, dt.value)
            )
        return parsed
    raise IncomparableLiterals("no ordering defined for %s" % dt.value)


def value_compare(
    a: Literal, b: Literal, dt: Iri, diagnostics: Diagnostics | None = None
) -> int:
    """-1 / 0 / 1 for a < b / a == b / a > b in dt's value space."""
    if dt not in GT_DATATYPES:
        raise IncomparableLiterals("no ordering defined for %s" % dt.value)
    va, vb = literal_value(dt, a), literal_value(dt, b)
    if dt in _TEMPORAL:
        (ia, tza), (ib, tzb) = va, vb
        if tza != tzb:
            warn(
                diagnostics,
                "mixed-timezone-comparison",
                "%r vs %r" % (a.lexical, b.lexical),
            )
        va, vb = ia, ib
    return (va > vb) - (va < vb)


@dataclass
class DatatypeStats:
    """Per-datatype accumulator used while scanning a scope's literals."""

    support: Fraction = Fraction(0)
    proof: set = field(default_factory=set)
    minimum: Literal | None = None
    maximum: Literal | None = None
