"""Class-expression and data-range AST with its text syntax.

The text syntax is Manchester-style: `dbo:Book and dbp:language value
"English"`, `dct:subject some skos:Concept`, `xsd:decimal[<= "5"]`.
`serialize` and `parse` round-trip canonical forms: parse(serialize(p))
equals canonicalize(p).

Canonical form flattens nested conjunctions, removes duplicate conjuncts and
orders conjuncts by the byte-wise lexicographic order of their prefix-free
serialization, so structurally equal patterns compare equal with `==`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import datatypes
from .errors import ParseError
from .terms import Iri, Literal, PrefixMap, RdfTerm


@dataclass(frozen=True)
class NamedClass:
    iri: Iri


@dataclass(frozen=True)
class And:
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("conjunction needs at least two operands")


@dataclass(frozen=True)
class Enum:
    term: RdfTerm


@dataclass(frozen=True)
class SomeObject:
    prop: Iri
    filler: "Pattern"


@dataclass(frozen=True)
class ValueObject:
    prop: Iri
    individual: Iri


@dataclass(frozen=True)
class SelfRestriction:
    prop: Iri


@dataclass(frozen=True)
class SomeData:
    prop: Iri
    range: "DataRange"


@dataclass(frozen=True)
class ValueData:
    prop: Iri
    literal: Literal


@dataclass(frozen=True)
class Datatype:
    dt: Iri


@dataclass(frozen=True)
class AndRange:
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("conjunction needs at least two operands")


@dataclass(frozen=True)
class EnumLiteral:
    literal: Literal


@dataclass(frozen=True)
class MinInclusive:
    dt: Iri
    bound: Literal


@dataclass(frozen=True)
class MaxInclusive:
    dt: Iri
    bound: Literal


Pattern = NamedClass | And | Enum | SomeObject | ValueObject | SelfRestriction | SomeData | ValueData
DataRange = Datatype | AndRange | EnumLiteral | MinInclusive | MaxInclusive

_RANGE_KINDS = (Datatype, AndRange, EnumLiteral, MinInclusive, MaxInclusive)


def is_range(x) -> bool:
    return isinstance(x, _RANGE_KINDS)


def depth(x) -> int:
    """Nesting depth: 1 for flat constructs, +1 per `some`."""
    if isinstance(x, (And, AndRange)):
        return max(depth(op) for op in x.operands)
    if isinstance(x, SomeObject):
        return 1 + depth(x.filler)
    if isinstance(x, SomeData):
        return 1 + depth(x.range)
    return 1


def conjuncts(x) -> tuple:
    """Top-level conjuncts of a pattern (itself when not a conjunction)."""
    if isinstance(x, (And, AndRange)):
        return x.operands
    return (x,)


# --- serialization ----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
_BARE_BOUND_re = re.compile(r'[^\s()\[\]{}"<>]+\Z')


def _iri_text(iri: Iri, prefixes: PrefixMap | None) -> str:
    if prefixes is not None:
        short = prefixes.shrink(iri.value)
        if short is not None:
            return short
    return "<%s>" % iri.value


def _escape(s: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in s)


def literal_text(lit: Literal, prefixes: PrefixMap | None = None) -> str:
    out = '"%s"' % _escape(lit.lexical)
    if lit.language is not None:
        return out + "@" + lit.language
    if lit.datatype is not None:
        return out + "^^" + _iri_text(Iri(lit.datatype), prefixes)
    return out


def _term_text(term: RdfTerm, prefixes: PrefixMap | None) -> str:
    if isinstance(term, Iri):
        return _iri_text(term, prefixes)
    if isinstance(term, Literal):
        return literal_text(term, prefixes)
    raise ValueError("blank nodes have no expression syntax")


def _bound_text(bound: Literal, prefixes: PrefixMap | None) -> str:
    if (
        bound.datatype is None
        and bound.language is None
        and _BARE_BOUND_re.match(bound.lexical)
    ):
        return bound.lexical
    return literal_text(bound, prefixes)


def _atomic(x) -> bool:
    return isinstance(x, (NamedClass, Enum, Datatype, EnumLiteral, MinInclusive, MaxInclusive))


def serialize(x, prefixes: PrefixMap | None = None) -> str:
    if isinstance(x, NamedClass):
        return _iri_text(x.iri, prefixes)
    if isinstance(x, Datatype):
        return _iri_text(x.dt, prefixes)
    if isinstance(x, (And, AndRange)):
        parts = []
        for op in x.operands:
            text = serialize(op, prefixes)
            if isinstance(op, (And, AndRange)):
                text = "(%s)" % text
            parts.append(text)
        return " and ".join(parts)
    if isinstance(x, Enum):
        return "{%s}" % _term_text(x.term, prefixes)
    if isinstance(x, EnumLiteral):
        return "{%s}" % literal_text(x.literal, prefixes)
    if isinstance(x, SomeObject):
        filler = serialize(x.filler, prefixes)
        if not _atomic(x.filler):
            filler = "(%s)" % filler
        return "%s some %s" % (_iri_text(x.prop, prefixes), filler)
    if isinstance(x, SomeData):
        body = serialize(x.range, prefixes)
        if not _atomic(x.range):
            body = "(%s)" % body
        return "%s some %s" % (_iri_text(x.prop, prefixes), body)
    if isinstance(x, ValueObject):
        return "%s value %s" % (_iri_text(x.prop, prefixes), _iri_text(x.individual, prefixes))
    if isinstance(x, ValueData):
        return "%s value %s" % (_iri_text(x.prop, prefixes), literal_text(x.literal, prefixes))
    if isinstance(x, SelfRestriction):
        return "%s Self" % _iri_text(x.prop, prefixes)
    if isinstance(x, MinInclusive):
        return "%s[>= %s]" % (_iri_text(x.dt, prefixes), _bound_text(x.bound, prefixes))
    if isinstance(x, MaxInclusive):
        return "%s[<= %s]" % (_iri_text(x.dt, prefixes), _bound_text(x.bound, prefixes))
    raise TypeError("not a pattern: %r" % (x,))


def canonical_key(x) -> bytes:
    return serialize(x, None).encode("utf-8")


def canonicalize(x):
    """Flatten, deduplicate and order conjunctions, recursively."""
    if isinstance(x, (And, AndRange)):
        flat = []
        for op in x.operands:
            op = canonicalize(op)
            flat.extend(conjuncts(op))
        flat.sort(key=canonical_key)
        unique = [flat[0]]
        for op in flat[1:]:
            if op != unique[-1]:
                unique.append(op)
        if len(unique) == 1:
            return unique[0]
        return type(x)(tuple(unique))
    if isinstance(x, SomeObject):
        return SomeObject(x.prop, canonicalize(x.filler))
    if isinstance(x, SomeData):
        return SomeData(x.prop, canonicalize(x.range))
    return x


# --- parsing ----------------------------------------------------------------

_KEYWORDS = {"and", "some", "value", "Self"}
_WORD_END = set(' \t\n\r()[]{}"<>')


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.items: list[tuple[str, object]] = []
        self._scan()
        self.index = 0

    def _error(self, message):
        raise ParseError("%s (at offset %d)" % (message, self.pos))

    def _scan(self):
        text, n = self.text, len(self.text)
        while self.pos < n:
            c = text[self.pos]
            if c.isspace():
                self.pos += 1
                continue
            if c in "()[]{}":
                self.items.append((c, c))
                self.pos += 1
                continue
            if text.startswith(">=", self.pos) or text.startswith("<=", self.pos):
                self.items.append((text[self.pos : self.pos + 2], None))
                self.pos += 2
                continue
            if c == "<":
                end = text.find(">", self.pos)
                if end < 0:
                    self._error("unterminated IRI")
                self.items.append(("iri", text[self.pos + 1 : end]))
                self.pos = end + 1
                continue
            if c == '"':
                self.items.append(("literal", self._scan_literal()))
                continue
            start = self.pos
            while self.pos < n and text[self.pos] not in _WORD_END:
                self.pos += 1
            word = text[start : self.pos]
            if word in _KEYWORDS:
                self.items.append((word, None))
            else:
                self.items.append(("word", word))
        self.items.append(("eof", None))

    def _scan_literal(self) -> Literal:
        text, n = self.text, len(self.text)
        self.pos += 1
        out = []
        while True:
            if self.pos >= n:
                self._error("unterminated string")
            c = text[self.pos]
            if c == "\\":
                if self.pos + 1 >= n or text[self.pos + 1] not in _UNESCAPES:
                    self._error("bad escape")
                out.append(_UNESCAPES[text[self.pos + 1]])
                self.pos += 2
                continue
            if c == '"':
                self.pos += 1
                break
            out.append(c)
            self.pos += 1
        lexical = "".join(out)
        if text.startswith("@", self.pos):
            m = re.match(r"@([A-Za-z][A-Za-z0-9\-]*)", text[self.pos :])
            if not m:
                self._error("bad language tag")
            self.pos += m.end()
            return Literal(lexical, language=m.group(1))
        if text.startswith("^^", self.pos):
            self.pos += 2
            if self.pos < n and text[self.pos] == "<":
                end = text.find(">", self.pos)
                if end < 0:
                    self._error("unterminated IRI")
                dt = text[self.pos + 1 : end]
                self.pos = end + 1
            else:
                start = self.pos
                while self.pos < n and text[self.pos] not in _WORD_END:
                    self.pos += 1
                dt = ("qname", text[start : self.pos])
            return Literal(lexical, datatype=dt)
        return Literal(lexical)

    def peek(self) -> str:
        return self.items[self.index][0]

    def next(self) -> tuple[str, object]:
        item = self.items[self.index]
        if self.index < len(self.items) - 1:  # never step past the eof sentinel
            self.index += 1
        return item

    def expect(self, kind: str):
        got, value = self.next()
        if got != kind:
            raise ParseError("expected %r, got %r" % (kind, got))
        return value


class _Parser:
    def __init__(self, text: str, prefixes: PrefixMap | None):
        self.tokens = _Tokens(text)
        self.prefixes = prefixes or PrefixMap()

    def _resolve(self, word: str) -> Iri:
        if ":" not in word:
            raise ParseError("expected an IRI or prefixed name, got %r" % word)
        try:
            return Iri(self.prefixes.expand(word))
        except KeyError:
            # a scheme-bearing absolute IRI written without angle brackets
            try:
                return Iri(word)
            except ValueError:
                raise ParseError("unknown prefix in %r" % word) from None

    def _fix_literal(self, lit: Literal) -> Literal:
        if isinstance(lit.datatype, tuple):
            return Literal(lit.lexical, datatype=self._resolve(lit.datatype[1]).value)
        return lit

    def parse(self):
        expr = self.parse_expression()
        if self.tokens.peek() != "eof":
            raise ParseError("trailing input after expression")
        return canonicalize(expr)

    def parse_expression(self):
        parts = [self.parse_primary()]
        while self.tokens.peek() == "and":
            self.tokens.next()
            parts.append(self.parse_primary())
        if len(parts) == 1:
            return parts[0]
        if all(is_range(p) for p in parts):
            return AndRange(tuple(parts))
        if not any(is_range(p) for p in parts):
            return And(tuple(parts))
        raise ParseError("cannot mix class expressions and data ranges in one conjunction")

    def parse_primary(self):
        kind, value = self.tokens.next()
        if kind == "(":
            inner = self.parse_expression()
            self.tokens.expect(")")
            return inner
        if kind == "{":
            inner_kind, inner = self.tokens.next()
            self.tokens.expect("}")
            if inner_kind == "literal":
                return EnumLiteral(self._fix_literal(inner))
            if inner_kind in ("word", "iri"):
                term = Iri(inner) if inner_kind == "iri" else self._resolve(inner)
                return Enum(term)
            raise ParseError("bad enumeration member")
        if kind in ("word", "iri"):
            iri = Iri(value) if kind == "iri" else self._resolve(value)
            return self._after_iri(iri)
        raise ParseError("unexpected token %r" % kind)

    def _after_iri(self, iri: Iri):
        nxt = self.tokens.peek()
        if nxt == "[":
            return self._restriction(iri)
        if nxt == "some":
            self.tokens.next()
            filler = self.parse_primary()
            if is_range(filler):
                return SomeData(iri, filler)
            return SomeObject(iri, filler)
        if nxt == "value":
            self.tokens.next()
            kind, value = self.tokens.next()
            if kind == "literal":
                return ValueData(iri, self._fix_literal(value))
            if kind in ("word", "iri"):
                obj = Iri(value) if kind == "iri" else self._resolve(value)
                return ValueObject(iri, obj)
            raise ParseError("bad value operand")
        if nxt == "Self":
            self.tokens.next()
            return SelfRestriction(iri)
        if iri in datatypes.ALL_DATATYPES:
            return Datatype(iri)
        return NamedClass(iri)

    def _restriction(self, dt: Iri):
        self.tokens.expect("[")
        op, _ = self.tokens.next()
        if op not in (">=", "<="):
            raise ParseError("expected >= or <= in datatype restriction")
        kind, value = self.tokens.next()
        if kind == "literal":
            bound = self._fix_literal(value)
        elif kind == "word":
            bound = Literal(value)
        else:
            raise ParseError("bad restriction bound")
        self.tokens.expect("]")
        if op == ">=":
            return MinInclusive(dt, bound)
        return MaxInclusive(dt, bound)


def parse(text: str, prefixes: PrefixMap | None = None):
    """Parse an expression; the result is canonical."""
    return _Parser(text, prefixes).parse()
