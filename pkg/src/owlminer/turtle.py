"""Small Turtle reader and writer.

Covers the fragment the package needs: prefix declarations, prefixed names,
IRIs, blank node labels, anonymous blank nodes `[...]`, collections
`(...)`, string literals with language tags or datatypes, numeric
shorthand, `a`, and `;` / `,` continuation.  No base IRIs, no triple-quoted
strings.  The writer emits a flat, deterministic serialization that the
reader round-trips.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .terms import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    XSD_NS,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    RdfTerm,
    Triple,
)

_INTEGER_re = re.compile(r"[+-]?\d+\Z")
_DECIMAL_re = re.compile(r"[+-]?\d*\.\d+\Z")
_PNAME_re = re.compile(r"([A-Za-z0-9_\-]*):([A-Za-z0-9_\-.%]*)\Z")
_LANG_re = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")
_UNESCAPES = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "r": "\r", "t": "\t"}


@dataclass
class ParsedGraph:
    triples: list[Triple] = field(default_factory=list)
    prefixes: PrefixMap = field(default_factory=PrefixMap)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.graph = ParsedGraph()
        self._blank_counter = 0

    # --- low-level ---------------------------------------------------------

    def _line(self) -> int:
        return self.text.count("\n", 0, self.pos) + 1

    def _error(self, message: str):
        raise ParseError(message, line=self._line())

    def _skip_ws(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == "#":
                end = self.text.find("\n", self.pos)
                self.pos = len(self.text) if end < 0 else end
            elif c.isspace():
                self.pos += 1
            else:
                return

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _take(self, token: str) -> bool:
        if self._peek() and self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def _expect(self, token: str):
        if not self._take(token):
            self._error("expected %r" % token)

    def _word(self) -> str:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and not (
            self.text[self.pos].isspace() or self.text[self.pos] in '<>"()[]{};,'
        ):
            self.pos += 1
        return self.text[start : self.pos]

    def _fresh_blank(self) -> BlankNode:
        self._blank_counter += 1
        return BlankNode("anon%d" % self._blank_counter)

    # --- terms -------------------------------------------------------------

    def _iriref(self) -> Iri:
        self._expect("<")
        end = self.text.find(">", self.pos)
        if end < 0:
            self._error("unterminated IRI")
        value = self.text[self.pos : end]
        self.pos = end + 1
        try:
            return Iri(value)
        except ValueError as exc:
            self._error(str(exc))

    def _string_body(self) -> str:
        quote = self.text[self.pos]
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.text):
                self._error("unterminated string")
            c = self.text[self.pos]
            if c == "\\":
                nxt = self.text[self.pos + 1 : self.pos + 2]
                if nxt == "u" or nxt == "U":
                    width = 4 if nxt == "u" else 8
                    hexpart = self.text[self.pos + 2 : self.pos + 2 + width]
                    if len(hexpart) < width:
                        self._error("bad unicode escape")
                    out.append(chr(int(hexpart, 16)))
                    self.pos += 2 + width
                    continue
                if nxt not in _UNESCAPES:
                    self._error("bad escape \\%s" % nxt)
                out.append(_UNESCAPES[nxt])
                self.pos += 2
                continue
            if c == quote:
                self.pos += 1
                return "".join(out)
            if c == "\n":
                self._error("newline in string")
            out.append(c)
            self.pos += 1

    def _literal(self) -> Literal:
        lexical = self._string_body()
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            if self.text.startswith("<", self.pos):
                dt = self._iriref()
            else:
                dt = self._pname(self._word())
            return Literal(lexical, datatype=dt.value)
        m = _LANG_re.match(self.text, self.pos)
        if self.text.startswith("@", self.pos):
            if not m:
                self._error("bad language tag")
            self.pos = m.end()
            return Literal(lexical, language=m.group(1))
        return Literal(lexical)

    def _pname(self, word: str) -> Iri:
        m = _PNAME_re.match(word)
        if not m:
            self._error("not a prefixed name: %r" % word)
        try:
            return Iri(self.graph.prefixes.expand(word))
        except KeyError:
            self._error("unknown prefix %r" % m.group(1))

    def _term(self, as_subject=False) -> RdfTerm:
        c = self._peek()
        if c == "<":
            return self._iriref()
        if c == "[":
            self._expect("[")
            node = self._fresh_blank()
            if self._peek() != "]":
                self._predicate_object_list(node)
            self._expect("]")
            return node
        if c == "(":
            self._expect("(")
            items = []
            while self._peek() != ")":
                if not self._peek():
                    self._error("unterminated collection")
                items.append(self._term())
            self._expect(")")
            return self._collection(items)
        if c in "\"'":
            if as_subject:
                self._error("literal cannot be a subject")
            return self._literal()
        word = self._word()
        if not word:
            self._error("expected a term")
        if word.startswith("_:"):
            return BlankNode(word[2:])
        if not as_subject:
            if _INTEGER_re.match(word):
                return Literal(word, datatype=XSD_NS + "integer")
            if _DECIMAL_re.match(word):
                return Literal(word, datatype=XSD_NS + "decimal")
            if word in ("true", "false"):
                return Literal(word, datatype=XSD_NS + "boolean")
        return self._pname(word)

    def _collection(self, items: list[RdfTerm]) -> RdfTerm:
        head: RdfTerm = RDF_NIL
        for item in reversed(items):
            node = self._fresh_blank()
            self.graph.triples.append(Triple(node, RDF_FIRST, item))
            self.graph.triples.append(Triple(node, RDF_REST, head))
            head = node
        return head

    # --- statements --------------------------------------------------------

    def _predicate_object_list(self, subject: RdfTerm):
        while True:
            c = self._peek()
            if c == "<":
                predicate = self._iriref()
            else:
                word = self._word()
                if word == "a":
                    predicate = RDF_TYPE
                else:
                    predicate = self._pname(word)
            while True:
                obj = self._term()
                self.graph.triples.append(Triple(subject, predicate, obj))
                if not self._take(","):
                    break
            if not self._take(";"):
                return
            # tolerate trailing ';' before '.' or ']'
            if self._peek() in (".", "]", ""):
                return

    def parse(self) -> ParsedGraph:
        while True:
            c = self._peek()
            if not c:
                return self.graph
            if c == "@" or self.text[self.pos : self.pos + 7].upper() == "PREFIX ":
                at_form = c == "@"
                self.pos += 7 if not at_form else len("@prefix")
                word = self._word()
                if not word.endswith(":"):
                    self._error("bad prefix declaration")
                ns = self._iriref()
                self.graph.prefixes.bind(word[:-1], ns.value)
                if at_form:
                    self._expect(".")
                continue
            subject = self._term(as_subject=True)
            self._predicate_object_list(subject)
            self._expect(".")


def parse_turtle(text: str) -> ParsedGraph:
    return _Reader(text).parse()


def load_turtle(path: str) -> ParsedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return _Reader(fh.read()).parse()


# --- writing ---------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}

# literals whose lexical form is itself a Turtle token need no quoting
_NUMERIC_SHORTHAND = {
    XSD_NS + "integer": re.compile(r"[+-]?[0-9]+\Z"),
    XSD_NS + "decimal": re.compile(r"[+-]?[0-9]*\.[0-9]+\Z"),
    XSD_NS + "boolean": re.compile(r"(true|false)\Z"),
}


def term_text(term: RdfTerm, prefixes: PrefixMap | None = None) -> str:
    prefixes = prefixes or PrefixMap()
    if isinstance(term, Iri):
        short = prefixes.shrink(term.value)
        return short if short is not None else "<%s>" % term.value
    if isinstance(term, BlankNode):
        return "_:%s" % term.label
    if term.datatype and not term.language:
        short = _NUMERIC_SHORTHAND.get(term.datatype)
        if short is not None and short.match(term.lexical):
            return term.lexical  # integer/decimal/boolean tokens round-trip
    out = '"%s"' % "".join(_ESCAPES.get(c, c) for c in term.lexical)
    if term.language:
        return out + "@" + term.language
    if term.datatype:
        dt = prefixes.shrink(term.datatype)
        return out + "^^" + (dt if dt is not None else "<%s>" % term.datatype)
    return out


def write_turtle(triples, prefixes: PrefixMap | None = None) -> str:
    """Deterministic flat serialization grouping consecutive same-subject triples."""
    prefixes = prefixes or PrefixMap()
    lines = [
        "@prefix %s: <%s> ." % (p, ns)
        for p, ns in sorted(prefixes.items())
    ]
    if lines:
        lines.append("")
    triples = list(triples)
    i = 0
    while i < len(triples):
        subject = triples[i].subject
        group = []
        while i < len(triples) and triples[i].subject == subject:
            group.append(triples[i])
            i += 1
        head = term_text(subject, prefixes)
        parts = []
        j = 0
        while j < len(group):
            predicate = group[j].predicate
            objs = []
            while j < len(group) and group[j].predicate == predicate:
                objs.append(term_text(group[j].object, prefixes))
                j += 1
            ptext = "a" if predicate == RDF_TYPE else term_text(predicate, prefixes)
            parts.append("%s %s" % (ptext, ", ".join(objs)))
        lines.append("%s %s ." % (head, " ;\n    ".join(parts)))
    return "\n".join(lines) + "\n"
