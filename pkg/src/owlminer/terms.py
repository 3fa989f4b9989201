"""RDF terms, triples and prefix handling shared across the package.

Terms are immutable and hashable so they can serve as keys in the
three-level index and as members of proof sets.  Blank nodes are opaque
identifiers: equal label means equal node, nothing else is assumed.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

_SCHEME_re = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not _SCHEME_re.match(self.value):
            raise ValueError("IRI must be absolute (missing scheme): %r" % self.value)

    def __repr__(self):
        return "Iri(%s)" % self.value


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __repr__(self):
        return "BlankNode(%s)" % self.label


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("literal cannot carry both a datatype and a language tag")

    def __repr__(self):
        if self.datatype:
            return "Literal(%r^^%s)" % (self.lexical, self.datatype)
        if self.language:
            return "Literal(%r@%s)" % (self.lexical, self.language)
        return "Literal(%r)" % self.lexical


RdfTerm = Iri | BlankNode | Literal


@dataclass(frozen=True)
class Triple:
    subject: RdfTerm
    predicate: Iri
    object: RdfTerm

    def __post_init__(self):
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")


def term_sort_key(term: RdfTerm) -> tuple:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, Iri):
        return (0, term.value, "", "")
    if isinstance(term, BlankNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype or "", term.language or "")


RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
SHACL_NS = "http://www.w3.org/ns/shacl#"

RDF_TYPE = Iri(RDF_NS + "type")
RDF_FIRST = Iri(RDF_NS + "first")
RDF_REST = Iri(RDF_NS + "rest")
RDF_NIL = Iri(RDF_NS + "nil")
RDFS_SUBCLASSOF = Iri(RDFS_NS + "subClassOf")

WELL_KNOWN_PREFIXES = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
    "owl": OWL_NS,
    "sh": SHACL_NS,
}

# Local names valid in a prefixed name. Turtle/SPARQL allow a leading digit
# (dbc:1937_novels) but not a trailing dot.
_LOCAL_re = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


class PrefixMap:
    """Bidirectional prefix <-> namespace table for serialization."""

    def __init__(self, mapping: dict[str, str] | None = None):
        self._by_prefix: dict[str, str] = dict(mapping or {})

    @classmethod
    def from_json_file(cls, path: str) -> "PrefixMap":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()
        ):
            raise ValueError("prefix map file must be a JSON object of prefix -> namespace")
        return cls(data)

    def bind(self, prefix: str, namespace: str):
        self._by_prefix[prefix] = namespace

    def update(self, other: "PrefixMap | dict[str, str]"):
        if isinstance(other, PrefixMap):
            self._by_prefix.update(other._by_prefix)
        else:
            self._by_prefix.update(other)

    def items(self):
        return self._by_prefix.items()

    def expand(self, qname: str) -> str:
        prefix, _, local = qname.partition(":")
        if prefix not in self._by_prefix:
            raise KeyError("unknown prefix %r" % prefix)
        return self._by_prefix[prefix] + local

    def shrink(self, iri: str) -> str | None:
        """Longest-namespace match, or None if no prefix yields a clean local name."""
        best = None
        for prefix, ns in self._by_prefix.items():
            if iri.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (prefix, ns)
        if best is None:
            return None
        local = iri[len(best[1]):]
        if local and not _LOCAL_re.match(local):
            return None
        if local.endswith("."):
            return None
        return "%s:%s" % (best[0], local)
