"""Working-ontology store: subclass axioms, structural coverage checks,
and accept/export plumbing.

Coverage ("is this mined pattern already implied?") is decided by sound
but deliberately incomplete structural rules — no description-logic
reasoner is embedded. An incomplete filter only means some already-implied
patterns still reach the reviewer, never that new ones are hidden.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import patterns, turtle
from .errors import DuplicateAxiom, ParseError, UnsupportedConstruct
from .patterns import And, AndRange, NamedClass, Pattern, SomeData, SomeObject
from .terms import RDFS_SUBCLASSOF, WELL_KNOWN_PREFIXES, Iri, PrefixMap, Triple

Axiom = tuple[Iri, Pattern]


@dataclass
class OntologyStore:
    axioms: set[Axiom] = field(default_factory=set)
    # reflexive-transitive superclass closure over the named-class axioms
    _closure: dict[Iri, frozenset[Iri]] = field(default_factory=dict)

    def superclasses(self, class_iri: Iri) -> frozenset[Iri]:
        return self._closure.get(class_iri, frozenset((class_iri,)))

    def _recompute(self):
        direct: dict[Iri, set[Iri]] = {}
        for subclass, pattern in self.axioms:
            if isinstance(pattern, NamedClass):
                direct.setdefault(subclass, set()).add(pattern.iri)
        closure: dict[Iri, frozenset[Iri]] = {}

        def walk(node: Iri, path: frozenset) -> frozenset[Iri]:
            if node in closure:
                return closure[node]
            if node in path:  # cycle: equivalent classes, close over the loop
                return frozenset((node,))
            reached = {node}
            for parent in direct.get(node, ()):
                reached |= walk(parent, path | {node})
            result = frozenset(reached)
            if not (path & reached):
                closure[node] = result
            return result

        for node in direct:
            walk(node, frozenset())
        self._closure = closure

    def covers(self, target: Iri, pattern: Pattern) -> bool:
        """True when the structural rules derive target ⊑ pattern."""
        if isinstance(pattern, NamedClass) and pattern.iri in self.superclasses(target):
            return True
        for asserted_sub, asserted_super in self.axioms:
            if asserted_sub in self.superclasses(target) and _subsumed_by(
                asserted_super, pattern, self
            ):
                return True
        return False

    def accept(self, target: Iri, pattern: Pattern) -> Axiom:
        axiom = (target, patterns.canonicalize(pattern))
        if axiom in self.axioms:
            raise DuplicateAxiom("%s already subsumed by this exact pattern" % target.value)
        self.axioms.add(axiom)
        if isinstance(axiom[1], NamedClass):
            self._recompute()
        return axiom


def _subsumed_by(lower: Pattern, upper: Pattern, store: OntologyStore) -> bool:
    """Structural lower ⊑ upper: every upper conjunct generalizes some
    lower conjunct."""
    if lower == upper:
        return True
    lower_parts = _conjunct_list(lower)
    return all(
        any(_generalizes(u, l, store) for l in lower_parts)
        for u in _conjunct_list(upper)
    )


def _conjunct_list(p):
    if isinstance(p, (And, AndRange)):
        return list(p.operands)
    return [p]


def _generalizes(upper, lower, store: OntologyStore) -> bool:
    if upper == lower:
        return True
    if isinstance(upper, NamedClass) and isinstance(lower, NamedClass):
        return upper.iri in store.superclasses(lower.iri)
    if isinstance(upper, SomeObject) and isinstance(lower, SomeObject):
        return upper.prop == lower.prop and _subsumed_by(lower.filler, upper.filler, store)
    if isinstance(upper, SomeData) and isinstance(lower, SomeData):
        return upper.prop == lower.prop and _subsumed_by(lower.range, upper.range, store)
    return False


_MANCHESTER_LINE_re = re.compile(r"\A\s*(\S+)\s+SubClassOf:\s+(.*\S)\s*\Z")
_PREFIX_LINE_re = re.compile(r"\A\s*Prefix:\s+(\w*):\s+<([^<>\s]*)>\s*\Z")


def load_ontology(path) -> OntologyStore:
    """Read either Turtle (`rdfs:subClassOf` triples) or the line-oriented
    axiom list this module exports. The sniff: axiom lists contain a
    `SubClassOf:` or `Prefix:` line before anything Turtle would."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    stripped = [
        line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")
    ]
    if any("SubClassOf:" in line or _PREFIX_LINE_re.match(line) for line in stripped):
        return _load_axiom_list(stripped)
    store = OntologyStore()
    for triple in turtle.parse_turtle(text).triples:
        if triple.predicate == RDFS_SUBCLASSOF and isinstance(triple.subject, Iri) \
                and isinstance(triple.object, Iri):
            store.axioms.add((triple.subject, NamedClass(triple.object)))
    store._recompute()
    return store


def _load_axiom_list(lines) -> OntologyStore:
    prefixes = PrefixMap()
    prefixes.update(WELL_KNOWN_PREFIXES)
    store = OntologyStore()
    for number, line in enumerate(lines, start=1):
        prefix_match = _PREFIX_LINE_re.match(line)
        if prefix_match:
            prefixes.bind(prefix_match.group(1), prefix_match.group(2))
            continue
        axiom_match = _MANCHESTER_LINE_re.match(line)
        if not axiom_match:
            raise ParseError("neither a Prefix: line nor an axiom: %r" % line.strip(), number)
        subject = _parse_class_iri(axiom_match.group(1), prefixes, number)
        try:
            pattern = patterns.parse(axiom_match.group(2), prefixes)
        except ParseError as exc:
            raise ParseError("bad pattern: %s" % exc, number) from exc
        store.axioms.add((subject, pattern))
    store._recompute()
    return store


def _parse_class_iri(token: str, prefixes: PrefixMap, line: int) -> Iri:
    if token.startswith("<") and token.endswith(">"):
        return Iri(token[1:-1])
    try:
        return Iri(prefixes.expand(token))
    except (KeyError, ValueError) as exc:
        raise ParseError("cannot resolve class %r: %s" % (token, exc), line) from exc


@dataclass(frozen=True)
class ExportDocument:
    text: str
    # axioms a triple-based export cannot carry, rendered as axiom lines
    companion: str | None = None


def _sorted_axioms(store: OntologyStore):
    return sorted(store.axioms, key=lambda a: (a[0].value, patterns.canonical_key(a[1])))


def export_ontology(store: OntologyStore, fmt: str,
                    prefixes: PrefixMap | None = None) -> ExportDocument:
    prefixes = prefixes or PrefixMap()
    if fmt == "manchester-list":
        lines = [
            "Prefix: %s: <%s>" % (name, ns) for name, ns in sorted(prefixes.items())
        ]
        lines += [
            "%s SubClassOf: %s" % (_iri_text(s, prefixes), patterns.serialize(p, prefixes))
            for s, p in _sorted_axioms(store)
        ]
        return ExportDocument("\n".join(lines) + ("\n" if lines else ""))
    if fmt == "turtle-subclassof":
        triples = []
        leftover = []
        for subject, pattern in _sorted_axioms(store):
            if isinstance(pattern, NamedClass):
                triples.append(Triple(subject, RDFS_SUBCLASSOF, pattern.iri))
            else:
                leftover.append("%s SubClassOf: %s"
                                % (_iri_text(subject, prefixes), patterns.serialize(pattern, prefixes)))
        rdfs_prefixes = PrefixMap()
        rdfs_prefixes.update(prefixes)
        rdfs_prefixes.bind("rdfs", "http://www.w3.org/2000/01/rdf-schema#")
        text = turtle.write_turtle(triples, rdfs_prefixes)
        if leftover:
            text += "".join("# beyond rdfs:subClassOf: %s\n" % line for line in leftover)
            return ExportDocument(text, "\n".join(leftover) + "\n")
        return ExportDocument(text)
    raise UnsupportedConstruct("unknown export format %r" % fmt)


def _iri_text(iri: Iri, prefixes: PrefixMap) -> str:
    short = prefixes.shrink(iri.value)
    return short if short is not None else "<%s>" % iri.value
