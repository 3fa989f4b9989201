"""Reference matcher and brute-force pattern enumeration over a local graph.

`matches` decides whether a term satisfies a pattern by direct graph lookups
— no index, no incremental statistics.  `enumerate_shallowest_frequent`
derives the complete frequent-pattern set for a scope by generating every
candidate the vocabulary allows and scoring each one through `matches`; the
miner must produce exactly the same set, so this module doubles as its test
oracle.  Both follow the same two rules the miner uses: a predicate only
recurses when none of its flat patterns is frequent, and recursion stops
when a deeper pattern could no longer fit the depth limit.

Datatype membership is decided by the literal's datatype assignment
(declared type for typed literals, accepting grammars for untyped ones),
keeping the matcher, the miner and this enumeration mutually consistent.
"""
from __future__ import annotations

from fractions import Fraction

from . import datatypes
from .diagnostics import Diagnostics
from .errors import (
    CombinatorialBudgetExceeded,
    IncomparableLiterals,
    ProofVerificationFailed,
)
from .model import MinedPattern, Weighting
from .patterns import (
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
    is_range,
)
from .terms import RDF_TYPE, BlankNode, Iri, Literal, RdfTerm, Triple, term_sort_key


class LocalGraph:
    """In-memory triple set with by-subject access."""

    def __init__(self, triples=()):
        self.triples: set[Triple] = set()
        self._by_subject: dict[RdfTerm, list[Triple]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple):
        if triple not in self.triples:
            self.triples.add(triple)
            self._by_subject.setdefault(triple.subject, []).append(triple)

    def __len__(self):
        return len(self.triples)

    def __contains__(self, triple: Triple):
        return triple in self.triples

    def subject_triples(self, subject: RdfTerm) -> list[Triple]:
        return self._by_subject.get(subject, [])

    def objects_of(self, subject: RdfTerm, predicate: Iri) -> list[RdfTerm]:
        return [t.object for t in self.subject_triples(subject) if t.predicate == predicate]

    def triples_for(self, subjects) -> list[Triple]:
        """All triples whose subject is in `subjects`, deterministically ordered."""
        out = []
        for s in sorted(subjects, key=term_sort_key):
            out.extend(
                sorted(
                    self.subject_triples(s),
                    key=lambda t: (term_sort_key(t.predicate), term_sort_key(t.object)),
                )
            )
        return out


def _literal_in_range(term: RdfTerm, dt: Iri) -> bool:
    return isinstance(term, Literal) and dt in datatypes.candidate_datatypes(term)


def matches(graph: LocalGraph, term: RdfTerm, pattern) -> bool:
    """Does `term` satisfy `pattern` in `graph`?"""
    if isinstance(pattern, NamedClass):
        return Triple(term, RDF_TYPE, pattern.iri) in graph
    if isinstance(pattern, (And, AndRange)):
        return all(matches(graph, term, op) for op in pattern.operands)
    if isinstance(pattern, Enum):
        return term == pattern.term
    if isinstance(pattern, EnumLiteral):
        return term == pattern.literal
    if isinstance(pattern, SomeObject):
        return any(matches(graph, o, pattern.filler) for o in graph.objects_of(term, pattern.prop))
    if isinstance(pattern, SomeData):
        return any(matches(graph, o, pattern.range) for o in graph.objects_of(term, pattern.prop))
    if isinstance(pattern, ValueObject):
        return Triple(term, pattern.prop, pattern.individual) in graph
    if isinstance(pattern, ValueData):
        return Triple(term, pattern.prop, pattern.literal) in graph
    if isinstance(pattern, SelfRestriction):
        return Triple(term, pattern.prop, term) in graph
    if isinstance(pattern, Datatype):
        return _literal_in_range(term, pattern.dt)
    if isinstance(pattern, (MinInclusive, MaxInclusive)):
        if not _literal_in_range(term, pattern.dt):
            return False
        try:
            cmp = datatypes.value_compare(term, pattern.bound, pattern.dt)
        except IncomparableLiterals:
            return False
        return cmp >= 0 if isinstance(pattern, MinInclusive) else cmp <= 0
    raise TypeError("not a pattern: %r" % (pattern,))


def matching_terms(graph: LocalGraph, pattern, scope) -> frozenset:
    return frozenset(t for t in scope if matches(graph, t, pattern))


def support_of(
    graph: LocalGraph, pattern, weighting: Weighting, scope=None
) -> Fraction:
    """Summed weight of the scope terms matching the pattern."""
    if scope is None:
        scope = weighting.terms()
    return weighting.support_of(matching_terms(graph, pattern, scope))


def verify_proof_sets(graph: LocalGraph, mined, diagnostics: Diagnostics | None = None):
    """Raise ProofVerificationFailed unless every proof member matches."""
    for item in mined:
        for term in item.proof_set:
            if not matches(graph, term, item.pattern):
                raise ProofVerificationFailed(
                    "%r does not match %s" % (term, canonical_key(item.pattern).decode())
                )


# --- exhaustive enumeration -------------------------------------------------

def _closed_conjunctions(found: list[tuple]) -> list[tuple]:
    """Merge entries with identical proof sets into one conjunction."""
    groups: dict[tuple, list] = {}
    for expr, proof, support in found:
        groups.setdefault((is_range(expr), proof), []).append((expr, support))
    merged = []
    for (_, proof), members in groups.items():
        exprs = [e for e, _ in members]
        support = members[0][1]
        if len(exprs) == 1:
            merged.append((canonicalize(exprs[0]), proof, support))
        elif is_range(exprs[0]):
            merged.append((canonicalize(AndRange(tuple(exprs))), proof, support))
        else:
            merged.append((canonicalize(And(tuple(exprs))), proof, support))
    merged.sort(key=lambda item: canonical_key(item[0]))
    return merged


def _datatype_candidates(graph, literals, weighting, min_support, diagnostics):
    """Per-datatype range candidates with observed min/max bounds."""
    out = []
    ordered = sorted(literals, key=term_sort_key)
    for dt in sorted(datatypes.ALL_DATATYPES, key=term_sort_key):
        proof = frozenset(l for l in ordered if matches(graph, l, Datatype(dt)))
        if not proof:
            continue
        support = weighting.support_of(proof)
        if support < min_support:
            continue
        lower = upper = None
        if dt in datatypes.GT_DATATYPES:
            for lit in ordered:
                if lit not in proof:
                    continue
                try:
                    if lower is None or datatypes.value_compare(lit, lower, dt, diagnostics) < 0:
                        lower = lit
                    if dt in datatypes.LT_DATATYPES and (
                        upper is None or datatypes.value_compare(lit, upper, dt, diagnostics) > 0
                    ):
                        upper = lit
                except IncomparableLiterals:
                    continue
        parts = [Datatype(dt)]
        if lower is not None:
            parts.append(MinInclusive(dt, lower))
        if upper is not None:
            parts.append(MaxInclusive(dt, upper))
        expr = parts[0] if len(parts) == 1 else AndRange(tuple(parts))
        out.append((expr, proof, support))
    return out


def enumerate_shallowest_frequent(
    graph: LocalGraph,
    uris: set,
    literals: set,
    weighting: Weighting,
    min_support: Fraction,
    max_depth: int,
    *,
    level: int = 0,
    candidate_cap: int = 100000,
    diagnostics: Diagnostics | None = None,
) -> list[MinedPattern]:
    """All shallowest frequent patterns for the scope, closed under
    proof-set-equal conjunction, in canonical order."""
    scope = set(uris) | set(literals)
    found: list[tuple] = []
    candidates_seen = 0

    def _spend(n=1):
        nonlocal candidates_seen
        candidates_seen += n
        if candidates_seen > candidate_cap:
            raise CombinatorialBudgetExceeded(
                "%d candidates exceed the cap of %d" % (candidates_seen, candidate_cap)
            )

    def _frequent(expr, pool):
        _spend()
        proof = matching_terms(graph, expr, pool)
        support = weighting.support_of(proof)
        if proof and support >= min_support:
            found.append((expr, proof, support))
            return True
        return False

    # scope-wide candidates: enumerations and datatype ranges
    for term in sorted(uris, key=term_sort_key):
        if not isinstance(term, BlankNode):
            _frequent(Enum(term), scope)
    for lit in sorted(literals, key=term_sort_key):
        _frequent(EnumLiteral(lit), scope)
    dt_candidates = _datatype_candidates(graph, literals, weighting, min_support, diagnostics)
    _spend(len(datatypes.ALL_DATATYPES))
    found.extend(dt_candidates)

    predicates = sorted(
        {t.predicate for s in uris for t in graph.subject_triples(s)},
        key=term_sort_key,
    )
    for p in predicates:
        carriers = frozenset(s for s in uris if graph.objects_of(s, p))
        if weighting.support_of(carriers) < min_support:
            continue  # a pruned predicate cannot carry any frequent pattern
        flat_found = False
        if p == RDF_TYPE:
            classes = sorted(
                {o for s in uris for o in graph.objects_of(s, p) if isinstance(o, Iri)},
                key=term_sort_key,
            )
            for cls in classes:
                flat_found |= _frequent(NamedClass(cls), uris)
        else:
            objects = sorted(
                {o for s in uris for o in graph.objects_of(s, p)}, key=term_sort_key
            )
            for o in objects:
                if isinstance(o, BlankNode):
                    continue
                if isinstance(o, Literal):
                    flat_found |= _frequent(ValueData(p, o), uris)
                else:
                    flat_found |= _frequent(ValueObject(p, o), uris)
            flat_found |= _frequent(SelfRestriction(p), uris)
        if flat_found or level + 2 > max_depth:
            continue

        # weight redistribution into the predicate's objects, then recurse
        new_weights: dict[RdfTerm, Fraction] = {}
        for s in sorted(uris, key=term_sort_key):
            objs = set(graph.objects_of(s, p))
            if not objs:
                continue
            share = weighting[s] / len(objs)
            for o in objs:
                if isinstance(o, BlankNode):
                    continue
                new_weights[o] = new_weights.get(o, Fraction(0)) + share
        if not new_weights:
            continue
        sub_uris = {o for o in new_weights if isinstance(o, Iri)}
        sub_literals = {o for o in new_weights if isinstance(o, Literal)}
        deeper = enumerate_shallowest_frequent(
            graph,
            sub_uris,
            sub_literals,
            Weighting(new_weights),
            min_support,
            max_depth,
            level=level + 1,
            candidate_cap=candidate_cap - candidates_seen,
            diagnostics=diagnostics,
        )
        for item in deeper:
            wrapped = (
                SomeData(p, item.pattern)
                if is_range(item.pattern)
                else SomeObject(p, item.pattern)
            )
            back = frozenset(
                s
                for s in uris
                if any(o in item.proof_set for o in graph.objects_of(s, p))
            )
            found.append((wrapped, back, weighting.support_of(back)))

    return [
        MinedPattern(expr, proof, support)
        for expr, proof, support in _closed_conjunctions(found)
    ]
