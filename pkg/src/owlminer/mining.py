"""The mining pipeline.

One pass works on a *scope*: a set of IRI subjects, a set of literals, a
weighting over both, and a recursion level.  The pass first mines
enumerations and datatype ranges from the scope itself, then fetches the
subjects' triples, indexes them, prunes infrequent predicates and walks the
survivors in lexicographic order.  A predicate that yields no flat pattern
and still has depth budget redistributes its subjects' weights onto its
objects and recurses.  Finally patterns with identical proof sets are merged
into one conjunction.

Everything is deterministic for a fixed input: iteration orders are sorted,
weights are exact fractions, and emitted patterns are canonical.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from . import datatypes
from .diagnostics import Diagnostics, warn
from .errors import EmptyTargetSet, FetchError, IncomparableLiterals
from .index import ThreeLevelIndex, build_index, prune_index
from .model import CancellationToken, MinedPattern, MinerConfig, Weighting
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

# fetch triples for a batch of subjects; raises FetchError when the source
# is unreachable or the query budget runs out
TripleFetcher = Callable[[list[RdfTerm]], list[Triple]]

ProgressCallback = Callable[[int, Iri, list], None]


@dataclass(frozen=True)
class MiningScope:
    uris: frozenset
    literals: frozenset
    weighting: Weighting
    level: int = 0


def _sorted_terms(terms) -> list:
    return sorted(terms, key=term_sort_key)


def _by_pattern_key(results: list[MinedPattern]) -> list[MinedPattern]:
    return sorted(results, key=lambda r: canonical_key(r.pattern))


def mine_enum(scope: MiningScope, min_support: Fraction) -> list[MinedPattern]:
    """Singleton enumerations for scope members heavy enough on their own."""
    out = []
    for term in _sorted_terms(scope.uris | scope.literals):
        if isinstance(term, BlankNode):
            continue
        weight = scope.weighting[term]
        if weight >= min_support:
            expr = EnumLiteral(term) if isinstance(term, Literal) else Enum(term)
            out.append(MinedPattern(expr, frozenset({term}), weight))
    return _by_pattern_key(out)


def mine_datatype(
    scope: MiningScope,
    min_support: Fraction,
    diagnostics: Diagnostics | None = None,
) -> list[MinedPattern]:
    """Datatype ranges over the scope's literals, with observed bounds."""
    stats: dict[Iri, datatypes.DatatypeStats] = {}
    for lit in _sorted_terms(scope.literals):
        weight = scope.weighting[lit]
        for dt in datatypes.candidate_datatypes(lit, diagnostics):
            if dt not in datatypes.PARENT and dt != datatypes.RDFS_LITERAL:
                warn(diagnostics, "unknown-datatype", dt.value)
                continue
            st = stats.setdefault(dt, datatypes.DatatypeStats())
            st.support += weight
            st.proof.add(lit)
            if dt in datatypes.GT_DATATYPES:
                try:
                    if st.minimum is None or datatypes.value_compare(
                        lit, st.minimum, dt, diagnostics
                    ) < 0:
                        st.minimum = lit
                    if dt in datatypes.LT_DATATYPES and (
                        st.maximum is None
                        or datatypes.value_compare(lit, st.maximum, dt, diagnostics) > 0
                    ):
                        st.maximum = lit
                except IncomparableLiterals:
                    warn(diagnostics, "unorderable-literal", lit.lexical)
    out = []
    for dt in sorted(stats, key=term_sort_key):
        st = stats[dt]
        if st.support < min_support:
            continue
        parts = [Datatype(dt)]
        if st.minimum is not None:
            parts.append(MinInclusive(dt, st.minimum))
        if st.maximum is not None:
            parts.append(MaxInclusive(dt, st.maximum))
        expr = parts[0] if len(parts) == 1 else AndRange(tuple(parts))
        out.append(MinedPattern(expr, frozenset(st.proof), st.support))
    return _by_pattern_key(out)


def mine_type(
    index: ThreeLevelIndex,
    scope: MiningScope,
    min_support: Fraction,
    diagnostics: Diagnostics | None = None,
) -> list[MinedPattern]:
    out = []
    objects = index.objects(RDF_TYPE)
    for obj in _sorted_terms(objects):
        if not isinstance(obj, Iri):
            warn(diagnostics, "non-iri-type-object", repr(obj))
            continue
        subjects = objects[obj]
        support = scope.weighting.support_of(subjects)
        if support >= min_support:
            out.append(MinedPattern(NamedClass(obj), frozenset(subjects), support))
    return _by_pattern_key(out)


def mine_value(
    index: ThreeLevelIndex,
    predicate: Iri,
    scope: MiningScope,
    min_support: Fraction,
    diagnostics: Diagnostics | None = None,
) -> list[MinedPattern]:
    out = []
    objects = index.objects(predicate)
    for obj in _sorted_terms(objects):
        if isinstance(obj, BlankNode):
            warn(diagnostics, "blank-value-object", predicate.value)
            continue
        subjects = objects[obj]
        support = scope.weighting.support_of(subjects)
        if support < min_support:
            continue
        if isinstance(obj, Literal):
            expr: object = ValueData(predicate, obj)
        else:
            expr = ValueObject(predicate, obj)
        out.append(MinedPattern(expr, frozenset(subjects), support))
    return _by_pattern_key(out)


def mine_self(
    index: ThreeLevelIndex, predicate: Iri, scope: MiningScope, min_support: Fraction
) -> list[MinedPattern]:
    reflexive = {
        obj
        for obj, subjects in index.objects(predicate).items()
        if obj in subjects
    }
    support = scope.weighting.support_of(reflexive)
    if reflexive and support >= min_support:
        return [MinedPattern(SelfRestriction(predicate), frozenset(reflexive), support)]
    return []


def mine_closed_conjunctions(results: Iterable[MinedPattern]) -> list[MinedPattern]:
    """Merge patterns with identical proof sets into a single conjunction."""
    groups: dict[tuple, list[MinedPattern]] = {}
    for item in results:
        groups.setdefault((is_range(item.pattern), item.proof_set), []).append(item)
    merged = []
    for (ranged, proof), members in groups.items():
        if len(members) == 1:
            merged.append(
                MinedPattern(canonicalize(members[0].pattern), proof, members[0].support)
            )
            continue
        ctor = AndRange if ranged else And
        expr = canonicalize(ctor(tuple(m.pattern for m in members)))
        merged.append(MinedPattern(expr, proof, members[0].support))
    return _by_pattern_key(merged)


def mine_some(
    index: ThreeLevelIndex,
    predicate: Iri,
    scope: MiningScope,
    config: MinerConfig,
    fetcher: TripleFetcher,
    token: CancellationToken | None = None,
    progress: ProgressCallback | None = None,
    diagnostics: Diagnostics | None = None,
) -> tuple[list[MinedPattern], bool]:
    """Redistribute weights onto the predicate's objects and mine deeper.

    Each subject's weight is split evenly across its distinct objects, so
    the total mass entering the sub-scope is exactly the mass of the
    subjects carrying the predicate (minus blank-node objects, which are
    not re-queryable and are skipped)."""
    counts = index.object_counts_by_subject(predicate)
    objects = index.objects(predicate)
    new_weights: dict[RdfTerm, Fraction] = {}
    for obj in _sorted_terms(objects):
        if isinstance(obj, BlankNode):
            warn(diagnostics, "blank-recursion-object", predicate.value)
            continue
        total = Fraction(0)
        for s in objects[obj]:
            total += scope.weighting[s] / counts[s]
        new_weights[obj] = total
    if not new_weights:
        return [], False
    sub_scope = MiningScope(
        uris=frozenset(o for o in new_weights if isinstance(o, Iri)),
        literals=frozenset(o for o in new_weights if isinstance(o, Literal)),
        weighting=Weighting(new_weights),
        level=scope.level + 1,
    )
    deeper, partial = sldm(
        sub_scope, config, fetcher, token=token, progress=progress, diagnostics=diagnostics
    )
    out = []
    for item in deeper:
        wrapped = (
            SomeData(predicate, item.pattern)
            if is_range(item.pattern)
            else SomeObject(predicate, item.pattern)
        )
        back: set = set()
        for o in item.proof_set:
            back |= index.subjects(predicate, o)
        out.append(
            MinedPattern(wrapped, frozenset(back), scope.weighting.support_of(back))
        )
    return _by_pattern_key(out), partial


def sldm(
    scope: MiningScope,
    config: MinerConfig,
    fetcher: TripleFetcher,
    *,
    token: CancellationToken | None = None,
    progress: ProgressCallback | None = None,
    diagnostics: Diagnostics | None = None,
) -> tuple[list[MinedPattern], bool]:
    """One full mining pass over a scope.

    Returns the closed-conjunction result set and a flag telling whether the
    pass was cut short (cancellation or a failed fetch)."""
    results = mine_enum(scope, config.min_support)
    results += mine_datatype(scope, config.min_support, diagnostics)
    partial = False
    if scope.uris:
        try:
            triples = fetcher(_sorted_terms(scope.uris))
        except FetchError as exc:
            warn(diagnostics, "fetch-failed", str(exc))
            return mine_closed_conjunctions(results), True
        index = build_index(triples)
        if config.ignore_predicates:
            ignored = [re.compile(rx) for rx in config.ignore_predicates]
            kept = {}
            for p in index.predicates():
                if any(rx.search(p.value) for rx in ignored):
                    warn(diagnostics, "ignored-predicate", p.value)
                else:
                    kept[p] = index.objects(p)
            index = ThreeLevelIndex(kept)
        index = prune_index(index, scope.weighting, config.min_support)
        for predicate in sorted(index.predicates(), key=term_sort_key):
            if token is not None and token.cancelled:
                partial = True
                break
            if predicate == RDF_TYPE:
                per_predicate = mine_type(index, scope, config.min_support, diagnostics)
            else:
                per_predicate = mine_value(
                    index, predicate, scope, config.min_support, diagnostics
                )
                per_predicate += mine_self(index, predicate, scope, config.min_support)
            if not per_predicate and scope.level + 2 <= config.max_depth:
                per_predicate, sub_partial = mine_some(
                    index,
                    predicate,
                    scope,
                    config,
                    fetcher,
                    token,
                    progress,
                    diagnostics,
                )
                partial |= sub_partial
            results += per_predicate
            if progress is not None:
                progress(scope.level, predicate, per_predicate)
    return mine_closed_conjunctions(results), partial


def initial_call(
    uris: Iterable[RdfTerm],
    config: MinerConfig,
    fetcher: TripleFetcher,
    *,
    ontology=None,
    target: Iri | None = None,
    token: CancellationToken | None = None,
    progress: ProgressCallback | None = None,
    diagnostics: Diagnostics | None = None,
) -> tuple[list[MinedPattern], bool]:
    """Mine superclass patterns for a uniformly weighted subject set.

    Patterns the ontology already entails for the target class are dropped
    from the output."""
    subjects = [u for u in _sorted_terms(set(uris)) if isinstance(u, Iri)]
    if not subjects:
        raise EmptyTargetSet("no IRI subjects to mine from")
    scope = MiningScope(
        uris=frozenset(subjects),
        literals=frozenset(),
        weighting=Weighting.uniform(subjects),
        level=0,
    )
    results, partial = sldm(
        scope, config, fetcher, token=token, progress=progress, diagnostics=diagnostics
    )
    if ontology is not None and target is not None:
        results = [r for r in results if not ontology.covers(target, r.pattern)]
    return results, partial


def result_record(item: MinedPattern, prefixes=None, partial: bool = False) -> dict:
    """JSON-ready record for one mined pattern."""
    from .patterns import serialize
    from .turtle import term_text

    return {
        "serializedPattern": serialize(item.pattern, prefixes),
        "support": "%d/%d" % (item.support.numerator, item.support.denominator),
        "proofSetSize": len(item.proof_set),
        "proofSetSample": [term_text(t, prefixes) for t in item.proof_sample(10)],
        "depth": item.depth,
        "partialFlag": partial,
    }
