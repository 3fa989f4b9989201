"""Three-level triple index: predicate -> object -> set of subjects.

Built once per mining scope from the fetched triples, then pruned so only
predicates whose distinct-subject support reaches the threshold survive.
After pruning the index is treated as immutable; pruning shares the
surviving sub-maps instead of copying them.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import UnknownPredicate
from .model import Weighting
from .terms import Iri, RdfTerm, Triple


class ThreeLevelIndex:
    def __init__(self, mapping: dict[Iri, dict[RdfTerm, set[RdfTerm]]] | None = None):
        self._map: dict[Iri, dict[RdfTerm, set[RdfTerm]]] = mapping if mapping is not None else {}

    def add(self, triple: Triple):
        self._map.setdefault(triple.predicate, {}).setdefault(triple.object, set()).add(
            triple.subject
        )

    def predicates(self) -> list[Iri]:
        return list(self._map)

    def __contains__(self, predicate: Iri) -> bool:
        return predicate in self._map

    def objects(self, predicate: Iri) -> dict[RdfTerm, set[RdfTerm]]:
        if predicate not in self._map:
            raise UnknownPredicate(predicate.value)
        return self._map[predicate]

    def subjects(self, predicate: Iri, obj: RdfTerm) -> set[RdfTerm]:
        return self.objects(predicate).get(obj, set())

    def subject_union(self, predicate: Iri) -> set[RdfTerm]:
        union: set[RdfTerm] = set()
        for subjects in self.objects(predicate).values():
            union |= subjects
        return union

    def object_counts_by_subject(self, predicate: Iri) -> dict[RdfTerm, int]:
        """How many distinct objects each subject has under the predicate."""
        counts: dict[RdfTerm, int] = {}
        for subjects in self.objects(predicate).values():
            for s in subjects:
                counts[s] = counts.get(s, 0) + 1
        return counts

    def triple_count(self) -> int:
        return sum(
            len(subjects)
            for objects in self._map.values()
            for subjects in objects.values()
        )


def build_index(triples) -> ThreeLevelIndex:
    index = ThreeLevelIndex()
    for triple in triples:
        index.add(triple)
    return index


def predicate_support(index: ThreeLevelIndex, predicate: Iri, weighting: Weighting) -> Fraction:
    """Summed weight of the distinct subjects carrying the predicate."""
    return weighting.support_of(index.subject_union(predicate))


def prune_index(
    index: ThreeLevelIndex, weighting: Weighting, min_support: Fraction
) -> ThreeLevelIndex:
    """Keep only predicates whose support reaches min_support."""
    kept = {
        p: index.objects(p)
        for p in index.predicates()
        if predicate_support(index, p, weighting) >= min_support
    }
    return ThreeLevelIndex(kept)
