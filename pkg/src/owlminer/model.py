"""Run configuration, weightings and result records.

All weights and supports are exact `fractions.Fraction` values; nothing in
the pipeline ever rounds, so equal proof sets imply bit-equal supports.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import patterns
from .terms import RdfTerm, term_sort_key


class SamplingStrategy(enum.Enum):
    UNIFORM = "uniform"
    PREDICATES = "predicates"
    TRIPLES = "triples"


def parse_fraction(text: str) -> Fraction:
    """Accepts decimal ("0.8") and ratio ("4/5") spellings, exactly."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("+-")
    whole, _, frac = body.partition(".")
    if not (whole or frac) or not (whole + frac).isdigit():
        raise ValueError("not a number: %r" % text)
    return Fraction(sign * int((whole or "0") + (frac or "")), 10 ** len(frac))


@dataclass(frozen=True)
class MinerConfig:
    min_support: Fraction
    max_depth: int
    batch_size: int = 100
    sample_size: int | None = None
    sampling_strategy: SamplingStrategy = SamplingStrategy.UNIFORM
    random_seed: int = 0
    ignore_predicates: tuple[str, ...] = ()
    query_budget: int = 10000
    verify_proofs: bool = False

    def __post_init__(self):
        if not 0 < self.min_support <= 1:
            raise ValueError("min_support must be in (0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.sample_size is not None and self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        if self.query_budget < 1:
            raise ValueError("query_budget must be at least 1")


class Weighting:
    """Immutable term -> weight map; every weight is in [0, 1]."""

    def __init__(self, entries: Mapping[RdfTerm, Fraction]):
        for term, weight in entries.items():
            if not 0 <= weight <= 1:
                raise ValueError("weight out of [0, 1] for %r" % (term,))
        self._entries = dict(entries)

    @classmethod
    def uniform(cls, terms: Iterable[RdfTerm]) -> "Weighting":
        terms = list(terms)
        if not terms:
            raise ValueError("cannot build a uniform weighting over nothing")
        share = Fraction(1, len(terms))
        return cls({t: share for t in terms})

    def __getitem__(self, term: RdfTerm) -> Fraction:
        return self._entries[term]

    def __contains__(self, term: RdfTerm) -> bool:
        return term in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def terms(self):
        return self._entries.keys()

    def items(self):
        return self._entries.items()

    def total(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def support_of(self, terms: Iterable[RdfTerm]) -> Fraction:
        return sum((self._entries[t] for t in terms), Fraction(0))


ProofSet = frozenset


@dataclass(frozen=True)
class MinedPattern:
    """A pattern plus the scope members it matched and their summed weight."""

    pattern: object  # patterns.Pattern | patterns.DataRange
    proof_set: frozenset
    support: Fraction

    @property
    def depth(self) -> int:
        return patterns.depth(self.pattern)

    def proof_sample(self, limit: int = 10) -> list:
        return sorted(self.proof_set, key=term_sort_key)[:limit]


class CancellationToken:
    """Cooperative cancellation flag, checked between units of work."""

    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()
