"""SPARQL 1.1 protocol client: batched VALUES retrieval, per-subject
counting queries, class-instance gathering, and subject sampling."""

from __future__ import annotations

import random
import threading
import time
import urllib.parse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import requests

from .errors import FetchError, MissingCounts, QueryBudgetExceeded
from .model import SamplingStrategy
from .terms import RDF_TYPE, BlankNode, Iri, Literal, RdfTerm, Triple, term_sort_key


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    http_method: str = "GET"  # preferred verb; oversized URLs fall back to POST
    timeout: float = 30.0
    max_retries: int = 3
    politeness_delay_ms: float = 0.0  # gap enforced between consecutive requests
    retry_backoff_s: float = 0.5
    max_url_length: int = 4000
    parallelism: int = 2

    def __post_init__(self):
        if self.http_method not in ("GET", "POST"):
            raise ValueError("http_method must be GET or POST")
        if self.max_retries < 0 or self.timeout <= 0:
            raise ValueError("bad retry/timeout configuration")


@dataclass(frozen=True)
class SampleSpec:
    strategy: SamplingStrategy
    size: int
    seed: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("sample size must be >= 1")


def _values_clause(batch: Sequence[Iri]) -> str:
    return " ".join("<%s>" % s.value for s in batch)


def triples_query(batch: Sequence[Iri]) -> str:
    return "SELECT ?s ?p ?o WHERE { ?s ?p ?o . VALUES ?s { %s } }" % _values_clause(batch)


def predicate_count_query(batch: Sequence[Iri]) -> str:
    return (
        "SELECT ?s (COUNT(DISTINCT ?p) AS ?c) WHERE { ?s ?p ?o . VALUES ?s { %s } } GROUP BY ?s"
        % _values_clause(batch)
    )


def triple_count_query(batch: Sequence[Iri]) -> str:
    return (
        "SELECT ?s (COUNT(?o) AS ?c) WHERE { ?s ?p ?o . VALUES ?s { %s } } GROUP BY ?s"
        % _values_clause(batch)
    )


def instance_query(class_iri: Iri, limit: int, offset: int) -> str:
    # ORDER BY keeps LIMIT/OFFSET paging stable across requests
    return "SELECT ?s WHERE { ?s <%s> <%s> } ORDER BY ?s LIMIT %d OFFSET %d" % (
        RDF_TYPE.value,
        class_iri.value,
        limit,
        offset,
    )


def _decode_term(binding: Mapping[str, str]) -> RdfTerm:
    kind = binding.get("type")
    if kind == "uri":
        return Iri(binding["value"])
    if kind == "bnode":
        return BlankNode(binding["value"])
    if kind in ("literal", "typed-literal"):  # the latter is a legacy spelling
        lang = binding.get("xml:lang")
        if lang:
            return Literal(binding["value"], language=lang)
        datatype = binding.get("datatype")
        if datatype:
            return Literal(binding["value"], datatype=datatype)
        return Literal(binding["value"])
    raise FetchError("unexpected binding type %r" % kind)


def _batched(items: Sequence[Iri], batch_size: int) -> list[list[Iri]]:
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    return [list(items[i : i + batch_size]) for i in range(0, len(items), batch_size)]


def _unique_sorted(subjects: Iterable[RdfTerm]) -> list[Iri]:
    return sorted({s for s in subjects if isinstance(s, Iri)}, key=term_sort_key)


class SparqlClient:
    """Issues the fixed query templates against one endpoint.

    A single query budget is shared by every operation on the client, so a
    whole mining run cannot exceed its cap no matter how it recurses.
    Politeness pacing and the budget share one lock, which also keeps
    parallel batch workers from stampeding the endpoint.
    """

    def __init__(self, config: EndpointConfig, *, query_budget: int | None = 10_000,
                 session: requests.Session | None = None):
        self._config = config
        self._session = session or requests.Session()
        self._budget = query_budget
        self._issued = 0
        self._lock = threading.Lock()
        self._next_slot = 0.0

    @property
    def queries_issued(self) -> int:
        return self._issued

    def _reserve_slot(self):
        with self._lock:
            if self._budget is not None and self._issued >= self._budget:
                raise QueryBudgetExceeded("query budget of %d exhausted" % self._budget)
            self._issued += 1
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self._config.politeness_delay_ms / 1000.0
        if wait > 0:
            time.sleep(wait)

    def _request_once(self, query: str):
        cfg = self._config
        headers = {"Accept": "application/sparql-results+json"}
        method = cfg.http_method
        response = None
        if method == "GET":
            joiner = "&" if "?" in cfg.url else "?"
            url = cfg.url + joiner + urllib.parse.urlencode({"query": query})
            if len(url) <= cfg.max_url_length:
                response = self._session.get(url, headers=headers, timeout=cfg.timeout)
            else:
                method = "POST"
        if response is None:
            response = self._session.post(
                cfg.url, data={"query": query}, headers=headers, timeout=cfg.timeout
            )
        response.raise_for_status()
        return response.json()["results"]["bindings"]

    def _execute(self, query: str):
        cfg = self._config
        last_error = None
        for attempt in range(cfg.max_retries + 1):
            self._reserve_slot()  # budget errors are final, never retried
            try:
                return self._request_once(query)
            except (requests.RequestException, ValueError, KeyError) as exc:
                last_error = exc
                if attempt < cfg.max_retries:
                    time.sleep(min(cfg.retry_backoff_s * 2**attempt, 30.0))
        raise FetchError(
            "query failed after %d attempts: %s" % (cfg.max_retries + 1, last_error)
        )

    def fetch_triples(self, subjects: Iterable[RdfTerm], batch_size: int) -> list[Triple]:
        batches = _batched(_unique_sorted(subjects), batch_size)
        if not batches:
            return []

        def run(batch):
            out = []
            for row in self._execute(triples_query(batch)):
                predicate = _decode_term(row["p"])
                if not isinstance(predicate, Iri):
                    continue
                out.append(Triple(_decode_term(row["s"]), predicate, _decode_term(row["o"])))
            return out

        if self._config.parallelism > 1 and len(batches) > 1:
            with ThreadPoolExecutor(max_workers=self._config.parallelism) as pool:
                chunks = list(pool.map(run, batches))  # merged in batch order
        else:
            chunks = [run(batch) for batch in batches]
        return [t for chunk in chunks for t in chunk]

    def _counts(self, subjects, batch_size, template: Callable) -> dict[Iri, int]:
        out: dict[Iri, int] = {}
        for batch in _batched(_unique_sorted(subjects), batch_size):
            for row in self._execute(template(batch)):
                subject = _decode_term(row["s"])
                count = _decode_term(row["c"])
                if isinstance(subject, Iri) and isinstance(count, Literal):
                    out[subject] = int(count.lexical)
        return out

    def count_predicates(self, subjects: Iterable[RdfTerm], batch_size: int) -> dict[Iri, int]:
        return self._counts(subjects, batch_size, predicate_count_query)

    def count_triples(self, subjects: Iterable[RdfTerm], batch_size: int) -> dict[Iri, int]:
        return self._counts(subjects, batch_size, triple_count_query)

    def gather_instances(self, class_iri: Iri, *, page_size: int = 1000,
                         max_instances: int | None = None) -> list[Iri]:
        found: list[Iri] = []
        offset = 0
        while True:
            rows = self._execute(instance_query(class_iri, page_size, offset))
            found.extend(
                term
                for term in (_decode_term(r["s"]) for r in rows)
                if isinstance(term, Iri)
            )
            if max_instances is not None and len(found) >= max_instances:
                return found[:max_instances]
            if len(rows) < page_size:
                return found
            offset += page_size


def sample(population: Iterable[Iri], spec: SampleSpec,
           counts: Mapping[Iri, int] | None = None) -> list[Iri]:
    """Deterministic subject sampling; identity when the population fits."""
    pool = sorted(set(population), key=term_sort_key)
    if len(pool) <= spec.size:
        return pool
    rng = random.Random(spec.seed)
    if spec.strategy is SamplingStrategy.UNIFORM:
        rng.shuffle(pool)
        return pool[: spec.size]
    if counts is None:
        raise MissingCounts("sampling strategy %r needs per-subject counts" % spec.strategy.value)
    weights = [max(counts.get(s, 0), 0) for s in pool]
    return _weighted_without_replacement(pool, weights, spec.size, rng)


def _weighted_without_replacement(pool: list[Iri], weights: list[int], size: int,
                                  rng: random.Random) -> list[Iri]:
    # sequential draws with renormalization; zero-weight subjects are used
    # only if every positive weight runs out before the sample is full
    pool = list(pool)
    weights = list(weights)
    picked: list[Iri] = []
    while len(picked) < size and pool:
        total = float(sum(weights))
        if total <= 0:
            picked.extend(pool[: size - len(picked)])
            break
        roll = rng.random() * total
        acc = 0.0
        chosen = len(pool) - 1
        for i, w in enumerate(weights):
            acc += w
            if roll < acc:
                chosen = i
                break
        picked.append(pool.pop(chosen))
        weights.pop(chosen)
    return picked


class SparqlFetcher:
    """Adapts a client to the miner's fetcher callable."""

    def __init__(self, client: SparqlClient, batch_size: int):
        self.client = client
        self.batch_size = batch_size

    def __call__(self, subjects) -> list[Triple]:
        return self.client.fetch_triples(subjects, self.batch_size)


class CollectingFetcher:
    """Remembers every retrieved triple so proofs can be re-checked locally."""

    def __init__(self, inner):
        self.inner = inner
        self.triples: set[Triple] = set()

    def __call__(self, subjects) -> list[Triple]:
        fetched = self.inner(subjects)
        self.triples.update(fetched)
        return fetched
