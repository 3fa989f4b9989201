"""Loopback SPARQL endpoint backed by an immutable in-memory graph.

Understands exactly the query templates the client issues — the batched
VALUES retrieval, the two per-subject counting queries, and the paged
instance query — whitespace- and keyword-case-insensitively, over GET and
both POST conventions. Everything else earns a 400. Tests and demos point
the real HTTP client here instead of at a public endpoint.
"""

from __future__ import annotations

import json
import re
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import turtle
from .terms import RDF_TYPE, BlankNode, Iri, Literal, PrefixMap, Triple, term_sort_key

_IRI_TOKEN_re = re.compile(r"\A<([^<>\"{}|^`\\\x00-\x20]*)>\Z")


def _tokenize(query: str) -> list[str]:
    # split around braces/parens and statement dots so template matching
    # never depends on the producer's spacing
    text = re.sub(r"([{}()])", r" \1 ", query)
    text = re.sub(r"\.(\s)", r" . \1", text + " ")
    return text.split()


class _Query:
    """Parsed form of one supported query."""

    kind: str

    def __init__(self, kind, subjects=None, class_iri=None, limit=None, offset=None):
        self.kind = kind
        self.subjects = subjects
        self.class_iri = class_iri
        self.limit = limit
        self.offset = offset


def _take_keyword(tokens, word):
    if not tokens or tokens[0].upper() != word:
        raise ValueError(word)
    return tokens[1:]


def _take_exact(tokens, tok):
    if not tokens or tokens[0] != tok:
        raise ValueError(tok)
    return tokens[1:]


def _take_optional_dot(tokens):
    if tokens and tokens[0] == ".":
        return tokens[1:]
    return tokens


def _take_iri(tokens):
    if not tokens:
        raise ValueError("iri")
    match = _IRI_TOKEN_re.match(tokens[0])
    if not match:
        raise ValueError("iri")
    return Iri(match.group(1)), tokens[1:]


def _take_values_block(tokens):
    tokens = _take_keyword(tokens, "VALUES")
    tokens = _take_exact(tokens, "?s")
    tokens = _take_exact(tokens, "{")
    subjects = []
    while tokens and tokens[0] != "}":
        iri, tokens = _take_iri(tokens)
        subjects.append(iri)
    tokens = _take_exact(tokens, "}")
    return subjects, tokens


def _parse_query(query: str) -> _Query:
    tokens = _tokenize(query)
    tokens = _take_keyword(tokens, "SELECT")
    if tokens and tokens[0] == "?s" and len(tokens) > 1 and tokens[1] == "?p":
        # SELECT ?s ?p ?o WHERE { ?s ?p ?o . VALUES ?s { ... } }
        tokens = _take_exact(tokens, "?s")
        tokens = _take_exact(tokens, "?p")
        tokens = _take_exact(tokens, "?o")
        tokens = _take_keyword(tokens, "WHERE")
        tokens = _take_exact(tokens, "{")
        for tok in ("?s", "?p", "?o"):
            tokens = _take_exact(tokens, tok)
        tokens = _take_optional_dot(tokens)
        subjects, tokens = _take_values_block(tokens)
        tokens = _take_exact(tokens, "}")
        if tokens:
            raise ValueError("trailing tokens")
        return _Query("triples", subjects=subjects)
    if tokens and tokens[0] == "?s" and len(tokens) > 1 and tokens[1] == "(":
        # the two counting templates differ only inside COUNT(...)
        tokens = _take_exact(tokens, "?s")
        tokens = _take_exact(tokens, "(")
        tokens = _take_keyword(tokens, "COUNT")
        tokens = _take_exact(tokens, "(")
        distinct = bool(tokens) and tokens[0].upper() == "DISTINCT"
        if distinct:
            tokens = tokens[1:]
            tokens = _take_exact(tokens, "?p")
            kind = "count-predicates"
        else:
            tokens = _take_exact(tokens, "?o")
            kind = "count-triples"
        tokens = _take_exact(tokens, ")")
        tokens = _take_keyword(tokens, "AS")
        tokens = _take_exact(tokens, "?c")
        tokens = _take_exact(tokens, ")")
        tokens = _take_keyword(tokens, "WHERE")
        tokens = _take_exact(tokens, "{")
        for tok in ("?s", "?p", "?o"):
            tokens = _take_exact(tokens, tok)
        tokens = _take_optional_dot(tokens)
        subjects, tokens = _take_values_block(tokens)
        tokens = _take_exact(tokens, "}")
        tokens = _take_keyword(tokens, "GROUP")
        tokens = _take_keyword(tokens, "BY")
        tokens = _take_exact(tokens, "?s")
        if tokens:
            raise ValueError("trailing tokens")
        return _Query(kind, subjects=subjects)
    # SELECT ?s WHERE { ?s <type> <class> } ORDER BY ?s LIMIT n OFFSET k
    tokens = _take_exact(tokens, "?s")
    tokens = _take_keyword(tokens, "WHERE")
    tokens = _take_exact(tokens, "{")
    tokens = _take_exact(tokens, "?s")
    type_iri, tokens = _take_iri(tokens)
    if type_iri != RDF_TYPE:
        raise ValueError("only rdf:type lookups are supported")
    class_iri, tokens = _take_iri(tokens)
    tokens = _take_optional_dot(tokens)
    tokens = _take_exact(tokens, "}")
    tokens = _take_keyword(tokens, "ORDER")
    tokens = _take_keyword(tokens, "BY")
    tokens = _take_exact(tokens, "?s")
    tokens = _take_keyword(tokens, "LIMIT")
    limit = int(tokens[0])
    tokens = tokens[1:]
    tokens = _take_keyword(tokens, "OFFSET")
    offset = int(tokens[0])
    tokens = tokens[1:]
    if tokens:
        raise ValueError("trailing tokens")
    return _Query("instances", class_iri=class_iri, limit=limit, offset=offset)


def _json_term(term) -> dict:
    if isinstance(term, Iri):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    out = {"type": "literal", "value": term.lexical}
    if term.language:
        out["xml:lang"] = term.language
    elif term.datatype is not None:
        out["datatype"] = term.datatype
    return out


class FixtureEndpoint:
    """Owns the loopback server thread; usable as a context manager.

    The graph is parsed once and never mutated, so concurrent queries all
    see the same snapshot. `query_count` counts every answered query, which
    lets tests assert on batching arithmetic.
    """

    def __init__(self, graph_file):
        parsed = turtle.load_turtle(graph_file)
        self.prefixes: PrefixMap = parsed.prefixes
        self._by_subject: dict = {}
        for triple in parsed.triples:
            self._by_subject.setdefault(triple.subject, []).append(triple)
        for bucket in self._by_subject.values():
            bucket.sort(key=lambda t: (term_sort_key(t.predicate), term_sort_key(t.object)))
        self._count = 0
        self._count_lock = threading.Lock()
        endpoint = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # tests must stay quiet
                pass

            def do_GET(self):
                parts = urllib.parse.urlparse(self.path)
                params = urllib.parse.parse_qs(parts.query)
                queries = params.get("query")
                if not queries:
                    self._reply(400, {"error": "missing query parameter"})
                    return
                self._answer(queries[0])

            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                body = self.rfile.read(length).decode("utf-8")
                content_type = (self.headers.get("Content-Type") or "").split(";")[0].strip()
                if content_type == "application/sparql-query":
                    query = body
                else:
                    params = urllib.parse.parse_qs(body)
                    queries = params.get("query")
                    if not queries:
                        self._reply(400, {"error": "missing query parameter"})
                        return
                    query = queries[0]
                self._answer(query)

            def _answer(self, query: str):
                try:
                    parsed_query = _parse_query(query)
                except (ValueError, IndexError):
                    self._reply(400, {"error": "unsupported query shape"})
                    return
                with endpoint._count_lock:
                    endpoint._count += 1
                self._reply(200, endpoint._evaluate(parsed_query))

            def _reply(self, status: int, payload: dict):
                body = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/sparql-results+json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread: threading.Thread | None = None
        self.url = "http://127.0.0.1:%d/sparql" % self._server.server_port

    @property
    def query_count(self) -> int:
        with self._count_lock:
            return self._count

    def _evaluate(self, q: _Query) -> dict:
        if q.kind == "triples":
            bindings = [
                {"s": _json_term(t.subject), "p": _json_term(t.predicate), "o": _json_term(t.object)}
                for s in q.subjects
                for t in self._by_subject.get(s, ())
            ]
            return {"head": {"vars": ["s", "p", "o"]}, "results": {"bindings": bindings}}
        if q.kind in ("count-predicates", "count-triples"):
            bindings = []
            for s in q.subjects:
                rows = self._by_subject.get(s)
                if not rows:
                    continue  # absent subjects simply yield no binding
                if q.kind == "count-predicates":
                    n = len({t.predicate for t in rows})
                else:
                    n = len(rows)
                bindings.append({
                    "s": _json_term(s),
                    "c": {
                        "type": "literal",
                        "value": str(n),
                        "datatype": "http://www.w3.org/2001/XMLSchema#integer",
                    },
                })
            return {"head": {"vars": ["s", "c"]}, "results": {"bindings": bindings}}
        instances = sorted(
            {
                t.subject.value
                for rows in self._by_subject.values()
                for t in rows
                if t.predicate == RDF_TYPE and t.object == q.class_iri and isinstance(t.subject, Iri)
            }
        )
        page = instances[q.offset : q.offset + q.limit]
        return {
            "head": {"vars": ["s"]},
            "results": {"bindings": [{"s": {"type": "uri", "value": v}} for v in page]},
        }

    def start(self):
        if self._thread is None:
            self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
            self._thread.start()
        return self

    def close(self):
        if self._thread is not None:
            self._server.shutdown()
            self._thread.join(timeout=5)
            self._thread = None
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc_info):
        self.close()


def fixture_endpoint(graph_file) -> FixtureEndpoint:
    """Parse the Turtle file and start serving it on a fresh loopback port."""
    return FixtureEndpoint(graph_file).start()
