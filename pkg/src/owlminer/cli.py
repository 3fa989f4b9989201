"""Batch entry point: mine one subject set against an endpoint or a local
fixture graph and stream the results to stdout."""

from __future__ import annotations

import argparse
import json
import signal
import sys
from fractions import Fraction

from . import fixture, mining, ontology, shacl, sparql
from .diagnostics import Diagnostics
from .errors import EmptyTargetSet, OwlMinerError, ParseError
from .model import CancellationToken, MinerConfig, SamplingStrategy, parse_fraction
from .patterns import serialize
from .terms import WELL_KNOWN_PREFIXES, Iri, PrefixMap

_FORMATS = ("text", "json", "manchester", "turtle-shacl")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="owlminer",
        description="Mine superclass expressions for a set of subjects from a SPARQL endpoint.",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--endpoint", metavar="URL", help="SPARQL endpoint to query")
    source.add_argument("--fixture", metavar="TTL",
                        help="serve this Turtle file on a loopback endpoint and mine it")
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--class", dest="class_iri", metavar="IRI",
                        help="mine the instances of this class (prefixed name or absolute IRI)")
    target.add_argument("--uris", metavar="FILE",
                        help="file with one subject IRI per line")
    parser.add_argument("--min-support", required=True, metavar="FRACTION",
                        help="support threshold in (0,1], e.g. 0.8 or 4/5")
    parser.add_argument("--max-depth", type=int, default=1, metavar="N",
                        help="maximal nesting of existential restrictions (default 1)")
    parser.add_argument("--batch-size", type=int, default=100, metavar="N")
    parser.add_argument("--sample-size", type=int, default=None, metavar="N",
                        help="mine a sample of the subjects instead of all of them")
    parser.add_argument("--strategy", choices=[s.value for s in SamplingStrategy],
                        default=SamplingStrategy.UNIFORM.value,
                        help="sampling strategy when --sample-size is given")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ignore-predicate", action="append", default=[], metavar="REGEX",
                        help="drop predicates matching this regular expression (repeatable)")
    parser.add_argument("--ontology", metavar="FILE",
                        help="working ontology; already-implied patterns are suppressed")
    parser.add_argument("--format", choices=_FORMATS, default="text")
    parser.add_argument("--query-budget", type=int, default=10_000, metavar="N")
    parser.add_argument("--verify-proofs", choices=["on", "off"], default="off",
                        help="re-check every proof set against the retrieved triples")
    parser.add_argument("--prefixes", metavar="JSON",
                        help="JSON object of extra prefix -> namespace bindings")
    parser.add_argument("--politeness-delay-ms", type=float, default=None, metavar="MS",
                        help="gap between endpoint requests (default 100 remote, 0 fixture)")
    parser.add_argument("--max-instances", type=int, default=None, metavar="N",
                        help="cap on gathered class instances")
    return parser


def _load_subject_list(path: str, prefixes: PrefixMap) -> list[Iri]:
    subjects = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            subjects.append(_resolve_iri(line, prefixes, "%s:%d" % (path, number)))
    return subjects


def _resolve_iri(token: str, prefixes: PrefixMap, where: str) -> Iri:
    if token.startswith("<") and token.endswith(">"):
        return Iri(token[1:-1])
    # a bound prefix wins: "dbo:Book" is also a well-formed absolute IRI
    # with scheme "dbo", so expansion has to be tried first
    try:
        return Iri(prefixes.expand(token))
    except (KeyError, ValueError):
        pass
    try:
        return Iri(token)
    except ValueError as exc:
        raise ParseError("cannot resolve IRI %r (%s): %s" % (token, where, exc))


class _Run:
    """Everything one invocation needs, wired together."""

    def __init__(self, args):
        self.args = args
        self.diagnostics = Diagnostics()
        self.token = CancellationToken()
        self.prefixes = PrefixMap(dict(WELL_KNOWN_PREFIXES))
        self.fixture_server = None
        self.min_support = None

    def validate(self) -> str | None:
        try:
            self.min_support = parse_fraction(self.args.min_support)
        except (ValueError, ZeroDivisionError):
            return "min-support must be a fraction like 0.8 or 4/5"
        if not 0 < self.min_support <= 1:
            return "min-support must be in (0,1]"
        if self.args.max_depth < 1:
            return "max-depth must be >= 1"
        if self.args.batch_size < 1:
            return "batch-size must be >= 1"
        if self.args.sample_size is not None and self.args.sample_size < 1:
            return "sample-size must be >= 1"
        if self.args.query_budget < 1:
            return "query-budget must be >= 1"
        return None

    def config(self) -> MinerConfig:
        return MinerConfig(
            min_support=self.min_support,
            max_depth=self.args.max_depth,
            batch_size=self.args.batch_size,
            sample_size=self.args.sample_size,
            sampling_strategy=SamplingStrategy(self.args.strategy),
            random_seed=self.args.seed,
            ignore_predicates=tuple(self.args.ignore_predicate),
            query_budget=self.args.query_budget,
            verify_proofs=self.args.verify_proofs == "on",
        )

    def __enter__(self):
        if self.args.fixture:
            self.fixture_server = fixture.fixture_endpoint(self.args.fixture)
            self.prefixes.update(self.fixture_server.prefixes)
            url = self.fixture_server.url
            delay = 0.0
        else:
            url = self.args.endpoint
            delay = 100.0
        if self.args.politeness_delay_ms is not None:
            delay = self.args.politeness_delay_ms
        if self.args.prefixes:
            self.prefixes.update(PrefixMap.from_json_file(self.args.prefixes))
        self.client = sparql.SparqlClient(
            sparql.EndpointConfig(url, politeness_delay_ms=delay),
            query_budget=self.args.query_budget,
        )
        return self

    def __exit__(self, *exc_info):
        if self.fixture_server is not None:
            self.fixture_server.close()

    def subjects(self) -> tuple[list[Iri], Iri | None]:
        args = self.args
        if args.class_iri:
            target = _resolve_iri(args.class_iri, self.prefixes, "--class")
            found = self.client.gather_instances(target, max_instances=args.max_instances)
        else:
            target = None
            found = _load_subject_list(args.uris, self.prefixes)
        if args.sample_size is not None and len(found) > args.sample_size:
            strategy = SamplingStrategy(args.strategy)
            spec = sparql.SampleSpec(strategy, args.sample_size, args.seed)
            counts = None
            if strategy is SamplingStrategy.PREDICATES:
                counts = self.client.count_predicates(found, args.batch_size)
            elif strategy is SamplingStrategy.TRIPLES:
                counts = self.client.count_triples(found, args.batch_size)
            found = sparql.sample(found, spec, counts)
        return found, target


def _emit(out, args, results, partial, prefixes, target):
    if args.format == "text":
        for item in results:
            out.write(
                "%s\tsupport=%s\tproofs=%d\tdepth=%d\n"
                % (serialize(item.pattern, prefixes), item.support, len(item.proof_set), item.depth)
            )
        out.write("# partial: %s\n" % ("true" if partial else "false"))
    elif args.format == "json":
        for item in results:
            record = mining.result_record(item, prefixes, partial)
            out.write(json.dumps(record, sort_keys=True) + "\n")
        out.write(json.dumps({"partial": partial}) + "\n")
    elif args.format == "manchester":
        lhs = None
        if target is not None:
            short = prefixes.shrink(target.value)
            lhs = short if short is not None else "<%s>" % target.value
        for item in results:
            rendered = serialize(item.pattern, prefixes)
            out.write("%s SubClassOf: %s\n" % (lhs, rendered) if lhs else rendered + "\n")
        out.write("# partial: %s\n" % ("true" if partial else "false"))
    else:  # turtle-shacl
        doc = shacl.shapes_document([item.pattern for item in results], prefixes=prefixes)
        out.write(doc)
        out.write("# partial: %s\n" % ("true" if partial else "false"))
    out.flush()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run = _Run(args)
    problem = run.validate()
    if problem:
        print("owlminer: error: %s" % problem, file=sys.stderr)
        return 2

    previous_handler = signal.getsignal(signal.SIGINT)

    def interrupt(_signum, _frame):
        run.token.cancel()  # second interrupt falls through to the default
        signal.signal(signal.SIGINT, previous_handler)

    try:
        with run:
            signal.signal(signal.SIGINT, interrupt)
            store = ontology.load_ontology(args.ontology) if args.ontology else None
            subjects, target = run.subjects()
            fetcher = sparql.SparqlFetcher(run.client, args.batch_size)
            config = run.config()
            if config.verify_proofs:
                fetcher = sparql.CollectingFetcher(fetcher)
            try:
                results, partial = mining.initial_call(
                    subjects,
                    config,
                    fetcher,
                    ontology=store,
                    target=target,
                    token=run.token,
                    diagnostics=run.diagnostics,
                )
            except EmptyTargetSet:
                print("owlminer: no subjects to mine", file=sys.stderr)
                _emit(sys.stdout, args, [], False, run.prefixes, None)
                return 0
            if config.verify_proofs:
                from .oracle import LocalGraph, verify_proof_sets

                verify_proof_sets(LocalGraph(fetcher.triples), results)
    except ParseError as exc:
        print("owlminer: error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("owlminer: error: %s" % exc, file=sys.stderr)
        return 2
    except OwlMinerError as exc:
        print("owlminer: error: %s" % exc, file=sys.stderr)
        return 1
    finally:
        signal.signal(signal.SIGINT, previous_handler)

    _emit(sys.stdout, args, results, partial, run.prefixes, target)
    for code, count in sorted(run.diagnostics.counts.items()):
        print("owlminer: %s x%d" % (code, count), file=sys.stderr)
    if partial and not results and run.diagnostics.counts.get("fetch-failed"):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
