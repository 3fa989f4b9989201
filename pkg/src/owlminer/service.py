"""Local HTTP service hosting mining jobs for the browser UI.

Jobs run on worker threads (bounded concurrency), publish their results as
server-sent events with replayable monotone event ids, and persist every
event to an append-only NDJSON journal per job, so a restart loses nothing:
jobs that were running reload as stopped, accepted axioms stay accepted.
"""

from __future__ import annotations

import argparse
import functools
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import fixture, mining, ontology, patterns, shacl, sparql
from .diagnostics import Diagnostics
from .errors import DuplicateAxiom, EmptyTargetSet, OwlMinerError
from .model import CancellationToken, MinerConfig, SamplingStrategy, parse_fraction
from .patterns import serialize
from .terms import WELL_KNOWN_PREFIXES, Iri, PrefixMap

TERMINAL_STATES = ("Stopped", "Finished", "Failed")


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()) + "Z"


@dataclass
class JobResult:
    result_id: str
    pattern: patterns.Pattern
    record: dict  # display form sent to clients
    review_state: str = "Unreviewed"


@dataclass
class Job:
    job_id: str
    request: dict
    config: MinerConfig
    prefixes: PrefixMap
    target: Iri | None
    state: str = "Pending"
    results: list[JobResult] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    error: str | None = None
    partial: bool = False
    token: CancellationToken = field(default_factory=CancellationToken)
    cond: threading.Condition = field(default_factory=threading.Condition)

    def summary(self) -> dict:
        return {
            "jobId": self.job_id,
            "state": self.state,
            "request": self.request,
            "resultCount": len(self.results),
            "createdAt": self.created_at,
            "updatedAt": self.updated_at,
            "error": self.error,
            "partial": self.partial,
        }

    def detail(self) -> dict:
        out = self.summary()
        out["results"] = [
            dict(r.record, resultId=r.result_id, reviewState=r.review_state)
            for r in self.results
        ]
        return out


class JobManager:
    """Owns every job, the shared ontology store, and the journals."""

    def __init__(self, data_dir: str, job_concurrency: int = 2):
        self.data_dir = data_dir
        self.jobs_dir = os.path.join(data_dir, "jobs")
        os.makedirs(self.jobs_dir, exist_ok=True)
        self.lock = threading.Lock()
        self.jobs: dict[str, Job] = {}
        self.ontology = ontology.OntologyStore()
        self._ontology_lock = threading.Lock()
        self._slots = threading.Semaphore(job_concurrency)
        self._recover()

    # ---- journals ----

    def _journal_path(self, job_id: str) -> str:
        return os.path.join(self.jobs_dir, job_id + ".ndjson")

    def _append(self, job: Job, entry: dict):
        with open(self._journal_path(job.job_id), "a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")

    def _ontology_path(self) -> str:
        return os.path.join(self.data_dir, "ontology.ndjson")

    def _append_ontology(self, target: Iri, pattern) -> None:
        with open(self._ontology_path(), "a", encoding="utf-8") as handle:
            handle.write(json.dumps({
                "target": target.value,
                "pattern": serialize(pattern, None),
            }, sort_keys=True) + "\n")

    def _recover(self):
        path = self._ontology_path()
        if os.path.exists(path):
            with open(path, encoding="utf-8") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    try:
                        entry = json.loads(line)
                        self.ontology.accept(
                            Iri(entry["target"]), patterns.parse(entry["pattern"], None)
                        )
                    except (ValueError, KeyError, OwlMinerError):
                        continue  # a bad line only loses that axiom
        for name in sorted(os.listdir(self.jobs_dir)):
            if not name.endswith(".ndjson"):
                continue
            self._recover_job(name[: -len(".ndjson")])

    def _recover_job(self, job_id: str):
        job: Job | None = None
        failed_line = None
        with open(self._journal_path(job_id), encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    if job is None:
                        if entry.get("type") != "created":
                            raise ValueError("journal must start with a created entry")
                        job = self._job_from_created(job_id, entry)
                        continue
                    self._replay(job, entry)
                except (ValueError, KeyError) as exc:
                    failed_line = (number, str(exc))
                    break
        if job is None:
            return  # nothing intelligible; leave the file for inspection
        if failed_line is not None:
            job.state = "Failed"
            job.error = "corrupt journal line %d: %s" % failed_line
            self._emit(job, "job-state-changed", {"state": "Failed", "error": job.error})
        elif job.state not in TERMINAL_STATES:
            # the process died mid-run; results up to the crash are kept
            job.state = "Stopped"
            self._emit(job, "job-state-changed", {"state": "Stopped", "recovered": True})
        self.jobs[job.job_id] = job

    def _job_from_created(self, job_id: str, entry: dict) -> Job:
        request = entry["request"]
        config, prefixes, target = _parse_job_request(request)
        return Job(job_id=job_id, request=request, config=config, prefixes=prefixes,
                   target=target, created_at=entry.get("createdAt", _now()))

    def _replay(self, job: Job, entry: dict):
        kind = entry["type"]
        if kind == "event":
            event = entry["event"]
            job.events.append(event)
            if event["type"] == "axiom-mined":
                data = event["data"]
                job.results.append(JobResult(
                    result_id=data["resultId"],
                    pattern=patterns.parse(entry["absolutePattern"], None),
                    record={k: v for k, v in data.items() if k != "resultId"},
                ))
            elif event["type"] == "job-state-changed":
                job.state = event["data"]["state"]
                job.partial = event["data"].get("partial", job.partial)
                job.error = event["data"].get("error")
        elif kind == "review":
            for result in job.results:
                if result.result_id == entry["resultId"]:
                    result.review_state = entry["reviewState"]
                    break
        else:
            raise ValueError("unknown journal entry type %r" % kind)

    # ---- events ----

    def _emit(self, job: Job, event_type: str, data: dict, *, journal_extra: dict | None = None):
        with job.cond:
            event = {
                "eventId": len(job.events) + 1,
                "type": event_type,
                "data": data,
            }
            job.events.append(event)
            job.updated_at = _now()
            entry = {"type": "event", "event": event}
            if journal_extra:
                entry.update(journal_extra)
            self._append(job, entry)
            job.cond.notify_all()

    # ---- job lifecycle ----

    def create_job(self, request: dict) -> Job:
        config, prefixes, target = _parse_job_request(request)
        job_id = uuid.uuid4().hex[:12]
        job = Job(job_id=job_id, request=request, config=config,
                  prefixes=prefixes, target=target)
        with self.lock:
            self.jobs[job_id] = job
        self._append(job, {"type": "created", "request": request, "createdAt": job.created_at})
        worker = threading.Thread(target=self._run_job, args=(job,), daemon=True)
        worker.start()
        return job

    def _run_job(self, job: Job):
        with self._slots:
            with job.cond:
                if job.state != "Pending":  # stopped before a slot freed up
                    return
                job.state = "Running"
            self._emit(job, "job-state-changed", {"state": "Running"})
            try:
                results, partial = self._mine(job)
            except EmptyTargetSet:
                results, partial = [], False
            except OwlMinerError as exc:
                with job.cond:
                    job.state = "Failed"
                    job.error = str(exc)
                self._emit(job, "job-state-changed", {"state": "Failed", "error": str(exc)})
                return
            for item in results:
                result_id = "r%d" % (len(job.results) + 1)
                record = mining.result_record(item, job.prefixes, partial)
                with job.cond:
                    job.results.append(JobResult(result_id, item.pattern, record))
                self._emit(
                    job,
                    "axiom-mined",
                    dict(record, resultId=result_id),
                    journal_extra={"absolutePattern": serialize(item.pattern, None)},
                )
            state = "Stopped" if job.token.cancelled else "Finished"
            with job.cond:
                job.state = state
                job.partial = partial
            self._emit(job, "job-state-changed", {"state": state, "partial": partial})

    def _mine(self, job: Job):
        request = job.request
        diagnostics = Diagnostics()
        fixture_server = None
        try:
            if "fixture" in request:
                fixture_server = fixture.fixture_endpoint(_demo_graph_path())
                url = fixture_server.url
                job.prefixes.update(fixture_server.prefixes)
                delay = 0.0
            else:
                url = request["endpoint"]
                delay = float(request.get("politenessDelayMs", 100.0))
            client = sparql.SparqlClient(
                sparql.EndpointConfig(url, politeness_delay_ms=delay),
                query_budget=job.config.query_budget,
            )
            if job.target is not None:
                subjects = client.gather_instances(job.target)
            else:
                subjects = [Iri(u) for u in request["uris"]]
            if job.config.sample_size is not None and len(subjects) > job.config.sample_size:
                strategy = job.config.sampling_strategy
                counts = None
                if strategy is SamplingStrategy.PREDICATES:
                    counts = client.count_predicates(subjects, job.config.batch_size)
                elif strategy is SamplingStrategy.TRIPLES:
                    counts = client.count_triples(subjects, job.config.batch_size)
                subjects = sparql.sample(
                    subjects,
                    sparql.SampleSpec(strategy, job.config.sample_size, job.config.random_seed),
                    counts,
                )
            fetcher = sparql.SparqlFetcher(client, job.config.batch_size)
            results, partial = mining.initial_call(
                subjects,
                job.config,
                fetcher,
                token=job.token,
                diagnostics=diagnostics,
            )
            if job.target is not None:
                # the covers filter runs here, not inside initial_call, so the
                # store is only locked for this read
                with self._ontology_lock:
                    results = [r for r in results
                               if not self.ontology.covers(job.target, r.pattern)]
            return results, partial
        finally:
            if fixture_server is not None:
                fixture_server.close()

    def stop_job(self, job: Job) -> str:
        with job.cond:
            if job.state in TERMINAL_STATES:
                raise HTTPException(409, "job already %s" % job.state)
            if job.state == "Pending":
                job.state = "Stopped"
                job.partial = True  # stopped before mining anything
                stopped_now = True
            else:
                stopped_now = False
            job.token.cancel()
        if stopped_now:
            self._emit(job, "job-state-changed", {"state": "Stopped", "partial": True})
        return job.state

    def review(self, job: Job, result_id: str, verdict: str) -> str:
        target_result = None
        for result in job.results:
            if result.result_id == result_id:
                target_result = result
                break
        if target_result is None:
            raise HTTPException(404, "no such result")
        if verdict == "accept":
            if target_result.review_state == "Accepted":
                raise HTTPException(409, "already accepted")
            if job.target is None:
                raise HTTPException(409, "job has no target class to attach the axiom to")
            with self._ontology_lock:
                try:
                    self.ontology.accept(job.target, target_result.pattern)
                    self._append_ontology(job.target, target_result.pattern)
                except DuplicateAxiom:
                    pass  # accepted via an earlier job; row state still flips
            target_result.review_state = "Accepted"
        elif verdict == "reject":
            target_result.review_state = "Rejected"
        else:
            raise HTTPException(400, "verdict must be accept or reject")
        self._append(job, {"type": "review", "resultId": result_id,
                           "reviewState": target_result.review_state})
        return target_result.review_state


def _demo_graph_path() -> str:
    import importlib.resources as resources

    return str(resources.files("owlminer.data") / "books.ttl")


@functools.lru_cache(maxsize=1)
def _demo_prefixes() -> tuple[tuple[str, str], ...]:
    from .turtle import load_turtle

    return tuple(sorted(load_turtle(_demo_graph_path()).prefixes.items()))


def _parse_job_request(request: dict):
    if not isinstance(request, dict):
        raise HTTPException(400, "body must be a JSON object")
    has_endpoint = bool(request.get("endpoint"))
    has_fixture = "fixture" in request
    if has_endpoint == has_fixture:
        raise HTTPException(400, "exactly one of endpoint/fixture is required")
    if has_fixture and request["fixture"] != "demo":
        raise HTTPException(400, "only the bundled 'demo' fixture is served")
    has_class = bool(request.get("classIri"))
    has_uris = isinstance(request.get("uris"), list) and request.get("uris")
    if bool(has_class) == bool(has_uris):
        raise HTTPException(400, "exactly one of classIri/uris is required")
    prefixes = PrefixMap(dict(WELL_KNOWN_PREFIXES))
    if has_fixture:
        prefixes.update(dict(_demo_prefixes()))
    extra = request.get("prefixes")
    if extra:
        if not isinstance(extra, dict):
            raise HTTPException(400, "prefixes must be an object")
        prefixes.update(extra)
    try:
        min_support = parse_fraction(str(request["minSupport"]))
        config = MinerConfig(
            min_support=min_support,
            max_depth=int(request.get("maxDepth", 1)),
            batch_size=int(request.get("batchSize", 100)),
            sample_size=(int(request["sampleSize"]) if request.get("sampleSize") else None),
            sampling_strategy=SamplingStrategy(request.get("strategy", "uniform")),
            random_seed=int(request.get("seed", 0)),
            ignore_predicates=tuple(request.get("ignorePredicates", ())),
            query_budget=int(request.get("queryBudget", 10_000)),
        )
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise HTTPException(400, "invalid mining configuration: %s" % exc)
    target = None
    if has_class:
        token = str(request["classIri"])
        try:
            target = Iri(prefixes.expand(token))
        except (KeyError, ValueError):
            try:
                target = Iri(token)
            except ValueError as exc:
                raise HTTPException(400, "bad class IRI: %s" % exc)
    else:
        for uri in request["uris"]:
            try:
                Iri(str(uri))
            except ValueError as exc:
                raise HTTPException(400, "bad subject IRI %r: %s" % (uri, exc))
    return config, prefixes, target


def _sse(event: dict) -> str:
    return "id: %d\nevent: %s\ndata: %s\n\n" % (
        event["eventId"],
        event["type"],
        json.dumps(event["data"], sort_keys=True),
    )


def create_app(data_dir: str, *, ui_dir: str | None = None, job_concurrency: int = 2,
               keepalive_s: float = 15.0) -> FastAPI:
    app = FastAPI(title="owlminer service")
    manager = JobManager(data_dir, job_concurrency)
    app.state.manager = manager

    def get_job(job_id: str) -> Job:
        with manager.lock:
            job = manager.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, "no such job")
        return job

    @app.post("/jobs", status_code=201)
    def create_job(body: dict = Body(...)):
        job = manager.create_job(body)
        return {"jobId": job.job_id, "state": job.state}

    @app.get("/jobs")
    def list_jobs():
        with manager.lock:
            jobs = sorted(manager.jobs.values(), key=lambda j: (j.created_at, j.job_id))
        return [job.summary() for job in jobs]

    @app.get("/jobs/{job_id}")
    def job_detail(job_id: str):
        return get_job(job_id).detail()

    @app.get("/jobs/{job_id}/events")
    def job_events(job_id: str, request: Request, lastEventId: int | None = None):
        job = get_job(job_id)
        last = lastEventId
        if last is None:
            header = request.headers.get("last-event-id")
            last = int(header) if header and header.isdigit() else 0

        def stream():
            cursor = last
            while True:
                with job.cond:
                    pending = [e for e in job.events if e["eventId"] > cursor]
                    if not pending:
                        if job.state in TERMINAL_STATES:
                            return  # terminal event already delivered
                        job.cond.wait(timeout=keepalive_s)
                        pending = [e for e in job.events if e["eventId"] > cursor]
                terminal_seen = False
                for event in pending:
                    cursor = event["eventId"]
                    terminal_seen = (
                        event["type"] == "job-state-changed"
                        and event["data"].get("state") in TERMINAL_STATES
                    )
                    yield _sse(event)
                    if terminal_seen:
                        return
                if not pending:
                    yield ": keepalive\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-store"})

    @app.post("/jobs/{job_id}/stop")
    def stop_job(job_id: str):
        job = get_job(job_id)
        return {"state": manager.stop_job(job)}

    @app.post("/jobs/{job_id}/results/{result_id}/review")
    def review(job_id: str, result_id: str, body: dict = Body(...)):
        job = get_job(job_id)
        verdict = body.get("verdict") if isinstance(body, dict) else None
        if verdict not in ("accept", "reject"):
            raise HTTPException(400, "verdict must be accept or reject")
        return {"reviewState": manager.review(job, result_id, verdict)}

    @app.get("/jobs/{job_id}/export")
    def export(job_id: str, format: str = "json", accepted: bool = False,
               result: str | None = None):
        job = get_job(job_id)
        chosen = [
            r for r in job.results if not accepted or r.review_state == "Accepted"
        ]
        if result is not None:
            chosen = [r for r in chosen if r.result_id == result]
            if not chosen:
                raise HTTPException(404, "no such result")
        if format == "json":
            return [dict(r.record, resultId=r.result_id, reviewState=r.review_state)
                    for r in chosen]
        if format == "manchester":
            lines = []
            for r in chosen:
                rendered = serialize(r.pattern, job.prefixes)
                if job.target is not None:
                    short = job.prefixes.shrink(job.target.value)
                    lhs = short if short is not None else "<%s>" % job.target.value
                    lines.append("%s SubClassOf: %s" % (lhs, rendered))
                else:
                    lines.append(rendered)
            return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""))
        if format == "shacl-turtle":
            doc = shacl.shapes_document([r.pattern for r in chosen], prefixes=job.prefixes)
            return PlainTextResponse(doc, media_type="text/turtle")
        raise HTTPException(400, "format must be json, manchester, or shacl-turtle")

    @app.get("/ontology/export")
    def ontology_export(format: str = "manchester"):
        fmt = {"manchester": "manchester-list", "turtle": "turtle-subclassof"}.get(format)
        if fmt is None:
            raise HTTPException(400, "format must be manchester or turtle")
        prefixes = PrefixMap(dict(WELL_KNOWN_PREFIXES))
        with manager._ontology_lock:
            doc = ontology.export_ontology(manager.ontology, fmt, prefixes)
        media = "text/turtle" if fmt == "turtle-subclassof" else "text/plain"
        return PlainTextResponse(doc.text, media_type=media)

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="owlminer-serve",
                                     description="Serve the mining API and web UI.")
    parser.add_argument("--data-dir", default="owlminer-data")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--ui-dir", default=None,
                        help="directory with the built UI bundle (default: bundled build)")
    parser.add_argument("--job-concurrency", type=int, default=2)
    args = parser.parse_args(argv)

    ui_dir = args.ui_dir
    if ui_dir is None:
        bundled = os.path.join(os.path.dirname(__file__), "ui")
        ui_dir = bundled if os.path.isdir(bundled) else None

    import uvicorn

    app = create_app(args.data_dir, ui_dir=ui_dir, job_concurrency=args.job_concurrency)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
