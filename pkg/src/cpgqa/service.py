"""HTTP service over a loaded guideline graph.

The graph is loaded once at startup as an immutable snapshot; enrichment
builds a new snapshot and swaps it in atomically, so concurrent readers
always see a consistent graph. Responses are emitted through the same
canonical JSON writer as the CLI, byte for byte.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response

from .completion import CompletionClient, client_from_env, model_from_env, replay_client
from .cql.evaluator import EngineLimits, evaluate, serialize_value
from .cql.parser import parse_query
from .enrichment import (
    apply_classification,
    classify_nodes,
    label_all_relations,
    load_exemplars,
)
from .errors import ClientFailure, CpgError, QueryError, QuerySyntaxError, UnknownNode
from .graph import GuidelineGraph, load_graph, neighbors, stats
from .payloads import canonical_json
from .pipeline import ask, load_questions, train_exemplars


@dataclass(frozen=True)
class ServiceConfig:
    graph_path: Path
    hop_cap: int = 10
    row_cap: int = 10_000
    parallelism: int = 1
    listen_host: str = "127.0.0.1"
    listen_port: int = 8350
    enrich_mode: str = "heuristic"
    dataset_path: Path | None = None  # train split supplies ask exemplars
    exemplars_path: Path | None = None  # node exemplars for few-shot classify
    transcript_path: Path | None = None  # mock replies instead of a live endpoint

    def __post_init__(self) -> None:
        if self.hop_cap < 1 or self.row_cap < 1 or self.parallelism < 1:
            raise ValueError("caps and parallelism must be positive")
        if not Path(self.graph_path).is_file():
            raise ValueError(f"graph file not readable: {self.graph_path}")


class _State:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.limits = EngineLimits(hop_cap=config.hop_cap, row_cap=config.row_cap)
        self.graph: GuidelineGraph = load_graph(Path(config.graph_path).read_bytes())
        self.exemplars = (
            train_exemplars(load_questions(Path(config.dataset_path).read_bytes()))
            if config.dataset_path
            else []
        )
        self.node_exemplars = (
            load_exemplars(Path(config.exemplars_path).read_bytes())
            if config.exemplars_path
            else None
        )
        self._swap_lock = threading.Lock()

    def client(self) -> CompletionClient:
        if self.config.transcript_path is not None:
            return replay_client(self.config.transcript_path)
        client = client_from_env()
        if client is None:
            raise ClientFailure("transport", "no completion client configured")
        return client

    def swap_graph(self, graph: GuidelineGraph) -> None:
        with self._swap_lock:
            self.graph = graph


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload), status_code=status_code, media_type="application/json"
    )


def _error_response(status_code: int, message: str, **extra) -> Response:
    return _json_response({"error": message, **extra}, status_code=status_code)


async def _body(request: Request) -> dict:
    try:
        payload = json.loads(await request.body() or b"{}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"body is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ValueError("body must be a JSON object")
    return payload


def create_app(config: ServiceConfig) -> FastAPI:
    state = _State(config)
    app = FastAPI(title="cpgqa", docs_url=None, redoc_url=None)
    app.state.engine = state

    @app.get("/healthz")
    def healthz():
        return _json_response({"status": "ok"})

    @app.get("/graph/stats")
    def graph_stats():
        return _json_response(stats(state.graph).to_payload())

    @app.get("/node/{node_id}")
    def node(node_id: str):
        try:
            return _json_response(serialize_value(state.graph.node(node_id)))
        except UnknownNode as exc:
            return _error_response(404, str(exc))

    @app.get("/node/{node_id}/neighbors")
    def node_neighbors(node_id: str, direction: str = "out"):
        if direction not in ("out", "in"):
            return _error_response(400, "direction must be 'out' or 'in'")
        spelled = "outgoing" if direction == "out" else "incoming"
        try:
            pairs = neighbors(state.graph, node_id, spelled)
        except UnknownNode as exc:
            return _error_response(404, str(exc))
        return _json_response(
            {
                "direction": direction,
                "neighbors": [
                    {
                        "relation": edge.relation.value if edge.relation else None,
                        "node": serialize_value(other),
                    }
                    for edge, other in pairs
                ],
            }
        )

    @app.post("/query")
    async def query(request: Request):
        try:
            body = await _body(request)
        except ValueError as exc:
            return _error_response(400, str(exc))
        cql = body.get("cql")
        if not isinstance(cql, str) or not cql.strip():
            return _error_response(400, "body needs a non-empty 'cql' string")
        graph = state.graph
        try:
            ast = parse_query(cql, hop_cap=state.limits.hop_cap)
        except QuerySyntaxError as exc:
            return _error_response(
                422, str(exc), position=exc.position, expected=exc.expected, found=exc.found
            )
        except QueryError as exc:
            return _error_response(422, str(exc))
        try:
            return _json_response(evaluate(ast, graph, state.limits).to_payload())
        except CpgError as exc:
            return _error_response(400, str(exc))

    @app.post("/ask")
    async def ask_endpoint(request: Request):
        try:
            body = await _body(request)
        except ValueError as exc:
            return _error_response(400, str(exc))
        question = body.get("question")
        if not isinstance(question, str) or not question.strip():
            return _error_response(400, "body needs a non-empty 'question' string")
        graph = state.graph
        try:
            result = ask(
                question, graph, state.client(), state.exemplars,
                limits=state.limits, model=model_from_env(),
            )
        except ClientFailure as exc:
            return _error_response(502, str(exc))
        except CpgError as exc:
            return _error_response(400, str(exc))
        return _json_response(result.to_payload())

    @app.post("/classify")
    async def classify(request: Request):
        try:
            body = await _body(request)
        except ValueError as exc:
            return _error_response(400, str(exc))
        mode = body.get("mode", "heuristic")
        if mode not in ("heuristic", "zero-shot", "few-shot"):
            return _error_response(400, "mode must be heuristic, zero-shot, or few-shot")
        graph = state.graph
        try:
            client = state.client() if mode != "heuristic" else None
            result = classify_nodes(
                graph, client, mode, state.node_exemplars,
                model=model_from_env(), parallelism=state.config.parallelism,
            )
        except ClientFailure as exc:
            return _error_response(502, str(exc))
        except CpgError as exc:
            return _error_response(400, str(exc))
        return _json_response(result.to_payload())

    @app.post("/enrich")
    async def enrich(request: Request):
        try:
            await _body(request)
        except ValueError as exc:
            return _error_response(400, str(exc))
        mode = state.config.enrich_mode
        try:
            client = state.client() if mode != "heuristic" else None
            result = classify_nodes(
                state.graph, client, mode, state.node_exemplars,
                model=model_from_env(), parallelism=state.config.parallelism,
            )
            enriched = label_all_relations(apply_classification(state.graph, result))
        except ClientFailure as exc:
            return _error_response(502, str(exc))
        except CpgError as exc:
            return _error_response(400, str(exc))
        state.swap_graph(enriched)
        return _json_response(stats(enriched).to_payload())

    return app
