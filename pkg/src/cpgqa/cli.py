"""Command-line interface.

Subcommands map one-to-one onto library operations; ``--json`` switches
from human tables to the same canonical JSON the HTTP service emits.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import figures
from .completion import CompletionClient, client_from_env, model_from_env, replay_client
from .cql.evaluator import EngineLimits, evaluate
from .cql.parser import parse_query
from .enrichment import (
    apply_classification,
    classify_nodes,
    label_all_relations,
    load_exemplars,
    load_gold_labels,
    load_lexicons,
    score_classification,
)
from .errors import CpgError
from .graph import export_graph, load_graph, stats
from .payloads import canonical_json
from .pipeline import ask, load_questions, run_eval, train_exemplars
from .render import RenderedAnswer

_INPUT_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


def common_options(command):
    @click.option("--json", "as_json", is_flag=True, help="Emit canonical JSON.")
    @click.option("--hop-cap", type=int, default=10, show_default=True,
                  help="Global cap on variable-length hop maxima.")
    @click.option("--row-cap", type=int, default=10_000, show_default=True,
                  help="Cap on query result rows.")
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except CpgError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _limits(hop_cap: int, row_cap: int) -> EngineLimits:
    if hop_cap < 1 or row_cap < 1:
        raise click.UsageError("--hop-cap and --row-cap must be positive")
    return EngineLimits(hop_cap=hop_cap, row_cap=row_cap)


def _load(path: Path):
    return load_graph(path.read_bytes())


def _client(mock: Path | None) -> CompletionClient:
    if mock is not None:
        return replay_client(mock)
    client = client_from_env()
    if client is None:
        raise CpgError(
            "no completion client configured: pass --mock or set CPG_LLM_ENDPOINT"
        )
    return client


@click.group()
@click.version_option(package_name="cpgqa")
def main():
    """Guideline knowledge-graph engine."""


@main.command()
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the canonical document here instead of stdout.")
@common_options
def ingest(graph_file: Path, out: Path | None, as_json: bool, hop_cap: int, row_cap: int):
    """Load a guideline document and emit its canonical form."""
    document = export_graph(_load(graph_file)).decode("utf-8")
    if out is not None:
        out.write_text(document, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(document, nl=False)


def _stats_table(payload: dict) -> str:
    lines = []
    for section in ("nodes", "edges"):
        lines.append(f"{section}:")
        for key, value in payload[section].items():
            lines.append(f"  {key:<18} {value}")
    return "\n".join(lines)


@main.command()
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--figure", type=click.Path(dir_okay=False, path_type=Path),
              help="Also render the counts as a figure at this path.")
@common_options
def validate(graph_file: Path, figure: Path | None, as_json: bool, hop_cap: int, row_cap: int):
    """Validate a guideline document and print its corpus statistics."""
    graph = _load(graph_file)
    graph_stats = stats(graph)
    payload = graph_stats.to_payload()
    click.echo(canonical_json(payload) if as_json else _stats_table(payload))
    if figure is not None:
        figures.save_stats_figure(graph_stats, figure)
        click.echo(f"figure written to {figure}", err=True)


@main.command()
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--mode", type=click.Choice(["heuristic", "zero-shot", "few-shot"]),
              default="heuristic", show_default=True)
@click.option("--exemplars", "exemplars_file", type=_INPUT_FILE,
              help="Exemplar file for few-shot mode.")
@click.option("--gold", "gold_file", type=_INPUT_FILE,
              help="Gold labels; prints an accuracy report.")
@click.option("--lexicon", "lexicon_file", type=_INPUT_FILE,
              help="Lexicon file overriding the built-in heuristic word lists.")
@click.option("--mock", "mock_file", type=_INPUT_FILE,
              help="Replay completion replies from a transcript file.")
@click.option("--apply", "apply_to", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the graph with predictions applied to this file.")
@click.option("--parallelism", type=int, default=1, show_default=True)
@common_options
def classify(graph_file: Path, mode: str, exemplars_file: Path | None, gold_file: Path | None,
             lexicon_file: Path | None, mock_file: Path | None, apply_to: Path | None,
             parallelism: int, as_json: bool, hop_cap: int, row_cap: int):
    """Predict node categories (heuristic, zero-shot, or few-shot)."""
    graph = _load(graph_file)
    exemplars = load_exemplars(exemplars_file.read_bytes()) if exemplars_file else None
    lexicons = load_lexicons(lexicon_file.read_bytes()) if lexicon_file else None
    client = _client(mock_file) if mode != "heuristic" else None
    result = classify_nodes(
        graph, client, mode, exemplars,
        lexicons=lexicons, model=model_from_env(), parallelism=parallelism,
    )
    if gold_file is not None:
        report = score_classification(result, load_gold_labels(gold_file.read_bytes()))
        if as_json:
            click.echo(canonical_json({"classification": result.to_payload(),
                                       "accuracy": report.to_payload()}))
        else:
            click.echo(f"accuracy: {report.accuracy}% ({report.correct}/{report.total})")
    elif as_json:
        click.echo(canonical_json(result.to_payload()))
    else:
        for node_id, prediction in sorted(result.to_payload()["predictions"].items()):
            shown = prediction if isinstance(prediction, str) else f"FAILED ({prediction['failure']})"
            click.echo(f"{node_id:<8} {shown}")
    if apply_to is not None:
        enriched = apply_classification(graph, result)
        apply_to.write_bytes(export_graph(enriched))
        click.echo(f"wrote {apply_to}", err=True)


@main.command("label-relations")
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the relabeled document here instead of stdout.")
@common_options
def label_relations(graph_file: Path, out: Path | None, as_json: bool, hop_cap: int, row_cap: int):
    """Derive every edge relation from its endpoint categories."""
    labeled = label_all_relations(_load(graph_file))
    document = export_graph(labeled).decode("utf-8")
    if out is not None:
        out.write_text(document, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(document, nl=False)


def _result_table(payload: dict) -> str:
    lines = [f"columns: {', '.join(payload['columns'])}", f"rows: {len(payload['rows'])}"]
    for index, row in enumerate(payload["rows"]):
        cells = []
        for value in row:
            if isinstance(value, dict) and "nodes" in value:
                cells.append(" -> ".join(value["nodes"]))
            elif isinstance(value, dict):
                cells.append(value.get("id", "?"))
            elif isinstance(value, list):
                cells.append("[" + ", ".join(v.get("id", "?") for v in value) + "]")
            else:
                cells.append(str(value))
        lines.append(f"  [{index}] " + " | ".join(cells))
    return "\n".join(lines)


@main.command()
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("-q", "--query", "query_text", help="Query text.")
@click.option("-f", "--file", "query_file", type=_INPUT_FILE, help="Read the query from a file.")
@common_options
def query(graph_file: Path, query_text: str | None, query_file: Path | None,
          as_json: bool, hop_cap: int, row_cap: int):
    """Run a CQL query against a guideline graph."""
    if (query_text is None) == (query_file is None):
        raise click.UsageError("provide exactly one of -q/--query or -f/--file")
    text = query_text if query_text is not None else query_file.read_text(encoding="utf-8")
    limits = _limits(hop_cap, row_cap)
    result = evaluate(parse_query(text, hop_cap=limits.hop_cap), _load(graph_file), limits)
    payload = result.to_payload()
    click.echo(canonical_json(payload) if as_json else _result_table(payload))


def _answers_text(answers: list[RenderedAnswer]) -> str:
    lines = []
    for index, answer in enumerate(answers):
        marker = " [fallback]" if answer.fallback_used else ""
        lines.append(f"[{index}]{marker} {answer.text}")
    return "\n".join(lines)


@main.command("ask")
@click.argument("graph_file", type=_INPUT_FILE)
@click.argument("question")
@click.option("--exemplars", "dataset_file", type=_INPUT_FILE,
              help="Question dataset; its train split supplies exemplars.")
@click.option("--mock", "mock_file", type=_INPUT_FILE,
              help="Replay completion replies from a transcript file.")
@common_options
def ask_command(graph_file: Path, question: str, dataset_file: Path | None,
                mock_file: Path | None, as_json: bool, hop_cap: int, row_cap: int):
    """Answer a natural-language question over the guideline graph."""
    graph = _load(graph_file)
    exemplars = (
        train_exemplars(load_questions(dataset_file.read_bytes())) if dataset_file else []
    )
    result = ask(
        question, graph, _client(mock_file), exemplars,
        limits=_limits(hop_cap, row_cap), model=model_from_env(),
    )
    if as_json:
        click.echo(canonical_json(result.to_payload()))
        return
    click.echo(f"query:\n{result.query}")
    if result.error is not None:
        click.echo(f"error: {result.error.display_name}")
    elif result.answers:
        click.echo(_answers_text(result.answers))
    else:
        click.echo("no matching paths")



@main.command("eval")
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--dataset", "dataset_file", type=_INPUT_FILE, required=True)
@click.option("--mock", "mock_file", type=_INPUT_FILE,
              help="Replay completion replies from a transcript file.")
@click.option("--figure", type=click.Path(dir_okay=False, path_type=Path),
              help="Also render the error breakdown as a figure at this path.")
@click.option("--parallelism", type=int, default=1, show_default=True)
@common_options
def eval_command(graph_file: Path, dataset_file: Path, mock_file: Path | None,
                 figure: Path | None, parallelism: int,
                 as_json: bool, hop_cap: int, row_cap: int):
    """Classify generated queries for a question dataset and report error rates."""
    graph = _load(graph_file)
    dataset = load_questions(dataset_file.read_bytes())
    report = run_eval(
        dataset, graph, _client(mock_file),
        limits=_limits(hop_cap, row_cap), model=model_from_env(), parallelism=parallelism,
    )
    click.echo(canonical_json(report.to_payload()) if as_json else report.format_table())
    if figure is not None:
        figures.save_eval_figure(report, figure)
        click.echo(f"figure written to {figure}", err=True)


@main.command()
@click.argument("graph_file", type=_INPUT_FILE)
@click.option("--listen", default=None, help="host:port (default CPG_LISTEN_ADDR or 127.0.0.1:8350)")
@click.option("--dataset", "dataset_file", type=_INPUT_FILE,
              help="Question dataset; its train split supplies ask exemplars.")
@click.option("--mock", "mock_file", type=_INPUT_FILE,
              help="Replay completion replies from a transcript file.")
@common_options
def serve(graph_file: Path, listen: str | None, dataset_file: Path | None,
          mock_file: Path | None, as_json: bool, hop_cap: int, row_cap: int):
    """Serve the HTTP API over a loaded guideline graph."""
    import os

    import uvicorn

    from .service import ServiceConfig, create_app

    address = listen or os.environ.get("CPG_LISTEN_ADDR", "127.0.0.1:8350")
    host, _, port = address.rpartition(":")
    config = ServiceConfig(
        graph_path=graph_file, hop_cap=hop_cap, row_cap=row_cap,
        listen_host=host or "127.0.0.1", listen_port=int(port),
        dataset_path=dataset_file, transcript_path=mock_file,
    )
    uvicorn.run(create_app(config), host=config.listen_host, port=config.listen_port,
                log_level="warning")


if __name__ == "__main__":
    main()
