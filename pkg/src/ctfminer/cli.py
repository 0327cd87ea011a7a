"""Command-line frontend: ingestion, mining, sentiment, clustering,
export, and serving.  All machine-readable output is canonical JSON
(sorted keys, 9-significant-digit floats) so golden files are stable."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import queries, synth
from .canonical import canonical_dump_pretty, canonical_dumps
from .config import load_config
from .events import PreprocessConfig, adapter_ids, write_normalized
from .filters import InvalidSpec
from .store import DatasetStore, DuplicateDataset, UnknownDataset


def _load_json(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _write_out(out: str | None, text: str) -> None:
    if out is None or out == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _emit(doc: dict, out: str | None) -> None:
    _write_out(out, canonical_dumps(doc) if out == "-" else canonical_dump_pretty(doc))


def _positive_int(ctx, param, value):
    if value is not None and value < 1:
        raise click.BadParameter("must be a positive integer")
    return value


@click.group()
def main():
    """Process-mining analytics for supervised CTF training data."""


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--adapter", default="normalized", show_default=True,
              help=f"Input adapter, one of: {', '.join(adapter_ids())}")
@click.option("--dataset-id", default=None, help="Dataset id (defaults to the file stem)")
@click.option("--data", "data_dir", default="./data", show_default=True,
              help="Root data directory")
@click.option("--preprocess", "preprocess_cfg", type=click.Path(exists=True), default=None,
              help="Preprocess config JSON file")
@click.option("--name", default=None)
def ingest(source, adapter, dataset_id, data_dir, preprocess_cfg, name):
    """Ingest a raw export into a dataset directory and print stats."""
    dataset_id = dataset_id or Path(source).stem
    cfg = PreprocessConfig.from_json(_load_json(preprocess_cfg)) if preprocess_cfg else None
    store = DatasetStore(Path(data_dir))
    lines = Path(source).read_text(encoding="utf-8").splitlines()
    try:
        record = store.create(dataset_id, lines, adapter, name=name, preprocess_config=cfg)
    except DuplicateDataset:
        raise click.ClickException(f"dataset {dataset_id!r} already exists")
    stats = record.stats
    click.echo(f"dataset: {dataset_id}")
    click.echo(f"trainees: {stats['trainees']}")
    click.echo(f"levels: {' '.join(str(l) for l in stats['levels'])}")
    for label, counts in (("raw", stats["raw_event_counts"]), ("kept", stats["event_counts"])):
        click.echo(
            f"{label} events: bash {counts['bash']}  msf {counts['msf']}  game {counts['game']}"
        )
    removal = record.removal_report
    click.echo(
        "removed: duplicates {duplicates}  burst {burst}  garbage {garbage}".format(**removal)
    )
    if record.parse_errors:
        for err in record.parse_errors:
            click.echo(f"ParseError line {err['line']}: {err['reason']}", err=True)
        sys.exit(1)


def _dataset_options(fn):
    fn = click.option("--data", "data_dir", default="./data", show_default=True)(fn)
    fn = click.option("--dataset", "dataset_id", required=True)(fn)
    fn = click.option("--filter", "filter_cfg", type=click.Path(exists=True), default=None,
                      help="FilterSpec JSON file")(fn)
    fn = click.option("--mapping", "mapping_cfg", type=click.Path(exists=True), default=None,
                      help="ActivityMappingConfig JSON file")(fn)
    fn = click.option("--out", default="-", show_default=True,
                      help="Output path, '-' streams canonical JSON to stdout")(fn)
    return fn


def _run_query(name: str, data_dir, dataset_id, req: dict, out: str):
    store = DatasetStore(Path(data_dir))
    try:
        log = store.load_log(dataset_id)
        doc = queries.QUERIES[name](log, req)
    except UnknownDataset:
        raise click.ClickException(f"no dataset {dataset_id!r} in {data_dir}")
    except InvalidSpec as exc:
        raise click.ClickException(f"invalid filter spec: {exc}")
    return doc


@main.command()
@_dataset_options
@click.option("--mode", type=click.Choice(["freq", "perf"]), default="freq", show_default=True)
@click.option("--stat", type=click.Choice(["mean", "median", "min", "max"]), default="median",
              show_default=True)
@click.option("--threshold", type=float, default=0.0, show_default=True,
              help="Dependency-score pruning threshold")
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default=None,
              help="Output format (default: by --out extension, else json)")
def graph(data_dir, dataset_id, filter_cfg, mapping_cfg, out, mode, stat, threshold, fmt):
    """Export the discovered process graph as JSON or DOT."""
    if fmt is None:
        fmt = "dot" if out.endswith(".dot") else "json"
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "mode": "performance" if mode == "perf" else "frequency",
        "stat": stat,
        "dependency_threshold": threshold,
        "include_dot": fmt == "dot",
    }
    doc = _run_query("graph", data_dir, dataset_id, req, out)
    if not doc["graph"]["nodes"]:
        click.echo("warning: filter selects no events; graph is empty", err=True)
    if fmt == "dot":
        _write_out(out, doc["dot"])
    else:
        doc.pop("dot", None)
        _emit(doc, out)


@main.command()
@_dataset_options
@click.option("--window", type=float, default=None, help="Window size, percent of level length")
@click.option("--step", type=float, default=None, help="Step size, percent of level length")
@click.option("--weights", "weights_cfg", type=click.Path(exists=True), default=None,
              help="SentimentConfig JSON file")
def sentiment(data_dir, dataset_id, filter_cfg, mapping_cfg, out, window, step, weights_cfg):
    """Sliding-window sentiment series per trainee."""
    sentiment_doc = _load_json(weights_cfg)
    if window is not None:
        sentiment_doc["window_pct"] = window
    if step is not None:
        sentiment_doc["step_pct"] = step
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "sentiment": sentiment_doc,
    }
    _emit(_run_query("sentiment", data_dir, dataset_id, req, out), out)


@main.command()
@_dataset_options
@click.option("--k", type=int, default=3, show_default=True, callback=_positive_int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--restarts", type=int, default=10, show_default=True, callback=_positive_int)
@click.option("--sentiment", "sentiment_cfg", type=click.Path(exists=True), default=None,
              help="SentimentConfig JSON file")
def cluster(data_dir, dataset_id, filter_cfg, mapping_cfg, out, k, seed, restarts, sentiment_cfg):
    """Seeded k-means over cumulative sentiment series."""
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "sentiment": _load_json(sentiment_cfg),
        "clustering": {"k": k, "seed": seed, "restarts": restarts},
    }
    _emit(_run_query("clusters", data_dir, dataset_id, req, out), out)


@main.command()
@_dataset_options
@click.option("--kmax", type=int, default=10, show_default=True, callback=_positive_int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sentiment", "sentiment_cfg", type=click.Path(exists=True), default=None)
def elbow(data_dir, dataset_id, filter_cfg, mapping_cfg, out, kmax, seed, sentiment_cfg):
    """WCSS elbow series for choosing the cluster count."""
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "sentiment": _load_json(sentiment_cfg),
        "clustering": {"k_max": kmax, "seed": seed},
    }
    _emit(_run_query("elbow", data_dir, dataset_id, req, out), out)


@main.command()
@_dataset_options
def matrix(data_dir, dataset_id, filter_cfg, mapping_cfg, out):
    """Per-trainee activity matrix with tooltip details."""
    req = {"filter": _load_json(filter_cfg), "mapping": _load_json(mapping_cfg)}
    _emit(_run_query("matrix", data_dir, dataset_id, req, out), out)


@main.command()
@_dataset_options
@click.option("--window-index", type=int, default=None,
              help="Sentiment-grid window index")
@click.option("--center", default=None, help="Absolute center timestamp (ISO-8601)")
@click.option("--span", type=float, default=None, help="Span in seconds around the center")
@click.option("--sentiment", "sentiment_cfg", type=click.Path(exists=True), default=None)
def proximity(data_dir, dataset_id, filter_cfg, mapping_cfg, out, window_index, center, span,
              sentiment_cfg):
    """Activities performed at similar times (temporal proximity)."""
    if window_index is None and (center is None or span is None):
        raise click.UsageError("provide --window-index or both --center and --span")
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "sentiment": _load_json(sentiment_cfg),
        "window_index": window_index,
        "center": center,
        "span_seconds": span,
    }
    _emit(_run_query("proximity", data_dir, dataset_id, req, out), out)


@main.command()
@_dataset_options
@click.option("--metrics", default="command_count,relative_time", show_default=True,
              help="Comma-separated: command_count, relative_time, sentiment")
@click.option("--sentiment", "sentiment_cfg", type=click.Path(exists=True), default=None)
def overview(data_dir, dataset_id, filter_cfg, mapping_cfg, out, metrics, sentiment_cfg):
    """Per-level statistical overview."""
    req = {
        "filter": _load_json(filter_cfg),
        "mapping": _load_json(mapping_cfg),
        "metrics": [m.strip() for m in metrics.split(",") if m.strip()],
        "sentiment": _load_json(sentiment_cfg),
    }
    _emit(_run_query("overview", data_dir, dataset_id, req, out), out)


@main.command()
@click.option("--port", type=int, default=None)
@click.option("--data", "data_dir", default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@click.option("--log-level", default=None)
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Directory with the dashboard build to serve at /")
def serve(port, data_dir, config_file, log_level, static_dir):
    """Run the HTTP analysis service."""
    from .service import serve as run_service

    cfg = load_config(config_file, port=port, data_dir=data_dir, log_level=log_level)
    run_service(cfg, static_dir=static_dir)


@main.command(name="synth")
@click.argument("dataset", type=click.Choice(sorted(synth.DATASET_SPECS)))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def synth_cmd(dataset, out):
    """Write a deterministic synthetic dataset in normalized JSONL form."""
    write_normalized(synth.generate(dataset), out)
    click.echo(f"wrote {dataset} to {out}")


if __name__ == "__main__":
    main()
