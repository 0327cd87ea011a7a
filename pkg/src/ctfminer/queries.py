"""Analytics queries shared by the CLI and the HTTP service.

Every query takes the immutable preprocessed log plus a request document
and returns a JSON-ready dict that echoes the exact effective
configuration, so replaying the echo reproduces the response and the two
frontends stay byte-identical under canonical serialization.
"""

from __future__ import annotations

from datetime import datetime
from typing import Optional

from .clustering import cluster_views, elbow, extract_features, kmeans
from .discovery import (
    EdgeStat,
    activity_id,
    build_traces,
    discover,
    graph_to_dot,
    graph_to_json,
    highlight_paths,
    level_overview,
    nearby_activities,
)
from .events import ActivityMappingConfig, EventLog, map_activities, parse_timestamp
from .filters import FilterSpec, InvalidSpec, ValidationReport, validate
from .sentiment import SentimentConfig, compute_sentiment, window_membership


def _parse_common(req: dict) -> tuple[FilterSpec, ActivityMappingConfig]:
    spec = FilterSpec.from_json(req.get("filter") or {})
    mapping = ActivityMappingConfig.from_json(req.get("mapping") or {})
    return spec, mapping


def _prepared(log: EventLog, req: dict):
    spec, mapping = _parse_common(req)
    alog = map_activities(log, mapping)
    report = validate(spec, alog)
    if not report.ok:
        raise InvalidSpec(report)
    return alog, spec, mapping


def graph_query(log: EventLog, req: dict) -> dict:
    """Process graph in frequency or performance mode, with optional DOT."""
    alog, spec, mapping = _prepared(log, req)
    mode = req.get("mode", "frequency")
    if mode not in ("frequency", "performance"):
        raise ValueError(f"unknown graph mode {mode!r}")
    stat = EdgeStat(req.get("stat", "median")) if mode == "performance" else None
    threshold = float(req.get("dependency_threshold", 0.0))
    traces = build_traces(alog, spec)
    graph = discover(traces, threshold)
    doc = {
        "config": {
            "filter": spec.to_json(),
            "mapping": mapping.to_json(),
            "mode": mode,
            "stat": stat.value if stat else None,
            "dependency_threshold": threshold,
        },
        "graph": graph_to_json(graph, stat),
    }
    highlight = req.get("highlight_trainees")
    if highlight is not None:
        nodes, edges = highlight_paths(graph, highlight)
        doc["highlight"] = {
            "nodes": sorted(activity_id(a) for a in nodes),
            "edges": sorted([activity_id(a), activity_id(b)] for a, b in edges),
        }
    if req.get("include_dot"):
        doc["dot"] = graph_to_dot(graph, stat)
    return doc


def sentiment_query(log: EventLog, req: dict) -> dict:
    alog, spec, mapping = _prepared(log, req)
    cfg = SentimentConfig.from_json(req.get("sentiment") or {})
    result = compute_sentiment(alog, cfg, spec)
    doc = result.to_json(cfg)
    doc["config"] = {
        "filter": spec.to_json(),
        "mapping": mapping.to_json(),
        "sentiment": cfg.to_json(),
    }
    return doc


DEFAULT_CLUSTER_K = 3


def clusters_query(log: EventLog, req: dict) -> dict:
    alog, spec, mapping = _prepared(log, req)
    cfg = SentimentConfig.from_json(req.get("sentiment") or {})
    params = req.get("clustering") or {}
    k = int(params.get("k", DEFAULT_CLUSTER_K))
    seed = int(params.get("seed", 0))
    restarts = int(params.get("restarts", 10))
    max_iter = int(params.get("max_iter", 100))
    tol = float(params.get("tol", 1e-6))
    result = compute_sentiment(alog, cfg, spec)
    features = extract_features(result.series, result.grid)
    clusters = kmeans(features, k, seed=seed, restarts=restarts, max_iter=max_iter, tol=tol)
    doc = {
        "config": {
            "filter": spec.to_json(),
            "mapping": mapping.to_json(),
            "sentiment": cfg.to_json(),
            "clustering": {
                "k": k,
                "seed": seed,
                "restarts": restarts,
                "max_iter": max_iter,
                "tol": tol,
            },
        },
        "clusters": clusters.to_json(),
        "views": cluster_views(clusters, features),
        "features": [f.to_json() for f in features],
    }
    if params.get("elbow_k_max"):
        doc["elbow"] = elbow(
            features, int(params["elbow_k_max"]), seed=seed, restarts=restarts
        ).to_json()
    return doc


def elbow_query(log: EventLog, req: dict) -> dict:
    alog, spec, mapping = _prepared(log, req)
    cfg = SentimentConfig.from_json(req.get("sentiment") or {})
    params = req.get("clustering") or {}
    seed = int(params.get("seed", 0))
    k_max = int(params.get("k_max", 10))
    result = compute_sentiment(alog, cfg, spec)
    features = extract_features(result.series, result.grid)
    return {
        "config": {
            "filter": spec.to_json(),
            "mapping": mapping.to_json(),
            "sentiment": cfg.to_json(),
            "clustering": {"k_max": k_max, "seed": seed},
        },
        "elbow": elbow(features, k_max, seed=seed).to_json(),
    }


def matrix_query(log: EventLog, req: dict) -> dict:
    """Per-trainee activity matrix: rows are trainees, columns distinct
    activities in order of first occurrence, cells carry counts and event
    details for tooltips."""
    alog, spec, mapping = _prepared(log, req)
    from .filters import apply as apply_filter

    filtered = apply_filter(spec, alog)
    first_seen: dict = {}
    cells: dict = {}
    for ev, act in filtered.annotated():
        if act not in first_seen:
            first_seen[act] = ev.timestamp
        cell = cells.setdefault((ev.trainee_id, act), {"count": 0, "events": []})
        cell["count"] += 1
        cell["events"].append(
            {"timestamp": ev.to_json()["timestamp"], "content": ev.content}
        )
    columns = sorted(first_seen, key=lambda a: (first_seen[a], a.key))
    rows = sorted(filtered.trainees)
    return {
        "config": {"filter": spec.to_json(), "mapping": mapping.to_json()},
        "columns": [
            {"id": activity_id(a), **a.to_json()} for a in columns
        ],
        "rows": rows,
        "cells": {
            tid: {
                activity_id(a): cells[(tid, a)]
                for a in columns
                if (tid, a) in cells
            }
            for tid in rows
        },
    }


def proximity_query(log: EventLog, req: dict) -> dict:
    """Temporal proximity: either a sentiment-grid window index or an
    absolute center timestamp with a span in seconds."""
    alog, spec, mapping = _prepared(log, req)
    trainees = req.get("trainees")
    if "window_index" in req and req["window_index"] is not None:
        cfg = SentimentConfig.from_json(req.get("sentiment") or {})
        from .sentiment import build_window_grid

        grid = build_window_grid(alog, cfg, spec)
        acts = window_membership(alog, grid, int(req["window_index"]), trainees)
        selection = {"window_index": int(req["window_index"]), "sentiment": cfg.to_json()}
    else:
        center = parse_timestamp(req["center"])
        span = float(req["span_seconds"])
        from .filters import apply as apply_filter

        filtered = apply_filter(spec, alog)
        selected = trainees if trainees is not None else sorted(filtered.trainees)
        acts = nearby_activities(filtered, selected, center, span)
        selection = {"center": req["center"], "span_seconds": span}
    return {
        "config": {
            "filter": spec.to_json(),
            "mapping": mapping.to_json(),
            "selection": selection,
            "trainees": None if trainees is None else sorted(trainees),
        },
        "activities": sorted(
            ({"id": activity_id(a), **a.to_json()} for a in acts),
            key=lambda d: d["id"],
        ),
    }


def overview_query(log: EventLog, req: dict) -> dict:
    """Per-level statistical overview (drill-up view of the graph)."""
    alog, spec, mapping = _prepared(log, req)
    metrics = frozenset(req.get("metrics") or {"command_count", "relative_time"})
    sentiment_map = None
    if "sentiment" in metrics:
        cfg = SentimentConfig.from_json(req.get("sentiment") or {})
        result = compute_sentiment(alog, cfg, spec)
        sentiment_map = {}
        counts: dict = {}
        for (tid, idx), value in result.normalized.items():
            level = result.grid.windows[idx].level
            key = (tid, level)
            sentiment_map[key] = sentiment_map.get(key, 0.0) + value
            counts[key] = counts.get(key, 0) + 1
        sentiment_map = {k: v / counts[k] for k, v in sentiment_map.items()}
    overviews = level_overview(alog, spec, metrics, sentiment_map)
    return {
        "config": {
            "filter": spec.to_json(),
            "mapping": mapping.to_json(),
            "metrics": sorted(metrics),
        },
        "levels": [o.to_json() for o in overviews],
    }


QUERIES = {
    "graph": graph_query,
    "sentiment": sentiment_query,
    "clusters": clusters_query,
    "elbow": elbow_query,
    "matrix": matrix_query,
    "proximity": proximity_query,
    "overview": overview_query,
}
