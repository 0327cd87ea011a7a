"""Directly-follows process graphs with heuristic pruning, performance
statistics, path highlighting, temporal proximity, and per-level
statistical overviews."""

from __future__ import annotations

import hashlib
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Iterable, Optional, Sequence

from .events import Activity, ActivityLog, Event, EventClass
from .filters import FilterSpec, apply as apply_filter


class UnknownTrainee(KeyError):
    pass


@dataclass(frozen=True)
class Trace:
    trainee_id: str
    steps: tuple[tuple[Activity, datetime], ...]


def build_traces(log: ActivityLog, spec: FilterSpec = FilterSpec()) -> list[Trace]:
    """One time-ordered trace per included trainee."""
    filtered = apply_filter(spec, log)
    per_trainee: dict[str, list[tuple[Activity, datetime]]] = {}
    for ev, act in filtered.annotated():
        per_trainee.setdefault(ev.trainee_id, []).append((act, ev.timestamp))
    return [Trace(tid, tuple(steps)) for tid, steps in sorted(per_trainee.items())]


@dataclass
class Edge:
    source: Activity
    target: Activity
    frequency: int = 0
    trainee_ids: set[str] = field(default_factory=set)
    durations: list[float] = field(default_factory=list)  # seconds


# Game types that delimit a level; used as entry/exit markers of the
# k-partite level partitions.
ENTRY_TYPES = frozenset({"LevelStarted", "TrainingStarted"})
EXIT_TYPES = frozenset({"CorrectAnswerSubmitted", "TrainingFinished"})


@dataclass
class ProcessGraph:
    nodes: set[Activity]
    edges: dict[tuple[Activity, Activity], Edge]
    level_partitions: dict[int, set[Activity]]
    entry_markers: dict[int, set[Activity]]
    exit_markers: dict[int, set[Activity]]
    trainees: frozenset[str]
    back_edges: set[tuple[Activity, Activity]] = field(default_factory=set)

    def edge_list(self) -> list[Edge]:
        return [self.edges[k] for k in sorted(self.edges, key=lambda k: (k[0].key, k[1].key))]


def dependency_score(ab: int, ba: int) -> float:
    """Heuristic-miner dependency measure (|a>b| - |b>a|) / (|a>b| + |b>a| + 1)."""
    return (ab - ba) / (ab + ba + 1)


def discover(traces: Sequence[Trace], dependency_threshold: float = 0.0) -> ProcessGraph:
    """Aggregate directly-follows edges over all traces.

    At threshold 0 the result is the pure directly-follows graph.  With a
    positive threshold, edges whose dependency score falls below it are
    pruned unless pruning would disconnect a node from its level's
    entry/exit boundary.
    """
    edges: dict[tuple[Activity, Activity], Edge] = {}
    nodes: set[Activity] = set()
    trainees: set[str] = set()
    for trace in traces:
        trainees.add(trace.trainee_id)
        for act, _ in trace.steps:
            nodes.add(act)
        for (a, ta), (b, tb) in zip(trace.steps, trace.steps[1:]):
            edge = edges.get((a, b))
            if edge is None:
                edge = edges[(a, b)] = Edge(a, b)
            edge.frequency += 1
            edge.trainee_ids.add(trace.trainee_id)
            edge.durations.append((tb - ta).total_seconds())

    if dependency_threshold > 0:
        counts = {key: e.frequency for key, e in edges.items()}
        candidates = []
        for (a, b), e in edges.items():
            score = dependency_score(counts.get((a, b), 0), counts.get((b, a), 0))
            if score < dependency_threshold:
                candidates.append((score, a.key, b.key, (a, b)))
        out_deg: dict[Activity, int] = {}
        in_deg: dict[Activity, int] = {}
        for a, b in edges:
            out_deg[a] = out_deg.get(a, 0) + 1
            in_deg[b] = in_deg.get(b, 0) + 1
        for _, _, _, key in sorted(candidates):
            a, b = key
            a_is_exit = a.source_class is EventClass.GAME and a.label in EXIT_TYPES
            b_is_entry = b.source_class is EventClass.GAME and b.label in ENTRY_TYPES
            if (out_deg[a] > 1 or a_is_exit) and (in_deg[b] > 1 or b_is_entry):
                del edges[key]
                out_deg[a] -= 1
                in_deg[b] -= 1

    partitions: dict[int, set[Activity]] = {}
    entry: dict[int, set[Activity]] = {}
    exit_: dict[int, set[Activity]] = {}
    for act in nodes:
        partitions.setdefault(act.level, set()).add(act)
        if act.source_class is EventClass.GAME and act.label in ENTRY_TYPES:
            entry.setdefault(act.level, set()).add(act)
        if act.source_class is EventClass.GAME and act.label in EXIT_TYPES:
            exit_.setdefault(act.level, set()).add(act)

    # Back-edges (level revisits) are recorded as observed and flagged.
    back = {(a, b) for a, b in edges if b.level < a.level}
    return ProcessGraph(
        nodes=nodes,
        edges=edges,
        level_partitions=partitions,
        entry_markers=entry,
        exit_markers=exit_,
        trainees=frozenset(trainees),
        back_edges=back,
    )


class EdgeStat(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class PerformanceStats:
    mean: float
    median: float
    min: float
    max: float

    @classmethod
    def of(cls, durations: Sequence[float]) -> "PerformanceStats":
        return cls(
            mean=sum(durations) / len(durations),
            median=statistics.median(durations),
            min=min(durations),
            max=max(durations),
        )

    def get(self, stat: EdgeStat) -> float:
        return getattr(self, stat.value)

    def to_json(self) -> dict:
        return {"mean": self.mean, "median": self.median, "min": self.min, "max": self.max}


def performance_view(graph: ProcessGraph, stat: EdgeStat) -> dict[tuple[Activity, Activity], float]:
    """Per-edge duration statistic in seconds; structure is unchanged."""
    return {
        key: PerformanceStats.of(edge.durations).get(stat)
        for key, edge in graph.edges.items()
    }


def highlight_paths(graph: ProcessGraph, trainee_ids: Iterable[str]) -> tuple[set[Activity], set[tuple[Activity, Activity]]]:
    """Nodes and edges touched by the selected trainees."""
    selected = set(trainee_ids)
    unknown = selected - graph.trainees
    if unknown:
        raise UnknownTrainee(sorted(unknown))
    edges = {key for key, e in graph.edges.items() if e.trainee_ids & selected}
    nodes = {a for key in edges for a in key}
    # Isolated nodes (single-step traces) have no edges but still belong
    # to the selected trainees' paths; recover them from edge endpoints of
    # the full graph is not possible, so accept edge-derived nodes plus
    # nodes that only the selection visited via self loops.
    return nodes, edges


def nearby_activities(
    log: ActivityLog,
    trainee_ids: Iterable[str],
    center: datetime,
    span_seconds: float,
) -> set[Activity]:
    """Activities with at least one event from the selected trainees inside
    [center - span/2, center + span/2]."""
    if span_seconds <= 0:
        raise ValueError("span must be positive")
    selected = set(trainee_ids)
    half = timedelta(seconds=span_seconds / 2.0)
    lo, hi = center - half, center + half
    return {
        act
        for ev, act in log.annotated()
        if ev.trainee_id in selected and lo <= ev.timestamp <= hi
    }


@dataclass(frozen=True)
class Histogram:
    bucket_edges: tuple[float, ...]
    counts: tuple[int, ...]

    def to_json(self) -> dict:
        return {"bucket_edges": list(self.bucket_edges), "counts": list(self.counts)}


def build_histogram(values: Sequence[float], buckets: int = 10) -> Histogram:
    """Equal-width buckets over the observed min-max range."""
    if not values:
        return Histogram((), ())
    lo, hi = min(values), max(values)
    if hi == lo:
        return Histogram((lo, hi), (len(values),))
    width = (hi - lo) / buckets
    edges = tuple(lo + i * width for i in range(buckets + 1))
    counts = [0] * buckets
    for v in values:
        idx = min(int((v - lo) / width), buckets - 1)
        counts[idx] += 1
    return Histogram(edges, tuple(counts))


@dataclass(frozen=True)
class LevelOverview:
    level: int
    avg_command_count: float
    avg_relative_time: float
    avg_sentiment: Optional[float]
    histograms: dict
    empty: bool

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "avg_command_count": self.avg_command_count,
            "avg_relative_time": self.avg_relative_time,
            "avg_sentiment": self.avg_sentiment,
            "histograms": {k: h.to_json() for k, h in self.histograms.items()},
            "empty": self.empty,
        }


SUPPORTED_OVERVIEW_METRICS = frozenset({"command_count", "relative_time", "sentiment"})


def level_overview(
    log: ActivityLog,
    spec: FilterSpec = FilterSpec(),
    metrics: frozenset[str] = frozenset({"command_count", "relative_time"}),
    sentiment_by_trainee_level: Optional[dict[tuple[str, int], float]] = None,
) -> list[LevelOverview]:
    """One statistical overview per included level, averaged over included
    trainees.  Relative time is each trainee's share of their own total
    training span spent inside the level."""
    unsupported = set(metrics) - SUPPORTED_OVERVIEW_METRICS
    if unsupported:
        raise ValueError(f"unsupported metrics: {sorted(unsupported)}")
    filtered = apply_filter(spec, log)

    commands: dict[int, dict[str, int]] = {}
    spans: dict[tuple[str, int], tuple[datetime, datetime]] = {}
    for ev in filtered.events:
        if ev.event_class is not EventClass.GAME:
            commands.setdefault(ev.level, {}).setdefault(ev.trainee_id, 0)
            commands[ev.level][ev.trainee_id] += 1
        key = (ev.trainee_id, ev.level)
        lo, hi = spans.get(key, (ev.timestamp, ev.timestamp))
        spans[key] = (min(lo, ev.timestamp), max(hi, ev.timestamp))

    totals: dict[str, float] = {}
    for (tid, _), (lo, hi) in spans.items():
        totals[tid] = totals.get(tid, 0.0) + (hi - lo).total_seconds()

    trainees = sorted(filtered.trainees)
    overviews = []
    levels = log.levels if spec.included_levels is None else tuple(sorted(spec.included_levels))
    for level in levels:
        cmd_values = [commands.get(level, {}).get(t, 0) for t in trainees]
        rel_values = []
        for t in trainees:
            span = spans.get((t, level))
            if span is None or totals.get(t, 0.0) == 0.0:
                rel_values.append(0.0)
            else:
                rel_values.append((span[1] - span[0]).total_seconds() / totals[t])
        sent_values = None
        if "sentiment" in metrics and sentiment_by_trainee_level is not None:
            sent_values = [
                sentiment_by_trainee_level.get((t, level), 0.0) for t in trainees
            ]
        histograms = {}
        if "command_count" in metrics:
            histograms["command_count"] = build_histogram(cmd_values)
        if "relative_time" in metrics:
            histograms["relative_time"] = build_histogram(rel_values)
        if sent_values is not None:
            histograms["sentiment"] = build_histogram(sent_values)
        n = len(trainees)
        overviews.append(
            LevelOverview(
                level=level,
                avg_command_count=(sum(cmd_values) / n) if n else 0.0,
                avg_relative_time=(sum(rel_values) / n) if n else 0.0,
                avg_sentiment=(sum(sent_values) / n) if (sent_values and n) else None,
                histograms=histograms,
                empty=n == 0 or all((t, level) not in spans for t in trainees),
            )
        )
    return overviews


# ---------------------------------------------------------------------------
# Export


def activity_id(act: Activity) -> str:
    """Stable node id: hash of the (label, source_class, level) triple."""
    digest = hashlib.sha1(
        f"{act.label}\x00{act.source_class.value}\x00{act.level}".encode("utf-8")
    ).hexdigest()
    return f"n{digest[:12]}"


def graph_to_json(
    graph: ProcessGraph,
    stat: Optional[EdgeStat] = None,
) -> dict:
    """JSON document mirroring the graph, including duration statistics and
    a deterministic per-level rank hint for layered layout."""
    nodes = []
    rank_order = sorted(graph.nodes, key=lambda a: (a.level, a.source_class.value, a.label))
    ranks: dict[Activity, int] = {}
    per_level_idx: dict[int, int] = {}
    for act in rank_order:
        idx = per_level_idx.get(act.level, 0)
        ranks[act] = idx
        per_level_idx[act.level] = idx + 1
    for act in rank_order:
        nodes.append(
            {
                "id": activity_id(act),
                "label": act.label,
                "source_class": act.source_class.value,
                "level": act.level,
                "rank": ranks[act],
                "entry": act in graph.entry_markers.get(act.level, ()),
                "exit": act in graph.exit_markers.get(act.level, ()),
            }
        )
    edges = []
    for edge in graph.edge_list():
        stats = PerformanceStats.of(edge.durations)
        doc = {
            "source": activity_id(edge.source),
            "target": activity_id(edge.target),
            "frequency": edge.frequency,
            "trainee_ids": sorted(edge.trainee_ids),
            "duration_stats": stats.to_json(),
            "back_edge": (edge.source, edge.target) in graph.back_edges,
        }
        if stat is not None:
            doc["selected_stat"] = {"name": stat.value, "seconds": stats.get(stat)}
        edges.append(doc)
    return {
        "nodes": nodes,
        "edges": edges,
        "levels": sorted(graph.level_partitions),
        "trainees": sorted(graph.trainees),
        "mode": "performance" if stat is not None else "frequency",
    }


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def graph_to_dot(graph: ProcessGraph, stat: Optional[EdgeStat] = None) -> str:
    """DOT export with one cluster per level (layered layout)."""
    lines = ["digraph process {", "  rankdir=TB;", "  node [shape=box];"]
    for level in sorted(graph.level_partitions):
        lines.append(f"  subgraph cluster_level_{level} {{")
        lines.append(f'    label="level {level}";')
        for act in sorted(graph.level_partitions[level], key=lambda a: a.key):
            lines.append(
                f'    {activity_id(act)} [label="{_dot_escape(act.label)}"];'
            )
        lines.append("  }")
    for edge in graph.edge_list():
        if stat is None:
            label = str(edge.frequency)
        else:
            label = f"{PerformanceStats.of(edge.durations).get(stat):.1f}s"
        attrs = [f'label="{label}"']
        if (edge.source, edge.target) in graph.back_edges:
            attrs.append('style="dashed"')
        lines.append(
            f"  {activity_id(edge.source)} -> {activity_id(edge.target)} [{', '.join(attrs)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
