"""Sliding-window behavioral scores, cross-trainee normalization, and
cumulative per-trainee series.

Window geometry is expressed in percent of each trainee's own measured
level duration, so trainees with different pacing are compared at the
same relative position in a level.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional, Sequence

from .events import ActivityLog, EventClass
from .filters import FilterSpec, apply as apply_filter

DEFAULT_WEIGHTS = {
    "HintTaken": -5.0,
    "SolutionDisplayed": -20.0,
    "WrongAnswerSubmitted": -1.0,
    "bash": 1.0,
    "msf": 1.0,
}

# Relative boundary comparisons tolerate float rounding from the
# timestamp-ratio computation.
_REL_EPS = 1e-9


@dataclass(frozen=True)
class SentimentConfig:
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    window_pct: float = 50.0
    step_pct: float = 40.0
    scored_kinds: frozenset[str] = frozenset(DEFAULT_WEIGHTS)
    literal_normalization: bool = False
    merge_radius_pct: float = 1.0

    def __post_init__(self):
        if not 0 < self.window_pct <= 100 or not 0 < self.step_pct <= 100:
            raise ValueError("window_pct and step_pct must lie in (0, 100]")
        missing = self.scored_kinds - set(self.weights)
        if missing:
            raise ValueError(f"scored kinds without weights: {sorted(missing)}")

    def to_json(self) -> dict:
        return {
            "weights": dict(sorted(self.weights.items())),
            "window_pct": self.window_pct,
            "step_pct": self.step_pct,
            "scored_kinds": sorted(self.scored_kinds),
            "literal_normalization": self.literal_normalization,
            "merge_radius_pct": self.merge_radius_pct,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SentimentConfig":
        return cls(
            weights={k: float(v) for k, v in doc.get("weights", DEFAULT_WEIGHTS).items()},
            window_pct=float(doc.get("window_pct", 50.0)),
            step_pct=float(doc.get("step_pct", 40.0)),
            scored_kinds=frozenset(
                doc.get("scored_kinds", doc.get("weights", DEFAULT_WEIGHTS))
            ),
            literal_normalization=bool(doc.get("literal_normalization", False)),
            merge_radius_pct=float(doc.get("merge_radius_pct", 1.0)),
        )


def window_starts(step_pct: float) -> list[float]:
    """Window starts 0, step, 2*step, ... strictly below 100%."""
    starts = []
    s = 0.0
    i = 0
    while s < 100.0 - _REL_EPS:
        starts.append(s)
        i += 1
        s = i * step_pct
    return starts


@dataclass(frozen=True)
class WindowSpan:
    index: int
    level: int
    rel_start: float
    rel_end: float

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "level": self.level,
            "rel_start": self.rel_start,
            "rel_end": self.rel_end,
        }


@dataclass(frozen=True)
class MissingBoundary:
    trainee_id: str
    level: int


@dataclass(frozen=True)
class WindowGrid:
    windows: tuple[WindowSpan, ...]
    levels: tuple[int, ...]
    windows_per_level: int
    trainees: tuple[str, ...]
    # (trainee, level) -> (level start, duration seconds); levels a trainee
    # never bounded are absent and flagged in `missing`.
    boundaries: dict
    missing: tuple[MissingBoundary, ...]

    def to_json(self) -> dict:
        return {
            "windows": [w.to_json() for w in self.windows],
            "levels": list(self.levels),
            "windows_per_level": self.windows_per_level,
            "trainees": list(self.trainees),
            "missing": [
                {"trainee_id": m.trainee_id, "level": m.level} for m in self.missing
            ],
        }


def build_window_grid(
    log: ActivityLog, cfg: SentimentConfig = SentimentConfig(), spec: FilterSpec = FilterSpec()
) -> WindowGrid:
    """Deterministic window grid over each trainee's own relative level time.

    A level is bounded by its first LevelStarted and the last
    CorrectAnswerSubmitted (or TrainingFinished) that follows it; trainees
    missing a boundary are excluded from that level's windows and flagged.
    """
    filtered = apply_filter(spec, log)
    starts: dict[tuple[str, int], datetime] = {}
    ends: dict[tuple[str, int], datetime] = {}
    for ev in filtered.events:
        key = (ev.trainee_id, ev.level)
        if ev.game_type in ("LevelStarted", "TrainingStarted"):
            if key not in starts or ev.timestamp < starts[key]:
                starts[key] = ev.timestamp
        elif ev.game_type in ("CorrectAnswerSubmitted", "TrainingFinished"):
            if key not in ends or ev.timestamp > ends[key]:
                ends[key] = ev.timestamp

    levels = filtered.levels
    boundaries: dict[tuple[str, int], tuple[datetime, float]] = {}
    missing: list[MissingBoundary] = []
    trainees = []
    for tid in sorted(filtered.trainees):
        bounded_any = False
        for level in levels:
            key = (tid, level)
            if key in starts and key in ends and ends[key] > starts[key]:
                boundaries[key] = (starts[key], (ends[key] - starts[key]).total_seconds())
                bounded_any = True
            else:
                missing.append(MissingBoundary(tid, level))
        if bounded_any:
            trainees.append(tid)
        # A trainee with no bounded level at all contributes nothing; the
        # per-level flags above already record why.

    rel_starts = window_starts(cfg.step_pct)
    windows = []
    idx = 0
    for level in levels:
        for s in rel_starts:
            windows.append(WindowSpan(idx, level, s, min(s + cfg.window_pct, 100.0)))
            idx += 1
    return WindowGrid(
        windows=tuple(windows),
        levels=levels,
        windows_per_level=len(rel_starts),
        trainees=tuple(trainees),
        boundaries=boundaries,
        missing=tuple(missing),
    )


def window_scores(
    log: ActivityLog, grid: WindowGrid, cfg: SentimentConfig = SentimentConfig(),
    spec: FilterSpec = FilterSpec(),
) -> dict:
    """Raw score per (trainee, window index): sum of weighted counts of
    scored event kinds falling inside the window.

    Only (trainee, level) pairs with measured boundaries are scored."""
    filtered = apply_filter(spec, log)
    # Relative event positions per (trainee, level).
    scores: dict[tuple[str, int], float] = {
        (tid, w.index): 0.0
        for tid in grid.trainees
        for w in grid.windows
        if (tid, w.level) in grid.boundaries
    }
    windows_by_level: dict[int, list[WindowSpan]] = {}
    for w in grid.windows:
        windows_by_level.setdefault(w.level, []).append(w)
    for ev in filtered.events:
        kind = ev.kind
        if kind not in cfg.scored_kinds:
            continue
        bound = grid.boundaries.get((ev.trainee_id, ev.level))
        if bound is None:
            continue
        start, duration = bound
        rel = (ev.timestamp - start).total_seconds() / duration * 100.0
        if rel < -_REL_EPS or rel > 100.0 + _REL_EPS:
            continue
        weight = cfg.weights[kind]
        for w in windows_by_level.get(ev.level, ()):
            if w.rel_start - _REL_EPS <= rel <= w.rel_end + _REL_EPS:
                scores[(ev.trainee_id, w.index)] += weight
    return scores


def normalize_window(raw_by_trainee: dict) -> dict:
    """Map raw scores of one window to [-1, 1]: 0 at the median, the
    largest absolute deviation from the median maps to +/-1."""
    if not raw_by_trainee:
        return {}
    values = list(raw_by_trainee.values())
    m = statistics.median(values)
    d = max(abs(v - m) for v in values)
    if d == 0:
        return {t: 0.0 for t in raw_by_trainee}
    return {
        t: max(-1.0, min(1.0, (v - m) / d)) for t, v in raw_by_trainee.items()
    }


def normalize_window_literal(raw_by_trainee: dict) -> dict:
    """Alternative reading of the normalization interval: the interval is
    median -/+ raw maximum.  Degenerates (all zeros) when the raw maximum
    is not positive."""
    if not raw_by_trainee:
        return {}
    values = list(raw_by_trainee.values())
    m = statistics.median(values)
    d = max(values)
    if d <= 0:
        return {t: 0.0 for t in raw_by_trainee}
    return {
        t: max(-1.0, min(1.0, (v - m) / d)) for t, v in raw_by_trainee.items()
    }


def normalize_scores(grid: WindowGrid, raw: dict, cfg: SentimentConfig = SentimentConfig()) -> dict:
    """Per-window normalization over all trainees scored in that window."""
    normalizer = normalize_window_literal if cfg.literal_normalization else normalize_window
    normalized: dict[tuple[str, int], float] = {}
    for w in grid.windows:
        raw_by_trainee = {
            tid: raw[(tid, w.index)] for tid in grid.trainees if (tid, w.index) in raw
        }
        for tid, value in normalizer(raw_by_trainee).items():
            normalized[(tid, w.index)] = value
    return normalized


@dataclass(frozen=True)
class DisplayPoint:
    x: float
    y: float
    window_indices: tuple[int, ...]

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "window_indices": list(self.window_indices)}


@dataclass(frozen=True)
class SentimentSeries:
    trainee_id: str
    cumulative: tuple[float, ...]
    display_points: tuple[DisplayPoint, ...]

    def to_json(self) -> dict:
        return {
            "trainee_id": self.trainee_id,
            "cumulative": list(self.cumulative),
            "display_points": [p.to_json() for p in self.display_points],
        }


def _merge_points(
    cumulative: Sequence[float], x_extent: float, y_extent: float, radius_pct: float
) -> tuple[DisplayPoint, ...]:
    """Replace runs of chart-adjacent points with a single joint point."""
    rx = x_extent * radius_pct / 100.0
    ry = y_extent * radius_pct / 100.0
    points: list[DisplayPoint] = []
    for i, y in enumerate(cumulative):
        if points:
            last = points[-1]
            if abs(i - last.x) <= rx and abs(y - last.y) <= ry:
                points[-1] = DisplayPoint(last.x, last.y, last.window_indices + (i,))
                continue
        points.append(DisplayPoint(float(i), y, (i,)))
    return tuple(points)


def cumulative_series(
    grid: WindowGrid, normalized: dict, merge_radius_pct: float = 1.0
) -> list[SentimentSeries]:
    """Per-trainee prefix sums over the global window order.  Windows a
    trainee was not scored in contribute 0, carrying the last cumulative
    value forward so all series have equal length."""
    series = []
    all_values = []
    per_trainee: dict[str, list[float]] = {}
    for tid in grid.trainees:
        total = 0.0
        values = []
        for w in grid.windows:
            total += normalized.get((tid, w.index), 0.0)
            values.append(total)
        per_trainee[tid] = values
        all_values.extend(values)
    y_extent = (max(all_values) - min(all_values)) if all_values else 0.0
    x_extent = float(max(len(grid.windows) - 1, 1))
    for tid in grid.trainees:
        values = per_trainee[tid]
        series.append(
            SentimentSeries(
                trainee_id=tid,
                cumulative=tuple(values),
                display_points=_merge_points(values, x_extent, y_extent, merge_radius_pct),
            )
        )
    return series


@dataclass(frozen=True)
class SentimentResult:
    grid: WindowGrid
    raw: dict
    normalized: dict
    series: list

    def to_json(self, cfg: SentimentConfig) -> dict:
        def score_table(table: dict) -> dict:
            out: dict[str, dict[str, float]] = {}
            for (tid, idx), value in table.items():
                out.setdefault(tid, {})[str(idx)] = value
            return {tid: dict(sorted(v.items(), key=lambda kv: int(kv[0]))) for tid, v in sorted(out.items())}

        return {
            "config": cfg.to_json(),
            "grid": self.grid.to_json(),
            "raw_scores": score_table(self.raw),
            "normalized_scores": score_table(self.normalized),
            "series": [s.to_json() for s in self.series],
        }


def compute_sentiment(
    log: ActivityLog, cfg: SentimentConfig = SentimentConfig(), spec: FilterSpec = FilterSpec()
) -> SentimentResult:
    """End-to-end pipeline: grid, raw scores, normalization, cumulative
    series."""
    grid = build_window_grid(log, cfg, spec)
    raw = window_scores(log, grid, cfg, spec)
    normalized = normalize_scores(grid, raw, cfg)
    series = cumulative_series(grid, normalized, cfg.merge_radius_pct)
    return SentimentResult(grid=grid, raw=raw, normalized=normalized, series=series)


def window_membership(
    log: ActivityLog, grid: WindowGrid, window_index: int, trainee_ids=None,
) -> set:
    """Activities with an event instance inside the given window for the
    selected trainees; the temporal-proximity set for a sentiment window."""
    spans = [w for w in grid.windows if w.index == window_index]
    if not spans:
        raise IndexError(f"window {window_index} not in grid")
    w = spans[0]
    selected = set(grid.trainees if trainee_ids is None else trainee_ids)
    result = set()
    for ev, act in log.annotated():
        if ev.trainee_id not in selected or ev.level != w.level:
            continue
        bound = grid.boundaries.get((ev.trainee_id, ev.level))
        if bound is None:
            continue
        start, duration = bound
        rel = (ev.timestamp - start).total_seconds() / duration * 100.0
        if w.rel_start - _REL_EPS <= rel <= w.rel_end + _REL_EPS:
            result.add(act)
    return result
