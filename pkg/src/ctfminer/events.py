"""Normalized event schema, ingestion adapters, noise removal, and
command-to-activity mapping.

The normalized dataset format is line-delimited JSON with one event per
line::

    {"timestamp": "2022-03-01T10:00:00.000Z", "trainee_id": "T001",
     "level": 1, "event_class": "bash", "content": "nmap -sV 10.1.26.9"}

Game events carry a ``game_type`` field instead of a command line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Sequence


class EventClass(str, Enum):
    GAME = "game"
    BASH = "bash"
    MSF = "msf"


GAME_TYPES = (
    "TrainingStarted",
    "LevelStarted",
    "CorrectAnswerSubmitted",
    "WrongAnswerSubmitted",
    "HintTaken",
    "SolutionDisplayed",
    "TrainingFinished",
)

# Progress events that encode game state; they are never removed by
# preprocessing and never targeted by game-event filter rules.
MANDATORY_GAME_TYPES = frozenset(
    {"TrainingStarted", "LevelStarted", "CorrectAnswerSubmitted", "TrainingFinished"}
)

OPTIONAL_GAME_TYPES = frozenset({"HintTaken", "SolutionDisplayed", "WrongAnswerSubmitted"})


def normalize_command(content: str) -> str:
    """Trim and collapse internal whitespace; case is preserved."""
    return " ".join(content.split())


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp, accepting a trailing ``Z``."""
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}Z"


@dataclass(frozen=True, order=False)
class Event:
    timestamp: datetime
    trainee_id: str
    level: int
    event_class: EventClass
    game_type: Optional[str] = None
    content: str = ""

    def __post_init__(self):
        if (self.event_class is EventClass.GAME) != (self.game_type is not None):
            raise ValueError("game_type must be present iff event_class is GAME")
        if self.game_type is not None and self.game_type not in GAME_TYPES:
            raise ValueError(f"unknown game_type {self.game_type!r}")
        if self.event_class is not EventClass.GAME and not self.content.strip():
            raise ValueError("command events require non-empty content")
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware UTC")

    @property
    def kind(self) -> str:
        """Event kind used by weighting and filtering: the game type for
        game events, the event class value for commands."""
        return self.game_type if self.game_type is not None else self.event_class.value

    def to_json(self) -> dict:
        doc = {
            "timestamp": format_timestamp(self.timestamp),
            "trainee_id": self.trainee_id,
            "level": self.level,
            "event_class": self.event_class.value,
            "content": self.content,
        }
        if self.game_type is not None:
            doc["game_type"] = self.game_type
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Event":
        return cls(
            timestamp=parse_timestamp(doc["timestamp"]),
            trainee_id=str(doc["trainee_id"]),
            level=int(doc["level"]),
            event_class=EventClass(doc["event_class"]),
            game_type=doc.get("game_type"),
            content=doc.get("content", ""),
        )


@dataclass(frozen=True)
class EventLog:
    dataset_id: str
    events: tuple[Event, ...]
    trainees: frozenset[str]
    levels: tuple[int, ...]

    @classmethod
    def from_events(cls, dataset_id: str, events: Iterable[Event]) -> "EventLog":
        # Stable sort keeps insertion order for (timestamp, trainee) ties,
        # making every downstream computation deterministic.
        ordered = tuple(sorted(events, key=lambda e: (e.timestamp, e.trainee_id)))
        trainees = frozenset(e.trainee_id for e in ordered)
        levels = tuple(sorted({e.level for e in ordered}))
        return cls(dataset_id, ordered, trainees, levels)

    def __len__(self) -> int:
        return len(self.events)


class UnknownAdapter(KeyError):
    pass


class EmptyDataset(ValueError):
    pass


@dataclass(frozen=True)
class ParseError:
    line: int
    reason: str


class ParseFailure(ValueError):
    def __init__(self, errors: Sequence[ParseError]):
        self.errors = list(errors)
        first = self.errors[0]
        super().__init__(f"line {first.line}: {first.reason} ({len(self.errors)} error(s))")


@dataclass(frozen=True)
class IngestResult:
    log: EventLog
    errors: tuple[ParseError, ...]

    def raise_if_errors(self) -> "IngestResult":
        if self.errors:
            raise ParseFailure(self.errors)
        return self


Adapter = Callable[[Sequence[str]], Iterator[tuple[int, "Event | ParseError"]]]

_ADAPTERS: dict[str, Adapter] = {}


def register_adapter(name: str, adapter: Adapter) -> None:
    _ADAPTERS[name] = adapter


def adapter_ids() -> list[str]:
    return sorted(_ADAPTERS)


def _normalized_adapter(lines: Sequence[str]) -> Iterator[tuple[int, "Event | ParseError"]]:
    """Pass-through adapter for the normalized JSONL format."""
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            yield lineno, Event.from_json(json.loads(raw))
        except (ValueError, KeyError, TypeError) as exc:
            yield lineno, ParseError(lineno, str(exc))


_CMD_TYPE_MAP = {
    "bash-command": EventClass.BASH,
    "msf-command": EventClass.MSF,
    "bash": EventClass.BASH,
    "msf": EventClass.MSF,
}

# Progress-event names as they appear in cyber-range exports, mapped to
# the normalized game types.
_GAME_EVENT_MAP = {
    "training started": "TrainingStarted",
    "level started": "LevelStarted",
    "correct answer submitted": "CorrectAnswerSubmitted",
    "wrong answer submitted": "WrongAnswerSubmitted",
    "hint taken": "HintTaken",
    "solution displayed": "SolutionDisplayed",
    "training finished": "TrainingFinished",
}


def _range_export_adapter(lines: Sequence[str]) -> Iterator[tuple[int, "Event | ParseError"]]:
    """Adapter for cyber-range exports: one JSON object per line, commands
    keyed by ``cmd``/``cmd_type``/``timestamp_str``/``sandbox_id`` and game
    events keyed by ``event``/``timestamp``/``user``/``level``.

    The exact export layout varies between range deployments; this adapter
    covers the field names observed in public training exports and reports
    anything else as a parse error.
    """
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip().rstrip(",")
        if not raw or raw in ("[", "]"):
            continue
        try:
            doc = json.loads(raw)
        except ValueError as exc:
            yield lineno, ParseError(lineno, f"invalid JSON: {exc}")
            continue
        try:
            if "cmd" in doc:
                cmd_type = str(doc.get("cmd_type", "")).lower()
                if cmd_type not in _CMD_TYPE_MAP:
                    raise ValueError(f"unknown cmd_type {doc.get('cmd_type')!r}")
                yield lineno, Event(
                    timestamp=parse_timestamp(doc.get("timestamp_str") or doc["timestamp"]),
                    trainee_id=str(doc.get("sandbox_id") or doc["trainee_id"]),
                    level=int(doc.get("level", 0)),
                    event_class=_CMD_TYPE_MAP[cmd_type],
                    content=str(doc["cmd"]),
                )
            elif "event" in doc:
                name = str(doc["event"]).lower()
                game_type = _GAME_EVENT_MAP.get(name)
                if game_type is None:
                    raise ValueError(f"unknown game event {doc['event']!r}")
                yield lineno, Event(
                    timestamp=parse_timestamp(doc["timestamp"]),
                    trainee_id=str(doc.get("user") or doc.get("sandbox_id") or doc["trainee_id"]),
                    level=int(doc.get("level", 0)),
                    event_class=EventClass.GAME,
                    game_type=game_type,
                    content=str(doc.get("content", "")),
                )
            else:
                raise ValueError("record is neither a command nor a game event")
        except (ValueError, KeyError, TypeError) as exc:
            yield lineno, ParseError(lineno, str(exc))


register_adapter("normalized", _normalized_adapter)
register_adapter("range-export", _range_export_adapter)


def ingest(raw_records: Sequence[str], adapter_id: str, dataset_id: str = "dataset") -> IngestResult:
    """Parse raw export lines into a normalized, timestamp-sorted log.

    Unparseable records are collected with their line numbers rather than
    silently dropped; ``|records| = |events| + |errors|`` modulo blank lines.
    """
    if adapter_id not in _ADAPTERS:
        raise UnknownAdapter(adapter_id)
    events: list[Event] = []
    errors: list[ParseError] = []
    for _, item in _ADAPTERS[adapter_id](raw_records):
        if isinstance(item, ParseError):
            errors.append(item)
        else:
            events.append(item)
    if not events:
        raise EmptyDataset(dataset_id)
    return IngestResult(EventLog.from_events(dataset_id, events), tuple(errors))


# ---------------------------------------------------------------------------
# Preprocessing

# First tokens recognized as real shell / framework commands.  A paste
# burst is a rapid run of command events whose first tokens all fall
# outside this vocabulary.
DEFAULT_COMMAND_VOCABULARY = frozenset(
    """
    ls cd cat less more pwd echo grep find man touch mkdir rm cp mv chmod chown
    nano vim vi head tail history clear exit sudo su ssh scp ping ifconfig ip
    nmap traceroute curl wget netcat nc telnet john hydra hashcat tar unzip gzip
    gunzip python python3 perl bash sh service systemctl apt apt-get dpkg msfconsole
    use set unset run exploit search show info back sessions options check help
    """.split()
)


@dataclass(frozen=True)
class PreprocessConfig:
    dedup_window_ms: int = 1000
    burst_count_threshold: int = 5
    burst_window_ms: int = 2000
    garbage_patterns: tuple[str, ...] = ()
    command_vocabulary: frozenset[str] = DEFAULT_COMMAND_VOCABULARY

    def __post_init__(self):
        if self.dedup_window_ms <= 0 or self.burst_window_ms <= 0:
            raise ValueError("durations must be positive")
        if self.burst_count_threshold < 2:
            raise ValueError("burst_count_threshold must be >= 2")

    def to_json(self) -> dict:
        return {
            "dedup_window_ms": self.dedup_window_ms,
            "burst_count_threshold": self.burst_count_threshold,
            "burst_window_ms": self.burst_window_ms,
            "garbage_patterns": list(self.garbage_patterns),
            "command_vocabulary": sorted(self.command_vocabulary),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PreprocessConfig":
        kwargs = dict(doc)
        if "garbage_patterns" in kwargs:
            kwargs["garbage_patterns"] = tuple(kwargs["garbage_patterns"])
        if "command_vocabulary" in kwargs:
            kwargs["command_vocabulary"] = frozenset(kwargs["command_vocabulary"])
        return cls(**kwargs)


@dataclass
class RemovalReport:
    duplicates: int = 0
    burst: int = 0
    garbage: int = 0

    @property
    def total(self) -> int:
        return self.duplicates + self.burst + self.garbage

    def to_json(self) -> dict:
        return {
            "duplicates": self.duplicates,
            "burst": self.burst,
            "garbage": self.garbage,
            "total": self.total,
        }


def _first_token(content: str) -> str:
    parts = content.split(None, 1)
    return parts[0] if parts else ""


def _preprocess_pass(
    events: Sequence[Event], cfg: PreprocessConfig, report: RemovalReport
) -> list[Event]:
    garbage_res = [re.compile(p) for p in cfg.garbage_patterns]
    removed: set[int] = set()

    # Garbage patterns: command events whose content matches any pattern.
    for idx, ev in enumerate(events):
        if ev.event_class is EventClass.GAME:
            continue
        if any(r.search(ev.content) for r in garbage_res):
            removed.add(idx)
            report.garbage += 1

    # Paste bursts: per trainee, rapid runs of out-of-vocabulary commands.
    per_trainee: dict[str, list[int]] = {}
    for idx, ev in enumerate(events):
        if idx in removed or ev.event_class is EventClass.GAME:
            continue
        per_trainee.setdefault(ev.trainee_id, []).append(idx)
    for indices in per_trainee.values():
        run: list[int] = []
        for idx in indices:
            ev = events[idx]
            in_vocab = _first_token(normalize_command(ev.content)) in cfg.command_vocabulary
            if in_vocab:
                close = False
            elif run:
                gap = (ev.timestamp - events[run[-1]].timestamp).total_seconds() * 1000.0
                close = gap <= cfg.burst_window_ms
            else:
                close = True
            if close:
                run.append(idx)
            else:
                if len(run) >= cfg.burst_count_threshold:
                    removed.update(run)
                    report.burst += len(run)
                run = [idx] if not in_vocab else []
        if len(run) >= cfg.burst_count_threshold:
            removed.update(run)
            report.burst += len(run)

    # Duplicates: identical normalized command from the same trainee within
    # the dedup window of the last kept occurrence.
    last_kept: dict[tuple[str, EventClass, str], datetime] = {}
    for idx, ev in enumerate(events):
        if idx in removed or ev.event_class is EventClass.GAME:
            continue
        key = (ev.trainee_id, ev.event_class, normalize_command(ev.content))
        prev = last_kept.get(key)
        if prev is not None and (ev.timestamp - prev).total_seconds() * 1000.0 <= cfg.dedup_window_ms:
            removed.add(idx)
            report.duplicates += 1
        else:
            last_kept[key] = ev.timestamp

    return [ev for idx, ev in enumerate(events) if idx not in removed]


def preprocess(log: EventLog, cfg: PreprocessConfig = PreprocessConfig()) -> tuple[EventLog, RemovalReport]:
    """Remove garbage, paste bursts, and near-duplicate commands.

    Game events are never removed.  Passes repeat until a fixed point so
    the operation is idempotent under one configuration.
    """
    report = RemovalReport()
    events: list[Event] = list(log.events)
    while True:
        kept = _preprocess_pass(events, cfg, report)
        if len(kept) == len(events):
            break
        events = kept
    return EventLog.from_events(log.dataset_id, events), report


# ---------------------------------------------------------------------------
# Activity mapping


@dataclass(frozen=True)
class Activity:
    label: str
    source_class: EventClass
    level: int

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.label, self.source_class.value, self.level)

    def to_json(self) -> dict:
        return {"label": self.label, "source_class": self.source_class.value, "level": self.level}


class DefaultMode(str, Enum):
    COMMAND_ONLY = "COMMAND_ONLY"
    FULL_COMMAND = "FULL_COMMAND"


class TemplateError(ValueError):
    pass


_TEMPLATE_REF = re.compile(r"\$(\d+)")


@dataclass(frozen=True)
class MappingRule:
    match_pattern: str
    activity_label_template: str
    event_class_selector: frozenset[EventClass] = frozenset({EventClass.BASH, EventClass.MSF})

    def __post_init__(self):
        compiled = re.compile(self.match_pattern)
        for ref in _TEMPLATE_REF.findall(self.activity_label_template):
            if int(ref) > compiled.groups:
                raise ValueError(
                    f"template references group {ref} but pattern defines {compiled.groups}"
                )

    def to_json(self) -> dict:
        return {
            "match_pattern": self.match_pattern,
            "activity_label_template": self.activity_label_template,
            "event_class_selector": sorted(c.value for c in self.event_class_selector),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MappingRule":
        return cls(
            match_pattern=doc["match_pattern"],
            activity_label_template=doc["activity_label_template"],
            event_class_selector=frozenset(
                EventClass(c) for c in doc.get("event_class_selector", ["bash", "msf"])
            ),
        )


@dataclass(frozen=True)
class ActivityMappingConfig:
    rules: tuple[MappingRule, ...] = ()
    default_mode: DefaultMode = DefaultMode.COMMAND_ONLY

    def to_json(self) -> dict:
        return {
            "rules": [r.to_json() for r in self.rules],
            "default_mode": self.default_mode.value,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ActivityMappingConfig":
        return cls(
            rules=tuple(MappingRule.from_json(r) for r in doc.get("rules", [])),
            default_mode=DefaultMode(doc.get("default_mode", "COMMAND_ONLY")),
        )


@dataclass(frozen=True)
class ActivityLog:
    """An event log whose command events carry resolved activities."""

    dataset_id: str
    events: tuple[Event, ...]
    activities: tuple[Activity, ...]
    trainees: frozenset[str]
    levels: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.events)

    def annotated(self) -> Iterator[tuple[Event, Activity]]:
        return zip(self.events, self.activities)

    def distinct_activities(self) -> set[Activity]:
        return set(self.activities)

    def with_events(self, pairs: Sequence[tuple[Event, Activity]]) -> "ActivityLog":
        events = tuple(p[0] for p in pairs)
        activities = tuple(p[1] for p in pairs)
        return ActivityLog(
            dataset_id=self.dataset_id,
            events=events,
            activities=activities,
            trainees=frozenset(e.trainee_id for e in events),
            levels=tuple(sorted({e.level for e in events})),
        )


def _resolve_rule_label(rule: MappingRule, match: "re.Match[str]") -> str:
    def sub(m: "re.Match[str]") -> str:
        group = match.group(int(m.group(1)))
        if group is None:
            raise TemplateError(
                f"group {m.group(1)} unmatched for pattern {rule.match_pattern!r}"
            )
        return group

    return _TEMPLATE_REF.sub(sub, rule.activity_label_template)


def map_activities(log: EventLog, cfg: ActivityMappingConfig = ActivityMappingConfig()) -> ActivityLog:
    """Annotate every event with exactly one activity.

    Rules are evaluated in order, first match wins; the default mode
    applies when no rule matches.  Game events always map to their game
    type.
    """
    pairs: list[tuple[Event, Activity]] = []
    compiled = [(rule, re.compile(rule.match_pattern)) for rule in cfg.rules]
    for ev in log.events:
        if ev.event_class is EventClass.GAME:
            assert ev.game_type is not None
            activity = Activity(ev.game_type, EventClass.GAME, ev.level)
        else:
            command = normalize_command(ev.content)
            label = None
            for rule, pattern in compiled:
                if ev.event_class not in rule.event_class_selector:
                    continue
                match = pattern.search(command)
                if match:
                    label = _resolve_rule_label(rule, match)
                    break
            if label is None:
                if cfg.default_mode is DefaultMode.COMMAND_ONLY:
                    label = _first_token(command)
                else:
                    label = command
            activity = Activity(label, ev.event_class, ev.level)
        pairs.append((ev, activity))
    return ActivityLog(
        dataset_id=log.dataset_id,
        events=tuple(p[0] for p in pairs),
        activities=tuple(p[1] for p in pairs),
        trainees=log.trainees,
        levels=log.levels,
    )


# ---------------------------------------------------------------------------
# Statistics


@dataclass(frozen=True)
class StatsSummary:
    event_counts: dict
    distinct_activities: dict
    per_level_counts: dict
    trainees: int

    def to_json(self) -> dict:
        return {
            "event_counts": self.event_counts,
            "distinct_activities": self.distinct_activities,
            "per_level_counts": {str(k): v for k, v in self.per_level_counts.items()},
            "trainees": self.trainees,
        }


def class_counts(log: "EventLog | ActivityLog") -> dict:
    counts = {c.value: 0 for c in EventClass}
    for ev in log.events:
        counts[ev.event_class.value] += 1
    return counts


def dataset_stats(log: ActivityLog) -> StatsSummary:
    """Exact per-class event counts, distinct activity counts, and
    per-level event counts over the provided log."""
    distinct: dict[str, set] = {c.value: set() for c in EventClass}
    per_level: dict[int, int] = {}
    for ev, act in log.annotated():
        distinct[ev.event_class.value].add(act.key)
        per_level[ev.level] = per_level.get(ev.level, 0) + 1
    return StatsSummary(
        event_counts=class_counts(log),
        distinct_activities={k: len(v) for k, v in distinct.items()},
        per_level_counts=dict(sorted(per_level.items())),
        trainees=len(log.trainees),
    )


def write_normalized(log: EventLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in log.events:
            fh.write(json.dumps(ev.to_json(), sort_keys=True) + "\n")


def read_normalized(path, dataset_id: Optional[str] = None) -> EventLog:
    with open(path, "r", encoding="utf-8") as fh:
        result = ingest(fh.readlines(), "normalized", dataset_id or str(path))
    return result.raise_if_errors().log
