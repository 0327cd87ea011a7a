"""Raw-data filters (trainees, contiguous levels, command and game-event
rules) and presentation-only visual suppression."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .events import (
    Activity,
    ActivityLog,
    Event,
    EventClass,
    MANDATORY_GAME_TYPES,
    OPTIONAL_GAME_TYPES,
)


class RuleMode(str, Enum):
    INCLUDE = "INCLUDE"
    EXCLUDE = "EXCLUDE"


class GameRuleMode(str, Enum):
    REQUIRE_TRAINEE = "REQUIRE_TRAINEE"
    EXCLUDE_TRAINEE = "EXCLUDE_TRAINEE"


@dataclass(frozen=True)
class CommandRule:
    pattern: str
    mode: RuleMode = RuleMode.EXCLUDE
    target_classes: frozenset[EventClass] = frozenset({EventClass.BASH, EventClass.MSF})
    is_regex: bool = False

    def matches(self, event: Event) -> bool:
        if event.event_class not in self.target_classes:
            return False
        if self.is_regex:
            return re.search(self.pattern, event.content) is not None
        return self.pattern in event.content

    def passes(self, event: Event) -> bool:
        """Whether a command event survives this rule; non-target classes
        always pass."""
        if event.event_class not in self.target_classes:
            return True
        matched = self.matches(event)
        return matched if self.mode is RuleMode.INCLUDE else not matched

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "mode": self.mode.value,
            "target_classes": sorted(c.value for c in self.target_classes),
            "is_regex": self.is_regex,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CommandRule":
        return cls(
            pattern=doc["pattern"],
            mode=RuleMode(doc.get("mode", "EXCLUDE")),
            target_classes=frozenset(
                EventClass(c) for c in doc.get("target_classes", ["bash", "msf"])
            ),
            is_regex=bool(doc.get("is_regex", False)),
        )


@dataclass(frozen=True)
class GameEventRule:
    game_type: str
    level: int
    mode: GameRuleMode = GameRuleMode.REQUIRE_TRAINEE

    def __post_init__(self):
        if self.game_type not in OPTIONAL_GAME_TYPES:
            raise ValueError(
                f"game-event rules may only target {sorted(OPTIONAL_GAME_TYPES)}"
            )

    def to_json(self) -> dict:
        return {"game_type": self.game_type, "level": self.level, "mode": self.mode.value}

    @classmethod
    def from_json(cls, doc: dict) -> "GameEventRule":
        return cls(
            game_type=doc["game_type"],
            level=int(doc["level"]),
            mode=GameRuleMode(doc.get("mode", "REQUIRE_TRAINEE")),
        )


@dataclass(frozen=True)
class FilterSpec:
    included_trainees: Optional[frozenset[str]] = None  # None = all
    included_levels: Optional[tuple[int, ...]] = None  # None = all; must be contiguous
    command_rules: tuple[CommandRule, ...] = ()
    game_event_rules: tuple[GameEventRule, ...] = ()

    def to_json(self) -> dict:
        return {
            "included_trainees": (
                None if self.included_trainees is None else sorted(self.included_trainees)
            ),
            "included_levels": (
                None if self.included_levels is None else list(self.included_levels)
            ),
            "command_rules": [r.to_json() for r in self.command_rules],
            "game_event_rules": [r.to_json() for r in self.game_event_rules],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FilterSpec":
        trainees = doc.get("included_trainees")
        levels = doc.get("included_levels")
        return cls(
            included_trainees=None if trainees is None else frozenset(trainees),
            included_levels=None if levels is None else tuple(sorted(int(x) for x in levels)),
            command_rules=tuple(CommandRule.from_json(r) for r in doc.get("command_rules", [])),
            game_event_rules=tuple(
                GameEventRule.from_json(r) for r in doc.get("game_event_rules", [])
            ),
        )


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"ok": self.ok, "problems": list(self.problems), "warnings": list(self.warnings)}


class InvalidSpec(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(report.problems))


class MissingClusters(ValueError):
    pass


def _levels_contiguous(levels: Sequence[int]) -> bool:
    ordered = sorted(levels)
    return all(b - a == 1 for a, b in zip(ordered, ordered[1:]))


def validate(spec: FilterSpec, log: ActivityLog) -> ValidationReport:
    """Validation never throws; every problem is reported."""
    problems: list[str] = []
    warnings: list[str] = []
    if spec.included_levels is not None:
        if not spec.included_levels:
            problems.append("included_levels is empty")
        elif not _levels_contiguous(spec.included_levels):
            problems.append(
                f"included_levels {sorted(spec.included_levels)} are not contiguous"
            )
        unknown_levels = set(spec.included_levels) - set(log.levels)
        if unknown_levels:
            warnings.append(f"levels not present in log: {sorted(unknown_levels)}")
    if spec.included_trainees is not None and log.trainees:
        unknown = spec.included_trainees - log.trainees
        if unknown and not (spec.included_trainees & log.trainees):
            # Completely disjoint from a non-empty log: almost certainly a
            # typo or a stale selection, so reject rather than silently
            # producing an empty view.  A partial overlap is tolerated (the
            # log may itself be a filtered view) and only warned about,
            # which keeps `apply` idempotent.
            problems.append(f"unknown trainees: {sorted(unknown)}")
        elif unknown:
            warnings.append(f"trainees not present in log: {sorted(unknown)}")
    for rule in spec.command_rules:
        if rule.is_regex:
            try:
                re.compile(rule.pattern)
            except re.error as exc:
                problems.append(f"command rule {rule.pattern!r} does not compile: {exc}")
    if spec.included_levels is not None:
        for rule in spec.game_event_rules:
            if rule.level not in spec.included_levels:
                warnings.append(
                    f"game-event rule targets excluded level {rule.level} "
                    "and will match no events"
                )
    return ValidationReport(tuple(problems), tuple(warnings))


def apply(spec: FilterSpec, log: ActivityLog) -> ActivityLog:
    """Apply a validated filter; command rules combine with logical AND and
    game-event rules act on trainee membership."""
    report = validate(spec, log)
    if not report.ok:
        raise InvalidSpec(report)

    trainees = set(log.trainees if spec.included_trainees is None else spec.included_trainees)
    level_set = None if spec.included_levels is None else set(spec.included_levels)
    # Game-event rules are membership predicates over the level-filtered
    # event stream; a rule targeting an excluded level matches nobody
    # (validation warns about that combination).  Evaluating against the
    # surviving events keeps apply idempotent.
    for rule in spec.game_event_rules:
        having = {
            ev.trainee_id
            for ev in log.events
            if ev.game_type == rule.game_type
            and ev.level == rule.level
            and (level_set is None or ev.level in level_set)
        }
        if rule.mode is GameRuleMode.REQUIRE_TRAINEE:
            trainees &= having
        else:
            trainees -= having

    pairs: list[tuple[Event, Activity]] = []
    for ev, act in log.annotated():
        if ev.trainee_id not in trainees:
            continue
        if level_set is not None and ev.level not in level_set:
            continue
        if ev.event_class is EventClass.GAME:
            # Mandatory progress events of surviving trainees are always
            # retained; optional ones are too (game rules act on trainees).
            pairs.append((ev, act))
            continue
        if all(rule.passes(ev) for rule in spec.command_rules):
            pairs.append((ev, act))
    return log.with_events(pairs)


# ---------------------------------------------------------------------------
# Temporary visual suppression


@dataclass(frozen=True)
class SuppressionState:
    visible_trainees: frozenset[str]
    suppression_strength: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.suppression_strength <= 1.0:
            raise ValueError("suppression_strength must lie in [0, 1]")

    def to_json(self) -> dict:
        return {
            "visible_trainees": sorted(self.visible_trainees),
            "suppression_strength": self.suppression_strength,
        }


def suppression_selection(
    state: SuppressionState,
    all_trainees: Sequence[str],
    clusters=None,
    sort_by: str = "id",
) -> list[dict]:
    """Annotate the full trainee list as visible/suppressed, sorted by id
    or by behavioral cluster.  Purely presentational: no data is removed."""
    ids = sorted(all_trainees)
    if sort_by == "cluster":
        if clusters is None:
            raise MissingClusters("cluster sort requested without a clustering result")
        assignments = clusters.assignments
        ids.sort(key=lambda t: (assignments.get(t, len(clusters.centroids)), t))
    entries = []
    for tid in ids:
        entry = {"trainee_id": tid, "visible": tid in state.visible_trainees}
        if clusters is not None:
            entry["cluster"] = clusters.assignments.get(tid)
        entries.append(entry)
    return entries
