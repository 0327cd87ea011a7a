from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from ctfminer import synth
from ctfminer.events import (
    ActivityMappingConfig,
    Event,
    EventClass,
    EventLog,
    map_activities,
    preprocess,
)

T0 = datetime(2022, 3, 1, 10, 0, 0, tzinfo=timezone.utc)


def ev(
    seconds: float,
    trainee: str = "T1",
    level: int = 1,
    cls: EventClass = EventClass.BASH,
    game_type: str | None = None,
    content: str = "ls",
) -> Event:
    if cls is EventClass.GAME:
        content = ""
    return Event(
        timestamp=T0 + timedelta(seconds=seconds),
        trainee_id=trainee,
        level=level,
        event_class=cls,
        game_type=game_type,
        content=content,
    )


def game(seconds: float, game_type: str, trainee: str = "T1", level: int = 1) -> Event:
    return ev(seconds, trainee, level, EventClass.GAME, game_type)


def make_log(events, dataset_id: str = "test") -> EventLog:
    return EventLog.from_events(dataset_id, events)


def bounded_level(trainee: str, level: int, start: float, duration: float):
    """LevelStarted/CorrectAnswerSubmitted pair bounding a level."""
    return [
        game(start, "LevelStarted", trainee, level),
        game(start + duration, "CorrectAnswerSubmitted", trainee, level),
    ]


@pytest.fixture(scope="session")
def dataset1_log():
    return synth.generate("dataset1")


@pytest.fixture(scope="session")
def dataset1_pre(dataset1_log):
    clean, _ = preprocess(dataset1_log)
    return clean


@pytest.fixture(scope="session")
def dataset1_alog(dataset1_pre):
    return map_activities(dataset1_pre, ActivityMappingConfig())
