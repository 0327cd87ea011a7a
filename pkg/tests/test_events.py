import json
import random
from datetime import timedelta

import pytest

from ctfminer.events import (
    Activity,
    ActivityLog,
    ActivityMappingConfig,
    DefaultMode,
    EmptyDataset,
    Event,
    EventClass,
    MappingRule,
    PreprocessConfig,
    UnknownAdapter,
    class_counts,
    dataset_stats,
    ingest,
    map_activities,
    preprocess,
    read_normalized,
    write_normalized,
)

from conftest import T0, ev, game, make_log


def jsonl(*docs):
    return [json.dumps(d) for d in docs]


RECORD = {
    "timestamp": "2022-03-01T10:00:00.000Z",
    "trainee_id": "T1",
    "level": 1,
    "event_class": "bash",
    "content": "ls -la",
}


class TestIngest:
    def test_three_records_one_trainee(self):
        lines = jsonl(
            RECORD,
            {**RECORD, "timestamp": "2022-03-01T10:00:01.000Z", "content": "pwd"},
            {**RECORD, "timestamp": "2022-03-01T10:00:02.000Z", "content": "cd /"},
        )
        result = ingest(lines, "normalized").raise_if_errors()
        assert len(result.log) == 3
        assert result.log.trainees == {"T1"}

    def test_malformed_timestamp_reports_line(self):
        lines = jsonl(RECORD, {**RECORD, "timestamp": "not-a-time"})
        result = ingest(lines, "normalized")
        assert len(result.log) == 1
        assert len(result.errors) == 1
        assert result.errors[0].line == 2

    def test_lossless_modulo_errors(self):
        lines = jsonl(RECORD) * 5 + ["{broken", ""] + jsonl(RECORD)
        result = ingest(lines, "normalized")
        assert len(result.log) + len(result.errors) == 7  # blank line skipped

    def test_unknown_adapter(self):
        with pytest.raises(UnknownAdapter):
            ingest(jsonl(RECORD), "nope")

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            ingest(["", "   "], "normalized")

    def test_range_export_adapter(self):
        lines = [
            json.dumps({"cmd": "nmap -sV 10.1.26.9", "cmd_type": "bash-command",
                        "timestamp_str": "2022-03-01T10:00:05Z", "sandbox_id": 7, "level": 1}),
            json.dumps({"event": "Level started", "timestamp": "2022-03-01T10:00:00Z",
                        "user": "7", "level": 1}),
            json.dumps({"cmd": "set RHOSTS 10.1.26.9", "cmd_type": "msf-command",
                        "timestamp_str": "2022-03-01T10:01:00Z", "sandbox_id": 7, "level": 3}),
        ]
        result = ingest(lines, "range-export").raise_if_errors()
        assert class_counts(result.log) == {"game": 1, "bash": 1, "msf": 1}
        assert result.log.trainees == {"7"}

    def test_sorted_and_sets_consistent(self):
        lines = jsonl(
            {**RECORD, "timestamp": "2022-03-01T10:00:09.000Z", "trainee_id": "B"},
            {**RECORD, "timestamp": "2022-03-01T10:00:01.000Z", "trainee_id": "A", "level": 2},
        )
        log = ingest(lines, "normalized").log
        stamps = [e.timestamp for e in log.events]
        assert stamps == sorted(stamps)
        assert log.trainees == {"A", "B"}
        assert log.levels == (1, 2)


class TestPreprocess:
    def test_duplicates_collapsed(self):
        events = [ev(i * 0.1, content="ls") for i in range(6)]  # within 500 ms
        clean, report = preprocess(make_log(events))
        assert len(clean) == 1
        assert report.duplicates == 5

    def test_paste_burst_removed(self):
        lines = [f"AAAAB3NzaC1yc2EAAAADAQ{i}" for i in range(10)]
        events = [ev(i * 0.1, content=line) for i, line in enumerate(lines)]
        clean, report = preprocess(make_log(events))
        assert len(clean) == 0
        assert report.burst == 10

    def test_slow_paste_not_a_burst(self):
        events = [ev(i * 5.0, content=f"ZZZjunk{i}") for i in range(10)]
        clean, report = preprocess(make_log(events))
        assert report.burst == 0
        assert len(clean) == 10

    def test_game_only_log_unchanged(self):
        events = [game(i, "HintTaken") for i in range(10)]
        clean, report = preprocess(make_log(events))
        assert len(clean) == 10
        assert report.total == 0

    def test_garbage_patterns(self):
        events = [ev(0, content="ls"), ev(1, content="BEGIN RSA PRIVATE KEY")]
        cfg = PreprocessConfig(garbage_patterns=("PRIVATE KEY",))
        clean, report = preprocess(make_log(events), cfg)
        assert [e.content for e in clean.events] == ["ls"]
        assert report.garbage == 1

    def test_idempotent(self, dataset1_log):
        once, _ = preprocess(dataset1_log)
        twice, report = preprocess(once)
        assert twice.events == once.events
        assert report.total == 0

    def test_never_reorders_and_spares_game(self):
        rng = random.Random(42)
        events = []
        for i in range(200):
            if rng.random() < 0.3:
                events.append(game(i * 0.3, "HintTaken", trainee=f"T{rng.randint(1, 3)}"))
            else:
                events.append(
                    ev(i * 0.3, trainee=f"T{rng.randint(1, 3)}",
                       content=rng.choice(["ls", "pwd", "XXnoise", "cat a"]))
                )
        log = make_log(events)
        clean, _ = preprocess(log)
        kept = [e for e in log.events if e in set(clean.events)]
        assert list(clean.events) == kept
        game_in = [e for e in log.events if e.event_class is EventClass.GAME]
        game_out = [e for e in clean.events if e.event_class is EventClass.GAME]
        assert game_in == game_out


class TestMapping:
    def test_command_only_first_token(self):
        log = make_log([ev(0, content="ssh -4 -a root@1.2.3.4")])
        alog = map_activities(log, ActivityMappingConfig(default_mode=DefaultMode.COMMAND_ONLY))
        assert alog.activities[0].label == "ssh"

    def test_rule_with_capture_group(self):
        rule = MappingRule(match_pattern=r"^ssh .*?(\S+@\S+)", activity_label_template="ssh $1")
        log = make_log([ev(0, content="ssh -4 -a root@1.2.3.4")])
        alog = map_activities(log, ActivityMappingConfig(rules=(rule,)))
        assert alog.activities[0].label == "ssh root@1.2.3.4"

    def test_full_command_normalizes_whitespace(self):
        log = make_log([ev(0, content="ls  -a")])
        alog = map_activities(log, ActivityMappingConfig(default_mode=DefaultMode.FULL_COMMAND))
        assert alog.activities[0].label == "ls -a"

    def test_game_maps_to_game_type(self):
        log = make_log([game(0, "HintTaken", level=3)])
        alog = map_activities(log)
        assert alog.activities[0] == Activity("HintTaken", EventClass.GAME, 3)

    def test_first_match_wins(self):
        rules = (
            MappingRule(match_pattern=r"^ssh", activity_label_template="ssh-any"),
            MappingRule(match_pattern=r"^ssh .*root", activity_label_template="ssh-root"),
        )
        log = make_log([ev(0, content="ssh root@h")])
        alog = map_activities(log, ActivityMappingConfig(rules=rules))
        assert alog.activities[0].label == "ssh-any"

    def test_template_validates_group_count(self):
        with pytest.raises(ValueError):
            MappingRule(match_pattern=r"^ssh", activity_label_template="ssh $1")

    def test_lower_bound_not_above_upper_bound(self, dataset1_pre):
        lower = map_activities(
            dataset1_pre, ActivityMappingConfig(default_mode=DefaultMode.COMMAND_ONLY)
        )
        upper = map_activities(
            dataset1_pre, ActivityMappingConfig(default_mode=DefaultMode.FULL_COMMAND)
        )
        assert len(lower.distinct_activities()) <= len(upper.distinct_activities())

    def test_preserves_trainees_and_levels(self, dataset1_pre):
        alog = map_activities(dataset1_pre)
        assert alog.trainees == dataset1_pre.trainees
        assert alog.levels == dataset1_pre.levels


class TestStats:
    def test_counts_exact(self):
        log = make_log([ev(0), ev(1, cls=EventClass.MSF, content="run"), game(2, "HintTaken")])
        stats = dataset_stats(map_activities(log))
        assert stats.event_counts == {"bash": 1, "msf": 1, "game": 1}
        assert stats.per_level_counts == {1: 3}

    def test_empty_log_all_zero(self):
        empty = ActivityLog("x", (), (), frozenset(), ())
        stats = dataset_stats(empty)
        assert stats.event_counts == {"bash": 0, "msf": 0, "game": 0}
        assert stats.distinct_activities == {"bash": 0, "msf": 0, "game": 0}
        assert stats.trainees == 0


def test_normalized_round_trip(tmp_path, dataset1_log):
    path = tmp_path / "events.jsonl"
    write_normalized(dataset1_log, path)
    back = read_normalized(path, "dataset1")
    assert back.events == dataset1_log.events
