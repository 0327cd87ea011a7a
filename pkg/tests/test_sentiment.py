import random
import statistics

import pytest

from ctfminer.events import map_activities
from ctfminer.sentiment import (
    DEFAULT_WEIGHTS,
    SentimentConfig,
    build_window_grid,
    compute_sentiment,
    cumulative_series,
    normalize_scores,
    normalize_window,
    normalize_window_literal,
    window_membership,
    window_scores,
    window_starts,
)

from conftest import bounded_level, ev, game, make_log


def alog_for(events):
    return map_activities(make_log(events))


class TestWindowGeometry:
    def test_default_grid_three_windows_per_level(self):
        assert window_starts(40.0) == [0.0, 40.0, 80.0]

    def test_full_window_is_single(self):
        assert window_starts(100.0) == [0.0]

    def test_small_step_many_windows(self):
        assert len(window_starts(10.0)) == 10

    def test_grid_shape(self):
        events = bounded_level("T1", 1, 0, 100) + bounded_level("T1", 2, 200, 100)
        grid = build_window_grid(alog_for(events))
        assert grid.windows_per_level == 3
        assert len(grid.windows) == 6
        assert [w.level for w in grid.windows] == [1, 1, 1, 2, 2, 2]
        assert grid.windows[2].rel_end == 100.0  # clipped at the level end

    def test_missing_boundary_flagged(self):
        events = bounded_level("T1", 1, 0, 100) + [game(200, "LevelStarted", "T1", 2)]
        grid = build_window_grid(alog_for(events))
        assert ("T1", 2) not in grid.boundaries
        assert [(m.trainee_id, m.level) for m in grid.missing] == [("T1", 2)]
        assert grid.trainees == ("T1",)

    def test_unbounded_trainee_excluded(self):
        events = bounded_level("T1", 1, 0, 100) + [ev(10, "T2", content="ls")]
        grid = build_window_grid(alog_for(events))
        assert grid.trainees == ("T1",)


class TestScoring:
    def test_hand_case_two_hints_three_commands(self):
        """Two hints at -5 and three commands at +1 score -7."""
        events = bounded_level("T1", 1, 0, 100.0)
        events += [game(10, "HintTaken"), game(20, "HintTaken")]
        events += [ev(5, content="ls"), ev(15, content="pwd"), ev(25, content="id")]
        cfg = SentimentConfig(window_pct=100.0, step_pct=100.0)
        grid = build_window_grid(alog_for(events), cfg)
        raw = window_scores(alog_for(events), grid, cfg)
        assert raw[("T1", 0)] == pytest.approx(-7.0)

    def test_linearity_under_count_doubling(self):
        base = bounded_level("T1", 1, 0, 100.0) + [
            game(10, "HintTaken"),
            ev(30, content="ls"),
            ev(50, content="pwd"),
        ]
        doubled = base + [game(10.001, "HintTaken"), ev(30.001, content="ls"),
                          ev(50.001, content="pwd")]
        cfg = SentimentConfig(window_pct=100.0, step_pct=100.0)
        raw1 = window_scores(alog_for(base), build_window_grid(alog_for(base), cfg), cfg)
        raw2 = window_scores(alog_for(doubled), build_window_grid(alog_for(doubled), cfg), cfg)
        assert raw2[("T1", 0)] == pytest.approx(2 * raw1[("T1", 0)])

    def test_event_outside_boundary_ignored(self):
        events = bounded_level("T1", 1, 0, 100.0) + [ev(150, content="ls")]
        cfg = SentimentConfig(window_pct=100.0, step_pct=100.0)
        alog = alog_for(events)
        raw = window_scores(alog, build_window_grid(alog, cfg), cfg)
        assert raw[("T1", 0)] == 0.0

    def test_time_dilation_leaves_windows_unchanged(self):
        rng = random.Random(11)
        offsets = sorted(rng.uniform(0.0, 100.0) for _ in range(30))
        for factor in (1.0, 3.0, 17.5):
            events = bounded_level("T1", 1, 0, 100.0 * factor)
            events += [ev(o * factor, content="ls") for o in offsets]
            alog = alog_for(events)
            grid = build_window_grid(alog)
            raw = window_scores(alog, grid)
            if factor == 1.0:
                reference = raw
            else:
                assert raw == reference

    def test_solution_weight_dominates(self):
        events = bounded_level("T1", 1, 0, 100.0) + [game(50, "SolutionDisplayed")]
        events += [ev(i + 1, content="ls") for i in range(19)]
        cfg = SentimentConfig(window_pct=100.0, step_pct=100.0)
        alog = alog_for(events)
        raw = window_scores(alog, build_window_grid(alog, cfg), cfg)
        assert raw[("T1", 0)] == pytest.approx(-1.0)  # 19 - 20


class TestNormalization:
    def test_range_on_random_windows(self):
        rng = random.Random(3)
        for _ in range(1000):
            raw = {f"T{i}": rng.uniform(-50, 50) for i in range(rng.randint(1, 12))}
            normed = normalize_window(raw)
            assert all(-1.0 <= v <= 1.0 for v in normed.values())

    def test_median_maps_to_zero(self):
        rng = random.Random(4)
        for _ in range(200):
            raw = {f"T{i}": rng.uniform(-50, 50) for i in range(rng.randint(3, 11) | 1)}
            normed = normalize_window(raw)
            m = statistics.median(raw.values())
            median_tid = next(t for t, v in raw.items() if v == m)
            assert abs(normed[median_tid]) < 1e-12

    def test_extremes_hit_unit(self):
        normed = normalize_window({"a": -10.0, "b": 0.0, "c": 4.0})
        assert normed["a"] == pytest.approx(-1.0)
        assert normed["b"] == 0.0
        assert 0 < normed["c"] < 1

    def test_identical_scores_all_zero(self):
        assert normalize_window({"a": 5.0, "b": 5.0}) == {"a": 0.0, "b": 0.0}

    def test_literal_variant_divides_by_max(self):
        raw = {"a": -10.0, "b": 0.0, "c": 4.0}
        normed = normalize_window_literal(raw)
        assert normed["c"] == pytest.approx(1.0)
        assert normed["a"] == pytest.approx(-1.0)  # clamped
        all_neg = normalize_window_literal({"a": -3.0, "b": -1.0})
        assert all_neg == {"a": 0.0, "b": 0.0}

    def test_config_switch_selects_variant(self):
        events = []
        for tid, n_hints in (("T1", 0), ("T2", 1), ("T3", 3)):
            events += bounded_level(tid, 1, 0, 100.0)
            events += [game(10 + i, "HintTaken", tid) for i in range(n_hints)]
        alog = alog_for(events)
        cfg = SentimentConfig(window_pct=100.0, step_pct=100.0)
        grid = build_window_grid(alog, cfg)
        raw = window_scores(alog, grid, cfg)
        robust = normalize_scores(grid, raw, cfg)
        literal = normalize_scores(
            grid, raw, SentimentConfig(window_pct=100.0, step_pct=100.0,
                                       literal_normalization=True)
        )
        assert robust != literal
        assert all(v == 0.0 for v in literal.values())  # raw max is 0 here


class TestSeries:
    def make_result(self):
        events = []
        for tid, n_hints in (("T1", 0), ("T2", 2), ("T3", 5)):
            events += bounded_level(tid, 1, 0, 100.0)
            events += [game(10 + i * 0.5, "HintTaken", tid) for i in range(n_hints)]
            events += [ev(60 + i, tid, content="ls") for i in range(3)]
        return compute_sentiment(alog_for(events))

    def test_cumulative_is_prefix_sum(self):
        result = self.make_result()
        for s in result.series:
            total = 0.0
            for i, w in enumerate(result.grid.windows):
                total += result.normalized.get((s.trainee_id, w.index), 0.0)
                assert s.cumulative[i] == pytest.approx(total)

    def test_equal_lengths(self):
        result = self.make_result()
        lengths = {len(s.cumulative) for s in result.series}
        assert lengths == {len(result.grid.windows)}

    def test_display_points_cover_all_windows(self):
        result = self.make_result()
        for s in result.series:
            covered = [i for p in s.display_points for i in p.window_indices]
            assert covered == list(range(len(s.cumulative)))

    def test_merge_collapses_adjacent_points(self):
        series = cumulative_series(
            build_window_grid(alog_for(bounded_level("T1", 1, 0, 100.0)),
                              SentimentConfig(window_pct=10.0, step_pct=10.0)),
            {},  # no scores: flat line
            merge_radius_pct=20.0,
        )
        assert len(series[0].display_points) < len(series[0].cumulative)

    def test_to_json_shape(self):
        result = self.make_result()
        doc = result.to_json(SentimentConfig())
        assert set(doc) == {"config", "grid", "raw_scores", "normalized_scores", "series"}
        assert set(doc["raw_scores"]) == {"T1", "T2", "T3"}


class TestMembership:
    def test_window_membership_matches_relative_position(self):
        events = bounded_level("T1", 1, 0, 100.0) + [
            ev(10, content="early"),
            ev(90, content="late"),
        ]
        alog = alog_for(events)
        grid = build_window_grid(alog)
        first = window_membership(alog, grid, 0)
        last = window_membership(alog, grid, 2)
        assert "early" in {a.label for a in first}
        assert "late" not in {a.label for a in first}
        assert "late" in {a.label for a in last}

    def test_unknown_window_index(self):
        alog = alog_for(bounded_level("T1", 1, 0, 100.0))
        grid = build_window_grid(alog)
        with pytest.raises(IndexError):
            window_membership(alog, grid, 99)


class TestConfig:
    def test_round_trip(self):
        cfg = SentimentConfig(window_pct=25.0, step_pct=25.0, literal_normalization=True)
        assert SentimentConfig.from_json(cfg.to_json()) == SentimentConfig(
            window_pct=25.0, step_pct=25.0, literal_normalization=True
        )

    def test_default_weights(self):
        assert DEFAULT_WEIGHTS["HintTaken"] == -5.0
        assert DEFAULT_WEIGHTS["SolutionDisplayed"] == -20.0
        assert DEFAULT_WEIGHTS["WrongAnswerSubmitted"] == -1.0
        assert DEFAULT_WEIGHTS["bash"] == 1.0 and DEFAULT_WEIGHTS["msf"] == 1.0

    def test_invalid_geometry_rejected(self):
        with pytest.raises(ValueError):
            SentimentConfig(window_pct=0.0)
        with pytest.raises(ValueError):
            SentimentConfig(step_pct=150.0)

    def test_scored_kind_needs_weight(self):
        with pytest.raises(ValueError):
            SentimentConfig(weights={"bash": 1.0}, scored_kinds=frozenset({"bash", "msf"}))
