import json

import pytest
from click.testing import CliRunner

from ctfminer.cli import main
from ctfminer.events import write_normalized

from conftest import bounded_level, ev, game, make_log


@pytest.fixture
def runner():
    return CliRunner()


def small_log():
    events = []
    for tid in ("T1", "T2", "T3"):
        for level in (1, 2):
            base = level * 300
            events += bounded_level(tid, level, base, 120.0)
            events += [ev(base + 10 * (i + 1), tid, level, content=f"cmd{i}")
                       for i in range(3)]
    events.append(game(310, "HintTaken", "T2", 1))
    return make_log(events, "small")


@pytest.fixture
def workspace(tmp_path, runner):
    source = tmp_path / "small.jsonl"
    write_normalized(small_log(), source)
    data = tmp_path / "data"
    result = runner.invoke(main, ["ingest", str(source), "--data", str(data)])
    assert result.exit_code == 0, result.output
    return data


def invoke(runner, workspace, *args):
    result = runner.invoke(
        main, [args[0], "--data", str(workspace), "--dataset", "small", *args[1:]]
    )
    assert result.exit_code == 0, result.output
    return result


class TestHelp:
    def test_lists_subcommands(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for cmd in ("ingest", "graph", "sentiment", "cluster", "elbow", "matrix",
                    "proximity", "overview", "serve", "synth"):
            assert cmd in result.output

    def test_subcommand_help(self, runner):
        result = runner.invoke(main, ["graph", "--help"])
        assert result.exit_code == 0
        assert "--threshold" in result.output


class TestIngest:
    def test_prints_stats(self, tmp_path, runner):
        source = tmp_path / "small.jsonl"
        write_normalized(small_log(), source)
        result = runner.invoke(main, ["ingest", str(source), "--data", str(tmp_path / "d")])
        assert result.exit_code == 0
        assert "dataset: small" in result.output
        assert "trainees: 3" in result.output
        assert "raw events: bash 18  msf 0  game 13" in result.output
        assert "removed: duplicates 0  burst 0  garbage 0" in result.output

    def test_duplicate_id_fails(self, tmp_path, runner):
        source = tmp_path / "small.jsonl"
        write_normalized(small_log(), source)
        runner.invoke(main, ["ingest", str(source), "--data", str(tmp_path / "d")])
        result = runner.invoke(main, ["ingest", str(source), "--data", str(tmp_path / "d")])
        assert result.exit_code != 0
        assert "already exists" in result.output

    def test_parse_errors_reported_nonzero(self, tmp_path, runner):
        source = tmp_path / "bad.jsonl"
        lines = [json.dumps(e.to_json()) for e in small_log().events]
        lines.insert(3, "{not json")
        source.write_text("\n".join(lines))
        result = runner.invoke(main, ["ingest", str(source), "--data", str(tmp_path / "d")])
        assert result.exit_code == 1
        assert "ParseError line 4" in result.output


class TestQueries:
    def test_graph_json(self, runner, workspace):
        result = invoke(runner, workspace, "graph")
        doc = json.loads(result.output)
        assert doc["graph"]["nodes"]

    def test_graph_dot_by_extension(self, runner, workspace, tmp_path):
        out = tmp_path / "g.dot"
        runner.invoke(
            main,
            ["graph", "--data", str(workspace), "--dataset", "small", "--out", str(out)],
            catch_exceptions=False,
        )
        assert out.read_text().startswith("digraph process {")

    def test_sentiment(self, runner, workspace):
        doc = json.loads(invoke(runner, workspace, "sentiment").output)
        assert doc["grid"]["windows_per_level"] == 3

    def test_cluster(self, runner, workspace):
        doc = json.loads(invoke(runner, workspace, "cluster", "--k", "2").output)
        assert doc["clusters"]["k"] == 2

    def test_cluster_rejects_zero_k(self, runner, workspace):
        result = runner.invoke(
            main, ["cluster", "--data", str(workspace), "--dataset", "small", "--k", "0"]
        )
        assert result.exit_code == 2
        assert "positive" in result.output

    def test_elbow(self, runner, workspace):
        doc = json.loads(invoke(runner, workspace, "elbow", "--kmax", "3").output)
        assert doc["elbow"]["suggested_k"] >= 1

    def test_matrix(self, runner, workspace):
        doc = json.loads(invoke(runner, workspace, "matrix").output)
        assert doc["rows"] == ["T1", "T2", "T3"]

    def test_proximity_requires_selection(self, runner, workspace):
        result = runner.invoke(
            main, ["proximity", "--data", str(workspace), "--dataset", "small"]
        )
        assert result.exit_code == 2
        assert "--window-index" in result.output

    def test_proximity_by_window(self, runner, workspace):
        doc = json.loads(
            invoke(runner, workspace, "proximity", "--window-index", "0").output
        )
        assert doc["config"]["selection"]["window_index"] == 0

    def test_overview(self, runner, workspace):
        doc = json.loads(invoke(runner, workspace, "overview").output)
        assert [lv["level"] for lv in doc["levels"]] == [1, 2]

    def test_unknown_dataset_message(self, runner, workspace):
        result = runner.invoke(
            main, ["graph", "--data", str(workspace), "--dataset", "ghost"]
        )
        assert result.exit_code != 0
        assert "ghost" in result.output

    def test_filter_file_applied(self, runner, workspace, tmp_path):
        spec = tmp_path / "filter.json"
        spec.write_text(json.dumps({"included_levels": [1]}))
        doc = json.loads(
            invoke(runner, workspace, "overview", "--filter", str(spec)).output
        )
        assert [lv["level"] for lv in doc["levels"]] == [1]

    def test_invalid_filter_reported(self, runner, workspace, tmp_path):
        spec = tmp_path / "filter.json"
        spec.write_text(json.dumps({"included_levels": [1, 3]}))
        result = runner.invoke(
            main, ["graph", "--data", str(workspace), "--dataset", "small",
                   "--filter", str(spec)],
        )
        assert result.exit_code != 0
        assert "contiguous" in result.output


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, runner, workspace):
        for cmd in (["graph"], ["sentiment"], ["cluster", "--k", "2", "--seed", "7"]):
            a = invoke(runner, workspace, *cmd).output
            b = invoke(runner, workspace, *cmd).output
            assert a == b


class TestSynth:
    def test_writes_dataset(self, runner, tmp_path):
        out = tmp_path / "d1.jsonl"
        result = runner.invoke(main, ["synth", "dataset1", "--out", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2749 + 904 + 1617
        assert all(json.loads(line) for line in lines[:5])
