import argparse
import json
from datetime import date


import pytest

from scamscan.cli import (
    EXIT_FATAL,
    EXIT_OK,
    EXIT_PARTIAL,
    LiveTransport,
    PipelineConfig,
    ReplayTransport,
    fetch_loop,
    main,
    run,
)
from scamscan.corpus import parse_record_line, record_to_line
from scamscan.liveness import CheckSchedule


def opts(**kw):
    base = dict(parallelism=1, date=None, transport="replay", replay_dir=None, distance_threshold=5)
    base.update(kw)
    return argparse.Namespace(**base)


@pytest.fixture()
def config(fixtures_dir) -> PipelineConfig:
    return PipelineConfig.from_file(fixtures_dir / "pipeline_config.json")


def test_missing_config_file_is_fatal(tmp_path, capsys):
    assert main(["ingest", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_FATAL
    assert "nope.json" in capsys.readouterr().err


def test_missing_referenced_path_named(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"corpus": "missing_corpus.jsonl"}))
    assert main(["ingest", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_FATAL
    assert "missing_corpus.jsonl" in capsys.readouterr().err


def test_ingest_reports_partial_errors(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text('{"broken": true}\n')
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"corpus": "corpus.jsonl"}))
    out = tmp_path / "out"
    status = main(["ingest", "--config", str(cfg), "--out", str(out)])
    assert status == EXIT_PARTIAL
    assert (out / "ingest_errors.jsonl").read_text().strip()


def test_detect_matches_label_oracle(config, fixtures_dir, tmp_path):
    assert run("ingest", config, tmp_path) == EXIT_OK
    assert run("detect", config, tmp_path) == EXIT_OK
    labels = json.loads((fixtures_dir / "labels.json").read_text())
    verdicts = [json.loads(l) for l in (tmp_path / "verdicts.jsonl").read_text().splitlines()]
    assert len(verdicts) == 200
    assert sum(v["is_scam"] for v in verdicts) == 100
    for v in verdicts:
        assert v["is_scam"] == labels[v["record_id"]]["is_scam"]


def test_report_over_empty_outputs(config, tmp_path):
    assert run("report", config, tmp_path) == EXIT_OK
    text = (tmp_path / "report.txt").read_text()
    assert "no pipeline outputs" in text


def test_liveness_requires_date(config, tmp_path, capsys):
    run("ingest", config, tmp_path)
    run("detect", config, tmp_path)
    assert run("liveness", config, tmp_path, opts()) == EXIT_FATAL


def test_liveness_replay_day_one(config, fixtures_dir, tmp_path):
    run("ingest", config, tmp_path)
    run("detect", config, tmp_path)
    status = run("liveness", config, tmp_path, opts(date=date(2015, 9, 1)))
    assert status == EXIT_OK
    lifetimes = json.loads((tmp_path / "lifetimes.json").read_text())
    assert lifetimes["domains"]
    # every domain tracked so far was detected (alive) at least once
    assert all(row["lifetime_days"] >= 1 for row in lifetimes["domains"].values())


class CountingTransport:
    def __init__(self):
        self.calls = []

    def fetch(self, url):
        self.calls.append(url)
        return None


class FailingTransport:
    def fetch(self, url):
        raise ConnectionError("network down")


class TestFetchLoop:
    def test_replay_crawl_equals_fixtures(self, fixtures_dir):
        day = date(2015, 9, 1)
        fixture_lines = (fixtures_dir / "replay" / "2015-09-01.jsonl").read_text().splitlines()
        fixture_records = [parse_record_line(l) for l in fixture_lines if l.strip()]
        transport = ReplayTransport(fixtures_dir / "replay", day)
        records, _ = fetch_loop([r.seed_url for r in fixture_records], transport)
        assert [record_to_line(r) for r in records] == [record_to_line(r) for r in fixture_records]

    def test_nothing_due_means_no_fetches(self):
        schedule = CheckSchedule()
        schedule.track("http://a.example/")
        schedule.last_checked["http://a.example/"] = date(2015, 9, 2)
        transport = CountingTransport()
        _, alive = fetch_loop([], transport, schedule=schedule, today=date(2015, 9, 2))
        assert alive == {} and transport.calls == []

    def test_failing_fetcher_marks_dead(self):
        schedule = CheckSchedule()
        for url in ("http://a.example/x", "http://b.example/y"):
            schedule.track(url)
        _, alive = fetch_loop([], schedule=schedule, transport=FailingTransport(), today=date(2015, 9, 2))
        assert alive == {"http://a.example/x": False, "http://b.example/y": False}
        assert schedule.last_checked["http://a.example/x"] == date(2015, 9, 2)

    def test_live_transport_fetcher_injection(self):
        transport = LiveTransport(fetcher=lambda url: (200, "<html><body>ok</body></html>"))
        record = transport.fetch("http://example.com/")
        assert record is not None
        assert record.dialogs == [] and record.vantage.endswith("uninstrumented")
        failing = LiveTransport(fetcher=lambda url: (_ for _ in ()).throw(OSError()))
        assert failing.fetch("http://example.com/") is None


def test_unknown_subcommand_rejected(config, tmp_path):
    with pytest.raises(ValueError):
        run("transmogrify", config, tmp_path)
