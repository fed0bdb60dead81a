"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with `pytest -s tests/test_acceptance.py` to see them."""

import argparse
import random
import time
from datetime import date, datetime, time as dtime, timedelta, timezone
from decimal import Decimal
from pathlib import Path

import pytest

from oracles import (
    bfs_components_ref,
    levenshtein_ref,
    lifetime_bruteforce,
    pearson_ref,
    random_bipartite,
    random_timeline,
    welch_p_ref,
)
from scamscan import analytics, attribution, campaigns, evaluation, liveness
from scamscan.cli import PipelineConfig, run
from scamscan.corpus import CrawlRecord
from scamscan.detector import (
    HeuristicConfig,
    detect_dynamic_number_delivery,
    extract_phone_numbers,
    score_page,
)
from scamscan.liveness import LivenessTimeline, compute_lifetime
from scamscan.synthcorpus import generate_corpus

D = lambda offset: date(2015, 9, 1) + timedelta(days=offset)


def passline(n: int, message: str) -> None:
    print(f"ACCEPTANCE {n:02d} PASS: {message}")


def test_01_revenue_identity():
    estimate = analytics.estimate_revenue(1_688_412, 0.02, 290)
    assert estimate.victims == 33_768
    assert estimate.revenue == 9_792_720
    assert estimate.revenue > 9_700_000
    elapsed = min(
        _timed(lambda: analytics.estimate_revenue(1_688_412, 0.02, 290)) for _ in range(5)
    )
    assert elapsed < 1e-3, f"estimate_revenue took {elapsed * 1e3:.3f} ms"
    passline(1, f"revenue identity 33,768 victims / $9,792,720 in {elapsed * 1e6:.0f} us")


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_02_triage_identity():
    durations = [9.0, 9.0, 17.0, 25.0, 25.0]  # mean 17, sample sd exactly 8
    threshold = analytics.triage_threshold(durations)
    assert abs(threshold - 41.0) <= 1e-9
    passline(2, f"triage threshold {threshold} minutes from mean-17/sd-8 fixture")


def test_03_coverage_arithmetic():
    items = {f"domain{i:04d}.com": D(0) for i in range(1524)}
    snapshot = evaluation.BlacklistSnapshot(
        "combined", {f"domain{i:04d}.com": D(40) for i in range(108)}
    )
    report = evaluation.blacklist_coverage(items, [snapshot])
    assert report.covered == 108
    assert report.rounded_fraction == Decimal("0.0709")

    single = evaluation.blacklist_coverage(
        {"late-listed.com": D(10)},
        [evaluation.BlacklistSnapshot("feed", {"late-listed.com": D(48)})],
    )
    assert single.lag_days == [38]
    passline(3, "coverage 108/1524 -> 0.0709; single-item lag +38 days")


def test_04_whois_cluster_reproduction():
    emails = ["amitabb8@gmx.com", "amitabb9@gmx.com", "amitapp1@gmx.com", "amitabb6@gmail.com"]
    clusters = attribution.cluster_emails(emails, threshold=5)
    assert len(clusters) == 1 and clusters[0].members == frozenset(emails)

    pair = ["aaaaa@x.com", "bbbbb@x.com"]
    assert levenshtein_ref(*pair) == 5
    assert len(attribution.cluster_emails(pair, threshold=5)) == 2

    rng = random.Random(4)
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789@._-"
    for _ in range(1000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 41)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 41)))
        assert attribution.levenshtein(a, b) == levenshtein_ref(a, b)
    passline(4, "registrant cluster of four; distance-5 split; 1,000-pair DP oracle match")


def test_05_detector_oracle_suite():
    start = time.perf_counter()
    records, labels = generate_corpus(n_scam=100, n_benign=100)
    config = HeuristicConfig()
    false_pos = false_neg = 0
    for record in records:
        verdict = score_page(record, config)
        expected = labels[record.record_id].is_scam
        false_pos += verdict.is_scam and not expected
        false_neg += (not verdict.is_scam) and expected
    assert false_pos == 0 and false_neg == 0

    rng = random.Random(5)
    texts = [
        "WINDOWS SECURITY ALERT virus infected call 877-555-0100 immediately",
        "<p>support technician malware warning blocked</p>",
        "plain filler text",
        "",
    ]
    for i in range(10_000):
        record = CrawlRecord(
            record_id=f"fuzz{i}",
            seed_url="http://seed.example.com/",
            final_url=f"http://h{rng.randrange(50)}.example.com/x",
            vantage="fuzz",
            observed_at=datetime(2015, 9, 1, tzinfo=timezone.utc),
            http_status=rng.choice([200, 404, 500]),
            redirect_chain=[],
            html=rng.choice(texts),
            scripts=[rng.choice(texts)],
            dialogs=[],  # gate closed
            onunload_hooked=rng.random() < 0.5,
            audio_autoplay=rng.random() < 0.5,
            popup_window_count=0,  # gate closed
        )
        verdict = score_page(record, config)
        assert not verdict.is_scam and verdict.score == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"detector suite took {elapsed:.1f}s"
    passline(5, f"200-page corpus 0 FP / 0 FN; 10,000-record gate fuzz in {elapsed:.1f}s")


def test_06_phone_and_dynamic_delivery():
    (phone,) = extract_phone_numbers("(877) 292-3084")
    assert phone.digits == "8772923084" and phone.toll_free

    from test_detector import PAY_PER_CALL_SNIPPET

    finding = detect_dynamic_number_delivery([PAY_PER_CALL_SNIPPET])
    assert finding is not None
    assert finding.campaign_key == "43019bb72cd5ecc4e3b33902645dd4d6"
    assert [p.digits for p in finding.default_numbers] == ["8772923084"]
    passline(6, "phone normalization and pay-per-call campaign key recovered")


def test_07_lifetime_oracle():
    rng = random.Random(7)
    for _ in range(10_000):
        first, observations = random_timeline(rng, max_days=60)
        timeline = LivenessTimeline("x.com", first, observations)
        assert compute_lifetime(timeline) == lifetime_bruteforce(observations)

    plus_minus_plus = LivenessTimeline("x.com", D(0), {D(0): True, D(1): False, D(2): True})
    assert compute_lifetime(plus_minus_plus) == 3
    passline(7, "10,000 random timelines match brute-force scan; [+,-,+] -> 3")


def test_08_campaign_graph_oracle():
    rng = random.Random(8)
    for _ in range(1000):
        domains, phones, edges = random_bipartite(rng, max_nodes=200)
        graph = campaigns.CampaignGraph()
        for d in domains:
            graph.domain_nodes.setdefault(d, D(0))
        for p in phones:
            graph.phone_nodes.setdefault(p, D(0))
        for d, p in edges:
            graph.add(d, p, D(0))
        ours = {
            frozenset({"d:" + d for d in c.domains} | {"p:" + p for p in c.phones})
            for c in campaigns.connected_components(graph)
        }
        assert ours == set(bfs_components_ref(domains, phones, edges))

    for _ in range(200):
        graph = campaigns.CampaignGraph()
        for _ in range(rng.randrange(1, 30)):
            sub = rng.choice(["", "www.", "a.", "b."])
            graph.add(f"{sub}site{rng.randrange(10)}.com", f"84455501{rng.randrange(8):02d}", D(0))
        before = len(campaigns.connected_components(graph))
        after = len(campaigns.connected_components(campaigns.merge_by_etld1(graph)))
        assert after <= before

    graph = campaigns.CampaignGraph()
    graph.add("early.com", "8445550100", D(10))
    graph.add("early.com", "8445550101", D(55))
    (component,) = campaigns.connected_components(graph)
    assert campaigns.campaign_stats(component, graph).lifetime_days == 45
    passline(8, "1,000 graphs match BFS oracle; merge non-increasing; day10/day55 -> 45")


def test_09_statistics():
    rng = random.Random(9)
    for _ in range(50):
        na, nb = rng.randrange(2, 40), rng.randrange(2, 40)
        a = [rng.gauss(rng.uniform(-5, 80), rng.uniform(0.5, 30)) for _ in range(na)]
        b = [rng.gauss(rng.uniform(-5, 80), rng.uniform(0.5, 30)) for _ in range(nb)]
        if max(a) == min(a) and max(b) == min(b):
            continue
        result = evaluation.welch_t_test(a, b)
        t_ref, df_ref, p_ref = welch_p_ref(a, b)
        assert abs(result.p_value - p_ref) <= 1e-8
        assert abs(result.t_statistic - t_ref) <= 1e-8 * max(1.0, abs(t_ref))

    scam_lengths = [rng.gauss(76, 56) for _ in range(8000)]
    alexa_lengths = [rng.gauss(12, 3.5) for _ in range(8000)]
    assert evaluation.welch_t_test(scam_lengths, alexa_lengths).p_value < 0.05

    sizes = [3, 5, 7, 9, 12, 15, 18, 22, 27, 33]
    lifetimes = [2, 4, 9, 11, 14, 19, 25, 31, 38, 45]
    fixture = [
        campaigns.Campaign(frozenset(), frozenset(), size=s, lifetime_days=t)
        for s, t in zip(sizes, lifetimes)
    ]
    r = campaigns.size_lifetime_correlation(fixture)
    assert abs(r - pearson_ref([float(s) for s in sizes], [float(t) for t in lifetimes])) <= 1e-12

    linear = [campaigns.Campaign(frozenset(), frozenset(), size=s, lifetime_days=3 * s) for s in range(2, 12)]
    assert campaigns.size_lifetime_correlation(linear) == pytest.approx(1.0, abs=1e-12)
    passline(9, "Welch 50-fixture oracle match at 1e-8; scale-separated p < 0.05; Pearson at 1e-12")


def test_10_mod_status():
    from test_analytics import status_page

    clients = ["203.0.113.7", "203.0.113.8", "203.0.113.7", "198.51.100.4"]
    sample = analytics.parse_mod_status(status_page(clients))
    assert sample.client_ips == clients

    samples = [
        analytics.ModStatusSample(
            domain="monitored.xyz",
            sampled_at=datetime.combine(D(day), dtime(12, 0), tzinfo=timezone.utc),
            client_ips=[f"10.{day}.{i // 250}.{i % 250}" for i in range(224)],
        )
        for day in range(60)
    ]
    stats = analytics.visitor_stats(samples)
    assert stats.unique_ips == 13_440
    assert stats.avg_visitors_per_day == pytest.approx(224.0)
    passline(10, "server-status IP lists exact; 13,440 uniques over 60 days -> 224/day")


def _run_pipeline(config: PipelineConfig, out: Path, parallelism: int) -> None:
    opts = argparse.Namespace(
        parallelism=parallelism, date=None, transport="replay", replay_dir=None, distance_threshold=5
    )
    assert run("ingest", config, out, opts) == 0
    assert run("detect", config, out, opts) == 0
    for offset in range(14):
        opts.date = D(offset)
        assert run("liveness", config, out, opts) == 0
    opts.date = None
    for sub in ("campaigns", "attribute", "coverage", "analytics", "report"):
        assert run(sub, config, out, opts) == 0


def _snapshot(out: Path) -> dict[str, bytes]:
    return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


def test_11_pipeline_determinism(fixtures_dir, tmp_path):
    config = PipelineConfig.from_file(fixtures_dir / "pipeline_config.json")
    outs = [tmp_path / name for name in ("serial-a", "serial-b", "parallel-8")]
    for out, parallelism in zip(outs, (1, 1, 8)):
        _run_pipeline(config, out, parallelism)
    first, second, third = (_snapshot(out) for out in outs)
    assert first.keys() == second.keys() == third.keys()
    for name in first:
        assert first[name] == second[name], f"{name} differs between identical runs"
        assert first[name] == third[name], f"{name} differs across parallelism degrees"
    passline(11, f"{len(first)} pipeline artifacts byte-identical across runs and parallelism 1 vs 8")
