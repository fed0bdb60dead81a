"""Operator-facing pipeline: ingest -> detect -> liveness -> campaigns ->
attribute -> coverage -> analytics -> report.

Every analysis runs from recorded corpora; the only network-capable code is
the live transport here, and it is optional. Replay transports make
multi-day liveness simulations deterministic via the --date flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from . import analytics as analytics_mod
from . import attribution as attribution_mod
from . import campaigns as campaigns_mod
from . import corpus as corpus_mod
from . import evaluation as evaluation_mod
from . import liveness as liveness_mod
from .detector import (
    HeuristicConfig,
    Verdict,
    extract_domain_features,
    extract_page_features,
    parse_verdict_line,
    score_page,
    verdict_to_line,
)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2

SUBCOMMANDS = (
    "ingest",
    "detect",
    "liveness",
    "campaigns",
    "attribute",
    "coverage",
    "analytics",
    "report",
)


class MissingInputError(FileNotFoundError):
    pass


@dataclass
class PipelineConfig:
    """Paths and parameters shared by the pipeline subcommands.

    Paths in the config file are resolved relative to the file itself, and
    every referenced path must exist at load time.
    """

    corpus: Path | None = None
    heuristic_config: Path | None = None
    suffix_list: Path | None = None
    whois_emails: Path | None = None
    ip_map: Path | None = None
    as_map: Path | None = None
    geo_map: Path | None = None
    cdn_list: Path | None = None
    blacklist_snapshots: list[Path] = field(default_factory=list)
    phone_directories: list[Path] = field(default_factory=list)
    mod_status_dir: Path | None = None
    call_durations: Path | None = None
    replay_dir: Path | None = None
    conversion_rate: float = 0.02
    avg_price: float = 290.0
    cloudflare_as_names: frozenset[str] = frozenset({"CLOUDFLARENET"})

    _PATH_KEYS = (
        "corpus",
        "heuristic_config",
        "suffix_list",
        "whois_emails",
        "ip_map",
        "as_map",
        "geo_map",
        "cdn_list",
        "mod_status_dir",
        "call_durations",
        "replay_dir",
    )

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise MissingInputError(str(path))
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        base = path.parent
        cfg = cls()
        for key in cls._PATH_KEYS:
            if raw.get(key):
                setattr(cfg, key, (base / raw[key]).resolve())
        for key in ("blacklist_snapshots", "phone_directories"):
            if raw.get(key):
                setattr(cfg, key, [(base / p).resolve() for p in raw[key]])
        if "conversion_rate" in raw:
            cfg.conversion_rate = float(raw["conversion_rate"])
        if "avg_price" in raw:
            cfg.avg_price = float(raw["avg_price"])
        if "cloudflare_as_names" in raw:
            cfg.cloudflare_as_names = frozenset(raw["cloudflare_as_names"])
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for key in self._PATH_KEYS:
            p = getattr(self, key)
            if p is not None and not Path(p).exists():
                raise MissingInputError(str(p))
        for group in (self.blacklist_snapshots, self.phone_directories):
            for p in group:
                if not Path(p).exists():
                    raise MissingInputError(str(p))

    def require(self, key: str) -> Path:
        value = getattr(self, key)
        if not value:
            raise MissingInputError(f"config key {key!r} is required for this subcommand")
        return value

    def heuristic(self) -> HeuristicConfig:
        if self.heuristic_config:
            return HeuristicConfig.from_file(self.heuristic_config)
        return HeuristicConfig()


# ---------------------------------------------------------------------------
# transports
# ---------------------------------------------------------------------------

class ReplayTransport:
    """Serves pre-recorded pages from <replay_dir>/<YYYY-MM-DD>.jsonl.

    Records are keyed by their seed_url; URLs without a stored record fetch
    as nothing, which liveness interprets as dead.
    """

    def __init__(self, replay_dir: str | Path, day: date):
        self.day = day
        self._records: dict[str, corpus_mod.CrawlRecord] = {}
        path = Path(replay_dir) / f"{day.isoformat()}.jsonl"
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        record = corpus_mod.parse_record_line(line)
                        self._records[record.seed_url] = record

    def fetch(self, url: str) -> corpus_mod.CrawlRecord | None:
        return self._records.get(url)


class LiveTransport:
    """Raw-HTML fetching over HTTP.

    Without a browser driver no dialog instrumentation exists, so dialog
    fields stay empty and the vantage is flagged uninstrumented. A driver
    that supplies full records can be injected as ``fetcher``.
    """

    def __init__(self, vantage: str = "live", timeout: float = 10.0, fetcher=None):
        self.vantage = vantage
        self.timeout = timeout
        self._fetcher = fetcher or self._http_get

    def _http_get(self, url: str) -> tuple[int, str]:
        from urllib.request import Request, urlopen

        req = Request(url, headers={"User-Agent": "Mozilla/5.0 (Windows NT 10.0; Win64; x64)"})
        with urlopen(req, timeout=self.timeout) as resp:
            return resp.status, resp.read().decode("utf-8", errors="replace")

    def fetch(self, url: str) -> corpus_mod.CrawlRecord | None:
        try:
            status, html = self._fetcher(url)
        except Exception:
            return None
        now = datetime.now(timezone.utc).replace(microsecond=0)
        return corpus_mod.CrawlRecord(
            record_id=f"live-{now.strftime('%Y%m%dT%H%M%SZ')}-{abs(hash(url)) % 10**8:08d}",
            seed_url=url,
            final_url=url,
            vantage=f"{self.vantage}-uninstrumented",
            observed_at=now,
            http_status=status,
            redirect_chain=[url],
            html=html,
            scripts=[],
            dialogs=[],
            onunload_hooked=False,
            audio_autoplay=False,
            popup_window_count=0,
        )


def fetch_loop(
    urls: list[str],
    transport,
    schedule: liveness_mod.CheckSchedule | None = None,
    today: date | None = None,
    heuristic: HeuristicConfig | None = None,
) -> tuple[list[corpus_mod.CrawlRecord], dict[str, bool]]:
    """Crawl URLs, or run the due liveness probes when a schedule is given.

    In crawl mode every URL is fetched once and the records are returned in
    input order. In liveness mode only URLs due for a check are probed; a
    URL is alive when any of its neighbors serves a page the heuristic still
    flags. Fetch failures become dead observations, never crashes.
    """
    records: list[corpus_mod.CrawlRecord] = []
    url_alive: dict[str, bool] = {}
    if schedule is None:
        for url in urls:
            record = _safe_fetch(transport, url)
            if record is not None:
                records.append(record)
        return records, url_alive

    if today is None:
        raise ValueError("liveness probing needs a logical date")
    heuristic = heuristic or HeuristicConfig()
    due = set(liveness_mod.due_checks(schedule, today))
    if urls:
        due &= set(urls)
    for url in sorted(due):
        alive = False
        for neighbor in sorted(schedule.entries.get(url, ())):
            record = _safe_fetch(transport, neighbor)
            if record is not None and score_page(record, heuristic).is_scam:
                alive = True
                break
        url_alive[url] = alive
        schedule.last_checked[url] = today
    return records, url_alive


def _safe_fetch(transport, url: str):
    try:
        return transport.fetch(url)
    except Exception:
        return None


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Path, default=None):
    if not path.exists():
        return default
    return json.loads(path.read_text(encoding="utf-8"))


def _load_records(cfg: PipelineConfig, out: Path) -> list[corpus_mod.CrawlRecord]:
    source = out / "records.jsonl"
    if not source.exists():
        source = cfg.require("corpus")
    with open(source, "rb") as fh:
        records, errors = corpus_mod.ingest_crawl_records(fh)
    if errors:
        raise ValueError(f"{source} contains {len(errors)} malformed lines; run ingest first")
    return records

def _load_verdicts(out: Path) -> list[Verdict]:
    path = out / "verdicts.jsonl"
    if not path.exists():
        raise MissingInputError(str(path))
    with open(path, encoding="utf-8") as fh:
        return [parse_verdict_line(line) for line in fh if line.strip()]


def _domain_first_seen(verdicts: list[Verdict]) -> dict[str, date]:
    first: dict[str, date] = {}
    for v in verdicts:
        if not v.is_scam:
            continue
        key = campaigns_mod.contract_domain(v.fqdn or v.domain)
        if key not in first or v.observed_at < first[key]:
            first[key] = v.observed_at
    return first


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg: PipelineConfig, out: Path, opts) -> int:
    with open(cfg.require("corpus"), "rb") as fh:
        records, errors = corpus_mod.ingest_crawl_records(fh)
    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(corpus_mod.record_to_line(record) + "\n")
    with open(out / "ingest_errors.jsonl", "w", encoding="utf-8") as fh:
        for err in errors:
            fh.write(json.dumps({"line_no": err.line_no, "reason": err.reason}, sort_keys=True) + "\n")
    print(f"ingest: {len(records)} records, {len(errors)} errors")
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_detect(cfg: PipelineConfig, out: Path, opts) -> int:
    records = _load_records(cfg, out)
    heuristic = cfg.heuristic()

    def classify(record):
        verdict = score_page(record, heuristic)
        page = extract_page_features(record, heuristic)
        host = record.final_host
        try:
            dom = extract_domain_features(host) if host else None
        except ValueError:
            dom = None
        return verdict, page, dom

    if opts.parallelism > 1:
        with ThreadPoolExecutor(max_workers=opts.parallelism) as pool:
            results = list(pool.map(classify, records))
    else:
        results = [classify(r) for r in records]

    n_scam = 0
    with open(out / "verdicts.jsonl", "w", encoding="utf-8") as vfh, open(
        out / "features.jsonl", "w", encoding="utf-8"
    ) as ffh:
        for record, (verdict, page, dom) in zip(records, results):
            n_scam += verdict.is_scam
            vfh.write(verdict_to_line(verdict) + "\n")
            row = {
                "record_id": record.record_id,
                "is_scam": verdict.is_scam,
                "dialog_count": page.dialog_count,
                "max_dialog_length": page.max_dialog_length,
                "padded_dialog": page.padded_dialog,
                "audio_autoplay": page.audio_autoplay,
                "onunload_hooked": page.onunload_hooked,
                "popup_window_count": page.popup_window_count,
                "fqdn": dom.fqdn if dom else record.final_host,
                "domain_length": dom.length if dom else None,
                "scare_keywords": sorted(dom.scare_keywords) if dom else [],
                "has_random_label": dom.has_random_label if dom else None,
                "cdn_hosted": dom.cdn_hosted if dom else None,
            }
            ffh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
    print(f"detect: {len(records)} records, {n_scam} scams")
    return EXIT_OK


def cmd_liveness(cfg: PipelineConfig, out: Path, opts) -> int:
    if opts.date is None:
        print("liveness requires --date", file=sys.stderr)
        return EXIT_FATAL
    today = opts.date
    verdicts = _load_verdicts(out)
    records = {r.record_id: r for r in _load_records(cfg, out)}
    heuristic = cfg.heuristic()

    schedule = liveness_mod.CheckSchedule()
    url_domain: dict[str, str] = {}
    state = _read_json(out / "liveness_schedule.json", {"entries": {}, "last_checked": {}, "url_domain": {}})
    for url, neighbors in state["entries"].items():
        schedule.entries[url] = set(neighbors)
    for url, day in state["last_checked"].items():
        schedule.last_checked[url] = date.fromisoformat(day)
    url_domain.update(state.get("url_domain", {}))

    first_seen = _domain_first_seen(verdicts)
    store_path = out / "timelines.jsonl"
    lines = store_path.read_text(encoding="utf-8").splitlines() if store_path.exists() else []
    timelines = liveness_mod.load_timeline_store(lines, first_seen)

    # every scam URL detected on or before today is tracked, and its
    # detection days count as alive observations
    for v in verdicts:
        if not v.is_scam or v.observed_at > today:
            continue
        record = records.get(v.record_id)
        if record is None:
            continue
        domain = campaigns_mod.contract_domain(v.fqdn or v.domain)
        schedule.track(record.final_url)
        url_domain[record.final_url] = domain
        timeline = timelines.setdefault(
            domain, liveness_mod.LivenessTimeline(domain=domain, first_seen=first_seen[domain])
        )
        liveness_mod.record_observation(timeline, v.observed_at, True)

    if opts.transport == "live":
        transport = LiveTransport()
    else:
        replay_dir = opts.replay_dir or cfg.replay_dir
        if replay_dir is None:
            print("replay transport requires --replay-dir or config replay_dir", file=sys.stderr)
            return EXIT_FATAL
        transport = ReplayTransport(replay_dir, today)

    _, url_alive = fetch_loop([], transport, schedule=schedule, today=today, heuristic=heuristic)

    domain_alive: dict[str, bool] = {}
    for url, alive in url_alive.items():
        domain = url_domain.get(url)
        if domain:
            domain_alive[domain] = domain_alive.get(domain, False) or alive
    for domain, alive in sorted(domain_alive.items()):
        timeline = timelines.get(domain)
        if timeline is None:
            continue
        day = max(today, timeline.first_seen)
        liveness_mod.record_observation(timeline, day, timeline.observations.get(day, False) or alive)

    retired = []
    for url, domain in sorted(url_domain.items()):
        timeline = timelines.get(domain)
        if timeline and liveness_mod.should_retire(timeline, today):
            schedule.untrack(url)
            retired.append(url)

    # rewrite the store canonically: sorted rows, sequence = row index
    rows = []
    for domain in sorted(timelines):
        for day in sorted(timelines[domain].observations):
            rows.append((domain, day, timelines[domain].observations[day]))
    with open(store_path, "w", encoding="utf-8") as fh:
        for seq, (domain, day, alive) in enumerate(rows):
            fh.write(liveness_mod.timeline_store_line(domain, day, alive, seq) + "\n")

    _write_json(
        out / "liveness_schedule.json",
        {
            "entries": {u: sorted(ns) for u, ns in schedule.entries.items()},
            "last_checked": {u: d.isoformat() for u, d in schedule.last_checked.items()},
            "url_domain": url_domain,
        },
    )
    lifetimes = {
        domain: {
            "first_seen": timelines[domain].first_seen.isoformat(),
            "lifetime_days": liveness_mod.compute_lifetime(timelines[domain]),
            "observations": len(timelines[domain].observations),
        }
        for domain in sorted(timelines)
    }
    _write_json(
        out / "lifetimes.json",
        {"domains": lifetimes, "distribution": liveness_mod.lifetime_distribution(list(timelines.values()))},
    )
    print(f"liveness {today}: probed {len(url_alive)} urls, {len(retired)} retired")
    return EXIT_OK


def cmd_campaigns(cfg: PipelineConfig, out: Path, opts) -> int:
    verdicts = _load_verdicts(out)
    fqdn_graph = campaigns_mod.build_graph(verdicts, level="fqdn")
    merged = campaigns_mod.merge_by_etld1(fqdn_graph)

    for name, graph in (("fqdn", fqdn_graph), ("etld1", merged)):
        with open(out / f"graph_{name}_edges.csv", "w", encoding="utf-8") as fh:
            fh.write("domain,phone,first_seen\n")
            for (d, p), seen in sorted(graph.edges.items()):
                fh.write(f"{d},{p},{seen.isoformat()}\n")
        with open(out / f"graph_{name}_nodes.csv", "w", encoding="utf-8") as fh:
            fh.write("node_type,node,first_seen\n")
            for d, seen in sorted(graph.domain_nodes.items()):
                fh.write(f"domain,{d},{seen.isoformat()}\n")
            for p, seen in sorted(graph.phone_nodes.items()):
                fh.write(f"phone,{p},{seen.isoformat()}\n")

    components = [
        campaigns_mod.campaign_stats(c, merged) for c in campaigns_mod.connected_components(merged)
    ]
    n_nodes = len(merged.domain_nodes) + len(merged.phone_nodes)
    summary = {
        "fqdn_components": len(campaigns_mod.connected_components(fqdn_graph)),
        "etld1_components": len(components),
        "nodes": n_nodes,
        "edges": len(merged.edges),
        "avg_domain_degree": (
            sum(deg for c in components for deg in c.domain_degrees.values()) / len(merged.domain_nodes)
            if merged.domain_nodes
            else 0.0
        ),
        "avg_phone_degree": (
            sum(deg for c in components for deg in c.phone_degrees.values()) / len(merged.phone_nodes)
            if merged.phone_nodes
            else 0.0
        ),
    }
    try:
        summary["size_lifetime_r"] = campaigns_mod.size_lifetime_correlation(components)
    except ValueError:
        summary["size_lifetime_r"] = None
    _write_json(
        out / "campaigns.json",
        {
            "summary": summary,
            "campaigns": [
                {
                    "n_domains": len(c.domains),
                    "n_phones": len(c.phones),
                    "size": c.size,
                    "domains": sorted(c.domains),
                    "phones": sorted(c.phones),
                    "tlds": sorted(c.tlds),
                    "toll_free_prefixes": sorted(c.toll_free_prefixes),
                    "lifetime_days": c.lifetime_days,
                    "max_domain_degree": max(c.domain_degrees.values(), default=0),
                    "max_phone_degree": max(c.phone_degrees.values(), default=0),
                }
                for c in components
            ],
        },
    )
    print(f"campaigns: {len(components)} components over {n_nodes} nodes")
    return EXIT_OK


def cmd_attribute(cfg: PipelineConfig, out: Path, opts) -> int:
    import csv

    verdicts = _load_verdicts(out)
    domains = sorted(_domain_first_seen(verdicts))

    warnings: list[str] = []
    emails_by_domain: dict[str, str] = {}
    no_email = 0
    whois_path = cfg.require("whois_emails")
    with open(whois_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row_no, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            if len(row) < 2 or not row[1].strip():
                no_email += 1
                continue
            emails_by_domain[row[0].strip().lower()] = row[1].strip().lower()

    clusters = attribution_mod.cluster_emails(sorted(emails_by_domain.values()), threshold=opts.distance_threshold)
    email_domains: dict[str, list[str]] = {}
    for dom, email in emails_by_domain.items():
        email_domains.setdefault(email, []).append(dom)
    cluster_rows = []
    for c in clusters:
        members = sorted(c.members)
        cluster_rows.append(
            {
                "representative": c.representative,
                "members": members,
                "n_domains": sum(len(email_domains.get(m, [])) for m in members),
                "privacy_protected": all(attribution_mod.is_privacy_email(m) for m in members),
            }
        )
    _write_json(
        out / "email_clusters.json",
        {
            "clusters": cluster_rows,
            "n_clusters": len(cluster_rows),
            "n_multi_member": sum(1 for c in clusters if len(c.members) >= 2),
            "n_privacy_protected": sum(1 for row in cluster_rows if row["privacy_protected"]),
            "domains_without_email": no_email,
        },
    )

    ip_map, w1 = attribution_mod.read_mapping_csv(cfg.require("ip_map"))
    as_map, w2 = attribution_mod.read_mapping_csv(cfg.require("as_map"))
    geo_map, w3 = attribution_mod.read_mapping_csv(cfg.require("geo_map"))
    warnings.extend(w1 + w2 + w3)
    report = attribution_mod.aggregate_infrastructure(
        domains, ip_map, as_map, geo_map, cloudflare_as_set=cfg.cloudflare_as_names
    )
    _write_json(
        out / "infrastructure.json",
        {
            "per_domain": report.per_domain,
            "country_histogram": report.country_histogram,
            "as_histogram": report.as_histogram,
            "cloudflare_fraction": report.cloudflare_fraction,
            "cdn_fraction": report.cdn_fraction,
            "unique_ip_count": report.unique_ip_count,
            "mapped": report.mapped,
            "unmapped": report.unmapped,
            "warnings": warnings,
        },
    )
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"attribute: {len(clusters)} email clusters, {report.unique_ip_count} unique IPs")
    return EXIT_PARTIAL if warnings else EXIT_OK


def cmd_coverage(cfg: PipelineConfig, out: Path, opts) -> int:
    verdicts = _load_verdicts(out)
    domain_seen = _domain_first_seen(verdicts)

    phone_seen: dict[str, date] = {}
    for v in verdicts:
        if not v.is_scam:
            continue
        digits = [p.digits for p in v.phones]
        if v.dynamic_delivery:
            digits += [p.digits for p in v.dynamic_delivery.default_numbers]
        for d in digits:
            if d not in phone_seen or v.observed_at < phone_seen[d]:
                phone_seen[d] = v.observed_at

    snapshots = {
        kind: [
            evaluation_mod.load_snapshot_csv(p, entry_type=kind)
            for p in cfg.blacklist_snapshots
        ]
        for kind in ("domain", "ip", "phone")
    }
    ip_map, _ = attribution_mod.read_mapping_csv(cfg.ip_map) if cfg.ip_map else ({}, [])
    ip_seen: dict[str, date] = {}
    for domain, day in domain_seen.items():
        ip = ip_map.get(domain)
        if ip and (ip not in ip_seen or day < ip_seen[ip]):
            ip_seen[ip] = day

    def report_dict(rep: evaluation_mod.CoverageReport) -> dict:
        return {
            "total": rep.total,
            "covered": rep.covered,
            "coverage_fraction": float(rep.rounded_fraction),
            "lag_days": rep.lag_days,
            "mean_lag": rep.mean_lag,
            "mean_hits": rep.mean_hits,
        }

    payload = {
        "domains": report_dict(evaluation_mod.blacklist_coverage(domain_seen, snapshots["domain"])),
        "ips": report_dict(evaluation_mod.blacklist_coverage(ip_seen, snapshots["ip"])),
        "phones_blacklists": report_dict(evaluation_mod.blacklist_coverage(phone_seen, snapshots["phone"])),
    }
    if cfg.phone_directories and phone_seen:
        directories = {}
        for p in cfg.phone_directories:
            entries = {
                line.strip()
                for line in Path(p).read_text(encoding="utf-8").splitlines()
                if line.strip() and not line.startswith("#")
            }
            directories[Path(p).stem] = entries
        cov = evaluation_mod.phone_directory_coverage(set(phone_seen), directories)
        payload["phone_directories"] = {
            "total": cov.total,
            "per_directory": {k: cov.per_directory[k] for k in sorted(cov.per_directory)},
            "union_fraction": cov.union_fraction,
        }
    _write_json(out / "coverage.json", payload)
    print(
        "coverage: domains "
        f"{payload['domains']['covered']}/{payload['domains']['total']}, "
        f"phones {payload['phones_blacklists']['covered']}/{payload['phones_blacklists']['total']}"
    )
    return EXIT_OK


def cmd_analytics(cfg: PipelineConfig, out: Path, opts) -> int:
    status_dir = Path(cfg.require("mod_status_dir"))
    geo_map, _ = attribution_mod.read_mapping_csv(cfg.geo_map) if cfg.geo_map else ({}, [])

    per_domain = []
    all_ips: set[str] = set()
    sum_unique = 0
    skipped = []
    for domain_dir in sorted(p for p in status_dir.iterdir() if p.is_dir()):
        samples = []
        for page in sorted(domain_dir.glob("*.html")):
            stamp = None
            try:
                stamp = datetime.strptime(page.stem, "%Y%m%dT%H%M%SZ").replace(tzinfo=timezone.utc)
            except ValueError:
                pass
            try:
                samples.append(
                    analytics_mod.parse_mod_status(
                        page.read_text(encoding="utf-8"), domain=domain_dir.name, sampled_at=stamp
                    )
                )
            except analytics_mod.NotServerStatusPage:
                skipped.append(str(page.relative_to(status_dir)))
        if not samples:
            continue
        stats = analytics_mod.visitor_stats(samples)
        ips = set().union(*(s.client_ips for s in samples))
        all_ips |= ips
        sum_unique += stats.unique_ips
        per_domain.append(
            {
                "domain": stats.domain,
                "unique_ips": stats.unique_ips,
                "days_observed": stats.days_observed,
                "avg_visitors_per_day": stats.avg_visitors_per_day,
            }
        )

    geography = analytics_mod.geolocate_visitors(all_ips, geo_map)
    revenue_summed = analytics_mod.estimate_revenue(sum_unique, cfg.conversion_rate, cfg.avg_price)
    revenue_dedup = analytics_mod.estimate_revenue(len(all_ips), cfg.conversion_rate, cfg.avg_price)

    threshold = None
    if cfg.call_durations:
        durations = [
            float(line)
            for line in Path(cfg.call_durations).read_text(encoding="utf-8").split()
            if line.strip()
        ]
        if len(durations) >= 2:
            threshold = analytics_mod.triage_threshold(durations)

    _write_json(
        out / "analytics.json",
        {
            "per_domain": per_domain,
            "geography": geography,
            "unique_visitors_summed": sum_unique,
            "unique_visitors_deduplicated": len(all_ips),
            "revenue_summed": {
                "victims": revenue_summed.victims,
                "revenue": revenue_summed.revenue,
            },
            "revenue_deduplicated": {
                "victims": revenue_dedup.victims,
                "revenue": revenue_dedup.revenue,
            },
            "conversion_rate": cfg.conversion_rate,
            "avg_price": cfg.avg_price,
            "triage_threshold_minutes": threshold,
            "unparseable_pages": sorted(skipped),
        },
    )
    print(f"analytics: {len(per_domain)} domains, {len(all_ips)} unique visitor IPs")
    return EXIT_OK


def _fmt_pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100 * x:.1f}%"


def cmd_report(cfg: PipelineConfig, out: Path, opts) -> int:
    lines: list[str] = ["scam pipeline summary", "=" * 21, ""]

    verdict_path = out / "verdicts.jsonl"
    if verdict_path.exists():
        verdicts = _load_verdicts(out)
        scams = [v for v in verdicts if v.is_scam]
        domains = {campaigns_mod.contract_domain(v.fqdn or v.domain) for v in scams}
        phones = {p.digits for v in scams for p in v.phones}
        for v in scams:
            if v.dynamic_delivery:
                phones |= {p.digits for p in v.dynamic_delivery.default_numbers}
        dynamic = sum(1 for v in scams if v.dynamic_delivery)
        lines += [
            "discovery",
            "---------",
            f"records analyzed:        {len(verdicts)}",
            f"scam pages:              {len(scams)}",
            f"unique scam domains:     {len(domains)}",
            f"unique phone numbers:    {len(phones)}",
            f"dynamic number delivery: {_fmt_pct(dynamic / len(scams)) if scams else 'n/a'} of scam pages",
            "",
        ]

    features_path = out / "features.jsonl"
    if features_path.exists():
        rows = [json.loads(l) for l in features_path.read_text(encoding="utf-8").splitlines() if l.strip()]
        scam_rows = [r for r in rows if r["is_scam"]]
        benign_rows = [r for r in rows if not r["is_scam"]]
        if scam_rows:
            lines += [
                "page and domain features (scam pages)",
                "-------------------------------------",
                f"padded long dialogs:   {_fmt_pct(sum(r['padded_dialog'] for r in scam_rows) / len(scam_rows))}",
                f"autoplaying audio:     {_fmt_pct(sum(r['audio_autoplay'] for r in scam_rows) / len(scam_rows))}",
                f"unload handler hooked: {_fmt_pct(sum(r['onunload_hooked'] for r in scam_rows) / len(scam_rows))}",
                f"random-label domains:  {_fmt_pct(sum(bool(r['has_random_label']) for r in scam_rows) / len(scam_rows))}",
                f"CDN-hosted domains:    {_fmt_pct(sum(bool(r['cdn_hosted']) for r in scam_rows) / len(scam_rows))}",
            ]
            scam_lengths = [float(r["domain_length"]) for r in scam_rows if r["domain_length"]]
            benign_lengths = [float(r["domain_length"]) for r in benign_rows if r["domain_length"]]
            if len(scam_lengths) >= 2 and len(benign_lengths) >= 2:
                import statistics

                t = evaluation_mod.welch_t_test(scam_lengths, benign_lengths)
                lines.append(
                    f"domain length:         scam {statistics.mean(scam_lengths):.1f} vs benign "
                    f"{statistics.mean(benign_lengths):.1f} chars (t={t.t_statistic:.2f}, p={t.p_value:.3g})"
                )
            lines.append("")

    lifetimes = _read_json(out / "lifetimes.json")
    if lifetimes:
        dist = lifetimes["distribution"]
        lines += [
            "liveness",
            "--------",
            f"domains tracked:        {len(lifetimes['domains'])}",
            f"alive domains:          {dist['alive_domains']}",
            f"single-day lifetimes:   {_fmt_pct(dist['single_day_fraction'])}",
            f"lifetimes of <= 3 days: {_fmt_pct(dist['up_to_three_days_fraction'])}",
            "",
        ]

    camps = _read_json(out / "campaigns.json")
    if camps:
        s = camps["summary"]
        lines += [
            "campaigns (eTLD+1 graph)",
            "------------------------",
            f"connected components: {s['etld1_components']} (from {s['fqdn_components']} at fqdn level)",
            f"avg degree:           domains {s['avg_domain_degree']:.2f}, phones {s['avg_phone_degree']:.2f}",
            f"size-lifetime r:      "
            + (f"{s['size_lifetime_r']:.3f}" if s["size_lifetime_r"] is not None else "n/a"),
            "",
            "top campaigns (#domains, #phones, TLDs, prefixes, lifetime):",
        ]
        for c in camps["campaigns"][:5]:
            lines.append(
                f"  {c['n_domains']:>4} D {c['n_phones']:>4} P  "
                f"[{', '.join(c['tlds'])}]  [{', '.join(c['toll_free_prefixes'])}]  {c['lifetime_days']}d"
            )
        lines.append("")

    clusters = _read_json(out / "email_clusters.json")
    infra = _read_json(out / "infrastructure.json")
    if clusters or infra:
        lines += ["attribution", "-----------"]
        if clusters:
            lines += [
                f"email clusters:        {clusters['n_clusters']} ({clusters['n_multi_member']} with >= 2 members)",
                f"privacy-protected:     {clusters['n_privacy_protected']} clusters",
                f"domains without email: {clusters['domains_without_email']}",
            ]
        if infra:
            top_country = max(infra["country_histogram"].items(), key=lambda kv: kv[1], default=None)
            lines += [
                f"unique hosting IPs:    {infra['unique_ip_count']} ({infra['mapped']} mapped, {infra['unmapped']} unmapped)",
                f"behind Cloudflare:     {_fmt_pct(infra['cloudflare_fraction'])}",
                f"CDN-hosted:            {_fmt_pct(infra['cdn_fraction'])}",
            ]
            if top_country:
                lines.append(f"top hosting country:   {top_country[0]} ({_fmt_pct(top_country[1])})")
        lines.append("")

    coverage = _read_json(out / "coverage.json")
    if coverage:
        lines += ["blacklist coverage", "------------------"]
        for key, label in (("domains", "domains"), ("ips", "IPs"), ("phones_blacklists", "phones")):
            rep = coverage[key]
            lag = f", mean lag {rep['mean_lag']:+.1f} days" if rep["mean_lag"] is not None else ""
            lines.append(
                f"{label + ':':<9} {rep['covered']}/{rep['total']} "
                f"({_fmt_pct(rep['coverage_fraction'])}){lag}"
            )
        dirs = coverage.get("phone_directories")
        if dirs:
            lines.append("phone directories:")
            for name, frac in dirs["per_directory"].items():
                lines.append(f"  {name:<22} {_fmt_pct(frac)}")
            lines.append(f"  {'together':<22} {_fmt_pct(dirs['union_fraction'])}")
        lines.append("")

    analytics = _read_json(out / "analytics.json")
    if analytics:
        lines += [
            "victims and revenue",
            "-------------------",
            f"monitored domains:     {len(analytics['per_domain'])}",
            f"unique visitors:       {analytics['unique_visitors_deduplicated']} deduplicated "
            f"({analytics['unique_visitors_summed']} summed per domain)",
            f"estimated victims:     {analytics['revenue_deduplicated']['victims']} "
            f"(at {_fmt_pct(analytics['conversion_rate'])} conversion)",
            f"estimated revenue:     ${analytics['revenue_deduplicated']['revenue']:,.0f} "
            f"(${analytics['revenue_summed']['revenue']:,.0f} summed per domain)",
        ]
        if analytics.get("geography"):
            top = sorted(analytics["geography"].items(), key=lambda kv: -kv[1])[:5]
            lines.append("visitor geography:     " + ", ".join(f"{c} {_fmt_pct(f)}" for c, f in top))
        if analytics.get("triage_threshold_minutes") is not None:
            lines.append(f"call triage threshold: {analytics['triage_threshold_minutes']:.1f} minutes")
        lines.append("")

    if len(lines) == 3:
        lines.append("(no pipeline outputs found)")
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print((out / "report.txt").read_text(encoding="utf-8"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

_HANDLERS = {
    "ingest": cmd_ingest,
    "detect": cmd_detect,
    "liveness": cmd_liveness,
    "campaigns": cmd_campaigns,
    "attribute": cmd_attribute,
    "coverage": cmd_coverage,
    "analytics": cmd_analytics,
    "report": cmd_report,
}


def run(subcommand: str, config: PipelineConfig, out_dir: str | Path, opts=None) -> int:
    """Run one pipeline stage; returns the process exit status."""
    if subcommand not in _HANDLERS:
        raise ValueError(f"unknown subcommand: {subcommand!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if opts is None:
        opts = argparse.Namespace(
            parallelism=1, date=None, transport="replay", replay_dir=None, distance_threshold=5
        )
    if config.suffix_list:
        corpus_mod.set_default_psl(corpus_mod.PublicSuffixList.from_file(config.suffix_list))
    try:
        return _HANDLERS[subcommand](config, out, opts)
    except MissingInputError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_FATAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scamscan", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="pipeline config JSON")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--parallelism", type=int, default=1)
        sp.add_argument("--transport", choices=("replay", "live"), default="replay")
        sp.add_argument("--replay-dir", dest="replay_dir", default=None)
        sp.add_argument(
            "--date",
            type=date.fromisoformat,
            default=None,
            help="logical 'today' (YYYY-MM-DD) for liveness simulation",
        )
        sp.add_argument("--distance-threshold", dest="distance_threshold", type=int, default=5)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = PipelineConfig.from_file(args.config)
    except MissingInputError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_FATAL
    return run(args.subcommand, config, args.out, args)


if __name__ == "__main__":
    sys.exit(main())
