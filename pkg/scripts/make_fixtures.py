#!/usr/bin/env python3
"""Regenerate the bundled pipeline fixtures under fixtures/.

Everything is seeded, so reruns are byte-identical; the committed fixtures
are the output of this script. The bundle contains a labeled 200-page crawl
corpus, 14 days of liveness replay probes, WHOIS/IP/AS/geo mapping files,
blacklist snapshots, phone directories, server-status pages, and the
pipeline config wiring them together.
"""

from __future__ import annotations

import argparse
import json
import random
from datetime import date, timedelta
from pathlib import Path

from scamscan.campaigns import contract_domain
from scamscan.corpus import record_to_line
from scamscan.detector import HeuristicConfig
from scamscan.liveness import neighbor_urls
from scamscan.synthcorpus import generate_corpus, make_probe_record, write_corpus

START = date(2015, 9, 1)
SIM_DAYS = 14

VISITOR_COUNTRIES = ["US", "US", "US", "AU", "AU", "SG", "SG", "CA", "NZ"]
HOSTING_COUNTRIES = ["US", "US", "US", "US", "US", "US", "US", "IN", "NL", "DE"]
AS_POOL = ["GODADDY-AMS", "AMAZON-02", "OVH-HOSTING", "NAMECHEAP-NET", "ONEANDONE-AS"]
EMAIL_STEMS = [("kumarweb", "gmx.com"), ("fixdeskpro", "gmail.com"), ("netalertteam", "yahoo.com")]


def alive_offsets(rng: random.Random) -> set[int]:
    roll = rng.random()
    if roll < 0.27:
        return {0}
    if roll < 0.43:
        return set(range(rng.choice([2, 3])))
    if roll < 0.68:
        span = rng.randrange(4, 9)
        days = set(range(span))
        days.discard(rng.randrange(1, span))
        return days | {0, span - 1}
    if roll < 0.93:
        span = rng.randrange(9, SIM_DAYS)
        days = {0, span - 1} | {d for d in range(1, span - 1) if rng.random() < 0.6}
        return days
    return set(range(SIM_DAYS))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default=Path(__file__).resolve().parent.parent / "fixtures")
    parser.add_argument("--seed", type=int, default=20150901)
    args = parser.parse_args()
    root = Path(args.root)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed + 1)

    # corpus + labels + heuristic config
    records, labels = generate_corpus(seed=args.seed, start=START, span_days=SIM_DAYS)
    write_corpus(records, root / "corpus.jsonl")
    (root / "labels.json").write_text(
        json.dumps({rid: lab.to_dict() for rid, lab in sorted(labels.items())}, indent=2, sort_keys=True) + "\n"
    )
    (root / "heuristic_config.json").write_text(
        json.dumps(HeuristicConfig().to_dict(), indent=2, sort_keys=True) + "\n"
    )

    # liveness replay probes: one probe URL per scam domain, alive on a
    # seeded pattern of days relative to first detection
    scam_domains: dict[str, tuple[date, str, str]] = {}  # domain -> (first_seen, probe_url, phone)
    for record in records:
        lab = labels[record.record_id]
        if not lab.is_scam:
            continue
        domain = contract_domain(lab.fqdn)
        probe_url = neighbor_urls(record.final_url)[0]
        phone = lab.phones[0] if lab.phones else "8775550142"
        day = record.observed_at.date()
        if domain not in scam_domains or day < scam_domains[domain][0]:
            scam_domains[domain] = (day, probe_url, phone)

    by_day: dict[date, list] = {START + timedelta(days=i): [] for i in range(SIM_DAYS)}
    for domain in sorted(scam_domains):
        first, probe_url, phone = scam_domains[domain]
        for offset in sorted(alive_offsets(rng)):
            day = first + timedelta(days=offset)
            if day in by_day:
                by_day[day].append(make_probe_record(probe_url, day, phone))
    replay = root / "replay"
    replay.mkdir(exist_ok=True)
    for day, probes in by_day.items():
        with open(replay / f"{day.isoformat()}.jsonl", "w", encoding="utf-8") as fh:
            for probe in probes:
                fh.write(record_to_line(probe) + "\n")

    domains = sorted(scam_domains)
    phones = sorted({p for lab in labels.values() if lab.is_scam for p in lab.phones})

    # WHOIS registrant emails: clustered stems, privacy services, absentees
    with open(root / "whois_emails.csv", "w", encoding="utf-8") as fh:
        fh.write("domain,email\n")
        serial = {stem: 1 for stem, _ in EMAIL_STEMS}
        for domain in domains:
            roll = rng.random()
            if roll < 0.15:
                fh.write(f"{domain},\n")
            elif roll < 0.40:
                fh.write(f"{domain},owner{rng.randrange(100, 999)}@whoisguard.com\n")
            else:
                stem, provider = EMAIL_STEMS[rng.randrange(len(EMAIL_STEMS))]
                fh.write(f"{domain},{stem}{serial[stem]}@{provider}\n")
                if rng.random() < 0.6:
                    serial[stem] += 1

    # hosting maps: shared IPs, ~18% behind Cloudflare
    ip_pool = [f"198.51.100.{i}" for i in range(1, 15)] + [f"203.0.113.{i}" for i in range(1, 12)]
    ip_assignment = {}
    with open(root / "ip_map.csv", "w", encoding="utf-8") as fh:
        fh.write("domain,ip\n")
        for domain in domains:
            if rng.random() < 0.88:
                ip = rng.choice(ip_pool)
                ip_assignment[domain] = ip
                fh.write(f"{domain},{ip}\n")
    visitor_ips = [f"192.0.2.{i}" for i in range(1, 200)]
    with open(root / "as_map.csv", "w", encoding="utf-8") as fh:
        fh.write("ip,as_name\n")
        for i, ip in enumerate(ip_pool):
            as_name = "CLOUDFLARENET" if i % 6 == 0 else AS_POOL[i % len(AS_POOL)]
            fh.write(f"{ip},{as_name}\n")
    with open(root / "geo_map.csv", "w", encoding="utf-8") as fh:
        fh.write("ip,country_code\n")
        for i, ip in enumerate(ip_pool):
            fh.write(f"{ip},{HOSTING_COUNTRIES[i % len(HOSTING_COUNTRIES)]}\n")
        for i, ip in enumerate(visitor_ips):
            if i % 11 == 0:
                continue  # leave a few visitors unmapped
            fh.write(f"{ip},{VISITOR_COUNTRIES[i % len(VISITOR_COUNTRIES)]}\n")

    # blacklist snapshots: sparse coverage, mostly lagging our detection
    bl_dir = root / "blacklists"
    bl_dir.mkdir(exist_ok=True)
    listed = rng.sample(domains, max(3, len(domains) // 12))
    with open(bl_dir / "hostfeed.csv", "w", encoding="utf-8") as fh:
        fh.write("entry,type,date_added\n")
        for domain in sorted(listed):
            lag = rng.choice([-2, 0, 25, 31, 38, 44, 52])
            added = scam_domains[domain][0] + timedelta(days=lag)
            fh.write(f"{domain},domain,{added.isoformat()}\n")
        fh.write(f"unrelated-malware-site.com,domain,2014-05-12\n")
        for ip in rng.sample(ip_pool, 3):
            fh.write(f"{ip},ip,2015-08-20\n")
    with open(bl_dir / "abusefeed.csv", "w", encoding="utf-8") as fh:
        fh.write("entry,type,date_added\n")
        for domain in sorted(rng.sample(listed, max(1, len(listed) // 2))):
            added = scam_domains[domain][0] + timedelta(days=rng.choice([30, 40, 45]))
            fh.write(f"{domain},domain,{added.isoformat()}\n")
        for phone in sorted(rng.sample(phones, max(1, len(phones) // 10))):
            fh.write(f"{phone},phone,{(START + timedelta(days=40)).isoformat()}\n")

    # phone lookup directories
    pd_dir = root / "phone_directories"
    pd_dir.mkdir(exist_ok=True)
    fifth = max(1, len(phones) // 5)
    (pd_dir / "complaintline.txt").write_text("\n".join(sorted(rng.sample(phones, fifth))) + "\n")
    (pd_dir / "numberwatch.txt").write_text("\n".join(sorted(rng.sample(phones, max(1, fifth - 1)))) + "\n")

    # exposed server-status pages for two scam domains
    ms_dir = root / "mod_status"
    for di, domain in enumerate(domains[:2]):
        ddir = ms_dir / domain
        ddir.mkdir(parents=True, exist_ok=True)
        accesses = 12000 + 700 * di
        for si in range(3):
            day = START + timedelta(days=si % 2)
            stamp = day.strftime("%Y%m%d") + f"T{9 + si:02d}0000Z"
            clients = rng.sample(visitor_ips, 18 + 3 * si)
            rows = "\n".join(
                f"<tr><td><b>{w}-0</b></td><td>{1900 + w}</td><td>0/{w}/{w * 3}</td><td>_</td>"
                f"<td>{c}</td><td>{domain}:80</td><td>GET /landing HTTP/1.1</td></tr>"
                for w, c in enumerate(clients)
            )
            html = (
                f"<html><head><title>Apache Status</title></head><body>"
                f"<h1>Apache Server Status for {domain}</h1><dl>"
                f"<dt>Server Version: Apache/2.4.12 (Unix)</dt>"
                f"<dt>Server uptime: {3 + si} days {si * 4} hours 12 minutes 9 seconds</dt>"
                f"<dt>Total accesses: {accesses + 37 * si} - Total Traffic: 1.{si} GB</dt></dl>"
                f"<table border=\"0\"><tr><th>Srv</th><th>PID</th><th>Acc</th><th>M</th>"
                f"<th>Client</th><th>VHost</th><th>Request</th></tr>{rows}</table></body></html>"
            )
            (ddir / f"{stamp}.html").write_text(html, encoding="utf-8")
    # one machine-readable variant (scalars only, no worker table)
    auto_dir = ms_dir / domains[2]
    auto_dir.mkdir(parents=True, exist_ok=True)
    (auto_dir / (START.strftime("%Y%m%d") + "T120000Z.html")).write_text(
        "Total Accesses: 4821\nTotal kBytes: 9914\nUptime: 86542\nReqPerSec: .0557\n", encoding="utf-8"
    )

    # recorded call durations (minutes)
    durations = [max(3.0, min(45.0, rng.gauss(17, 8))) for _ in range(60)]
    (root / "call_durations.txt").write_text("\n".join(f"{d:.1f}" for d in durations) + "\n")

    (root / "pipeline_config.json").write_text(
        json.dumps(
            {
                "corpus": "corpus.jsonl",
                "heuristic_config": "heuristic_config.json",
                "whois_emails": "whois_emails.csv",
                "ip_map": "ip_map.csv",
                "as_map": "as_map.csv",
                "geo_map": "geo_map.csv",
                "blacklist_snapshots": ["blacklists/hostfeed.csv", "blacklists/abusefeed.csv"],
                "phone_directories": ["phone_directories/complaintline.txt", "phone_directories/numberwatch.txt"],
                "mod_status_dir": "mod_status",
                "call_durations": "call_durations.txt",
                "replay_dir": "replay",
                "conversion_rate": 0.02,
                "avg_price": 290,
                "cloudflare_as_names": ["CLOUDFLARENET"],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    n_probes = sum(len(v) for v in by_day.values())
    print(f"fixtures written to {root}: {len(records)} records, {len(domains)} scam domains, {n_probes} probes")


if __name__ == "__main__":
    main()
