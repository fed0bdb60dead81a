"""Registrant attribution: Levenshtein clustering of WHOIS emails and
aggregation of hosting infrastructure from supplied mapping files."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources

__all__ = [
    "EmailCluster",
    "InfraReport",
    "aggregate_infrastructure",
    "cluster_emails",
    "is_privacy_email",
    "levenshtein",
    "load_privacy_domains",
    "read_mapping_csv",
]


def levenshtein(a: str, b: str) -> int:
    """Minimum insertions/deletions/substitutions turning ``a`` into ``b``."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class EmailCluster:
    members: frozenset[str]
    representative: str  # lexicographically smallest member


def cluster_emails(emails: list[str], threshold: int = 5) -> list[EmailCluster]:
    """Single-linkage clusters of addresses under strict distance < threshold.

    Distance is computed over the full address (local part and provider), so
    near-identical names on different providers still group together. Output
    order is deterministic: clusters sorted by representative.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    unique = sorted(set(emails))
    parent = list(range(len(unique)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(unique)):
        for j in range(i + 1, len(unique)):
            # cheap lower bound: length difference never underestimates
            if abs(len(unique[i]) - len(unique[j])) >= threshold:
                continue
            if levenshtein(unique[i], unique[j]) < threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    groups: dict[int, set[str]] = {}
    for i, email in enumerate(unique):
        groups.setdefault(find(i), set()).add(email)
    clusters = [EmailCluster(members=frozenset(g), representative=min(g)) for g in groups.values()]
    clusters.sort(key=lambda c: c.representative)
    return clusters


_PRIVACY_DOMAINS: frozenset[str] | None = None


def load_privacy_domains() -> frozenset[str]:
    global _PRIVACY_DOMAINS
    if _PRIVACY_DOMAINS is None:
        text = resources.files("scamscan.data").joinpath("privacy_services.txt").read_text("utf-8")
        _PRIVACY_DOMAINS = frozenset(
            line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#")
        )
    return _PRIVACY_DOMAINS


def is_privacy_email(email: str, privacy_domains: frozenset[str] | None = None) -> bool:
    """True when the address belongs to a known WHOIS privacy service."""
    domains = privacy_domains if privacy_domains is not None else load_privacy_domains()
    _, _, host = email.lower().rpartition("@")
    return any(host == d or host.endswith("." + d) for d in domains)


# ---------------------------------------------------------------------------
# infrastructure aggregation
# ---------------------------------------------------------------------------

@dataclass
class InfraReport:
    per_domain: dict[str, dict] = field(default_factory=dict)
    country_histogram: dict[str, float] = field(default_factory=dict)
    as_histogram: dict[str, float] = field(default_factory=dict)
    cloudflare_fraction: float = 0.0
    cdn_fraction: float = 0.0
    unique_ip_count: int = 0
    mapped: int = 0
    unmapped: int = 0


def read_mapping_csv(path) -> tuple[dict[str, str], list[str]]:
    """Two-column CSV with a header row -> (mapping, per-row warnings)."""
    mapping: dict[str, str] = {}
    warnings: list[str] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return mapping, warnings
        for row_no, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) < 2 or not row[0].strip():
                warnings.append(f"{path}:{row_no}: malformed row {row!r}")
                continue
            key, value = row[0].strip().lower(), row[1].strip()
            if key in mapping and mapping[key] != value:
                warnings.append(f"{path}:{row_no}: duplicate key {key!r}, keeping first")
                continue
            mapping[key] = value
    return mapping, warnings


def aggregate_infrastructure(
    domains: list[str],
    ip_map: dict[str, str],
    as_map: dict[str, str],
    geo_map: dict[str, str],
    cdn_suffixes: frozenset[str] | None = None,
    cloudflare_as_set: frozenset[str] = frozenset({"CLOUDFLARENET"}),
) -> InfraReport:
    """Join domains through domain->IP->AS/country maps and aggregate.

    Domains without a mapping are counted, never dropped; histogram fractions
    are taken over the mapped subset so they always sum to 1. The CDN
    fraction is over all input domains (no map needed for a suffix match).
    """
    from .detector import is_cdn_host

    report = InfraReport()
    unique_domains = sorted(set(d.lower() for d in domains))
    ips: set[str] = set()
    countries: dict[str, int] = {}
    asns: dict[str, int] = {}
    geo_mapped = as_mapped = cloudflare = cdn = 0

    for domain in unique_domains:
        ip = ip_map.get(domain)
        as_name = as_map.get(ip) if ip else None
        country = geo_map.get(ip) if ip else None
        report.per_domain[domain] = {"ip": ip, "as_name": as_name, "country": country}
        if ip:
            ips.add(ip)
            report.mapped += 1
        else:
            report.unmapped += 1
        if country:
            geo_mapped += 1
            countries[country] = countries.get(country, 0) + 1
        if as_name:
            as_mapped += 1
            asns[as_name] = asns.get(as_name, 0) + 1
            if as_name in cloudflare_as_set:
                cloudflare += 1
        if is_cdn_host(domain, cdn_suffixes):
            cdn += 1

    if geo_mapped:
        report.country_histogram = {c: n / geo_mapped for c, n in sorted(countries.items())}
    if as_mapped:
        report.as_histogram = {a: n / as_mapped for a, n in sorted(asns.items())}
        report.cloudflare_fraction = cloudflare / as_mapped
    if unique_domains:
        report.cdn_fraction = cdn / len(unique_domains)
    report.unique_ip_count = len(ips)
    return report
