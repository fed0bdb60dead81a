"""Exposed-server analytics: Apache server-status parsing, visitor and
geography statistics, revenue estimation, and the call-triage threshold."""

from __future__ import annotations

import ipaddress
import math
import re
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from html.parser import HTMLParser

__all__ = [
    "ModStatusSample",
    "NotServerStatusPage",
    "RevenueEstimate",
    "VisitorStats",
    "estimate_revenue",
    "geolocate_visitors",
    "parse_mod_status",
    "triage_threshold",
    "visitor_stats",
]


class NotServerStatusPage(ValueError):
    pass


@dataclass
class ModStatusSample:
    """One scrape of an exposed Apache server-status page."""

    domain: str | None
    sampled_at: datetime | None
    client_ips: list[str] = field(default_factory=list)
    total_accesses: int | None = None
    uptime_seconds: int | None = None


class _TableCollector(HTMLParser):
    """Collects every <table> as a list of rows of stripped cell texts."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.tables: list[list[list[str]]] = []
        self._table: list[list[str]] | None = None
        self._row: list[str] | None = None
        self._cell: list[str] | None = None

    def handle_starttag(self, tag, attrs):
        if tag == "table":
            self._table = []
        elif tag == "tr" and self._table is not None:
            self._row = []
        elif tag in ("td", "th") and self._row is not None:
            self._cell = []

    def handle_endtag(self, tag):
        if tag == "table" and self._table is not None:
            self.tables.append(self._table)
            self._table = None
        elif tag == "tr" and self._row is not None:
            if self._cell is not None:  # unclosed cell
                self._row.append("".join(self._cell).strip())
                self._cell = None
            self._table.append(self._row)
            self._row = None
        elif tag in ("td", "th") and self._cell is not None:
            self._row.append("".join(self._cell).strip())
            self._cell = None

    def handle_data(self, data):
        if self._cell is not None:
            self._cell.append(data)


def _as_ip(text: str) -> str | None:
    candidate = text.strip()
    if not candidate:
        return None
    try:
        ipaddress.ip_address(candidate)
    except ValueError:
        return None
    return candidate


_TOTAL_ACCESSES_RE = re.compile(r"Total\s+[aA]ccesses:\s*(\d+)")
_UPTIME_PRETTY_RE = re.compile(r"Server uptime:\s*([^<\n]+)")
_UPTIME_AUTO_RE = re.compile(r"^Uptime:\s*(\d+)\s*$", re.MULTILINE)
_UPTIME_UNIT_RE = re.compile(r"(\d+)\s*(day|hour|minute|second)s?")

_UNIT_SECONDS = {"day": 86400, "hour": 3600, "minute": 60, "second": 1}


def _parse_uptime(text: str) -> int | None:
    m = _UPTIME_AUTO_RE.search(text)
    if m:
        return int(m.group(1))
    m = _UPTIME_PRETTY_RE.search(text)
    if not m:
        return None
    total = 0
    for qty, unit in _UPTIME_UNIT_RE.findall(m.group(1)):
        total += int(qty) * _UNIT_SECONDS[unit]
    return total or None


def parse_mod_status(
    html: str, domain: str | None = None, sampled_at: datetime | None = None
) -> ModStatusSample:
    """Extract client IPs and server scalars from a server-status page.

    The worker table is recognized by a header row containing "Client" and
    "Request" cells; every Client cell that parses as an IPv4/IPv6 address is
    kept, in row order. The machine-readable "?auto" variant has no worker
    table and yields scalars only. Anything else is rejected.
    """
    collector = _TableCollector()
    collector.feed(html)
    collector.close()

    client_ips: list[str] = []
    table_found = False
    for table in collector.tables:
        if not table:
            continue
        header = table[0]
        client_idx = next((i for i, cell in enumerate(header) if cell.strip().startswith("Client")), None)
        has_request = any(cell.strip().startswith("Request") for cell in header)
        if client_idx is None or not has_request:
            continue
        table_found = True
        for row in table[1:]:
            if client_idx < len(row):
                ip = _as_ip(row[client_idx])
                if ip:
                    client_ips.append(ip)
        break

    total_accesses = None
    m = _TOTAL_ACCESSES_RE.search(html)
    if m:
        total_accesses = int(m.group(1))
    uptime = _parse_uptime(html)

    if not table_found and total_accesses is None and uptime is None:
        raise NotServerStatusPage("not a server-status page")
    return ModStatusSample(
        domain=domain,
        sampled_at=sampled_at,
        client_ips=client_ips,
        total_accesses=total_accesses,
        uptime_seconds=uptime,
    )


@dataclass
class VisitorStats:
    domain: str
    unique_ips: int
    days_observed: int
    avg_visitors_per_day: float


def visitor_stats(samples: list[ModStatusSample]) -> VisitorStats:
    """Unique visitors across all samples of one domain."""
    if not samples:
        raise ValueError("no samples")
    domains = {s.domain for s in samples}
    if len(domains) != 1:
        raise ValueError(f"samples span multiple domains: {sorted(d or '?' for d in domains)}")
    ips: set[str] = set()
    days: set = set()
    for s in samples:
        ips.update(s.client_ips)
        if s.sampled_at is not None:
            days.add(s.sampled_at.date())
    n_days = len(days)
    return VisitorStats(
        domain=next(iter(domains)) or "",
        unique_ips=len(ips),
        days_observed=n_days,
        avg_visitors_per_day=len(ips) / n_days if n_days else 0.0,
    )


def geolocate_visitors(ips: set[str], geo_map: dict[str, str]) -> dict[str, float]:
    """Country histogram of visitor IPs.

    Country fractions are over geolocated IPs (they sum to 1); the residual
    "unknown" bucket reports the unmapped share of the whole input.
    """
    if not ips:
        return {}
    counts: dict[str, int] = {}
    for ip in ips:
        country = geo_map.get(ip)
        if country:
            counts[country] = counts.get(country, 0) + 1
    mapped = sum(counts.values())
    histogram = {c: n / mapped for c, n in sorted(counts.items())} if mapped else {}
    if mapped < len(ips):
        histogram["unknown"] = (len(ips) - mapped) / len(ips)
    return histogram


@dataclass(frozen=True)
class RevenueEstimate:
    unique_visitors: int
    conversion_rate: float
    avg_price: float
    victims: int
    revenue: float


def estimate_revenue(unique_visitors: int, conversion_rate: float, avg_price: float) -> RevenueEstimate:
    """Victims = floor(visitors x conversion); revenue = victims x price.

    The conversion rate is treated as the decimal the caller wrote (0.02
    means exactly 2%), so the victim count is exact integer arithmetic.
    """
    if unique_visitors < 0 or avg_price < 0:
        raise ValueError("inputs must be non-negative")
    if not 0 <= conversion_rate <= 1:
        raise ValueError("conversion_rate must be within [0, 1]")
    victims = int(unique_visitors * Fraction(str(conversion_rate)))
    revenue = victims * avg_price
    return RevenueEstimate(
        unique_visitors=unique_visitors,
        conversion_rate=conversion_rate,
        avg_price=avg_price,
        victims=victims,
        revenue=revenue,
    )


def triage_threshold(durations_minutes: list[float]) -> float:
    """Mean plus three sample standard deviations of call durations.

    Calls exceeding this are almost certainly post-charge interactions worth
    prioritizing for takedown.
    """
    n = len(durations_minutes)
    if n < 2:
        raise ValueError("need at least two durations")
    mean = math.fsum(durations_minutes) / n
    var = math.fsum((x - mean) ** 2 for x in durations_minutes) / (n - 1)
    return mean + 3.0 * math.sqrt(var)
