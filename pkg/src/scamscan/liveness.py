"""Daily liveness tracking of detected scam URLs: neighbor-URL generation,
observation timelines, lifetime computation, and re-check scheduling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from urllib.parse import urlsplit, urlunsplit

__all__ = [
    "CheckSchedule",
    "LivenessTimeline",
    "compute_lifetime",
    "due_checks",
    "lifetime_distribution",
    "load_timeline_store",
    "neighbor_urls",
    "record_observation",
    "should_retire",
    "timeline_store_line",
]


def neighbor_urls(url: str) -> list[str]:
    """URLs that could be hosting the same scam as ``url``.

    The query and fragment are stripped first, then the resource path is
    reduced one segment at a time down to the site root. The original query
    never reappears in any neighbor.
    """
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        raise ValueError(f"expected an absolute URL with a host: {url!r}")
    path = parts.path or "/"
    out: list[str] = []

    def push(p: str):
        candidate = urlunsplit((parts.scheme, parts.netloc, p, "", ""))
        if candidate not in out:
            out.append(candidate)

    push(path)
    while path != "/":
        trimmed = path.rstrip("/")
        path = trimmed[: trimmed.rfind("/") + 1] if "/" in trimmed else "/"
        push(path)
    return out


@dataclass
class LivenessTimeline:
    """Per-domain daily alive/dead observations."""

    domain: str
    first_seen: date
    observations: dict[date, bool] = field(default_factory=dict)


def record_observation(timeline: LivenessTimeline, day: date, any_neighbor_scam: bool) -> LivenessTimeline:
    """Record one daily probe outcome; same-date writes overwrite."""
    if day < timeline.first_seen:
        raise ValueError(f"observation date {day} precedes first_seen {timeline.first_seen}")
    timeline.observations[day] = any_neighbor_scam
    return timeline


def compute_lifetime(timeline: LivenessTimeline) -> int:
    """Lifetime in days: the longest span that begins and ends scam-positive.

    Dead or missing days inside the span do not shorten it, so transient
    outages and malvertising rotation are absorbed. A domain never observed
    alive has lifetime 0.
    """
    alive_days = [d for d, alive in timeline.observations.items() if alive]
    if not alive_days:
        return 0
    return (max(alive_days) - min(alive_days)).days + 1


@dataclass
class CheckSchedule:
    """URLs under daily re-check, with their neighbor sets."""

    entries: dict[str, set[str]] = field(default_factory=dict)
    last_checked: dict[str, date] = field(default_factory=dict)

    def track(self, url: str) -> None:
        if url not in self.entries:
            # the tracked URL itself is probed too, query and all
            self.entries[url] = {url, *neighbor_urls(url)}

    def untrack(self, url: str) -> None:
        self.entries.pop(url, None)
        self.last_checked.pop(url, None)


def due_checks(schedule: CheckSchedule, today: date) -> list[str]:
    """Tracked URLs not yet checked today, in lexicographic order."""
    due = [
        url
        for url in schedule.entries
        if url not in schedule.last_checked or schedule.last_checked[url] < today
    ]
    return sorted(due)


def should_retire(timeline: LivenessTimeline, today: date, dead_days: int = 30) -> bool:
    """True once a domain has shown no sign of life for ``dead_days`` days."""
    alive = [d for d, a in timeline.observations.items() if a]
    anchor = max(alive) if alive else timeline.first_seen
    return (today - anchor).days >= dead_days


def lifetime_distribution(timelines: list[LivenessTimeline]) -> dict[str, float]:
    """Fractions of ever-alive domains with 1-day and up-to-3-day lifetimes."""
    lifetimes = [lt for lt in (compute_lifetime(t) for t in timelines) if lt >= 1]
    if not lifetimes:
        return {"alive_domains": 0, "single_day_fraction": 0.0, "up_to_three_days_fraction": 0.0}
    n = len(lifetimes)
    return {
        "alive_domains": n,
        "single_day_fraction": sum(1 for lt in lifetimes if lt == 1) / n,
        "up_to_three_days_fraction": sum(1 for lt in lifetimes if lt <= 3) / n,
    }


# ---------------------------------------------------------------------------
# timeline store (line-delimited, replayable in any order)
# ---------------------------------------------------------------------------

def timeline_store_line(domain: str, day: date, alive: bool, seq: int) -> str:
    return json.dumps(
        {"domain": domain, "date": day.isoformat(), "alive": alive, "seq": seq},
        sort_keys=True,
        separators=(",", ":"),
    )


def load_timeline_store(lines, first_seen: dict[str, date]) -> dict[str, LivenessTimeline]:
    """Rebuild timelines from store rows; per (domain, date) the row with the
    highest ingestion sequence wins, so replay order is irrelevant."""
    winners: dict[tuple[str, date], tuple[int, bool]] = {}
    for line in lines:
        if not line.strip():
            continue
        row = json.loads(line)
        key = (row["domain"], date.fromisoformat(row["date"]))
        seq = int(row.get("seq", 0))
        if key not in winners or seq >= winners[key][0]:
            winners[key] = (seq, bool(row["alive"]))
    timelines: dict[str, LivenessTimeline] = {}
    for (domain, day), (_, alive) in sorted(winners.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if domain not in timelines:
            timelines[domain] = LivenessTimeline(
                domain=domain, first_seen=min(first_seen.get(domain, day), day)
            )
        tl = timelines[domain]
        if day < tl.first_seen:
            tl.first_seen = day
        tl.observations[day] = alive
    return timelines
