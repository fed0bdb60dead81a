"""Coverage evaluation of external blacklists and phone directories, plus the
Welch t-test used for distribution comparisons."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from decimal import ROUND_HALF_EVEN, Decimal

from scipy.special import stdtr

__all__ = [
    "BlacklistSnapshot",
    "CoverageReport",
    "DirectoryCoverage",
    "TTestResult",
    "blacklist_coverage",
    "load_snapshot_csv",
    "phone_directory_coverage",
    "round_fraction",
    "welch_t_test",
]


@dataclass
class BlacklistSnapshot:
    """One external feed: entry (domain, IP, or phone digits) -> date added."""

    name: str
    entries: dict[str, date] = field(default_factory=dict)


def load_snapshot_csv(path, name: str | None = None, entry_type: str | None = None) -> BlacklistSnapshot:
    """Read "entry,type,date_added" rows, optionally keeping one entry type."""
    import os

    snapshot = BlacklistSnapshot(name=name or os.path.splitext(os.path.basename(path))[0])
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)  # header
        for row in reader:
            if len(row) < 3 or not row[0].strip():
                continue
            entry, kind, added = row[0].strip().lower(), row[1].strip().lower(), row[2].strip()
            if entry_type and kind != entry_type:
                continue
            day = date.fromisoformat(added)
            if entry not in snapshot.entries or day < snapshot.entries[entry]:
                snapshot.entries[entry] = day
    return snapshot


def round_fraction(numerator: int, denominator: int, places: int = 4) -> Decimal:
    """Exact rational rounded half-even, the convention used in reports."""
    if denominator == 0:
        return Decimal(0).quantize(Decimal(10) ** -places)
    return (Decimal(numerator) / Decimal(denominator)).quantize(
        Decimal(10) ** -places, rounding=ROUND_HALF_EVEN
    )


@dataclass
class CoverageReport:
    total: int
    covered: int
    coverage_fraction: float
    lag_days: list[int]  # blacklist date - our detection date; negative = they were first
    mean_lag: float | None
    mean_hits: float | None  # snapshots per covered item, the multi-engine view

    @property
    def rounded_fraction(self) -> Decimal:
        return round_fraction(self.covered, self.total)


def blacklist_coverage(
    items: dict[str, date], snapshots: list[BlacklistSnapshot]
) -> CoverageReport:
    """How much of our corpus the external feeds knew, and how late.

    An item is covered when any snapshot lists it; its lag is measured
    against the earliest listing date across snapshots.
    """
    covered = 0
    lags: list[int] = []
    hits_total = 0
    for item in sorted(items):
        listed = [s.entries[item] for s in snapshots if item in s.entries]
        if not listed:
            continue
        covered += 1
        hits_total += sum(1 for s in snapshots if item in s.entries)
        lags.append((min(listed) - items[item]).days)
    total = len(items)
    return CoverageReport(
        total=total,
        covered=covered,
        coverage_fraction=covered / total if total else 0.0,
        lag_days=lags,
        mean_lag=sum(lags) / len(lags) if lags else None,
        mean_hits=hits_total / covered if covered else None,
    )


@dataclass
class DirectoryCoverage:
    total: int
    per_directory: dict[str, float]
    union_fraction: float


def phone_directory_coverage(
    numbers: set[str], directories: dict[str, set[str]]
) -> DirectoryCoverage:
    """Per-directory and combined coverage of a phone corpus."""
    if not numbers:
        raise ValueError("empty corpus")
    total = len(numbers)
    per = {name: len(numbers & entries) / total for name, entries in directories.items()}
    union: set[str] = set()
    for entries in directories.values():
        union |= numbers & entries
    return DirectoryCoverage(total=total, per_directory=per, union_fraction=len(union) / total)


# ---------------------------------------------------------------------------
# Welch's t-test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float  # two-sided, in (0, 1]


def welch_t_test(sample_a: list[float], sample_b: list[float]) -> TTestResult:
    """Welch's unequal-variance t-test with Satterthwaite degrees of freedom."""
    na, nb = len(sample_a), len(sample_b)
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least two values")
    ma = math.fsum(sample_a) / na
    mb = math.fsum(sample_b) / nb
    va = math.fsum((x - ma) ** 2 for x in sample_a) / (na - 1)
    vb = math.fsum((x - mb) ** 2 for x in sample_b) / (nb - 1)
    if va == 0.0 and vb == 0.0:
        raise ValueError("both samples have zero variance")
    sa, sb = va / na, vb / nb
    t = (ma - mb) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    p = 2.0 * float(stdtr(df, -abs(t)))
    # extreme statistics underflow the CDF; keep p inside (0, 1]
    p = min(max(p, 5e-324), 1.0)
    return TTestResult(t_statistic=t, degrees_of_freedom=df, p_value=p)
