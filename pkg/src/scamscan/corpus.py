"""Crawl-record data model, corpus ingestion, typo-squatting seed domains,
and the shared registrable-domain (eTLD+1) utility."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import BinaryIO, Iterable

__all__ = [
    "CrawlRecord",
    "DialogEvent",
    "IngestError",
    "PublicSuffixError",
    "PublicSuffixList",
    "TypoModel",
    "etld1",
    "generate_typo_seeds",
    "ingest_crawl_records",
    "parse_record_line",
    "public_suffix",
    "record_from_dict",
    "record_to_dict",
    "record_to_line",
    "set_default_psl",
]


# ---------------------------------------------------------------------------
# registrable domains (public-suffix snapshot)
# ---------------------------------------------------------------------------

class PublicSuffixError(ValueError):
    """Raised when a hostname has no registrable domain (it is a suffix)."""


class PublicSuffixList:
    """Public-suffix rules loaded from a pinned snapshot file.

    Implements the standard matching algorithm: longest matching rule wins,
    ``*.`` rules match any single label, ``!`` rules override wildcards, and
    an unlisted TLD acts as its own suffix (the implicit ``*`` rule).
    """

    def __init__(self, rules: Iterable[str]):
        self.rules: set[str] = set()
        self.exceptions: set[str] = set()
        for rule in rules:
            rule = rule.strip().lower()
            if not rule or rule.startswith("//") or rule.startswith("#"):
                continue
            if rule.startswith("!"):
                self.exceptions.add(rule[1:])
            else:
                self.rules.add(rule)

    @classmethod
    def from_file(cls, path) -> "PublicSuffixList":
        with open(path, encoding="utf-8") as fh:
            return cls(fh)

    @classmethod
    def bundled(cls) -> "PublicSuffixList":
        text = resources.files("scamscan.data").joinpath("public_suffix_list.dat").read_text("utf-8")
        return cls(text.splitlines())

    def suffix_label_count(self, labels: list[str]) -> int:
        """Number of trailing labels that form the public suffix."""
        best = 1  # implicit "*" rule: an unlisted TLD is its own suffix
        for i in range(len(labels)):
            candidate = ".".join(labels[i:])
            n = len(labels) - i
            if candidate in self.exceptions:
                # exception rules win outright; suffix = rule minus leftmost label
                return max(n - 1, 1)
            if candidate in self.rules and n > best:
                best = n
            if i > 0:
                wild = "*." + ".".join(labels[i:])
                if wild in self.rules and n + 1 > best:
                    best = n + 1
        return best

    def public_suffix(self, fqdn: str) -> str:
        labels = _host_labels(fqdn)
        n = self.suffix_label_count(labels)
        return ".".join(labels[-n:])

    def etld1(self, fqdn: str) -> str:
        """Registrable domain: one label left of the public suffix."""
        labels = _host_labels(fqdn)
        n = self.suffix_label_count(labels)
        if n >= len(labels):
            raise PublicSuffixError(f"no registrable domain: {fqdn!r} is a public suffix")
        return ".".join(labels[-(n + 1):])


_HOST_RE = re.compile(r"^[a-z0-9_-]+(\.[a-z0-9_-]+)*$")


def _host_labels(fqdn: str) -> list[str]:
    host = fqdn.strip().lower().rstrip(".")
    if not host or not _HOST_RE.match(host):
        raise ValueError(f"not a valid hostname: {fqdn!r}")
    return host.split(".")


_DEFAULT_PSL: PublicSuffixList | None = None


def _default_psl() -> PublicSuffixList:
    global _DEFAULT_PSL
    if _DEFAULT_PSL is None:
        _DEFAULT_PSL = PublicSuffixList.bundled()
    return _DEFAULT_PSL


def set_default_psl(psl: PublicSuffixList | None) -> None:
    """Swap the process-wide suffix snapshot (None restores the bundled one)."""
    global _DEFAULT_PSL
    _DEFAULT_PSL = psl


def etld1(fqdn: str, psl: PublicSuffixList | None = None) -> str:
    """Registrable domain of ``fqdn`` per the bundled suffix snapshot."""
    return (psl or _default_psl()).etld1(fqdn)


def public_suffix(fqdn: str, psl: PublicSuffixList | None = None) -> str:
    return (psl or _default_psl()).public_suffix(fqdn)


# ---------------------------------------------------------------------------
# crawl records
# ---------------------------------------------------------------------------

_DIALOG_KINDS = frozenset({"alert", "confirm", "prompt"})


@dataclass(frozen=True)
class DialogEvent:
    """One native dialog fired during a visit, in firing order."""

    kind: str  # alert | confirm | prompt
    message: str
    ordinal: int  # 1-based position in the visit

    def __post_init__(self):
        if self.kind not in _DIALOG_KINDS:
            raise ValueError(f"unknown dialog kind: {self.kind!r}")
        if self.ordinal < 1:
            raise ValueError("dialog ordinal must be >= 1")


@dataclass
class CrawlRecord:
    """One instrumented page visit, as logged by the crawler."""

    record_id: str
    seed_url: str
    final_url: str
    vantage: str
    observed_at: datetime  # UTC
    http_status: int
    redirect_chain: list[str]
    html: str
    scripts: list[str]
    dialogs: list[DialogEvent]
    onunload_hooked: bool
    audio_autoplay: bool
    popup_window_count: int

    def __post_init__(self):
        if self.redirect_chain and self.redirect_chain[-1] != self.final_url:
            raise ValueError("final_url must equal the last redirect_chain element")
        if self.popup_window_count < 0:
            raise ValueError("popup_window_count must be non-negative")
        if self.observed_at.tzinfo is None or self.observed_at.utcoffset() != timezone.utc.utcoffset(None):
            raise ValueError("observed_at must be an explicit UTC timestamp")
        last = 0
        for d in self.dialogs:
            if d.ordinal <= last:
                raise ValueError("dialog ordinals must be strictly increasing")
            last = d.ordinal

    @property
    def final_host(self) -> str:
        from urllib.parse import urlsplit

        return urlsplit(self.final_url).hostname or ""


_RECORD_FIELDS = (
    "record_id",
    "seed_url",
    "final_url",
    "vantage",
    "observed_at",
    "http_status",
    "redirect_chain",
    "html",
    "scripts",
    "dialogs",
    "onunload_hooked",
    "audio_autoplay",
    "popup_window_count",
)


def _parse_utc(value: str) -> datetime:
    # ISO-8601 with a trailing Z; fromisoformat on 3.10 needs the offset form
    if not isinstance(value, str):
        raise ValueError("timestamp must be a string")
    ts = value[:-1] + "+00:00" if value.endswith("Z") else value
    dt = datetime.fromisoformat(ts)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp lacks a UTC offset: {value!r}")
    return dt.astimezone(timezone.utc)


def _format_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def record_from_dict(obj: dict) -> CrawlRecord:
    if not isinstance(obj, dict):
        raise ValueError("record must be an object")
    missing = [f for f in _RECORD_FIELDS if f not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    unknown = [k for k in obj if k not in _RECORD_FIELDS]
    if unknown:
        raise ValueError(f"unknown fields: {', '.join(sorted(unknown))}")
    dialogs = []
    if not isinstance(obj["dialogs"], list):
        raise ValueError("dialogs must be a list")
    for d in obj["dialogs"]:
        try:
            dialogs.append(DialogEvent(kind=d["kind"], message=d["message"], ordinal=d["ordinal"]))
        except (TypeError, KeyError) as exc:
            raise ValueError(f"malformed dialog entry: {exc}") from exc
    for key in ("redirect_chain", "scripts"):
        if not isinstance(obj[key], list) or not all(isinstance(x, str) for x in obj[key]):
            raise ValueError(f"{key} must be a list of strings")
    for key in ("record_id", "seed_url", "final_url", "vantage", "html"):
        if not isinstance(obj[key], str):
            raise ValueError(f"{key} must be a string")
    for key in ("onunload_hooked", "audio_autoplay"):
        if not isinstance(obj[key], bool):
            raise ValueError(f"{key} must be a boolean")
    for key in ("http_status", "popup_window_count"):
        if not isinstance(obj[key], int) or isinstance(obj[key], bool):
            raise ValueError(f"{key} must be an integer")
    return CrawlRecord(
        record_id=obj["record_id"],
        seed_url=obj["seed_url"],
        final_url=obj["final_url"],
        vantage=obj["vantage"],
        observed_at=_parse_utc(obj["observed_at"]),
        http_status=obj["http_status"],
        redirect_chain=list(obj["redirect_chain"]),
        html=obj["html"],
        scripts=list(obj["scripts"]),
        dialogs=dialogs,
        onunload_hooked=obj["onunload_hooked"],
        audio_autoplay=obj["audio_autoplay"],
        popup_window_count=obj["popup_window_count"],
    )


def record_to_dict(record: CrawlRecord) -> dict:
    return {
        "record_id": record.record_id,
        "seed_url": record.seed_url,
        "final_url": record.final_url,
        "vantage": record.vantage,
        "observed_at": _format_utc(record.observed_at),
        "http_status": record.http_status,
        "redirect_chain": list(record.redirect_chain),
        "html": record.html,
        "scripts": list(record.scripts),
        "dialogs": [{"kind": d.kind, "message": d.message, "ordinal": d.ordinal} for d in record.dialogs],
        "onunload_hooked": record.onunload_hooked,
        "audio_autoplay": record.audio_autoplay,
        "popup_window_count": record.popup_window_count,
    }


def record_to_line(record: CrawlRecord) -> str:
    return json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":"))


def parse_record_line(line: str) -> CrawlRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from exc
    return record_from_dict(obj)


@dataclass(frozen=True)
class IngestError:
    line_no: int  # 1-based
    reason: str


def ingest_crawl_records(source: BinaryIO | Iterable[bytes]) -> tuple[list[CrawlRecord], list[IngestError]]:
    """Parse a line-delimited record stream.

    Well-formed lines become records in input order; malformed lines are
    reported (not raised) so one bad line never poisons a corpus. An
    unreadable or undecodable source is fatal.
    """
    records: list[CrawlRecord] = []
    errors: list[IngestError] = []
    for line_no, raw in enumerate(source, start=1):
        try:
            line = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
        except UnicodeDecodeError as exc:
            raise OSError(f"source is not valid UTF-8 at line {line_no}: {exc}") from exc
        if not line.strip():
            continue
        try:
            records.append(parse_record_line(line))
        except ValueError as exc:
            errors.append(IngestError(line_no=line_no, reason=str(exc)))
    return records, errors


# ---------------------------------------------------------------------------
# typo-squatting seed generation
# ---------------------------------------------------------------------------

class TypoModel(Enum):
    """The five single-edit typo models used to generate seed domains."""

    CHAR_DUPLICATION = "char-duplication"
    CHAR_OMISSION = "char-omission"
    CHAR_TRANSPOSITION = "char-transposition"
    CHAR_SUBSTITUTION_ADJACENT = "char-substitution-adjacent"
    MISSING_DOT = "missing-dot"


# QWERTY neighbours, used by the adjacent-substitution model.
QWERTY_ADJACENT = {
    "q": "wa", "w": "qes", "e": "wrd", "r": "etf", "t": "ryg", "y": "tuh",
    "u": "yij", "i": "uok", "o": "ipl", "p": "o",
    "a": "qsz", "s": "awdz", "d": "sefc", "f": "drgv", "g": "fthb",
    "h": "gyjn", "j": "hukm", "k": "jilm", "l": "kop",
    "z": "asx", "x": "zsdc", "c": "xdfv", "v": "cfgb", "b": "vghn",
    "n": "bhjm", "m": "njk",
    "1": "2q", "2": "13w", "3": "24e", "4": "35r", "5": "46t",
    "6": "57y", "7": "68u", "8": "79i", "9": "80o", "0": "9p",
}


def _valid_label(label: str) -> bool:
    return bool(label) and not label.startswith("-") and not label.endswith("-")


def generate_typo_seeds(domain: str, models: set[TypoModel] | None = None) -> set[str]:
    """Candidate typo domains for one registrable domain.

    Each candidate is the result of exactly one model application to the
    label left of the public suffix; the input itself is never returned.
    """
    if domain != domain.strip().lower() or not domain.isascii() or "." not in domain:
        raise ValueError(f"expected a lowercase ASCII domain with a dot: {domain!r}")
    if models is None:
        models = set(TypoModel)
    psl = _default_psl()
    suffix = psl.public_suffix(domain)
    label = domain[: -(len(suffix) + 1)]
    if not label or "." in label:
        raise ValueError(f"expected a registrable domain (one label + suffix): {domain!r}")

    variants: set[str] = set()
    if TypoModel.CHAR_DUPLICATION in models:
        variants.update(label[:i] + c + label[i:] for i, c in enumerate(label))
    if TypoModel.CHAR_OMISSION in models:
        variants.update(label[:i] + label[i + 1:] for i in range(len(label)))
    if TypoModel.CHAR_TRANSPOSITION in models:
        variants.update(
            label[:i] + label[i + 1] + label[i] + label[i + 2:] for i in range(len(label) - 1)
        )
    if TypoModel.CHAR_SUBSTITUTION_ADJACENT in models:
        for i, c in enumerate(label):
            for adj in QWERTY_ADJACENT.get(c, ""):
                variants.add(label[:i] + adj + label[i:][1:])

    seeds = {v + "." + suffix for v in variants if _valid_label(v)}
    if TypoModel.MISSING_DOT in models:
        # the dot a user would type after "www" goes missing
        seeds.add("www" + domain)
    seeds.discard(domain)
    return seeds
