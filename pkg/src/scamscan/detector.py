"""Scam-page classification: popup-gated keyword scoring, phone-number
extraction and normalization, dynamic pay-per-call detection, and page- and
domain-level features."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from html.parser import HTMLParser
from importlib import resources

from .corpus import CrawlRecord, PublicSuffixError, etld1, public_suffix

__all__ = [
    "DomainFeatures",
    "DynamicNumberFinding",
    "HeuristicConfig",
    "PageFeatures",
    "PhoneNumber",
    "Verdict",
    "detect_dynamic_number_delivery",
    "extract_domain_features",
    "extract_page_features",
    "extract_phone_numbers",
    "is_cdn_host",
    "load_cdn_suffixes",
    "parse_verdict_line",
    "score_page",
    "verdict_to_dict",
    "verdict_to_line",
    "visible_text",
]

TOLL_FREE_PREFIXES = frozenset({"800", "833", "844", "855", "866", "877", "888"})

# Keyword tiers: weight 3 words assert an infection, weight 2 words borrow
# OS/vendor authority, weight 1 words are urgency filler. A phone number
# within call-proximity of "call"/"dial" scores as a tier-3 hit.
DEFAULT_KEYWORD_TIERS: dict[str, int] = {
    "virus": 3,
    "infected": 3,
    "spyware": 3,
    "trojan": 3,
    "malware": 3,
    "windows": 2,
    "microsoft": 2,
    "security": 2,
    "alert": 2,
    "warning": 2,
    "blocked": 2,
    "error": 2,
    "hacked": 2,
    "support": 1,
    "technician": 1,
    "toll-free": 1,
    "immediately": 1,
    "do not ignore": 1,
    "firewall": 1,
    "helpline": 1,
}

CALL_NEAR_PHONE = "call-near-phone"

DEFAULT_MARKER_TOKENS = ("Callpixels.Campaign", "callpixels", "retreaver", "request_number")

SCARE_DOMAIN_WORDS = ("techsupport", "alert", "pc", "security", "windows")


@dataclass(frozen=True)
class HeuristicConfig:
    """Tunable knobs of the scam heuristic; immutable after load."""

    keyword_weights: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_KEYWORD_TIERS))
    threshold: int = 6
    call_proximity_chars: int = 60
    call_near_phone_weight: int = 3
    padding_min_length: int = 500
    padding_min_space_fraction: float = 0.2
    marker_tokens: tuple[str, ...] = DEFAULT_MARKER_TOKENS
    toll_free_prefixes: frozenset[str] = TOLL_FREE_PREFIXES

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if any(w <= 0 for w in self.keyword_weights.values()):
            raise ValueError("keyword weights must be positive")

    @classmethod
    def from_file(cls, path) -> "HeuristicConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        kwargs = {}
        if "keyword_tiers" in raw:
            kwargs["keyword_weights"] = {str(k): int(v) for k, v in raw["keyword_tiers"].items()}
        for key in (
            "threshold",
            "call_proximity_chars",
            "call_near_phone_weight",
            "padding_min_length",
        ):
            if key in raw:
                kwargs[key] = int(raw[key])
        if "padding_min_space_fraction" in raw:
            kwargs["padding_min_space_fraction"] = float(raw["padding_min_space_fraction"])
        if "marker_tokens" in raw:
            kwargs["marker_tokens"] = tuple(str(t) for t in raw["marker_tokens"])
        if "toll_free_prefixes" in raw:
            kwargs["toll_free_prefixes"] = frozenset(str(p) for p in raw["toll_free_prefixes"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "keyword_tiers": dict(self.keyword_weights),
            "threshold": self.threshold,
            "call_proximity_chars": self.call_proximity_chars,
            "call_near_phone_weight": self.call_near_phone_weight,
            "padding_min_length": self.padding_min_length,
            "padding_min_space_fraction": self.padding_min_space_fraction,
            "marker_tokens": list(self.marker_tokens),
            "toll_free_prefixes": sorted(self.toll_free_prefixes),
        }


# ---------------------------------------------------------------------------
# phone numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhoneNumber:
    """A NANP number normalized to its 10 digits."""

    digits: str
    toll_free: bool
    source: str  # dialog | body | script-default | script-dynamic

    def __post_init__(self):
        if len(self.digits) != 10 or not self.digits.isdigit():
            raise ValueError("digits must be exactly 10 ASCII digits")


# NANP: optional +1/1 country code, 2-9 leading area and exchange digits,
# separators limited to space/dot/dash/parentheses. Guards reject matches
# embedded in longer digit runs.
_PHONE_RE = re.compile(
    r"""(?<!\d)
        (?:\+?1[-.\s]?)?
        \(?\s?([2-9]\d{2})\s?\)?
        [-.\s]?([2-9]\d{2})
        [-.\s]?(\d{4})
        (?!\d)""",
    re.VERBOSE,
)


def extract_phone_numbers(
    text: str,
    source: str = "body",
    toll_free_prefixes: frozenset[str] = TOLL_FREE_PREFIXES,
) -> list[PhoneNumber]:
    """NANP numbers in ``text``, normalized to 10 digits, first occurrence kept."""
    seen: set[str] = set()
    out: list[PhoneNumber] = []
    for m in _PHONE_RE.finditer(text):
        digits = "".join(m.groups())
        if digits in seen:
            continue
        seen.add(digits)
        out.append(PhoneNumber(digits=digits, toll_free=digits[:3] in toll_free_prefixes, source=source))
    return out


# ---------------------------------------------------------------------------
# dynamic (pay-per-call) number delivery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DynamicNumberFinding:
    framework_marker: str
    campaign_key: str | None
    default_numbers: tuple[PhoneNumber, ...]

    def __post_init__(self):
        if not self.campaign_key and not self.default_numbers:
            raise ValueError("finding requires a campaign key or default numbers")


_CAMPAIGN_KEY_RE = re.compile(
    r"""['"]?campaign_key['"]?\s*[:=]\s*['"]([A-Za-z0-9_-]{6,64})['"]"""
)


def detect_dynamic_number_delivery(
    scripts: list[str], config: HeuristicConfig | None = None
) -> DynamicNumberFinding | None:
    """Look for pay-per-call framework markers in script bodies.

    The first script containing a marker token is inspected; the campaign key
    is taken from the key-value assignment nearest to the marker, and any
    hardcoded numbers in that script are kept as the fallback defaults. No
    finding is reported when neither a key nor default numbers are present.
    """
    config = config or HeuristicConfig()
    for script in scripts:
        low = script.lower()
        hit: tuple[int, str] | None = None
        for token in config.marker_tokens:
            pos = low.find(token.lower())
            if pos >= 0 and (hit is None or pos < hit[0]):
                hit = (pos, token)
        if hit is None:
            continue
        pos, token = hit
        key = None
        key_matches = list(_CAMPAIGN_KEY_RE.finditer(script))
        if key_matches:
            key = min(key_matches, key=lambda m: abs(m.start() - pos)).group(1)
        defaults = tuple(
            extract_phone_numbers(script, source="script-default", toll_free_prefixes=config.toll_free_prefixes)
        )
        if key or defaults:
            return DynamicNumberFinding(framework_marker=token, campaign_key=key, default_numbers=defaults)
    return None


# ---------------------------------------------------------------------------
# visible text and keyword scoring
# ---------------------------------------------------------------------------

class _TextExtractor(HTMLParser):
    _SKIP = frozenset({"script", "style", "noscript", "template"})

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._skip = 0
        self.chunks: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip:
            self._skip -= 1

    def handle_data(self, data):
        if not self._skip:
            self.chunks.append(data)


def visible_text(html: str) -> str:
    """Text a user would see: markup stripped, script/style contents dropped."""
    parser = _TextExtractor()
    parser.feed(html)
    parser.close()
    return " ".join(parser.chunks)


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().lower()


def _keyword_pattern(keyword: str) -> re.Pattern:
    return re.compile(r"\b" + re.escape(keyword.lower()) + r"\b")


_CALL_WORD_RE = re.compile(r"\b(?:call|dial)\b")


def _phone_near_call_word(normalized: str, proximity: int) -> bool:
    phone_spans = [m.span() for m in _PHONE_RE.finditer(normalized)]
    if not phone_spans:
        return False
    for cm in _CALL_WORD_RE.finditer(normalized):
        cs, ce = cm.span()
        for ps, pe in phone_spans:
            gap = max(ps, cs) - min(pe, ce)
            if gap <= proximity:
                return True
    return False


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    """Classification outcome for one crawl record."""

    record_id: str
    is_scam: bool
    score: int
    matched_keywords: list[tuple[str, int, str]]  # (keyword, tier weight, location)
    phones: list[PhoneNumber]
    dynamic_delivery: DynamicNumberFinding | None
    fqdn: str
    domain: str
    observed_at: date


def score_page(record: CrawlRecord, config: HeuristicConfig | None = None) -> Verdict:
    """Score one record with the popup-gated keyword heuristic.

    A page that never popped a dialog and never opened a popup window is
    non-scam by definition, score 0. Otherwise distinct keyword hits across
    dialog messages and visible body text are summed by tier weight, and the
    page is a scam when the score reaches the threshold and it advertises a
    way to be called (a phone number anywhere, or dynamic number delivery).
    """
    config = config or HeuristicConfig()
    if config.threshold <= 0:
        raise ValueError("threshold must be positive")

    host = record.final_host
    try:
        domain = etld1(host) if host else ""
    except (PublicSuffixError, ValueError):
        domain = host
    observed = record.observed_at.date()

    dialog_text = _normalize(" ".join(d.message for d in record.dialogs))
    body_text = _normalize(visible_text(record.html))

    phones: list[PhoneNumber] = []
    seen_digits: set[str] = set()
    for source, text in (("dialog", dialog_text), ("body", body_text)):
        for p in extract_phone_numbers(text, source=source, toll_free_prefixes=config.toll_free_prefixes):
            if p.digits not in seen_digits:
                seen_digits.add(p.digits)
                phones.append(p)
    for script in record.scripts:
        for p in extract_phone_numbers(script, source="script-default", toll_free_prefixes=config.toll_free_prefixes):
            if p.digits not in seen_digits:
                seen_digits.add(p.digits)
                phones.append(p)

    dynamic = detect_dynamic_number_delivery(record.scripts, config)

    if not record.dialogs and record.popup_window_count == 0:
        return Verdict(
            record_id=record.record_id,
            is_scam=False,
            score=0,
            matched_keywords=[],
            phones=phones,
            dynamic_delivery=dynamic,
            fqdn=host,
            domain=domain,
            observed_at=observed,
        )

    matched: list[tuple[str, int, str]] = []
    for keyword, weight in config.keyword_weights.items():
        pattern = _keyword_pattern(keyword)
        if pattern.search(dialog_text):
            matched.append((keyword, weight, "dialog"))
        elif pattern.search(body_text):
            matched.append((keyword, weight, "body"))
    if _phone_near_call_word(dialog_text, config.call_proximity_chars):
        matched.append((CALL_NEAR_PHONE, config.call_near_phone_weight, "dialog"))
    elif _phone_near_call_word(body_text, config.call_proximity_chars):
        matched.append((CALL_NEAR_PHONE, config.call_near_phone_weight, "body"))

    score = sum(w for _, w, _ in matched)
    is_scam = score >= config.threshold and bool(phones or dynamic)
    return Verdict(
        record_id=record.record_id,
        is_scam=is_scam,
        score=score,
        matched_keywords=matched,
        phones=phones,
        dynamic_delivery=dynamic,
        fqdn=host,
        domain=domain,
        observed_at=observed,
    )


def _phone_to_dict(p: PhoneNumber) -> dict:
    return {"digits": p.digits, "toll_free": p.toll_free, "source": p.source}


def verdict_to_dict(v: Verdict) -> dict:
    dyn = None
    if v.dynamic_delivery is not None:
        dyn = {
            "framework_marker": v.dynamic_delivery.framework_marker,
            "campaign_key": v.dynamic_delivery.campaign_key,
            "default_numbers": [_phone_to_dict(p) for p in v.dynamic_delivery.default_numbers],
        }
    return {
        "record_id": v.record_id,
        "is_scam": v.is_scam,
        "score": v.score,
        "matched_keywords": [[k, w, loc] for k, w, loc in v.matched_keywords],
        "phones": [_phone_to_dict(p) for p in v.phones],
        "dynamic_delivery": dyn,
        "fqdn": v.fqdn,
        "domain": v.domain,
        "observed_at": v.observed_at.isoformat(),
    }


def verdict_to_line(v: Verdict) -> str:
    return json.dumps(verdict_to_dict(v), sort_keys=True, separators=(",", ":"))


def parse_verdict_line(line: str) -> Verdict:
    obj = json.loads(line)
    dyn = None
    if obj.get("dynamic_delivery"):
        d = obj["dynamic_delivery"]
        dyn = DynamicNumberFinding(
            framework_marker=d["framework_marker"],
            campaign_key=d.get("campaign_key"),
            default_numbers=tuple(PhoneNumber(**p) for p in d["default_numbers"]),
        )
    return Verdict(
        record_id=obj["record_id"],
        is_scam=obj["is_scam"],
        score=obj["score"],
        matched_keywords=[(k, w, loc) for k, w, loc in obj["matched_keywords"]],
        phones=[PhoneNumber(**p) for p in obj["phones"]],
        dynamic_delivery=dyn,
        fqdn=obj["fqdn"],
        domain=obj["domain"],
        observed_at=date.fromisoformat(obj["observed_at"]),
    )


# ---------------------------------------------------------------------------
# page features
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PageFeatures:
    dialog_count: int
    max_dialog_length: int
    padded_dialog: bool
    audio_autoplay: bool
    onunload_hooked: bool
    popup_window_count: int


def _space_fraction(message: str) -> float:
    if not message:
        return 0.0
    return sum(1 for c in message if c.isspace()) / len(message)


def extract_page_features(record: CrawlRecord, config: HeuristicConfig | None = None) -> PageFeatures:
    """Evasion-relevant page traits (dialog padding, audio, unload hooks)."""
    config = config or HeuristicConfig()
    lengths = [len(d.message) for d in record.dialogs]
    padded = any(
        len(d.message) >= config.padding_min_length
        and _space_fraction(d.message) >= config.padding_min_space_fraction
        for d in record.dialogs
    )
    return PageFeatures(
        dialog_count=len(record.dialogs),
        max_dialog_length=max(lengths) if lengths else 0,
        padded_dialog=padded,
        audio_autoplay=record.audio_autoplay,
        onunload_hooked=record.onunload_hooked,
        popup_window_count=record.popup_window_count,
    )


# ---------------------------------------------------------------------------
# domain features
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainFeatures:
    fqdn: str
    etld1: str
    length: int
    scare_keywords: frozenset[str]
    has_random_label: bool
    cdn_hosted: bool


_CDN_SUFFIXES: frozenset[str] | None = None


def load_cdn_suffixes() -> frozenset[str]:
    global _CDN_SUFFIXES
    if _CDN_SUFFIXES is None:
        text = resources.files("scamscan.data").joinpath("cdn_domains.txt").read_text("utf-8")
        _CDN_SUFFIXES = frozenset(
            line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#")
        )
    return _CDN_SUFFIXES


def is_cdn_host(host: str, cdn_suffixes: frozenset[str] | None = None) -> bool:
    suffixes = cdn_suffixes if cdn_suffixes is not None else load_cdn_suffixes()
    host = host.lower().rstrip(".")
    return any(host == s or host.endswith("." + s) for s in suffixes)


_CONSONANT_RUN_RE = re.compile(r"[bcdfghjklmnpqrstvwxyz]{5,}")


def shannon_entropy(label: str) -> float:
    """Bits per character over the label's character distribution."""
    from math import log2

    if not label:
        return 0.0
    counts: dict[str, int] = {}
    for c in label:
        counts[c] = counts.get(c, 0) + 1
    n = len(label)
    return -sum((k / n) * log2(k / n) for k in counts.values())


def _random_looking(label: str) -> bool:
    return shannon_entropy(label) >= 3.5 or bool(_CONSONANT_RUN_RE.search(label))


def extract_domain_features(fqdn: str, cdn_suffixes: frozenset[str] | None = None) -> DomainFeatures:
    """Lexical and hosting traits of a scam hostname."""
    host = fqdn.strip().lower().rstrip(".")
    registrable = etld1(host)
    suffix = public_suffix(host)
    own_labels = host[: -(len(suffix) + 1)].split(".")
    return DomainFeatures(
        fqdn=host,
        etld1=registrable,
        length=len(host),
        scare_keywords=frozenset(w for w in SCARE_DOMAIN_WORDS if w in host),
        has_random_label=any(_random_looking(lb) for lb in own_labels),
        cdn_hosted=is_cdn_host(host, cdn_suffixes),
    )
