"""Deterministic synthetic crawl corpora with ground-truth labels.

Pages are assembled from vetted ingredient sentences whose keyword content
is known exactly, so every label (scam / benign) is guaranteed by
construction rather than by running the classifier. The generator doubles as
the labeling oracle for the heuristic's acceptance suite and feeds the
bundled pipeline fixtures.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from datetime import date, datetime, time, timezone

from .corpus import CrawlRecord, DialogEvent, record_to_line

__all__ = ["PageLabel", "generate_corpus", "make_probe_record", "write_corpus"]

# Weights mirror the default heuristic configuration; the generator does its
# own arithmetic with them instead of calling the classifier.
KEYWORD_WEIGHTS = {
    "virus": 3, "infected": 3, "spyware": 3, "trojan": 3, "malware": 3,
    "windows": 2, "microsoft": 2, "security": 2, "alert": 2, "warning": 2,
    "blocked": 2, "error": 2, "hacked": 2,
    "support": 1, "technician": 1, "toll-free": 1, "immediately": 1,
    "do not ignore": 1, "firewall": 1, "helpline": 1,
}
CALL_NEAR_WEIGHT = 3
THRESHOLD = 6

# One sentence per keyword; each sentence must contain its keyword, no other
# keyword, no "call"/"dial", and no digits (phones are placed separately).
KEYWORD_SENTENCES = {
    "virus": "A virus was detected on this computer.",
    "infected": "Your system is infected and personal data is at risk.",
    "spyware": "Spyware activity has been found on this machine.",
    "trojan": "A trojan is copying your banking details.",
    "malware": "Malware removal is required before you continue.",
    "windows": "Windows has encountered a critical issue.",
    "microsoft": "This notice references your Microsoft account.",
    "security": "The security center reports a serious problem.",
    "alert": "System alert: action is needed.",
    "warning": "Warning: private files may leak.",
    "blocked": "This computer has been blocked.",
    "error": "An unrecoverable error was reported.",
    "hacked": "Your accounts may have been hacked.",
    "support": "Contact the support team for help.",
    "technician": "A certified technician is standing by.",
    "toll-free": "The toll-free line is open day and night.",
    "immediately": "Act immediately to avoid losing your files.",
    "do not ignore": "Do not ignore this message.",
    "firewall": "The firewall has stopped working.",
    "helpline": "Ring the helpline today.",
}

BENIGN_DIALOGS = [
    "Session expired, please log in.",
    "Your download is ready.",
    "Subscribe to our newsletter for weekly recipes?",
    "Cookies help us improve the site. Accept?",
    "Enter a nickname for the leaderboard:",
    "Your cart was saved for later.",
    "Thanks for signing up. See you soon!",
]

# Benign dialogs that legitimately use a mild keyword; total weight kept
# far below the scam threshold.
MILD_DIALOGS = [
    ("An unexpected error occurred while saving your draft.", {"error"}),
    ("Thanks for writing to support. A reply is on the way.", {"support"}),
    ("The preview window was blocked by your browser.", {"blocked"}),
]

FILLER_SENTENCES = [
    "Fresh sourdough starts with a lively starter.",
    "Our travel journal covers hidden beaches and mountain huts.",
    "The garden bed needs compost before spring planting.",
    "Today we review a quiet mechanical keyboard.",
    "Weekend market hours are posted on the community board.",
    "The museum wing reopens with a ceramics exhibit.",
    "Trail conditions improve after the first week of May.",
]

BENIGN_SCRIPTS = [
    "var page = 'home';",
    "function toggleMenu() { menuOpen = !menuOpen; }",
    "console.log('ready');",
    "document.title = document.title.trim();",
]

SCARE_NAME_PARTS = [
    "techsupport", "alert", "pc", "security", "windows", "warning",
    "virus", "helpdesk", "repair", "fix",
]
BENIGN_NAME_PARTS = [
    "daily-news", "recipe-box", "travel-journal", "garden-shop", "book-club",
    "movie-night", "bike-route", "craft-fair", "tide-tables", "quiz-corner",
]
SCAM_TLDS = ["xyz", "space", "club", "online", "website", "info", "site", "net", "com"]
BENIGN_TLDS = ["com", "org", "net", "info"]
SEED_DOMAINS = ["twwitter.com", "gooogle.com", "facebok.com", "youtub.com", "amazoon.com", "wikipedi.org"]

TOLL_FREE = ["844", "855", "877", "888", "866", "800"]


def _keywords_in(text: str) -> set[str]:
    """Independent word-boundary keyword scan used for self-validation."""
    low = re.sub(r"\s+", " ", text).lower()
    hits = set()
    for kw in KEYWORD_WEIGHTS:
        if re.search(r"\b" + re.escape(kw) + r"\b", low):
            hits.add(kw)
    return hits


def _validate_ingredients() -> None:
    for kw, sentence in KEYWORD_SENTENCES.items():
        found = _keywords_in(sentence)
        if found != {kw}:
            raise AssertionError(f"sentence for {kw!r} matches {found}")
        if re.search(r"\b(call|dial)\b", sentence.lower()) or re.search(r"\d", sentence):
            raise AssertionError(f"sentence for {kw!r} contains a call word or digit")
    for pool in (BENIGN_DIALOGS, FILLER_SENTENCES, BENIGN_SCRIPTS):
        for sentence in pool:
            if _keywords_in(sentence):
                raise AssertionError(f"benign text contains keywords: {sentence!r}")
            if re.search(r"\b(call|dial)\b", sentence.lower()) or re.search(r"\d{4}", sentence):
                raise AssertionError(f"benign text unsafe: {sentence!r}")
    for sentence, expected in MILD_DIALOGS:
        if _keywords_in(sentence) != expected:
            raise AssertionError(f"mild dialog mismatch: {sentence!r}")


@dataclass
class PageLabel:
    """Ground truth for one generated page."""

    record_id: str
    is_scam: bool
    fqdn: str
    phones: list[str]  # digits the page advertises, in placement order
    score: int
    campaign_key: str | None = None
    group: int | None = None  # scam campaign group, for graph fixtures

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "is_scam": self.is_scam,
            "fqdn": self.fqdn,
            "phones": list(self.phones),
            "score": self.score,
            "campaign_key": self.campaign_key,
            "group": self.group,
        }


def _pretty_phone(rng: random.Random, digits: str) -> str:
    a, b, c = digits[:3], digits[3:6], digits[6:]
    return rng.choice([f"({a}) {b}-{c}", f"1-{a}-{b}-{c}", f"+1 {a}.{b}.{c}", f"{a}{b}{c}"])


def _random_label(rng: random.Random, length: int) -> str:
    return "".join(rng.choice("bcdfghjklmnpqrstvwxz23456789") for _ in range(length))


def _dynamic_script(rng: random.Random, key: str, default_digits: str | None) -> str:
    marker = rng.choice(["new Callpixels.Campaign", "retreaver.configure", "campaign.request_number"])
    lines = ["var fetched = false;", "function grabNumber() {"]
    if default_digits:
        lines.append(f'  var fallback = "{_pretty_phone(rng, default_digits)}";')
    lines.append(f"  var c = {marker}({{campaign_key: '{key}'}});")
    lines.append("  fetched = true;")
    lines.append("}")
    lines.append("window.onfocus = grabNumber();")
    return "\n".join(lines)


@dataclass
class _ScamGroup:
    index: int
    domains: list[str]
    phones: list[str]
    day_lo: int
    day_hi: int


def _build_groups(rng: random.Random, span_days: int) -> list[_ScamGroup]:
    """Campaign groups: domains that share phone pools, with a date window."""
    shapes = [(12, 6), (8, 4), (6, 5), (5, 2), (4, 3), (3, 2), (2, 2), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1)]
    groups = []
    phone_serial = 100
    for gi, (n_domains, n_phones) in enumerate(shapes):
        domains = []
        for di in range(n_domains):
            style = rng.random()
            if gi == 2:  # CDN-hosted group
                domains.append(f"{_random_label(rng, 10)}.r.cdn77.net" if di % 2 else f"{_random_label(rng, 8)}.cdnsun.net")
            elif style < 0.5:
                name = "-".join(rng.sample(SCARE_NAME_PARTS, 2))
                domains.append(f"{name}-{gi}{di}.{rng.choice(SCAM_TLDS)}")
            elif style < 0.8:
                domains.append(f"{_random_label(rng, rng.randrange(8, 14))}.{rng.choice(SCAM_TLDS)}")
            else:
                name = "-".join(rng.sample(SCARE_NAME_PARTS, 3))
                domains.append(f"your-{name}-notice-{gi}{di}.{rng.choice(SCAM_TLDS)}")
        phones = []
        for _ in range(n_phones):
            phones.append(f"{rng.choice(TOLL_FREE)}555{phone_serial:04d}")
            phone_serial += 1
        lo = rng.randrange(0, max(1, span_days - 3))
        hi = min(span_days - 1, lo + rng.choice([2, 4, span_days]))
        groups.append(_ScamGroup(index=gi, domains=domains, phones=phones, day_lo=lo, day_hi=hi))
    return groups


def _wrap_html(title: str, paragraphs: list[str]) -> str:
    body = "".join(f"<p>{p}</p>" for p in paragraphs)
    return f"<html><head><title>{title}</title></head><body><h1>{title}</h1>{body}</body></html>"


def generate_corpus(
    n_scam: int = 100,
    n_benign: int = 100,
    seed: int = 20150901,
    start: date = date(2015, 9, 1),
    span_days: int = 14,
) -> tuple[list[CrawlRecord], dict[str, PageLabel]]:
    """Build a labeled corpus of scam and benign pages.

    Scam pages vary dialog counts, keyword mixes, phone placement, padding,
    and dynamic number delivery; benign pages include dialog-bearing and
    popup-bearing ones, pages with phone numbers, and keyword-heavy pages
    that lack any callable number. Labels are exact by construction.
    """
    _validate_ingredients()
    rng = random.Random(seed)
    groups = _build_groups(rng, span_days)
    vantages = ["campus", "cloud-a", "cloud-b"]

    drafts: list[tuple[bool, dict]] = []

    # --- scam pages ----------------------------------------------------
    group_cycle = [g for g in groups for _ in g.domains]
    for i in range(n_scam):
        g = group_cycle[i % len(group_cycle)]
        host = rng.choice(g.domains)
        if rng.random() < 0.2 and not host.endswith((".cdn77.net", ".cdnsun.net")):
            host = rng.choice(["www", "win", "go"]) + "." + host

        mode = rng.random()
        call_near = mode < 0.60
        body_phone_only = 0.60 <= mode < 0.80
        dynamic_only = 0.80 <= mode < 0.92
        dynamic_plus = mode >= 0.92

        keywords = set(rng.sample(["virus", "infected", "spyware", "trojan", "malware"], rng.randrange(1, 4)))
        keywords |= set(rng.sample(["windows", "microsoft", "security", "alert", "warning", "blocked", "error", "hacked"], rng.randrange(0, 5)))
        keywords |= set(rng.sample(["support", "technician", "toll-free", "immediately", "do not ignore", "firewall", "helpline"], rng.randrange(0, 4)))
        score = sum(KEYWORD_WEIGHTS[k] for k in keywords) + (CALL_NEAR_WEIGHT if call_near else 0)
        topup = iter(["windows", "security", "alert", "warning", "blocked", "microsoft", "error", "hacked"])
        while score < THRESHOLD:
            k = next(topup)
            if k not in keywords:
                keywords.add(k)
                score += KEYWORD_WEIGHTS[k]

        phones: list[str] = []
        scripts = [rng.choice(BENIGN_SCRIPTS)]
        campaign_key = None
        if dynamic_only or dynamic_plus:
            campaign_key = "".join(rng.choice("0123456789abcdef") for _ in range(32))
            default_digits = rng.choice(g.phones) if (dynamic_plus or rng.random() < 0.5) else None
            scripts.append(_dynamic_script(rng, campaign_key, default_digits))
            if default_digits:
                phones.append(default_digits)
        static_phone = None
        if call_near or body_phone_only or dynamic_plus:
            static_phone = rng.choice(g.phones)
            if static_phone not in phones:
                phones.append(static_phone)

        popup_only = rng.random() < 0.10
        n_dialogs = 0 if popup_only else rng.randrange(1, 6)
        sentences = [KEYWORD_SENTENCES[k] for k in sorted(keywords)]
        rng.shuffle(sentences)
        body_share = sentences[: rng.randrange(0, 2)] if n_dialogs else sentences
        dialog_share = sentences[len(body_share):]

        dialogs: list[DialogEvent] = []
        if n_dialogs:
            chunks: list[list[str]] = [[] for _ in range(n_dialogs)]
            for j, s in enumerate(dialog_share):
                chunks[j % n_dialogs].append(s)
            if call_near and static_phone:
                chunks[0].append(f"Call {_pretty_phone(rng, static_phone)} now.")
            for j, chunk in enumerate(chunks):
                message = " ".join(chunk) if chunk else rng.choice(dialog_share or sentences)
                if rng.random() < 0.30:
                    message = message + "\n" * 600  # pad past the browser's stop-dialogs checkbox
                dialogs.append(DialogEvent(kind="alert", message=message, ordinal=j + 1))

        paragraphs = rng.sample(FILLER_SENTENCES, 2) + body_share
        if (body_phone_only or dynamic_plus) and static_phone:
            paragraphs.append(f"Reach the billing desk at {_pretty_phone(rng, static_phone)}.")
        elif call_near and static_phone and popup_only:
            paragraphs.append(f"Call {_pretty_phone(rng, static_phone)} now.")

        drafts.append(
            (
                True,
                {
                    "host": host,
                    "dialogs": dialogs,
                    "html": _wrap_html("Notice", paragraphs),
                    "scripts": scripts,
                    "popups": rng.randrange(1, 4) if popup_only else rng.randrange(0, 3),
                    "audio": rng.random() < 0.6,
                    "unload": rng.random() < 0.5,
                    "day": rng.randrange(g.day_lo, g.day_hi + 1),
                    "phones": phones,
                    "score": score,
                    "campaign_key": campaign_key,
                    "group": g.index,
                },
            )
        )

    # --- benign pages --------------------------------------------------
    benign_hosts = []
    for i in range(60):
        benign_hosts.append(f"{rng.choice(BENIGN_NAME_PARTS)}-{i}.{rng.choice(BENIGN_TLDS)}")
    for i in range(n_benign):
        host = rng.choice(benign_hosts)
        if rng.random() < 0.3:
            host = "www." + host
        kind = rng.random()
        dialogs = []
        popups = 0
        phones: list[str] = []
        score = 0
        paragraphs = rng.sample(FILLER_SENTENCES, 3)

        if kind < 0.40:
            # gate case: no dialogs, no popups; some carry full scam text
            if rng.random() < 0.4:
                scare = rng.sample(list(KEYWORD_SENTENCES.values()), 4)
                digits = f"{rng.choice(TOLL_FREE)}555{rng.randrange(10000):04d}"
                paragraphs += scare + [f"Call {_pretty_phone(rng, digits)} now."]
                phones.append(digits)
        elif kind < 0.75:
            # dialog-bearing benign
            n = rng.randrange(1, 4)
            mild = rng.random() < 0.4
            used: set[str] = set()
            for j in range(n):
                if mild and j == 0:
                    sentence, kws = rng.choice(MILD_DIALOGS)
                    used |= kws
                else:
                    sentence = rng.choice(BENIGN_DIALOGS)
                dialogs.append(DialogEvent(kind="alert" if j % 2 == 0 else "confirm", message=sentence, ordinal=j + 1))
            score = sum(KEYWORD_WEIGHTS[k] for k in used)
            if rng.random() < 0.3:
                digits = f"212555{rng.randrange(10000):04d}"
                paragraphs.append(f"Reach the front desk at {_pretty_phone(rng, digits)}.")
                phones.append(digits)
        elif kind < 0.90:
            # popup-bearing benign
            popups = rng.randrange(1, 3)
            if rng.random() < 0.5:
                sentence, kws = rng.choice(MILD_DIALOGS)
                paragraphs.append(sentence)
                score = sum(KEYWORD_WEIGHTS[k] for k in kws)
        else:
            # keyword-stuffed but unreachable: no phone, no dynamic delivery
            heavy = rng.sample(["virus", "infected", "malware", "windows", "security", "alert", "warning"], 5)
            for j, k in enumerate(heavy[:3]):
                dialogs.append(DialogEvent(kind="alert", message=KEYWORD_SENTENCES[k], ordinal=j + 1))
            paragraphs += [KEYWORD_SENTENCES[k] for k in heavy[3:]]
            score = sum(KEYWORD_WEIGHTS[k] for k in set(heavy))

        drafts.append(
            (
                False,
                {
                    "host": host,
                    "dialogs": dialogs,
                    "html": _wrap_html("Home", paragraphs),
                    "scripts": [rng.choice(BENIGN_SCRIPTS)],
                    "popups": popups,
                    "audio": False,
                    "unload": False,
                    "day": rng.randrange(span_days),
                    "phones": phones,
                    "score": score,
                    "campaign_key": None,
                    "group": None,
                },
            )
        )

    rng.shuffle(drafts)
    records: list[CrawlRecord] = []
    labels: dict[str, PageLabel] = {}
    for i, (is_scam, d) in enumerate(drafts):
        gate_open = bool(d["dialogs"]) or d["popups"] > 0
        callable_page = bool(d["phones"]) or d["campaign_key"] is not None
        expected = gate_open and d["score"] >= THRESHOLD and callable_page
        if expected != is_scam:
            raise AssertionError(f"recipe bug: draft {i} intends {is_scam} but computes {expected}")

        record_id = f"r{i:04d}"
        seed_url = f"http://{rng.choice(SEED_DOMAINS)}/"
        path = rng.choice(["", "index.html", "landing/", "offer/page.html"])
        query = rng.choice(["", "", "?sid=7", "?cid=3&aff=12"])
        final_url = f"http://{d['host']}/{path}{query}"
        chain = [seed_url, final_url] if rng.random() < 0.7 else [seed_url, f"http://go-track-{rng.randrange(9)}.net/r", final_url]
        observed = datetime.combine(
            date.fromordinal(start.toordinal() + d["day"]), time(8 + i % 10, (i * 7) % 60), tzinfo=timezone.utc
        )
        records.append(
            CrawlRecord(
                record_id=record_id,
                seed_url=seed_url,
                final_url=final_url,
                vantage=vantages[i % 3],
                observed_at=observed,
                http_status=200,
                redirect_chain=chain,
                html=d["html"],
                scripts=d["scripts"],
                dialogs=d["dialogs"],
                onunload_hooked=d["unload"],
                audio_autoplay=d["audio"],
                popup_window_count=d["popups"],
            )
        )
        labels[record_id] = PageLabel(
            record_id=record_id,
            is_scam=is_scam,
            fqdn=d["host"],
            phones=list(dict.fromkeys(d["phones"])),
            score=d["score"] if gate_open else 0,
            campaign_key=d["campaign_key"],
            group=d["group"],
        )
    return records, labels


def write_corpus(records: list[CrawlRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_line(record) + "\n")


def make_probe_record(url: str, day: date, phone_digits: str = "8775550142") -> CrawlRecord:
    """A minimal scam page served at ``url``, for liveness replay fixtures."""
    from urllib.parse import urlsplit

    pretty = f"({phone_digits[:3]}) {phone_digits[3:6]}-{phone_digits[6:]}"
    message = f"Virus alert: this computer is infected. Call {pretty} immediately."
    return CrawlRecord(
        record_id=f"probe-{urlsplit(url).hostname}-{day.isoformat()}",
        seed_url=url,
        final_url=url,
        vantage="liveness",
        observed_at=datetime.combine(day, time(6, 0), tzinfo=timezone.utc),
        http_status=200,
        redirect_chain=[url],
        html="<html><body><p>One moment.</p></body></html>",
        scripts=[],
        dialogs=[DialogEvent(kind="alert", message=message, ordinal=1)],
        onunload_hooked=True,
        audio_autoplay=True,
        popup_window_count=1,
    )
