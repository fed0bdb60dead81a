"""Campaign extraction: timestamped bipartite domain-phone graphs, connected
components, eTLD+1 contraction, and campaign statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date

from .corpus import PublicSuffixError, etld1, public_suffix
from .detector import Verdict, is_cdn_host

__all__ = [
    "Campaign",
    "contract_domain",
    "CampaignGraph",
    "build_graph",
    "campaign_stats",
    "connected_components",
    "merge_by_etld1",
    "size_lifetime_correlation",
]


@dataclass
class CampaignGraph:
    """Undirected bipartite graph: a domain is linked to every phone number
    it advertised, with first-observation timestamps on nodes and edges."""

    domain_nodes: dict[str, date] = field(default_factory=dict)
    phone_nodes: dict[str, date] = field(default_factory=dict)
    edges: dict[tuple[str, str], date] = field(default_factory=dict)

    def add(self, domain: str, phone: str, seen: date) -> None:
        for nodes, key in ((self.domain_nodes, domain), (self.phone_nodes, phone)):
            if key not in nodes or seen < nodes[key]:
                nodes[key] = seen
        edge = (domain, phone)
        if edge not in self.edges or seen < self.edges[edge]:
            self.edges[edge] = seen

    def merge(self, other: "CampaignGraph") -> None:
        """Min-timestamp union; associative and commutative, so parallel
        partial builds merge deterministically."""
        for d, seen in other.domain_nodes.items():
            if d not in self.domain_nodes or seen < self.domain_nodes[d]:
                self.domain_nodes[d] = seen
        for p, seen in other.phone_nodes.items():
            if p not in self.phone_nodes or seen < self.phone_nodes[p]:
                self.phone_nodes[p] = seen
        for e, seen in other.edges.items():
            if e not in self.edges or seen < self.edges[e]:
                self.edges[e] = seen


def contract_domain(fqdn: str) -> str:
    # CDN hosts keep their full name: contracting to the CDN's registrable
    # domain would fuse unrelated campaigns sharing free CDN hosting.
    if is_cdn_host(fqdn):
        return fqdn
    try:
        return etld1(fqdn)
    except (PublicSuffixError, ValueError):
        return fqdn


def build_graph(verdicts: list[Verdict], level: str = "fqdn") -> CampaignGraph:
    """Graph over scam verdicts only; ``level`` selects fqdn or etld1 nodes."""
    if level not in ("fqdn", "etld1"):
        raise ValueError(f"unknown level: {level!r}")
    graph = CampaignGraph()
    for v in verdicts:
        if not v.is_scam:
            continue
        domain = v.fqdn or v.domain
        if level == "etld1":
            domain = contract_domain(domain)
        if not domain:
            continue
        digits = [p.digits for p in v.phones]
        if v.dynamic_delivery is not None:
            digits.extend(p.digits for p in v.dynamic_delivery.default_numbers)
        for d in digits:
            graph.add(domain, d, v.observed_at)
    return graph


def merge_by_etld1(graph: CampaignGraph) -> CampaignGraph:
    """Contract an fqdn-level graph to registrable domains.

    Merged nodes and collapsed parallel edges keep their earliest timestamp;
    CDN hosts are left uncontracted (see contract_domain).
    """
    merged = CampaignGraph()
    mapping = {d: contract_domain(d) for d in graph.domain_nodes}
    for d, seen in graph.domain_nodes.items():
        key = mapping[d]
        if key not in merged.domain_nodes or seen < merged.domain_nodes[key]:
            merged.domain_nodes[key] = seen
    for p, seen in graph.phone_nodes.items():
        merged.phone_nodes[p] = seen
    for (d, p), seen in graph.edges.items():
        edge = (mapping[d], p)
        if edge not in merged.edges or seen < merged.edges[edge]:
            merged.edges[edge] = seen
    return merged


@dataclass
class Campaign:
    """One connected component of the graph, read as a single operation."""

    domains: frozenset[str]
    phones: frozenset[str]
    size: int
    domain_degrees: dict[str, int] = field(default_factory=dict)
    phone_degrees: dict[str, int] = field(default_factory=dict)
    lifetime_days: int = 0
    tlds: frozenset[str] = frozenset()
    toll_free_prefixes: frozenset[str] = frozenset()


def connected_components(graph: CampaignGraph) -> list[Campaign]:
    """Components as campaigns, largest first, ties by smallest member name."""
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    # phones and domains live in one namespace; prefix phone keys to keep a
    # 10-digit phone distinct from any hostname
    domain_keys = {d: "d:" + d for d in graph.domain_nodes}
    phone_keys = {p: "p:" + p for p in graph.phone_nodes}
    for key in list(domain_keys.values()) + list(phone_keys.values()):
        parent[key] = key
    for d, p in graph.edges:
        union(domain_keys[d], phone_keys[p])

    groups: dict[str, tuple[set[str], set[str]]] = {}
    for d, key in domain_keys.items():
        groups.setdefault(find(key), (set(), set()))[0].add(d)
    for p, key in phone_keys.items():
        groups.setdefault(find(key), (set(), set()))[1].add(p)

    campaigns = [
        Campaign(domains=frozenset(ds), phones=frozenset(ps), size=len(ds) + len(ps))
        for ds, ps in groups.values()
    ]
    campaigns.sort(key=lambda c: (-c.size, min(c.domains | c.phones)))
    return campaigns


def campaign_stats(campaign: Campaign, graph: CampaignGraph, toll_free_prefixes: frozenset[str] | None = None) -> Campaign:
    """Fill degree, lifetime, TLD, and prefix statistics for one campaign."""
    from .detector import TOLL_FREE_PREFIXES

    prefixes = toll_free_prefixes if toll_free_prefixes is not None else TOLL_FREE_PREFIXES
    domain_degrees = {d: 0 for d in campaign.domains}
    phone_degrees = {p: 0 for p in campaign.phones}
    for d, p in graph.edges:
        if d in domain_degrees:
            domain_degrees[d] += 1
        if p in phone_degrees:
            phone_degrees[p] += 1

    stamps = [graph.domain_nodes[d] for d in campaign.domains]
    stamps += [graph.phone_nodes[p] for p in campaign.phones]
    # lifetime is the plain difference between the first and last join date
    lifetime = (max(stamps) - min(stamps)).days if stamps else 0

    tlds = set()
    for d in campaign.domains:
        try:
            tlds.add(public_suffix(d))
        except ValueError:
            continue
    return Campaign(
        domains=campaign.domains,
        phones=campaign.phones,
        size=campaign.size,
        domain_degrees=domain_degrees,
        phone_degrees=phone_degrees,
        lifetime_days=lifetime,
        tlds=frozenset(tlds),
        toll_free_prefixes=frozenset(p[:3] for p in campaign.phones if p[:3] in prefixes),
    )


def size_lifetime_correlation(campaigns: list[Campaign]) -> float:
    """Pearson r between campaign size and lifetime."""
    if len(campaigns) < 2:
        raise ValueError("need at least two campaigns")
    xs = [float(c.size) for c in campaigns]
    ys = [float(c.lifetime_days) for c in campaigns]
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("undefined correlation: zero variance")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))
