import random
from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bfs_components_ref, pearson_ref, random_bipartite
from scamscan.campaigns import (
    Campaign,
    CampaignGraph,
    build_graph,
    campaign_stats,
    connected_components,
    contract_domain,
    merge_by_etld1,
    size_lifetime_correlation,
)
from scamscan.detector import PhoneNumber, Verdict

D = lambda offset: date(2015, 9, 1) + timedelta(days=offset)


def verdict(fqdn, digits, day, is_scam=True):
    return Verdict(
        record_id=f"r-{fqdn}-{digits}-{day}",
        is_scam=is_scam,
        score=10 if is_scam else 0,
        matched_keywords=[],
        phones=[PhoneNumber(digits=d, toll_free=d[:3] in {"844", "855", "877", "888"}, source="dialog") for d in digits],
        dynamic_delivery=None,
        fqdn=fqdn,
        domain=fqdn,
        observed_at=D(day),
    )


def graph_of(*triples) -> CampaignGraph:
    g = CampaignGraph()
    for domain, phone, day in triples:
        g.add(domain, phone, D(day))
    return g


class TestBuildGraph:
    def test_empty(self):
        g = build_graph([])
        assert not g.domain_nodes and not g.phone_nodes and not g.edges

    def test_min_timestamp_rule(self):
        g = build_graph([verdict("d1.com", ["8445550100"], 2), verdict("d1.com", ["8445550100"], 1)])
        assert g.edges[("d1.com", "8445550100")] == D(1)
        assert g.domain_nodes["d1.com"] == D(1)

    def test_etld1_contraction(self):
        g = build_graph(
            [verdict("a.x.com", ["8445550100"], 0), verdict("b.x.com", ["8445550101"], 0)],
            level="etld1",
        )
        assert set(g.domain_nodes) == {"x.com"}
        assert len(g.edges) == 2

    def test_non_scam_ignored(self):
        g = build_graph([verdict("d1.com", ["8445550100"], 0, is_scam=False)])
        assert not g.edges

    def test_dynamic_defaults_join_graph(self):
        v = verdict("d1.com", [], 0)
        from scamscan.detector import DynamicNumberFinding

        v.dynamic_delivery = DynamicNumberFinding(
            framework_marker="retreaver",
            campaign_key="abc123def456",
            default_numbers=(PhoneNumber("8775550100", True, "script-default"),),
        )
        g = build_graph([v])
        assert ("d1.com", "8775550100") in g.edges


class TestComponents:
    def test_empty(self):
        assert connected_components(CampaignGraph()) == []

    def test_two_disjoint_edges(self):
        g = graph_of(("d1.com", "8445550100", 0), ("d2.com", "8445550101", 0))
        comps = connected_components(g)
        assert len(comps) == 2
        assert all(c.size == 2 for c in comps)

    def test_sorted_by_size_then_representative(self):
        g = graph_of(
            ("d1.com", "8445550100", 0),
            ("d2.com", "8445550100", 0),
            ("z9.com", "8445550199", 0),
        )
        comps = connected_components(g)
        assert [c.size for c in comps] == [3, 2]

    @settings(max_examples=60)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_bfs_oracle(self, seed):
        rng = random.Random(seed)
        domains, phones, edges = random_bipartite(rng)
        g = CampaignGraph()
        for d in domains:
            g.domain_nodes.setdefault(d, D(0))
        for p in phones:
            g.phone_nodes.setdefault(p, D(0))
        for d, p in edges:
            g.add(d, p, D(0))
        ours = {
            frozenset({"d:" + d for d in c.domains} | {"p:" + p for p in c.phones})
            for c in connected_components(g)
        }
        assert ours == set(bfs_components_ref(domains, phones, edges))

    @settings(max_examples=40)
    @given(st.integers(0, 2**32 - 1))
    def test_partition_property(self, seed):
        rng = random.Random(seed)
        domains, phones, edges = random_bipartite(rng)
        g = CampaignGraph()
        for d in domains:
            g.domain_nodes.setdefault(d, D(0))
        for p in phones:
            g.phone_nodes.setdefault(p, D(0))
        for d, p in edges:
            g.add(d, p, D(0))
        comps = connected_components(g)
        assert sum(c.size for c in comps) == len(domains) + len(phones)
        seen = set()
        for c in comps:
            for node in c.domains | c.phones:
                assert node not in seen
                seen.add(node)


class TestMerge:
    def test_subdomains_contract(self):
        g = graph_of(("a.x.com", "8445550100", 1), ("b.x.com", "8445550100", 0))
        merged = merge_by_etld1(g)
        assert set(merged.domain_nodes) == {"x.com"}
        assert merged.domain_nodes["x.com"] == D(0)
        assert merged.edges[("x.com", "8445550100")] == D(0)

    def test_registrable_graph_is_fixpoint(self):
        g = graph_of(("x.com", "8445550100", 0), ("y.net", "8445550101", 3))
        merged = merge_by_etld1(g)
        assert merged.domain_nodes == g.domain_nodes
        assert merged.edges == g.edges

    def test_cdn_hosts_stay_uncontracted(self):
        g = graph_of(("abc123.r.cdn77.net", "8445550100", 0), ("zzz999.r.cdn77.net", "8445550101", 0))
        merged = merge_by_etld1(g)
        assert set(merged.domain_nodes) == {"abc123.r.cdn77.net", "zzz999.r.cdn77.net"}
        assert contract_domain("abc123.r.cdn77.net") == "abc123.r.cdn77.net"

    def test_edge_contraction_safety(self):
        g = graph_of(("a.x.com", "8445550100", 0), ("b.y.co.uk", "8445550101", 2))
        merged = merge_by_etld1(g)
        for (d, p) in g.edges:
            assert (contract_domain(d), p) in merged.edges

    @settings(max_examples=40)
    @given(st.integers(0, 2**32 - 1))
    def test_component_count_never_increases(self, seed):
        rng = random.Random(seed)
        g = CampaignGraph()
        for _ in range(rng.randrange(1, 40)):
            sub = rng.choice(["", "www.", "a.", "b."])
            host = f"{sub}site{rng.randrange(12)}.com"
            g.add(host, f"84455501{rng.randrange(10):02d}", D(rng.randrange(10)))
        before = len(connected_components(g))
        after = len(connected_components(merge_by_etld1(g)))
        assert after <= before


class TestCampaignStats:
    def test_isolated_domain(self):
        g = CampaignGraph()
        g.domain_nodes["solo.com"] = D(4)
        (c,) = connected_components(g)
        stats = campaign_stats(c, g)
        assert stats.size == 1 and stats.lifetime_days == 0
        assert stats.tlds == frozenset({"com"})

    def test_default_number_hub_degree(self):
        g = CampaignGraph()
        domains = [f"d{i}.hub.xyz" for i in range(6)]
        for d in domains:
            g.add(d, "8885550123", D(0))
        (c,) = connected_components(g)
        stats = campaign_stats(c, g)
        assert stats.phone_degrees["8885550123"] == len(domains)
        assert max(stats.domain_degrees.values()) == 1

    def test_lifetime_difference_of_first_and_last_join(self):
        g = graph_of(("a.com", "8445550100", 10))
        g.add("a.com", "8445550101", D(55))
        (c,) = connected_components(g)
        assert campaign_stats(c, g).lifetime_days == 45

    def test_toll_free_prefixes_projected(self):
        g = graph_of(("a.com", "8445550100", 0), ("a.com", "2125550100", 0))
        (c,) = connected_components(g)
        stats = campaign_stats(c, g)
        assert stats.toll_free_prefixes == frozenset({"844"})


class TestCorrelation:
    def test_perfectly_linear(self):
        camps = [Campaign(frozenset(), frozenset(), size=s, lifetime_days=2 * s + 1) for s in range(2, 12)]
        assert size_lifetime_correlation(camps) == pytest.approx(1.0)

    def test_anti_linear(self):
        camps = [Campaign(frozenset(), frozenset(), size=s, lifetime_days=100 - 3 * s) for s in range(2, 12)]
        assert size_lifetime_correlation(camps) == pytest.approx(-1.0)

    def test_fixture_matches_closed_form(self):
        sizes = [3, 5, 7, 9, 12, 15, 18, 22, 27, 33]
        lifetimes = [2, 4, 9, 11, 14, 19, 25, 31, 38, 45]
        camps = [
            Campaign(frozenset(), frozenset(), size=s, lifetime_days=lt)
            for s, lt in zip(sizes, lifetimes)
        ]
        expected = pearson_ref([float(s) for s in sizes], [float(t) for t in lifetimes])
        assert size_lifetime_correlation(camps) == pytest.approx(expected, abs=1e-12)
        assert size_lifetime_correlation(camps) == pytest.approx(0.99794379485185606, abs=1e-12)

    def test_zero_variance_rejected(self):
        camps = [Campaign(frozenset(), frozenset(), size=4, lifetime_days=i) for i in range(5)]
        with pytest.raises(ValueError):
            size_lifetime_correlation(camps)

    @given(st.integers(1, 50), st.integers(0, 40))
    def test_invariant_under_affine_transform(self, scale, shift):
        sizes = [3, 5, 7, 9, 12]
        lifetimes = [2, 9, 4, 14, 11]
        base = [Campaign(frozenset(), frozenset(), size=s, lifetime_days=t) for s, t in zip(sizes, lifetimes)]
        scaled = [
            Campaign(frozenset(), frozenset(), size=s, lifetime_days=scale * t + shift)
            for s, t in zip(sizes, lifetimes)
        ]
        assert size_lifetime_correlation(base) == pytest.approx(size_lifetime_correlation(scaled), abs=1e-9)


def test_rebuild_is_idempotent():
    verdicts = [
        verdict("a.x.com", ["8445550100", "8885550101"], 3),
        verdict("b.x.com", ["8445550100"], 1),
        verdict("c.net", ["2125550199"], 7),
    ]
    g1 = build_graph(verdicts)
    g2 = build_graph(verdicts)
    assert g1.domain_nodes == g2.domain_nodes
    assert g1.phone_nodes == g2.phone_nodes
    assert g1.edges == g2.edges


def test_parallel_shard_merge_matches_single_build():
    verdicts = [
        verdict("a.x.com", ["8445550100"], 5),
        verdict("b.x.com", ["8445550100"], 1),
        verdict("c.net", ["8885550101"], 2),
        verdict("a.x.com", ["8885550101"], 0),
    ]
    whole = build_graph(verdicts)
    left = build_graph(verdicts[:2])
    right = build_graph(verdicts[2:])
    left.merge(right)
    assert left.domain_nodes == whole.domain_nodes
    assert left.phone_nodes == whole.phone_nodes
    assert left.edges == whole.edges
