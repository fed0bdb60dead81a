"""Independent reference implementations the test suite checks against.

These stay deliberately naive: full-matrix dynamic programming, breadth-first
search, brute-force window scans, and arbitrary-precision special functions.
None of them share code with the implementations under test.
"""

from __future__ import annotations

from datetime import date, timedelta

import mpmath as mp


def levenshtein_ref(a: str, b: str) -> int:
    """Textbook full-matrix edit distance."""
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
    return d[m][n]


def lifetime_bruteforce(observations: dict[date, bool]) -> int:
    """Max over all windows bounded by alive days, inclusive day count."""
    alive = sorted(d for d, ok in observations.items() if ok)
    best = 0
    for i in range(len(alive)):
        for j in range(i, len(alive)):
            best = max(best, (alive[j] - alive[i]).days + 1)
    return best


def bfs_components_ref(domains: set[str], phones: set[str], edges: set[tuple[str, str]]) -> list[frozenset[str]]:
    """Connected components by plain breadth-first search.

    Nodes are namespaced ("d:x", "p:y") the same way the implementation
    reports them, so partitions compare directly.
    """
    adjacency: dict[str, set[str]] = {}
    for d in domains:
        adjacency.setdefault("d:" + d, set())
    for p in phones:
        adjacency.setdefault("p:" + p, set())
    for d, p in edges:
        adjacency["d:" + d].add("p:" + p)
        adjacency["p:" + p].add("d:" + d)
    seen: set[str] = set()
    components: list[frozenset[str]] = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        queue = [start]
        group = set()
        while queue:
            node = queue.pop()
            if node in seen:
                continue
            seen.add(node)
            group.add(node)
            queue.extend(adjacency[node] - seen)
        components.append(frozenset(group))
    return components


def welch_p_ref(sample_a: list[float], sample_b: list[float], dps: int = 50) -> tuple[float, float, float]:
    """(t, df, two-sided p) at high precision via the incomplete beta."""
    with mp.workdps(dps):
        na, nb = len(sample_a), len(sample_b)
        ma = mp.fsum(sample_a) / na
        mb = mp.fsum(sample_b) / nb
        va = mp.fsum([(mp.mpf(x) - ma) ** 2 for x in sample_a]) / (na - 1)
        vb = mp.fsum([(mp.mpf(x) - mb) ** 2 for x in sample_b]) / (nb - 1)
        t = (ma - mb) / mp.sqrt(va / na + vb / nb)
        df = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
        x = df / (df + t**2)
        p = mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True)
        return float(t), float(df), float(p)


def pearson_ref(xs: list[float], ys: list[float], dps: int = 50) -> float:
    with mp.workdps(dps):
        n = len(xs)
        mx = mp.fsum(xs) / n
        my = mp.fsum(ys) / n
        sxx = mp.fsum([(mp.mpf(x) - mx) ** 2 for x in xs])
        syy = mp.fsum([(mp.mpf(y) - my) ** 2 for y in ys])
        sxy = mp.fsum([(mp.mpf(x) - mx) * (mp.mpf(y) - my) for x, y in zip(xs, ys)])
        return float(sxy / mp.sqrt(sxx * syy))


def random_timeline(rng, max_days: int = 60):
    """(first_seen, observations) with arbitrary gaps and values."""
    first = date(2015, 9, 1) + timedelta(days=rng.randrange(30))
    observations = {
        first + timedelta(days=offset): rng.random() < 0.5
        for offset in range(max_days)
        if rng.random() < 0.4
    }
    return first, observations


def random_bipartite(rng, max_nodes: int = 200):
    """(domains, phones, edges) for component-partition comparisons."""
    n_domains = rng.randrange(1, max_nodes // 2)
    n_phones = rng.randrange(1, max_nodes // 2)
    domains = {f"d{i}.example.com" for i in range(n_domains)}
    phones = {f"{8000000000 + i}" for i in range(n_phones)}
    edges = set()
    for _ in range(rng.randrange(0, 2 * (n_domains + n_phones))):
        edges.add((f"d{rng.randrange(n_domains)}.example.com", f"{8000000000 + rng.randrange(n_phones)}"))
    return domains, phones, edges
