"""Random-graph null models, classical network measures and the statistics
used to compare them against observed topology.

All randomness goes through :func:`make_rng`, a numpy ``Generator`` on the
Philox-4x64 counter-based bit generator, so a ``(spec, seed)`` pair always
reproduces the same graph.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse, stats
from scipy.sparse.csgraph import shortest_path

from .errors import DegenerateInput, InfeasibleEdgeCount, LengthMismatch, TooFewSamples
from .graph import BettiProfile, WeightedGraph

MODELS = ("ER", "BA", "WS")
DEFAULT_SEEDS = 10


def make_rng(seed: int | Sequence[int]) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def default_rewire_probs(count: int = 10) -> list[float]:
    return [float(p) for p in np.linspace(0.01, 0.99, count)]


@dataclass(frozen=True)
class RandomModelSpec:
    model: str
    node_count: int
    target_edge_count: int
    seeds: tuple[int, ...] = tuple(range(DEFAULT_SEEDS))
    ws_rewire_probs: tuple[float, ...] = field(default_factory=lambda: tuple(default_rewire_probs()))

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")

    def params(self) -> list[float | None]:
        return list(self.ws_rewire_probs) if self.model == "WS" else [None]

    def generate(self, seed: int, param: float | None = None) -> WeightedGraph:
        if self.model == "ER":
            return generate_er(self.node_count, self.target_edge_count, seed)
        if self.model == "BA":
            return generate_ba(self.node_count, self.target_edge_count, seed)
        return generate_ws(self.node_count, self.target_edge_count, param, seed)


def _unit_graph(n: int, pairs) -> WeightedGraph:
    return WeightedGraph(n, tuple((int(u), int(v), 1) for u, v in sorted(pairs)))


def generate_er(n: int, m: int, seed) -> WeightedGraph:
    """Uniform G(n, m): exactly ``m`` distinct edges, unit weights."""
    total = n * (n - 1) // 2
    if n < 0 or not 0 <= m <= total:
        raise InfeasibleEdgeCount(f"cannot place {m} edges on {n} nodes (max {total})")
    rng = make_rng(seed)
    chosen = np.sort(rng.choice(total, size=m, replace=False)) if m else np.empty(0, dtype=np.int64)
    rows, cols = np.triu_indices(n, 1)
    return _unit_graph(n, zip(rows[chosen], cols[chosen]))


def _ba_attachments(n: int, m_total: int) -> tuple[int, list[int]]:
    """Seed clique size and per-node attachment counts summing to ``m_total``."""
    a = max(1, round(m_total / n))
    a = min(a, n - 1)
    while a > 1 and a * (a + 1) // 2 > m_total:
        a -= 1
    core = a + 1
    needed = m_total - core * (core - 1) // 2
    counts = []
    # node t can attach to at most t earlier nodes
    capacity_after = [0] * (n + 1)
    for t in range(n - 1, core - 1, -1):
        capacity_after[t] = capacity_after[t + 1] + t
    if needed < 0 or needed > capacity_after[core]:
        raise InfeasibleEdgeCount(f"BA cannot produce {m_total} edges on {n} nodes")
    for t in range(core, n):
        share = needed // (n - t)
        k = max(needed - capacity_after[t + 1], min(t, share))
        counts.append(k)
        needed -= k
    return core, counts


def generate_ba(n: int, m_total: int, seed) -> WeightedGraph:
    """Preferential attachment with exactly ``m_total`` edges.

    Starts from a clique on ``a + 1`` nodes, ``a = max(1, round(m_total / n))``;
    each later node attaches to distinct earlier nodes with probability
    proportional to degree (degree-0 nodes weigh 1). Attachment counts are
    spread as evenly as possible, extra edges going to later nodes, so the
    total is exact.
    """
    if n < 2 or m_total < 0 or m_total > n * (n - 1) // 2:
        raise InfeasibleEdgeCount(f"BA cannot produce {m_total} edges on {n} nodes")
    core, counts = _ba_attachments(n, m_total)
    rng = make_rng(seed)
    degree = np.zeros(n, dtype=np.int64)
    pairs = []
    for u in range(core):
        for v in range(u + 1, core):
            pairs.append((u, v))
    degree[:core] = core - 1
    for t, k in zip(range(core, n), counts):
        if k == 0:
            continue
        w = degree[:t].astype(float)
        w[w == 0] = 1.0
        targets = rng.choice(t, size=k, replace=False, p=w / w.sum())
        for v in sorted(int(x) for x in targets):
            pairs.append((v, t))
            degree[v] += 1
        degree[t] += k
    return _unit_graph(n, pairs)


def ws_ring_degree(n: int, m_total: int) -> int:
    """Even ring degree closest to ``2 * m_total / n``."""
    return 2 * round(m_total / n)


def generate_ws(n: int, m_total: int, rewire_p: float, seed) -> WeightedGraph:
    """Watts-Strogatz small world with ``n * k / 2`` edges, ``k = ws_ring_degree``.

    Each lattice edge ``(u, u + j)`` is rewired with probability ``rewire_p``
    to ``(u, w)`` with ``w`` uniform over nodes that are neither ``u`` nor
    already adjacent to it.
    """
    k = ws_ring_degree(n, m_total)
    if k < 2 or k >= n:
        raise InfeasibleEdgeCount(f"WS ring degree {k} infeasible for {n} nodes")
    if rewire_p is None or not 0.0 <= rewire_p <= 1.0:
        raise ValueError("rewire_p must lie in [0, 1]")
    rng = make_rng(seed)
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() >= rewire_p or v not in adj[u]:
                continue
            if len(adj[u]) >= n - 1:
                continue
            free = [x for x in range(n) if x != u and x not in adj[u]]
            w = free[int(rng.integers(len(free)))]
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    pairs = {(u, v) for u in range(n) for v in adj[u] if u < v}
    return _unit_graph(n, pairs)


# --- statistics -------------------------------------------------------------


def _betti_value(x: BettiProfile | int | float, k: int) -> float:
    if isinstance(x, BettiProfile):
        return float(x.betti[k])
    return float(x)


def betti_null_test(
    observed: BettiProfile | int,
    samples: Sequence[BettiProfile | int],
    dimension: int,
) -> tuple[float, float]:
    """Two-sided one-sample t-test of sampled ``beta_dimension`` against the
    observed value.

    Zero-variance samples: ``(0.0, 1.0)`` if the sample mean equals the
    observation, otherwise ``(+-inf, 0.0)``.
    """
    if len(samples) < 2:
        raise TooFewSamples("need at least 2 samples")
    x = np.array([_betti_value(s, dimension) for s in samples])
    obs = _betti_value(observed, dimension)
    mean = x.mean()
    if np.all(x == x[0]):
        if mean == obs:
            return 0.0, 1.0
        return math.copysign(math.inf, mean - obs), 0.0
    res = stats.ttest_1samp(x, obs)
    return float(res.statistic), float(res.pvalue)


def spearman_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise DegenerateInput("need at least 3 observations")
    return pearson_correlation(stats.rankdata(x), stats.rankdata(y))


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("constant series has no correlation")
    r = float(dx @ dy) / (math.sqrt(sxx) * math.sqrt(syy))
    return max(-1.0, min(1.0, r))


# --- classical measures -----------------------------------------------------


@dataclass(frozen=True)
class MeasureVector:
    density: float
    average_clustering: float
    global_efficiency: float
    degree_assortativity: float | None
    bridge_count: int
    isolate_count: int
    node_count: int
    edge_count: int

    def as_dict(self) -> dict:
        return asdict(self)


MEASURE_NAMES = tuple(MeasureVector.__dataclass_fields__)


def _average_clustering(adj: Sequence[frozenset[int]]) -> float:
    n = len(adj)
    if n == 0:
        return 0.0
    total = 0.0
    for u in range(n):
        d = len(adj[u])
        if d < 2:
            continue
        links = sum(len(adj[v] & adj[u]) for v in adj[u]) / 2
        total += 2 * links / (d * (d - 1))
    return total / n


def _global_efficiency(g: WeightedGraph, chunk: int = 512) -> float:
    n = g.node_count
    if n < 2 or not g.edges:
        return 0.0
    u = np.array([e[0] for e in g.edges])
    v = np.array([e[1] for e in g.edges])
    a = sparse.coo_matrix((np.ones(len(u)), (u, v)), shape=(n, n)).tocsr()
    total = 0.0
    for start in range(0, n, chunk):
        d = shortest_path(a, directed=False, unweighted=True, indices=np.arange(start, min(n, start + chunk)))
        with np.errstate(divide="ignore"):
            inv = 1.0 / d
        inv[~np.isfinite(inv)] = 0.0
        total += float(inv.sum())
    return total / (n * (n - 1))


def _degree_assortativity(g: WeightedGraph) -> float | None:
    if not g.edges:
        return None
    deg = [len(s) for s in g.adjacency]
    xs = [deg[u] for u, v, _ in g.edges] + [deg[v] for u, v, _ in g.edges]
    ys = [deg[v] for u, v, _ in g.edges] + [deg[u] for u, v, _ in g.edges]
    try:
        return pearson_correlation(xs, ys)
    except DegenerateInput:
        return None


def _bridge_count(adj: Sequence[frozenset[int]]) -> int:
    n = len(adj)
    disc = [-1] * n
    low = [0] * n
    timer = 0
    bridges = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(sorted(adj[root])))]
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt == parent:
                    continue
                if disc[nxt] == -1:
                    disc[nxt] = low[nxt] = timer
                    timer += 1
                    stack.append((nxt, node, iter(sorted(adj[nxt]))))
                    advanced = True
                    break
                low[node] = min(low[node], disc[nxt])
            if advanced:
                continue
            stack.pop()
            if parent != -1:
                low[parent] = min(low[parent], low[node])
                if low[node] > disc[parent]:
                    bridges += 1
    return bridges


def network_measures(g: WeightedGraph) -> MeasureVector:
    """Unweighted classical measures; hop distances ignore edge weights."""
    n, m = g.node_count, g.edge_count
    adj = g.adjacency
    return MeasureVector(
        density=2 * m / (n * (n - 1)) if n > 1 else 0.0,
        average_clustering=_average_clustering(adj),
        global_efficiency=_global_efficiency(g),
        degree_assortativity=_degree_assortativity(g),
        bridge_count=_bridge_count(adj),
        isolate_count=sum(1 for s in adj if not s),
        node_count=n,
        edge_count=m,
    )
