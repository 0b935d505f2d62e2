"""Synthetic two-mode corpora for benchmarks and desk-scale experiments.

Codes are drawn with Zipf-like popularity, so a few hub codes co-occur very
often; the resulting co-occurrence counts are heavy-tailed.
"""

from __future__ import annotations

import numpy as np

from .baselines import make_rng
from .graph import WeightedGraph
from .networks import NetworkSpec, PublicationRecord, build_knowledge_network


def synthetic_records(
    n_codes: int,
    n_records: int,
    seed: int,
    *,
    codes_per_record: tuple[int, int] = (1, 5),
    zipf_exponent: float = 1.1,
    field: str = "synthetic",
    period: int = 2000,
    n_authors: int = 0,
    authors_per_record: tuple[int, int] = (1, 4),
) -> list[PublicationRecord]:
    rng = make_rng(seed)
    ranks = np.arange(1, n_codes + 1, dtype=float)
    popularity = ranks ** -zipf_exponent
    popularity /= popularity.sum()
    lo, hi = codes_per_record
    records = []
    for i in range(n_records):
        m = int(rng.integers(lo, hi + 1))
        codes = rng.choice(n_codes, size=min(m, n_codes), replace=False, p=popularity)
        authors: list[str] = []
        if n_authors:
            k = int(rng.integers(authors_per_record[0], authors_per_record[1] + 1))
            authors = [f"a{a}" for a in sorted(rng.choice(n_authors, size=min(k, n_authors), replace=False))]
        records.append(
            PublicationRecord(
                work_id=f"w{i}",
                period=period,
                field=field,
                codes=tuple(f"c{c}" for c in sorted(codes)),
                authors=tuple(authors),
            )
        )
    return records


def cooccurrence_graph(n_nodes: int, n_edges: int, seed: int, **kwargs) -> WeightedGraph:
    """Knowledge network with exactly ``n_nodes`` codes and ``n_edges`` edges.

    Records are added until ``n_edges`` distinct code pairs have been seen;
    the last record is truncated so the target is hit exactly. Codes never
    drawn are kept as isolated nodes.
    """
    if n_edges > n_nodes * (n_nodes - 1) // 2:
        raise ValueError("too many edges for node count")
    rng = make_rng(seed)
    zipf_exponent = kwargs.get("zipf_exponent", 1.1)
    lo, hi = kwargs.get("codes_per_record", (2, 6))
    ranks = np.arange(1, n_nodes + 1, dtype=float)
    popularity = ranks ** -zipf_exponent
    popularity /= popularity.sum()

    seen: set[tuple[int, int]] = set()
    records = []
    i = 0
    while len(seen) < n_edges:
        m = int(rng.integers(lo, hi + 1))
        drawn = sorted(int(c) for c in rng.choice(n_nodes, size=m, replace=False, p=popularity))
        # greedy truncation keeps the record a clique while not overshooting
        codes: list[int] = []
        for c in drawn:
            new = [(min(c, x), max(c, x)) for x in codes if (min(c, x), max(c, x)) not in seen]
            if len(seen) + len(new) > n_edges:
                continue
            codes.append(c)
            seen.update(new)
        records.append(
            PublicationRecord(f"w{i}", 0, "synthetic", tuple(f"c{c}" for c in codes), ())
        )
        i += 1
    used = {c for pair in seen for c in pair}
    for c in range(n_nodes):
        if c not in used:
            records.append(PublicationRecord(f"w{i}", 0, "synthetic", (f"c{c}",), ()))
            i += 1
    return build_knowledge_network(records, NetworkSpec("knowledge", "synthetic", 0))
