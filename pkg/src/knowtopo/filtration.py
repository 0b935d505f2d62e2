"""Flag (clique) complex filtrations of weighted graphs.

A k-simplex enters the filtration at the largest inverse weight among its
edges; vertices enter at 0. The result is the Vietoris-Rips filtration of the
metric ``d(u, v) = 1 / w(u, v)`` (non-edges at infinity), truncated at a
maximum cell dimension.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

from .errors import DimensionCapTooLarge, NonPositiveWeight
from .graph import Simplex, WeightedGraph, format_number, inverse_distance

DEFAULT_CELL_BUDGET = 50_000_000


@dataclass(frozen=True)
class FlagFiltration:
    """Simplices in canonical order: filtration value, then dimension, then
    lexicographic vertex list. Every face precedes its cofaces."""

    simplices: list[Simplex]
    dimension_cap: int
    node_count: int

    def __len__(self) -> int:
        return len(self.simplices)

    @cached_property
    def level_values(self) -> list[float]:
        return sorted({s.filtration_value for s in self.simplices})

    @cached_property
    def index_of(self) -> dict[tuple[int, ...], int]:
        return {s.vertices: i for i, s in enumerate(self.simplices)}

    @cached_property
    def indices_by_dimension(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.dimension_cap + 1)]
        for i, s in enumerate(self.simplices):
            out[s.dimension].append(i)
        return out

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"cap={self.dimension_cap};n={self.node_count}\n".encode())
        for s in self.simplices:
            h.update(f"{s.filtration_value!r}:{','.join(map(str, s.vertices))}\n".encode())
        return h.hexdigest()

    def write_csv(self, path: str | Path) -> None:
        """Dump as ``dimension,filtration_value,v0,v1,...`` rows."""
        width = self.dimension_cap + 1
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["dimension", "filtration_value"] + [f"v{i}" for i in range(width)])
            for s in self.simplices:
                writer.writerow([s.dimension, format_number(s.filtration_value), *s.vertices])


def flag_filtration(
    node_count: int,
    edge_distances: Iterable[tuple[int, int, float]],
    dimension_cap: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> FlagFiltration:
    """Flag filtration from explicit edge lengths ``(u, v, d)`` with ``d > 0``.

    Cliques are grown by ordered neighbour intersection: a clique is only
    extended by common neighbours with a larger index than its last vertex,
    so each clique is produced exactly once.
    """
    if dimension_cap < 0:
        raise ValueError("dimension_cap must be >= 0")
    # higher[v] maps each neighbour u > v to the edge length d(v, u)
    higher: list[dict[int, float]] = [{} for _ in range(node_count)]
    for u, v, d in edge_distances:
        if not d > 0:
            raise NonPositiveWeight(f"edge ({u}, {v}) has non-positive length {d}")
        if u > v:
            u, v = v, u
        higher[u][v] = d

    entries: list[tuple[float, int, tuple[int, ...]]] = [(0.0, 0, (v,)) for v in range(node_count)]
    if len(entries) > cell_budget:
        raise DimensionCapTooLarge(cell_budget, len(entries))
    if dimension_cap >= 1:
        higher_sets = [frozenset(h) for h in higher]
        append = entries.append

        def expand(clique: tuple[int, ...], value: float, candidates: frozenset[int]) -> None:
            dim = len(clique)
            for u in sorted(candidates):
                v = value
                for c in clique:
                    d = higher[c][u]
                    if d > v:
                        v = d
                grown = clique + (u,)
                append((v, dim, grown))
                if dim < dimension_cap:
                    common = candidates & higher_sets[u]
                    if common:
                        expand(grown, v, common)
            if len(entries) > cell_budget:
                raise DimensionCapTooLarge(cell_budget, len(entries))

        for v in range(node_count):
            if higher_sets[v]:
                expand((v,), 0.0, higher_sets[v])

    # Reciprocals of distinct integer counts are distinct, correctly ordered
    # floats, so sorting on the float value never creates spurious ties.
    entries.sort()
    simplices = [Simplex(verts, dim, value) for value, dim, verts in entries]
    return FlagFiltration(simplices, dimension_cap, node_count)


def enumerate_flag_complex(
    g: WeightedGraph,
    dimension_cap: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> FlagFiltration:
    """All cliques of ``g`` with at most ``dimension_cap + 1`` vertices,
    filtered by inverse co-occurrence weight."""
    return flag_filtration(
        g.node_count,
        ((u, v, inverse_distance(w)) for u, v, w in g.edges),
        dimension_cap,
        cell_budget,
    )


def cell_counts(f: FlagFiltration) -> tuple[int, ...]:
    """Number of simplices per dimension, ``0..dimension_cap``.

    Trailing empty dimensions are trimmed, so an empty filtration gives ``(0,)``.
    """
    counts = [0] * (f.dimension_cap + 1)
    for s in f.simplices:
        counts[s.dimension] += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return tuple(counts)
