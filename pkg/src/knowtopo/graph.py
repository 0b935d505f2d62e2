"""Weighted co-occurrence graphs and the shared topology value types."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import InputUnreadable, NonPositiveWeight, SelfLoop

INF = math.inf


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with positive edge weights (co-occurrence counts).

    Nodes are dense integers ``0..node_count-1``; ``labels[i]`` is the external
    label of node ``i``. Edges are stored once, as ``(u, v, weight)`` with
    ``u < v``, sorted by ``(u, v)``.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.node_count)))
        if len(self.labels) != self.node_count:
            raise ValueError("symbol table size does not match node_count")
        if len(set(self.labels)) != self.node_count:
            raise ValueError("node labels must be unique")
        seen = set()
        for u, v, w in self.edges:
            if u == v:
                raise SelfLoop(f"self-loop on node {u}")
            if not (0 <= u < v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) must satisfy 0 <= u < v < node_count")
            if not w > 0:
                raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_index_edges(
        cls,
        node_count: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Sequence[str] = (),
    ) -> "WeightedGraph":
        """Build from integer endpoints; endpoints are normalised to ``u < v``
        and duplicate pairs are summed."""
        acc: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            if u == v:
                raise SelfLoop(f"self-loop on node {u}")
            if not w > 0:
                raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w}")
            key = (u, v) if u < v else (v, u)
            acc[key] = acc.get(key, 0) + w
        return cls(node_count, tuple((u, v, w) for (u, v), w in sorted(acc.items())), tuple(labels))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v, _ in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def weight_of(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.edges}

    def weight(self, u: int, v: int) -> float | None:
        if u > v:
            u, v = v, u
        return self.weight_of.get((u, v))

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def connected_components(self) -> int:
        """Component count by graph traversal (isolated nodes count)."""
        seen = [False] * self.node_count
        count = 0
        adj = self.adjacency
        for s in range(self.node_count):
            if seen[s]:
                continue
            count += 1
            seen[s] = True
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
        return count

    def without_isolates(self) -> "WeightedGraph":
        keep = [i for i in range(self.node_count) if self.adjacency[i]]
        remap = {old: new for new, old in enumerate(keep)}
        return WeightedGraph(
            len(keep),
            tuple((remap[u], remap[v], w) for u, v, w in self.edges),
            tuple(self.labels[i] for i in keep),
        )

    def edge_rows(self) -> list[tuple[str, str, float]]:
        return [(self.labels[u], self.labels[v], w) for u, v, w in self.edges]


def build_graph(
    edge_list: Iterable[tuple[str, str, float]],
    nodes: Iterable[str] = (),
) -> WeightedGraph:
    """Build a graph from labelled edges.

    Duplicate unordered pairs have their weights summed. Labels get indices in
    order of first appearance; ``nodes`` are registered first, which is how
    isolated nodes enter the graph.
    """
    index: dict[str, int] = {}

    def intern(label: str) -> int:
        if not isinstance(label, str) or not label:
            raise ValueError(f"node labels must be nonempty strings, got {label!r}")
        i = index.get(label)
        if i is None:
            i = index[label] = len(index)
        return i

    for label in nodes:
        intern(label)
    acc: dict[tuple[int, int], float] = {}
    for a, b, w in edge_list:
        if not w > 0:
            raise NonPositiveWeight(f"edge ({a!r}, {b!r}) has weight {w}")
        if a == b:
            raise SelfLoop(f"self-loop on {a!r}")
        u, v = intern(a), intern(b)
        key = (u, v) if u < v else (v, u)
        acc[key] = acc.get(key, 0) + w
    return WeightedGraph(len(index), tuple((u, v, w) for (u, v), w in sorted(acc.items())), tuple(index))


def inverse_distance(weight: float) -> float:
    """Distance between two co-occurring items: ``1 / weight``."""
    if not weight > 0:
        raise NonPositiveWeight(f"weight must be positive, got {weight}")
    return 1.0 / weight


def distinct_weight_levels(g: WeightedGraph) -> list[float]:
    """Ascending distinct inverse-weight values of the graph's edges."""
    return sorted({inverse_distance(w) for _, _, w in g.edges})


def read_edge_csv(path: str | Path) -> WeightedGraph:
    """Read a ``source,target,weight`` CSV with header row."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"source", "target", "weight"} <= set(reader.fieldnames):
                raise InputUnreadable(f"{path}: expected header source,target,weight")
            rows = [(r["source"], r["target"], _parse_weight(r["weight"])) for r in reader]
    except OSError as exc:
        raise InputUnreadable(str(exc)) from exc
    return build_graph(rows)


def write_edge_csv(g: WeightedGraph, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "weight"])
        for a, b, w in g.edge_rows():
            writer.writerow([a, b, format_number(w)])


def _parse_weight(text: str) -> float:
    value = float(text)
    return int(value) if value.is_integer() else value


def format_number(x: float | int | None) -> str:
    """Canonical text form used by every CSV writer: integers without a
    trailing ``.0``, ``inf`` for infinity, ``repr`` precision otherwise."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return ""
    if x.is_integer():
        return str(int(x))
    return repr(x)


class Simplex(NamedTuple):
    vertices: tuple[int, ...]
    dimension: int
    filtration_value: float


class PersistencePoint(NamedTuple):
    dimension: int
    birth: float
    death: float

    @property
    def lifetime(self) -> float:
        return self.death - self.birth

    @property
    def essential(self) -> bool:
        return math.isinf(self.death)


@dataclass(frozen=True)
class PersistenceDiagram:
    points: tuple[PersistencePoint, ...]
    max_dimension_computed: int
    graph_fingerprint: str = ""

    def __post_init__(self):
        for p in self.points:
            if p.dimension > self.max_dimension_computed:
                raise ValueError(f"point {p} exceeds computed dimension {self.max_dimension_computed}")

    def in_dimension(self, k: int) -> list[PersistencePoint]:
        return [p for p in self.points if p.dimension == k]

    def finite(self, k: int) -> list[tuple[float, float]]:
        return [(p.birth, p.death) for p in self.points if p.dimension == k and not p.essential]

    def essential_births(self, k: int) -> list[float]:
        return sorted(p.birth for p in self.points if p.dimension == k and p.essential)

    def betti(self, k: int) -> int:
        return sum(1 for p in self.points if p.dimension == k and p.essential)

    def to_rows(self) -> list[tuple[int, float, float]]:
        return [tuple(p) for p in self.points]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["dimension", "birth", "death"])
            for p in self.points:
                writer.writerow([p.dimension, format_number(p.birth), format_number(p.death)])

    @classmethod
    def read_csv(cls, path: str | Path, max_dimension: int | None = None) -> "PersistenceDiagram":
        with open(path, newline="", encoding="utf-8") as fh:
            pts = tuple(
                PersistencePoint(int(r["dimension"]), float(r["birth"]), float(r["death"]))
                for r in csv.DictReader(fh)
            )
        if max_dimension is None:
            max_dimension = max((p.dimension for p in pts), default=0)
        return cls(pts, max_dimension)


@dataclass(frozen=True)
class BettiProfile:
    """Betti numbers ``betti[k]`` for ``k <= homology cap`` and cell counts
    ``cells[k]`` for ``k <= cell cap``."""

    betti: tuple[int, ...]
    cells: tuple[int, ...]

    def euler_from_cells(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.cells))

    def euler_from_betti(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))
