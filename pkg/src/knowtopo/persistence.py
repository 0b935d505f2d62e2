"""Persistent homology of flag filtrations over Z/2.

``reduce`` is the production path: per-dimension boundary matrices reduced
from the top dimension down with clearing. ``naive_reduce`` is the textbook
single-matrix reduction kept as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .errors import CapViolation, OracleTooLarge
from .filtration import FlagFiltration, cell_counts
from .graph import BettiProfile, PersistenceDiagram, PersistencePoint

DEFAULT_HOMOLOGY_CAP = 3
DEFAULT_CELL_CAP = DEFAULT_HOMOLOGY_CAP + 1
ORACLE_CELL_LIMIT = 20_000


@dataclass
class ReductionResult:
    pairs: list[tuple[int, int]]
    essential: list[int]
    homology_cap: int
    counts: dict[int, dict[str, int]] = field(default_factory=dict)

    def pair_set(self) -> set[tuple[int, int]]:
        return set(self.pairs)

    def essential_set(self) -> set[int]:
        return set(self.essential)


def boundary_columns(f: FlagFiltration, dimension: int) -> Iterator[tuple[int, list[int]]]:
    """Yield ``(j, facets)`` for every ``dimension``-simplex ``j``, where
    ``facets`` are the sorted filtration indices of its faces."""
    if dimension > f.dimension_cap:
        return
    for j, facets in _facet_sets(f, dimension):
        yield j, sorted(facets)


def _facet_sets(f: FlagFiltration, dimension: int) -> Iterator[tuple[int, set[int]]]:
    index_of = f.index_of
    simplices = f.simplices
    for j in f.indices_by_dimension[dimension]:
        verts = simplices[j].vertices
        yield j, {index_of[verts[:i] + verts[i + 1:]] for i in range(len(verts))}


def _check_caps(f: FlagFiltration, homology_cap: int) -> None:
    if homology_cap < 0:
        raise CapViolation("homology_cap must be >= 0")
    if homology_cap > f.dimension_cap - 1:
        raise CapViolation(
            f"homology_cap {homology_cap} needs cells of dimension {homology_cap + 1}, "
            f"filtration only has dimension_cap {f.dimension_cap}"
        )


def reduce(f: FlagFiltration, homology_cap: int = DEFAULT_HOMOLOGY_CAP) -> ReductionResult:
    """Persistence pairing of ``f`` in dimensions ``0..homology_cap``.

    Columns are processed in filtration order; a column's pivot is its largest
    facet index, and pivot collisions are resolved by Z/2 column addition.
    Dimensions are handled from ``homology_cap + 1`` downwards so that every
    pivot found in dimension ``d`` clears the column of that (positive)
    simplex in dimension ``d - 1``. Zero-persistence pairs are kept.
    """
    _check_caps(f, homology_cap)
    pairs: list[tuple[int, int]] = []
    counts: dict[int, dict[str, int]] = {}
    cleared: set[int] = set()
    for dim in range(homology_cap + 1, 0, -1):
        pivot_col: dict[int, int] = {}
        # finished columns are kept as sorted tuples; the working column is a
        # set so that Z/2 addition is a symmetric difference
        reduced: dict[int, tuple[int, ...]] = {}
        next_cleared: set[int] = set()
        n_cols = n_cleared = n_pivots = 0
        for j, col in _facet_sets(f, dim):
            n_cols += 1
            if j in cleared:
                n_cleared += 1
                continue
            low = max(col)
            while True:
                other = pivot_col.get(low)
                if other is None:
                    break
                col.symmetric_difference_update(reduced[other])
                if not col:
                    break
                low = max(col)
            if col:
                pivot_col[low] = j
                reduced[j] = tuple(sorted(col))
                next_cleared.add(low)
                pairs.append((low, j))
                n_pivots += 1
        counts[dim] = {"columns": n_cols, "cleared": n_cleared, "pivots": n_pivots}
        cleared = next_cleared
        if dim == 1:
            break
    paired_births = {b for b, _ in pairs}
    paired_deaths = {d for _, d in pairs}
    essential = [
        i
        for i, s in enumerate(f.simplices)
        if s.dimension <= homology_cap and i not in paired_births and i not in paired_deaths
    ]
    pairs.sort()
    return ReductionResult(pairs, essential, homology_cap, counts)


def naive_reduce(f: FlagFiltration, homology_cap: int = DEFAULT_HOMOLOGY_CAP) -> ReductionResult:
    """Textbook left-to-right reduction of the full boundary matrix.

    No clearing, no per-dimension split, faces found by brute-force lookup.
    Only meant for small complexes.
    """
    _check_caps(f, homology_cap)
    n = len(f.simplices)
    if n > ORACLE_CELL_LIMIT:
        raise OracleTooLarge(f"{n} cells exceeds oracle limit {ORACLE_CELL_LIMIT}")
    position = {frozenset(s.vertices): i for i, s in enumerate(f.simplices)}
    columns: list[set[int]] = []
    for s in f.simplices:
        if s.dimension == 0:
            columns.append(set())
        else:
            columns.append({position[frozenset(face)] for face in combinations(s.vertices, s.dimension)})

    lows: list[int | None] = [None] * n
    for j in range(n):
        col = columns[j]
        while col:
            low = max(col)
            clash = next((k for k in range(j) if lows[k] == low), None)
            if clash is None:
                lows[j] = low
                break
            col ^= columns[clash]

    dims = [s.dimension for s in f.simplices]
    pairs = sorted((lows[j], j) for j in range(n) if lows[j] is not None and dims[lows[j]] <= homology_cap)
    is_low = {low for low in lows if low is not None}
    essential = [i for i in range(n) if dims[i] <= homology_cap and not columns[i] and i not in is_low]
    return ReductionResult(pairs, essential, homology_cap)


def diagram_from_reduction(
    f: FlagFiltration,
    r: ReductionResult,
    drop_zero_persistence: bool = True,
) -> PersistenceDiagram:
    simplices = f.simplices
    points = []
    for b, d in r.pairs:
        birth = simplices[b].filtration_value
        death = simplices[d].filtration_value
        if drop_zero_persistence and birth == death:
            continue
        points.append(PersistencePoint(simplices[b].dimension, birth, death))
    for i in r.essential:
        points.append(PersistencePoint(simplices[i].dimension, simplices[i].filtration_value, math.inf))
    points.sort()
    return PersistenceDiagram(tuple(points), r.homology_cap, f.fingerprint)


def betti_profile(f: FlagFiltration, r: ReductionResult) -> BettiProfile:
    """Betti numbers ``0..homology_cap`` and cell counts ``0..homology_cap + 1``."""
    betti = [0] * (r.homology_cap + 1)
    for i in r.essential:
        betti[f.simplices[i].dimension] += 1
    cells = list(cell_counts(f))
    width = r.homology_cap + 2
    cells = (cells + [0] * width)[:max(width, len(cells))]
    return BettiProfile(tuple(betti), tuple(cells[:width]))
