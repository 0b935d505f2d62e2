"""Bottleneck and 2-Wasserstein distances between persistence diagrams.

Finite points are matched to each other or to the diagonal. Essential points
(infinite death) are matched among themselves by sorted birth; if two
diagrams disagree on the number of essential classes in a dimension the
distance is ``inf``.

Ground metrics: l-infinity for bottleneck (diagonal cost ``(d - b) / 2``),
l2 for Wasserstein (diagonal cost ``(d - b) / sqrt(2)``).
"""

from __future__ import annotations

import math
from itertools import combinations, permutations
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import DimensionUnavailable, OracleTooLarge, TooFewDiagrams
from .graph import PersistenceDiagram

BOTTLENECK = "bottleneck"
WASSERSTEIN = "wasserstein"
METRICS = (BOTTLENECK, WASSERSTEIN)
BRUTE_FORCE_LIMIT = 12

Points = Sequence[tuple[float, float]]


def _split(d: PersistenceDiagram, k: int) -> tuple[list[tuple[float, float]], list[float]]:
    if k < 0 or k > d.max_dimension_computed:
        raise DimensionUnavailable(
            f"dimension {k} not available (diagram computed to {d.max_dimension_computed})"
        )
    return d.finite(k), d.essential_births(k)


def _augmented_costs(a: Points, b: Points, metric: str) -> np.ndarray:
    """Square cost matrix: rows are ``a`` then one diagonal slot per point of
    ``b``; columns are ``b`` then one diagonal slot per point of ``a``."""
    na, nb = len(a), len(b)
    n = na + nb
    cost = np.zeros((n, n))
    A = np.asarray(a, dtype=float).reshape(na, 2)
    B = np.asarray(b, dtype=float).reshape(nb, 2)
    if metric == BOTTLENECK:
        cost[:na, :nb] = np.maximum(
            np.abs(A[:, None, 0] - B[None, :, 0]), np.abs(A[:, None, 1] - B[None, :, 1])
        )
        cost[:na, nb:] = ((A[:, 1] - A[:, 0]) / 2)[:, None]
        cost[na:, :nb] = ((B[:, 1] - B[:, 0]) / 2)[None, :]
    else:
        cost[:na, :nb] = (A[:, None, 0] - B[None, :, 0]) ** 2 + (A[:, None, 1] - B[None, :, 1]) ** 2
        cost[:na, nb:] = ((A[:, 1] - A[:, 0]) ** 2 / 2)[:, None]
        cost[na:, :nb] = ((B[:, 1] - B[:, 0]) ** 2 / 2)[None, :]
    return cost


def _has_perfect_matching(allowed: np.ndarray) -> bool:
    n = allowed.shape[0]
    match = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return int(np.count_nonzero(match >= 0)) == n


def bottleneck_finite(a: Points, b: Points) -> float:
    """Bottleneck distance between two finite point multisets.

    Binary search over the sorted distinct entries of the augmented cost
    matrix; a threshold is feasible when the bipartite graph of entries at or
    below it has a perfect matching.
    """
    if not a and not b:
        return 0.0
    cost = _augmented_costs(a, b, BOTTLENECK)
    candidates = np.unique(cost)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def wasserstein_finite(a: Points, b: Points) -> float:
    """2-Wasserstein distance between two finite point multisets (exact
    assignment on the augmented squared-cost matrix)."""
    if not a and not b:
        return 0.0
    cost = _augmented_costs(a, b, WASSERSTEIN)
    rows, cols = linear_sum_assignment(cost)
    return math.sqrt(float(cost[rows, cols].sum()))


def bottleneck_distance(p1: PersistenceDiagram, p2: PersistenceDiagram, dimension: int) -> float:
    fa, ea = _split(p1, dimension)
    fb, eb = _split(p2, dimension)
    if len(ea) != len(eb):
        return math.inf
    essential = max((abs(x - y) for x, y in zip(ea, eb)), default=0.0)
    return max(essential, bottleneck_finite(fa, fb))


def wasserstein_distance(p1: PersistenceDiagram, p2: PersistenceDiagram, dimension: int) -> float:
    fa, ea = _split(p1, dimension)
    fb, eb = _split(p2, dimension)
    if len(ea) != len(eb):
        return math.inf
    essential = sum((x - y) ** 2 for x, y in zip(ea, eb))
    return math.sqrt(wasserstein_finite(fa, fb) ** 2 + essential)


def distance(p1: PersistenceDiagram, p2: PersistenceDiagram, dimension: int, metric: str) -> float:
    if metric == BOTTLENECK:
        return bottleneck_distance(p1, p2, dimension)
    if metric == WASSERSTEIN:
        return wasserstein_distance(p1, p2, dimension)
    raise ValueError(f"unknown metric {metric!r}")


class Matching(NamedTuple):
    distance: float
    pairs: tuple[tuple[int | None, int | None], ...]
    """Index pairs into the finite points of each diagram (``None`` is the
    diagonal), followed by essential pairs as ``(-1 - i, -1 - j)``."""


def brute_force_matching(
    p1: PersistenceDiagram, p2: PersistenceDiagram, dimension: int, p: float
) -> Matching:
    """Exhaustive search over every partial matching of the finite points
    (unmatched points go to the diagonal) and every bijection of essential
    points. ``p`` is ``math.inf`` (bottleneck) or ``2`` (Wasserstein)."""
    if p not in (2, math.inf):
        raise ValueError("p must be 2 or inf")
    fa, ea = _split(p1, dimension)
    fb, eb = _split(p2, dimension)
    if len(fa) + len(fb) > BRUTE_FORCE_LIMIT or len(ea) > 8 or len(eb) > 8:
        raise OracleTooLarge("too many points for exhaustive matching")
    if len(ea) != len(eb):
        return Matching(math.inf, ())

    def point_cost(x, y):
        if p == 2:
            return math.hypot(x[0] - y[0], x[1] - y[1])
        return max(abs(x[0] - y[0]), abs(x[1] - y[1]))

    def diag_cost(x):
        return (x[1] - x[0]) / (math.sqrt(2) if p == 2 else 2)

    def combine(costs):
        if p == 2:
            return math.sqrt(sum(c * c for c in costs))
        return max(costs, default=0.0)

    best_ess, best_ess_pairs = math.inf, ()
    for perm in permutations(range(len(eb))):
        c = combine([abs(ea[i] - eb[j]) for i, j in enumerate(perm)])
        if c < best_ess:
            best_ess, best_ess_pairs = c, tuple((-1 - i, -1 - j) for i, j in enumerate(perm))
    if not ea:
        best_ess = 0.0

    best, best_pairs = math.inf, ()
    na, nb = len(fa), len(fb)
    for k in range(min(na, nb) + 1):
        for left in combinations(range(na), k):
            for right in permutations(range(nb), k):
                matched = list(zip(left, right))
                costs = [point_cost(fa[i], fb[j]) for i, j in matched]
                costs += [diag_cost(fa[i]) for i in range(na) if i not in left]
                costs += [diag_cost(fb[j]) for j in range(nb) if j not in right]
                c = combine(costs)
                if c < best:
                    rest = [(i, None) for i in range(na) if i not in left]
                    rest += [(None, j) for j in range(nb) if j not in right]
                    best, best_pairs = c, tuple(matched + rest)
    return Matching(float(combine([best, best_ess])), best_pairs + best_ess_pairs)


class PairwiseSummary(NamedTuple):
    mean: float
    finite_pairs: int
    infinite_pairs: int


def pairwise_summary(
    diagrams: Sequence[PersistenceDiagram], dimension: int, metric: str = WASSERSTEIN
) -> PairwiseSummary:
    """Mean distance over all unordered pairs; infinite pairs are counted but
    left out of the mean (which is ``nan`` if every pair is infinite)."""
    if len(diagrams) < 2:
        raise TooFewDiagrams("need at least two diagrams")
    finite = []
    infinite = 0
    for i, j in combinations(range(len(diagrams)), 2):
        d = distance(diagrams[i], diagrams[j], dimension, metric)
        if math.isinf(d):
            infinite += 1
        else:
            finite.append(d)
    mean = math.fsum(finite) / len(finite) if finite else math.nan
    return PairwiseSummary(mean, len(finite), infinite)


def mean_pairwise_distance(
    diagrams: Sequence[PersistenceDiagram], dimension: int, metric: str = WASSERSTEIN
) -> float:
    return pairwise_summary(diagrams, dimension, metric).mean
