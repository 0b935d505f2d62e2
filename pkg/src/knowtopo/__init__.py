"""Persistent homology of co-occurrence networks built from two-mode
publication records."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    BettiProfile,
    PersistenceDiagram,
    PersistencePoint,
    Simplex,
    WeightedGraph,
    build_graph,
    distinct_weight_levels,
    inverse_distance,
)
from .filtration import FlagFiltration, cell_counts, enumerate_flag_complex  # noqa: E402
from .persistence import betti_profile, diagram_from_reduction, naive_reduce, reduce  # noqa: E402
from .distances import (  # noqa: E402
    bottleneck_distance,
    brute_force_matching,
    mean_pairwise_distance,
    wasserstein_distance,
)
from .networks import (  # noqa: E402
    NetworkSpec,
    PublicationRecord,
    build_collaboration_network,
    build_knowledge_network,
    project_two_mode,
)


def persistence(g, homology_cap=3, dimension_cap=None, drop_zero_persistence=True):
    """Diagram and Betti profile of ``g`` in one call."""
    f = enumerate_flag_complex(g, homology_cap + 1 if dimension_cap is None else dimension_cap)
    r = reduce(f, homology_cap)
    return diagram_from_reduction(f, r, drop_zero_persistence), betti_profile(f, r)


__all__ = [
    "BettiProfile",
    "FlagFiltration",
    "NetworkSpec",
    "PersistenceDiagram",
    "PersistencePoint",
    "PublicationRecord",
    "Simplex",
    "WeightedGraph",
    "betti_profile",
    "bottleneck_distance",
    "brute_force_matching",
    "build_collaboration_network",
    "build_graph",
    "build_knowledge_network",
    "cell_counts",
    "diagram_from_reduction",
    "distinct_weight_levels",
    "enumerate_flag_complex",
    "inverse_distance",
    "mean_pairwise_distance",
    "naive_reduce",
    "persistence",
    "project_two_mode",
    "reduce",
    "wasserstein_distance",
]
