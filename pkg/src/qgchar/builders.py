"""Small graph constructors and a random generator of ported test graphs."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph import (
    GENERALIZED_NEUMANN,
    NEUMANN,
    ZERO,
    ConstantPotential,
    Edge,
    MetricGraph,
    PotentialSpec,
    ValidatedGraph,
    Vertex,
    VertexCondition,
    robin,
    validate_graph,
)
from .twoport import PortedGraph


def _pot(q: float | PotentialSpec | None) -> PotentialSpec:
    if q is None or (isinstance(q, (int, float)) and q == 0):
        return ZERO
    if isinstance(q, (int, float)):
        return ConstantPotential(float(q))
    return q


def interval(length: float = 1.0, left: VertexCondition = NEUMANN, right: VertexCondition = NEUMANN, q=None) -> ValidatedGraph:
    return validate_graph(MetricGraph((Vertex(1, left), Vertex(2, right)), (Edge(1, 1, 2, length, _pot(q)),)))


def path(lengths: Sequence[float], potentials: Sequence | None = None, ends=(NEUMANN, NEUMANN)) -> ValidatedGraph:
    """Vertices ``1..g+1`` in a row, edge ``k`` from vertex ``k`` to ``k + 1``."""
    g = len(lengths)
    pots = potentials or [None] * g
    verts = [Vertex(1, ends[0])] + [Vertex(k, GENERALIZED_NEUMANN) for k in range(2, g + 1)] + [Vertex(g + 1, ends[1])]
    edges = [Edge(k, k, k + 1, float(lengths[k - 1]), _pot(pots[k - 1])) for k in range(1, g + 1)]
    return validate_graph(MetricGraph(tuple(verts), tuple(edges)))


def star(lengths: Sequence[float], potentials: Sequence | None = None, leaf_conditions: Sequence[VertexCondition] | None = None) -> ValidatedGraph:
    """Centre vertex 1, leaf ``k + 1`` at the head of edge ``k``."""
    g = len(lengths)
    pots = potentials or [None] * g
    conds = leaf_conditions or [NEUMANN] * g
    verts = [Vertex(1, GENERALIZED_NEUMANN)] + [Vertex(k + 1, conds[k - 1]) for k in range(1, g + 1)]
    edges = [Edge(k, 1, k + 1, float(lengths[k - 1]), _pot(pots[k - 1])) for k in range(1, g + 1)]
    return validate_graph(MetricGraph(tuple(verts), tuple(edges)))


def cycle(lengths: Sequence[float], potentials: Sequence | None = None) -> ValidatedGraph:
    """Closed chain of ``g >= 2`` edges on vertices ``1..g``."""
    g = len(lengths)
    if g < 2:
        raise ValueError("a cycle needs at least two edges here (loops are not built by this helper)")
    pots = potentials or [None] * g
    verts = [Vertex(k) for k in range(1, g + 1)]
    edges = [Edge(k, k, k % g + 1, float(lengths[k - 1]), _pot(pots[k - 1])) for k in range(1, g + 1)]
    return validate_graph(MetricGraph(tuple(verts), tuple(edges)))


def ported_interval(length: float = 1.0, q=None) -> PortedGraph:
    return PortedGraph(interval(length, q=q), 1, 2)


def ported_path(lengths: Sequence[float], potentials: Sequence | None = None) -> PortedGraph:
    return PortedGraph(path(lengths, potentials), 1, len(lengths) + 1)


def ported_star(
    lengths: Sequence[float], potentials: Sequence | None = None, leaf_conditions: Sequence[VertexCondition] | None = None
) -> PortedGraph:
    """Star whose first leg carries ``v_in`` and last leg ``v_out``; other legs keep their leaf conditions."""
    if len(lengths) < 2:
        raise ValueError("a ported star needs at least two legs")
    return PortedGraph(star(lengths, potentials, leaf_conditions), 2, len(lengths) + 1)


def random_ported_graph(
    rng: np.random.Generator,
    max_edges: int = 5,
    q_range: tuple[float, float] = (-5.0, 5.0),
    beta_range: tuple[float, float] = (-2.0, 2.0),
    length_range: tuple[float, float] = (0.3, 1.2),
) -> PortedGraph:
    """A random path or star (spare star legs get random Robin ends) with constant potentials."""
    g = int(rng.integers(1, max_edges + 1))
    lengths = rng.uniform(*length_range, size=g)
    pots = [float(q) for q in rng.uniform(*q_range, size=g)]
    if g >= 3 and rng.random() < 0.5:
        conds = [NEUMANN] + [robin(float(b)) for b in rng.uniform(*beta_range, size=g - 2)] + [NEUMANN]
        return ported_star(lengths, pots, conds)
    return ported_path(lengths, pots)
