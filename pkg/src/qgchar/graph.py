"""Metric graphs with self-adjoint vertex conditions.

Edges are directed only to fix local coordinates: edge ``j`` is identified
with ``[0, length]`` running from ``tail`` to ``head``.  Nothing computed
downstream depends on that choice up to a nonzero constant factor.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Union

from .errors import (
    Disconnected,
    DuplicateId,
    GraphValidationError,
    InteriorConditionOnPendant,
    InvalidPotential,
    MissingBoundaryCondition,
    NonpositiveLength,
    UnknownEdge,
    UnknownVertex,
)

# ---------------------------------------------------------------------------
# vertex conditions
# ---------------------------------------------------------------------------


class ConditionKind(enum.Enum):
    DIRICHLET = "dirichlet"
    ROBIN = "robin"
    NEUMANN = "neumann"
    GENERALIZED_NEUMANN = "internal"


@dataclass(frozen=True, eq=False)
class VertexCondition:
    """Condition imposed at a vertex.

    Robin means ``dy/dn + beta * y = 0`` with ``dy/dn`` the derivative taken
    towards the vertex (outward from the edge).  Neumann is Robin with
    ``beta = 0`` and compares equal to it.  Dirichlet on a vertex of degree
    two or more is the generalized Dirichlet condition: continuity plus a
    vanishing common value.
    """

    kind: ConditionKind
    beta: float = 0.0

    def __post_init__(self):
        if self.kind is ConditionKind.ROBIN and not math.isfinite(self.beta):
            raise ValueError("Robin beta must be finite; use Dirichlet for beta = inf")
        if self.kind is not ConditionKind.ROBIN and self.beta != 0.0:
            raise ValueError(f"beta is only meaningful for Robin conditions, got {self.kind.value}")

    @property
    def robin_beta(self) -> float | None:
        """Robin coefficient, or None when the condition is not of Robin type."""
        if self.kind in (ConditionKind.ROBIN, ConditionKind.NEUMANN):
            return float(self.beta)
        return None

    def _key(self):
        b = self.robin_beta
        return ("robin", b) if b is not None else (self.kind.value,)

    def __eq__(self, other):
        if not isinstance(other, VertexCondition):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind is ConditionKind.ROBIN:
            return f"Robin({self.beta!r})"
        return {
            ConditionKind.DIRICHLET: "Dirichlet",
            ConditionKind.NEUMANN: "Neumann",
            ConditionKind.GENERALIZED_NEUMANN: "GeneralizedNeumann",
        }[self.kind]


DIRICHLET = VertexCondition(ConditionKind.DIRICHLET)
NEUMANN = VertexCondition(ConditionKind.NEUMANN)
GENERALIZED_NEUMANN = VertexCondition(ConditionKind.GENERALIZED_NEUMANN)


def robin(beta: float) -> VertexCondition:
    return VertexCondition(ConditionKind.ROBIN, float(beta))


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroPotential:
    def check(self, length: float) -> None:
        pass

    def reflected(self, length: float) -> "ZeroPotential":
        return self

    def __call__(self, x):
        return 0.0 * x


@dataclass(frozen=True)
class ConstantPotential:
    q0: float

    def check(self, length: float) -> None:
        if not math.isfinite(self.q0):
            raise InvalidPotential(f"constant potential must be finite, got {self.q0!r}")

    def reflected(self, length: float) -> "ConstantPotential":
        return self

    def __call__(self, x):
        return self.q0 + 0.0 * x


@dataclass(frozen=True)
class PiecewiseConstantPotential:
    """``values[k]`` holds on the k-th cell cut out by the interior ``breakpoints``."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def check(self, length: float) -> None:
        if len(self.values) != len(self.breakpoints) + 1:
            raise InvalidPotential("piecewise potential needs len(values) == len(breakpoints) + 1")
        if not all(math.isfinite(v) for v in self.values):
            raise InvalidPotential("piecewise potential values must be finite")
        pts = (0.0, *self.breakpoints, float(length))
        if any(b < a for a, b in zip(pts, pts[1:])):
            raise InvalidPotential(f"breakpoints must be increasing within [0, {length}]")

    def cells(self, length: float) -> list[tuple[float, float]]:
        """(cell length, value) pairs from x = 0 to x = length."""
        pts = (0.0, *self.breakpoints, float(length))
        return [(b - a, q) for a, b, q in zip(pts, pts[1:], self.values)]

    def reflected(self, length: float) -> "PiecewiseConstantPotential":
        return PiecewiseConstantPotential(
            tuple(length - b for b in reversed(self.breakpoints)), tuple(reversed(self.values))
        )

    def __call__(self, x):
        import numpy as np

        idx = np.searchsorted(np.asarray(self.breakpoints), x, side="right")
        return np.asarray(self.values)[idx]


@dataclass(frozen=True)
class SampledPotential:
    """Samples of q on ``grid`` (from 0 to the edge length), linearly interpolated."""

    grid: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(b) for b in self.grid))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def check(self, length: float) -> None:
        if len(self.grid) < 2 or len(self.grid) != len(self.values):
            raise InvalidPotential("sampled potential needs matching grid/values with >= 2 points")
        if not all(math.isfinite(v) for v in (*self.grid, *self.values)):
            raise InvalidPotential("sampled potential must be finite")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidPotential("sampled grid must be strictly increasing")
        tol = 1e-12 * max(1.0, length)
        if abs(self.grid[0]) > tol or abs(self.grid[-1] - length) > tol:
            raise InvalidPotential(f"sampled grid must run from 0 to the edge length {length}")

    def reflected(self, length: float) -> "SampledPotential":
        return SampledPotential(
            tuple(length - x for x in reversed(self.grid)), tuple(reversed(self.values))
        )

    def __call__(self, x):
        import numpy as np

        return np.interp(x, self.grid, self.values)


PotentialSpec = Union[ZeroPotential, ConstantPotential, PiecewiseConstantPotential, SampledPotential]
ZERO = ZeroPotential()

# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    id: int
    condition: VertexCondition = GENERALIZED_NEUMANN


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    length: float
    potential: PotentialSpec = ZERO

    def other(self, v: int) -> int:
        return self.head if v == self.tail else self.tail


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))

    @property
    def g(self) -> int:
        return len(self.edges)

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise UnknownVertex(vid)

    def edge(self, eid: int) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise UnknownEdge(eid)

    def endpoints(self, vid: int) -> list[tuple[int, int]]:
        """Incidences at ``vid`` as sorted ``(edge id, end)`` with end 0 = tail, 1 = head."""
        out = []
        for e in self.edges:
            if e.tail == vid:
                out.append((e.id, 0))
            if e.head == vid:
                out.append((e.id, 1))
        return out

    @cached_property
    def degrees(self) -> dict[int, int]:
        deg = {v.id: 0 for v in self.vertices}
        for e in self.edges:
            for end in (e.tail, e.head):
                if end in deg:
                    deg[end] += 1
        return deg

    @cached_property
    def pendants(self) -> frozenset[int]:
        return frozenset(v for v, d in self.degrees.items() if d == 1)

    @cached_property
    def total_length(self) -> float:
        return float(sum(e.length for e in self.edges))


class ValidatedGraph(MetricGraph):
    """A MetricGraph that passed :func:`validate_graph`; obtain it from there, not directly."""


def validate_graph(graph: MetricGraph) -> ValidatedGraph:
    """Check every structural invariant; a ValidatedGraph (immutable) passes straight through."""
    if isinstance(graph, ValidatedGraph):
        return graph
    vids = [v.id for v in graph.vertices]
    if len(set(vids)) != len(vids):
        raise DuplicateId(f"duplicate vertex ids in {vids}")
    eids = [e.id for e in graph.edges]
    if len(set(eids)) != len(eids):
        raise DuplicateId(f"duplicate edge ids in {eids}")
    if sorted(eids) != list(range(1, len(eids) + 1)):
        raise GraphValidationError(f"edge ids must be 1..g, got {sorted(eids)}")
    if not vids:
        raise GraphValidationError("graph has no vertices")
    known = set(vids)
    for e in graph.edges:
        for end in (e.tail, e.head):
            if end not in known:
                raise UnknownVertex(f"edge {e.id} references unknown vertex {end}")
        if not (e.length > 0 and math.isfinite(e.length)):
            raise NonpositiveLength(e.id, e.length)
        e.potential.check(e.length)

    adj: dict[int, set[int]] = {v: set() for v in vids}
    for e in graph.edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    seen = {vids[0]}
    todo = deque([vids[0]])
    while todo:
        for w in adj[todo.popleft()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    if seen != known:
        raise Disconnected(f"vertices {sorted(known - seen)} unreachable from {vids[0]}")

    deg = graph.degrees
    for v in graph.vertices:
        kind = v.condition.kind
        if deg[v.id] == 1:
            if kind is ConditionKind.GENERALIZED_NEUMANN:
                raise InteriorConditionOnPendant(v.id)
        elif kind not in (ConditionKind.GENERALIZED_NEUMANN, ConditionKind.DIRICHLET):
            raise MissingBoundaryCondition(
                v.id, f"interior vertex of degree {deg[v.id]} needs 'internal' or 'dirichlet', got {v.condition!r}"
            )

    return ValidatedGraph(graph.vertices, graph.edges)


def _same_kind(original: MetricGraph, vertices: Iterable[Vertex], edges: Iterable[Edge]) -> MetricGraph:
    g = MetricGraph(tuple(vertices), tuple(edges))  # plain class so the checks run
    return validate_graph(g) if isinstance(original, ValidatedGraph) else g


def reverse_edge(graph: MetricGraph, edge_id: int) -> MetricGraph:
    """Swap the ends of an edge and reflect its potential, ``q(x) -> q(l - x)``."""
    e = graph.edge(edge_id)
    flipped = replace(e, tail=e.head, head=e.tail, potential=e.potential.reflected(e.length))
    return _same_kind(graph, graph.vertices, (flipped if x.id == edge_id else x for x in graph.edges))


def normalize_root_orientation(graph: MetricGraph, root: int) -> MetricGraph:
    """Orient every edge at ``root`` away from it.  Loops at the root are left alone."""
    graph.vertex(root)
    for e in graph.edges:
        if e.head == root and e.tail != root:
            graph = reverse_edge(graph, e.id)
    return graph


def with_condition(graph: MetricGraph, vid: int, condition: VertexCondition) -> MetricGraph:
    graph.vertex(vid)
    verts = (replace(v, condition=condition) if v.id == vid else v for v in graph.vertices)
    return _same_kind(graph, verts, graph.edges)
