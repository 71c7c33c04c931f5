"""Characteristic matrix of a Sturm-Liouville problem on a metric graph.

On edge ``j`` the solution is written ``y_j = B_j c_j + A_j s_j``.  Each vertex
condition becomes one linear row in the unknowns ``(B_1..B_g, A_1..A_g)``;
the determinant of the resulting ``2g x 2g`` matrix is the characteristic
function, whose zeros in ``z`` are the eigenvalues.

Row order is canonical: root first, then the remaining vertices by ascending
id; inside a vertex the continuity rows (consecutive incidences sorted by
edge id), then the Kirchhoff or Dirichlet row.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .edges import FundamentalPair, fundamental_pair
from .graph import ConditionKind, MetricGraph, normalize_root_orientation, validate_graph


class RootKind(enum.Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


class RowLabel(NamedTuple):
    vertex: int
    kind: str  # "continuity" | "kirchhoff" | "dirichlet" | "robin"
    index: tuple[int, ...]


@dataclass(frozen=True)
class CharMatrix:
    entries: np.ndarray
    row_labels: tuple[RowLabel, ...]
    column_labels: tuple[str, ...]

    def row(self, vertex: int, kind: str) -> int:
        """Index of the last row of the given kind at ``vertex``."""
        hits = [i for i, lab in enumerate(self.row_labels) if lab.vertex == vertex and lab.kind == kind]
        if not hits:
            raise KeyError((vertex, kind))
        return hits[-1]

    def det(self) -> float:
        return determinant(self.entries)


def determinant(m: np.ndarray) -> float:
    """LU determinant; the empty matrix has determinant 1."""
    if m.size == 0:
        return 1.0
    return float(np.linalg.det(m))


def edge_pairs(graph: MetricGraph, z: float, tol: float = 1e-10) -> dict[int, FundamentalPair]:
    return {e.id: fundamental_pair(e.potential, e.length, z, tol) for e in graph.edges}


def column_index(g: int, edge_id: int, coeff: str) -> int:
    return edge_id - 1 if coeff == "B" else g + edge_id - 1


class _Rows:
    def __init__(self, graph: MetricGraph, pairs: Mapping[int, FundamentalPair]):
        self.g = graph.g
        self.pairs = pairs
        # one spare row so that an over-determined system is caught by the shape check
        self.entries = np.zeros((2 * self.g + 1, 2 * self.g))
        self.count = 0
        self.labels: list[RowLabel] = []

    def value(self, eid: int, end: int):
        """Terms of ``y_e`` at the given end (0 = tail, 1 = head)."""
        if end == 0:
            return [(eid, "B", 1.0)]
        p = self.pairs[eid]
        return [(eid, "B", p.c), (eid, "A", p.s)]

    def slope(self, eid: int, end: int):
        """Terms of ``y_e'`` in local coordinates at the given end."""
        if end == 0:
            return [(eid, "A", 1.0)]
        p = self.pairs[eid]
        return [(eid, "B", p.c_prime), (eid, "A", p.s_prime)]

    def add(self, label: RowLabel, terms):
        if self.count == len(self.entries):
            raise AssertionError(f"more than 2g = {2 * self.g} condition rows")
        row = self.entries[self.count]
        for eid, coeff, val in terms:
            row[column_index(self.g, eid, coeff)] += val
        assert row.any(), f"degenerate condition row {label}"
        self.count += 1
        self.labels.append(label)

    def continuity(self, vid: int, ends):
        for (e1, n1), (e2, n2) in zip(ends, ends[1:]):
            neg = [(e, c, -x) for e, c, x in self.value(e2, n2)]
            self.add(RowLabel(vid, "continuity", (e1, e2)), self.value(e1, n1) + neg)

    def kirchhoff(self, vid: int, ends):
        # sum of outgoing y'(0) minus sum of incoming y'(l)
        terms = []
        for e, n in ends:
            sign = 1.0 if n == 0 else -1.0
            terms += [(eid, c, sign * x) for eid, c, x in self.slope(e, n)]
        self.add(RowLabel(vid, "kirchhoff", ()), terms)

    def dirichlet(self, vid: int, ends):
        e, n = ends[0]
        self.add(RowLabel(vid, "dirichlet", (e,)), self.value(e, n))

    def robin(self, vid: int, end, beta: float):
        e, n = end
        if n == 1:
            # y'(l) + beta y(l) = 0
            terms = self.slope(e, n) + [(eid, c, beta * x) for eid, c, x in self.value(e, n)]
        else:
            # the outward derivative at a tail is -y'(0): y'(0) - beta y(0) = 0
            terms = self.slope(e, n) + [(eid, c, -beta * x) for eid, c, x in self.value(e, n)]
        self.add(RowLabel(vid, "robin", (e,)), terms)


def assemble(
    graph: MetricGraph,
    root: int,
    kind: RootKind | str,
    z: float,
    tol: float = 1e-10,
    *,
    pairs: Mapping[int, FundamentalPair] | None = None,
    normalize: bool = True,
) -> CharMatrix:
    """Build the characteristic matrix with generalized ``kind`` conditions at ``root``.

    The root's stored condition is ignored.  Edges at the root are first
    re-oriented away from it unless ``normalize`` is False (the caller then
    vouches that this already holds).
    """
    kind = RootKind(kind)
    graph = validate_graph(graph)
    if normalize:
        graph = normalize_root_orientation(graph, root)
    else:
        graph.vertex(root)
    if pairs is None:
        pairs = edge_pairs(graph, z, tol)

    rows = _Rows(graph, pairs)
    order = [root] + [v.id for v in graph.vertices if v.id != root]
    for vid in order:
        ends = graph.endpoints(vid)
        if vid == root:
            rows.continuity(vid, ends)
            if kind is RootKind.NEUMANN:
                rows.kirchhoff(vid, ends)
            else:
                rows.dirichlet(vid, ends)
            continue
        cond = graph.vertex(vid).condition
        if len(ends) == 1:
            if cond.kind is ConditionKind.DIRICHLET:
                rows.dirichlet(vid, ends)
            else:
                rows.robin(vid, ends[0], cond.robin_beta)
        else:
            rows.continuity(vid, ends)
            if cond.kind is ConditionKind.DIRICHLET:
                rows.dirichlet(vid, ends)
            else:
                rows.kirchhoff(vid, ends)

    g = graph.g
    columns = tuple(f"B{j}" for j in range(1, g + 1)) + tuple(f"A{j}" for j in range(1, g + 1))
    assert rows.count == 2 * g, f"row count {rows.count} != 2g = {2 * g}"
    entries = rows.entries[: 2 * g]
    return CharMatrix(entries, tuple(rows.labels), columns)


def phi(graph: MetricGraph, root: int, kind: RootKind | str, z: float, tol: float = 1e-10) -> float:
    """Characteristic function at ``z``: the determinant of :func:`assemble`."""
    return assemble(graph, root, kind, z, tol).det()
