"""Two-port characteristic functions of a graph with pendant ports.

For ports ``v_in`` and ``v_out`` the four functions ``phi_xy`` carry a
Dirichlet (``d``) or Neumann (``n``) condition at ``v_in`` (first letter)
and ``v_out`` (second letter); every other vertex keeps its own condition.

Normalisation.  Raw determinants only fix these functions up to a sign that
depends on row/column order.  Here the sign is fixed so that

    phi_dd = delta * y(v_out),   phi_dn = delta * y'(v_out),
    phi_nd = delta * u(v_out),   phi_nn = delta * u'(v_out),

where ``y`` and ``u`` are the solutions satisfying all non-port conditions
with ``(y, y') = (0, 1)`` and ``(u, u') = (1, 0)`` at ``v_in``, and ``delta``
is the interior determinant.  In other words ``[[nd, dd], [nn, dn]] / delta``
is the transfer matrix from ``v_in`` to ``v_out``.  This is what makes the
series and parallel composition rules hold with no stray signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from fractions import Fraction
from typing import Iterable

import numpy as np

from .assembly import CharMatrix, RootKind, assemble, column_index, determinant, edge_pairs
from .errors import GraphValidationError, PortNotPendant
from .graph import (
    DIRICHLET,
    NEUMANN,
    ConditionKind,
    Edge,
    MetricGraph,
    ValidatedGraph,
    reverse_edge,
    validate_graph,
    with_condition,
)


@dataclass(frozen=True)
class PortedGraph:
    """Graph with designated pendant ports, normalised on construction.

    After construction the edge at ``v_in`` has id 1 and leaves ``v_in``, the
    edge at ``v_out`` has id ``g`` and enters ``v_out``, and the remaining
    edges at ``w`` (the far end of edge ``g``) leave ``w`` whenever that is
    possible.  ``edge_map[k - 1]`` is the caller's id of new edge ``k``.
    """

    graph: MetricGraph
    v_in: int
    v_out: int
    edge_map: tuple[int, ...] = field(init=False, default=())

    def __post_init__(self):
        graph = validate_graph(self.graph)
        v_in, v_out = self.v_in, self.v_out
        graph.vertex(v_in)
        graph.vertex(v_out)
        if v_in == v_out:
            raise PortNotPendant("v_in and v_out must differ")
        for v in (v_in, v_out):
            if graph.degrees[v] != 1:
                raise PortNotPendant(f"port {v} has degree {graph.degrees[v]}, expected 1")
        (e_in, _), = graph.endpoints(v_in)
        (e_out, _), = graph.endpoints(v_out)
        g = graph.g
        if e_in == e_out and g != 1:
            raise PortNotPendant("ports share an edge but the graph has other edges")

        order = [e_in] + [e.id for e in graph.edges if e.id not in (e_in, e_out)]
        if e_out != e_in:
            order.append(e_out)
        new_id = {old: k for k, old in enumerate(order, start=1)}
        edges = [replace(e, id=new_id[e.id]) for e in graph.edges]
        graph = validate_graph(MetricGraph(graph.vertices, tuple(edges)))

        if graph.edge(1).tail != v_in:
            graph = reverse_edge(graph, 1)
        if graph.edge(g).head != v_out:
            graph = reverse_edge(graph, g)
        if g > 1:
            w = graph.edge(g).tail
            if graph.vertex(w).condition.kind is not ConditionKind.GENERALIZED_NEUMANN:
                raise GraphValidationError(f"vertex {w} next to v_out must carry the 'internal' condition")
            for e in graph.edges:
                if e.id not in (1, g) and e.head == w and e.tail != w:
                    graph = reverse_edge(graph, e.id)

        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "edge_map", tuple(order))

    @property
    def g(self) -> int:
        return self.graph.g

    @cached_property
    def out_variants(self) -> dict[str, MetricGraph]:
        """The graph with Dirichlet (``"d"``) or Neumann (``"n"``) imposed at ``v_out``."""
        return {
            "d": with_condition(self.graph, self.v_out, DIRICHLET),
            "n": with_condition(self.graph, self.v_out, NEUMANN),
        }

    @property
    def w(self) -> int | None:
        return self.graph.edge(self.g).tail if self.g > 1 else None


@dataclass(frozen=True)
class TwoPortValues:
    phi_dd: float
    phi_dn: float
    phi_nd: float
    phi_nn: float
    delta: float | None = None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.phi_dd, self.phi_dn, self.phi_nd, self.phi_nn)

    def map(self, fn) -> "TwoPortValues":
        d = None if self.delta is None else fn(self.delta)
        return TwoPortValues(*(fn(x) for x in self.as_tuple()), delta=d)


def _parity(perm: Iterable[int]) -> int:
    p = list(perm)
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class _PortLayout:
    rows: tuple[int, int, int, int]  # v_in, v_out, last continuity at w, Kirchhoff at w
    b1: int
    a1: int
    bg: int
    ag: int

    def interior(self, n: int):
        drop_r = set(self.rows)
        drop_c = {self.b1, self.a1, self.bg, self.ag}
        return [i for i in range(n) if i not in drop_r], [j for j in range(n) if j not in drop_c]


def _layout(pg: PortedGraph, m: CharMatrix) -> _PortLayout:
    g = pg.g
    labels = m.row_labels
    r_in = next(i for i, lab in enumerate(labels) if lab.vertex == pg.v_in)
    r_out = next(i for i, lab in enumerate(labels) if lab.vertex == pg.v_out)
    w = pg.w
    r_c = next(i for i, lab in enumerate(labels) if lab.vertex == w and lab.kind == "continuity" and g in lab.index)
    r_k = m.row(w, "kirchhoff")
    return _PortLayout(
        (r_in, r_out, r_c, r_k),
        column_index(g, 1, "B"),
        column_index(g, 1, "A"),
        column_index(g, g, "B"),
        column_index(g, g, "A"),
    )


def _orientation_sign(pg: PortedGraph, m: CharMatrix, in_kind: RootKind) -> float:
    """Sign turning ``det(m)`` into ``delta * (endpoint value)``."""
    n = m.entries.shape[0]
    if pg.g == 1:
        r_in = next(i for i, lab in enumerate(m.row_labels) if lab.vertex == pg.v_in)
        sign = _parity([r_in, 1 - r_in])
        return float(sign if in_kind is RootKind.DIRICHLET else -sign)
    lay = _layout(pg, m)
    rest_r, rest_c = lay.interior(n)
    free = lay.a1 if in_kind is RootKind.DIRICHLET else lay.b1
    fixed = lay.b1 if in_kind is RootKind.DIRICHLET else lay.a1
    row_sign = _parity(list(lay.rows) + rest_r)
    col_sign = _parity([fixed, lay.bg, lay.ag, free] + rest_c)
    kappa_c = m.entries[lay.rows[2], lay.bg]
    kappa_k = m.entries[lay.rows[3], lay.ag]
    return float(row_sign * col_sign * np.sign(kappa_c) * np.sign(kappa_k))


def _assemblies(pg: PortedGraph, z: float, tol: float):
    pairs = edge_pairs(pg.graph, z, tol)
    out = {}
    for out_tag, gr in pg.out_variants.items():
        for in_tag, kind in (("d", RootKind.DIRICHLET), ("n", RootKind.NEUMANN)):
            out[in_tag + out_tag] = assemble(gr, pg.v_in, kind, z, tol, pairs=pairs, normalize=False)
    return out


def _delta_from(pg: PortedGraph, m: CharMatrix) -> float:
    if pg.g <= 2:
        return 1.0
    rest_r, rest_c = _layout(pg, m).interior(m.entries.shape[0])
    return determinant(m.entries[np.ix_(rest_r, rest_c)])


def interior_determinant(pg: PortedGraph, z: float, tol: float = 1e-10, in_kind: RootKind | str = RootKind.DIRICHLET) -> float:
    """Determinant of the system left after removing the port-adjacent rows and unknowns.

    ``in_kind`` only selects which assembly the rows are taken from; the
    result does not depend on it.
    """
    in_kind = RootKind(in_kind)
    m = assemble(pg.out_variants["d"], pg.v_in, in_kind, z, tol, normalize=False)
    return _delta_from(pg, m)


def two_port(pg: PortedGraph, z: float, tol: float = 1e-10) -> TwoPortValues:
    mats = _assemblies(pg, z, tol)
    sigma_d = _orientation_sign(pg, mats["dd"], RootKind.DIRICHLET)
    sigma_n = _orientation_sign(pg, mats["nd"], RootKind.NEUMANN)
    return TwoPortValues(
        phi_dd=sigma_d * mats["dd"].det(),
        phi_dn=sigma_d * mats["dn"].det(),
        phi_nd=sigma_n * mats["nd"].det(),
        phi_nn=sigma_n * mats["nn"].det(),
        delta=_delta_from(pg, mats["dd"]),
    )


def port_cofactors(pg: PortedGraph, z: float, tol: float = 1e-10, in_kind: RootKind | str = RootKind.DIRICHLET):
    """Cramer numerators for the coefficients of the solution on the ``v_out`` edge.

    Returns ``(delta, delta * B_g, delta * A_g)`` for the solution started at
    ``v_in`` with ``(y, y') = (0, 1)`` (Dirichlet) or ``(1, 0)`` (Neumann).
    All three are entire in ``z``; no division by ``delta`` takes place.
    """
    in_kind = RootKind(in_kind)
    if pg.g == 1:
        return (1.0, 0.0, 1.0) if in_kind is RootKind.DIRICHLET else (1.0, 1.0, 0.0)
    m = assemble(pg.out_variants["d"], pg.v_in, in_kind, z, tol, normalize=False)
    e = m.entries
    lay = _layout(pg, m)
    rest_r, rest_c = lay.interior(e.shape[0])
    free = lay.a1 if in_kind is RootKind.DIRICHLET else lay.b1
    q = e[np.ix_(rest_r, rest_c)]
    rhs = -e[rest_r, free]
    delta = determinant(q)
    scaled = np.empty(len(rest_c))
    for i in range(len(rest_c)):
        qi = q.copy()
        qi[:, i] = rhs
        scaled[i] = determinant(qi)
    r_c, r_k = lay.rows[2], lay.rows[3]
    cof_b = -(e[r_c, free] * delta + e[r_c, rest_c] @ scaled) / e[r_c, lay.bg]
    cof_a = -(e[r_k, free] * delta + e[r_k, rest_c] @ scaled) / e[r_k, lay.ag]
    return delta, float(cof_b), float(cof_a)


def lagrange_defect(tp: TwoPortValues) -> float:
    """``phi_nd * phi_dn - phi_nn * phi_dd``; equals ``delta**2`` for normalised values.

    Evaluated exactly on the float inputs and rounded once, since the two
    products routinely cancel to many digits.
    """
    nd, dn, nn, dd = (Fraction(x) for x in (tp.phi_nd, tp.phi_dn, tp.phi_nn, tp.phi_dd))
    return float(nd * dn - nn * dd)


def port_transfer(tp: TwoPortValues) -> np.ndarray:
    """Transfer matrix ``(y, y')(v_in) -> (y, y')(v_out)``; needs a nonzero delta."""
    if not tp.delta:
        raise ZeroDivisionError("transfer matrix undefined where delta vanishes")
    return np.array([[tp.phi_nd, tp.phi_dd], [tp.phi_nn, tp.phi_dn]]) / tp.delta
