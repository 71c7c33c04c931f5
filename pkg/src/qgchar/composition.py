"""Series and parallel composition of two-port characteristic functions.

All formulas act on normalised :class:`TwoPortValues` (see ``twoport``) and
reproduce the characteristic functions of the joined graph up to one nonzero
constant factor per function.  The ``join_*`` helpers build the joined graph
itself so the formulas can be checked against direct assembly.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .assembly import RootKind, phi
from .errors import DeltaZero, MNotAtLeastTwo
from .graph import DIRICHLET, GENERALIZED_NEUMANN, MetricGraph, Vertex, validate_graph, with_condition
from .twoport import PortedGraph, TwoPortValues, two_port

# ---------------------------------------------------------------------------
# series connection: v_out of the first graph glued to v_in of the second
# ---------------------------------------------------------------------------


def series_compose(tp1: TwoPortValues, tp2: TwoPortValues) -> TwoPortValues:
    """Two-port functions of the series connection.

    Equivalent to multiplying the port transfer matrices
    ``[[nd, dd], [nn, dn]]`` of the second and first graph.  No composed
    interior determinant is produced.
    """
    dd1, dn1, nd1, nn1 = tp1.as_tuple()
    dd2, dn2, nd2, nn2 = tp2.as_tuple()
    return TwoPortValues(
        phi_dd=dn1 * dd2 + dd1 * nd2,
        phi_dn=dn1 * dn2 + dd1 * nn2,
        phi_nd=nn1 * dd2 + nd1 * nd2,
        phi_nn=nn1 * dn2 + nd1 * nn2,
    )


def series_dn_alternative(tp1: TwoPortValues, tp2: TwoPortValues) -> float:
    """The competing Dirichlet-Neumann candidate ``dn1 * dd2 + dd1 * nn2``.

    Kept only so the two readings can be compared against direct assembly;
    it does not reproduce the joined graph.
    """
    return tp1.phi_dn * tp2.phi_dd + tp1.phi_dd * tp2.phi_nn


def series_lagrange_check(tp1: TwoPortValues, tp2: TwoPortValues) -> tuple[float, float]:
    """Defect of the composition and product of the defects.

    The defect is a difference of two products that can exceed it by ten
    orders of magnitude at negative ``z``, so both sides are evaluated in
    exact rational arithmetic on the given floats before rounding once.
    """
    e1, e2 = tp1.map(Fraction), tp2.map(Fraction)
    lhs = _exact_defect(series_compose(e1, e2))
    rhs = _exact_defect(e1) * _exact_defect(e2)
    return float(lhs), float(rhs)


def _exact_defect(tp: TwoPortValues) -> Fraction:
    return tp.phi_nd * tp.phi_dn - tp.phi_nn * tp.phi_dd


# ---------------------------------------------------------------------------
# parallel connection: both port pairs glued
# ---------------------------------------------------------------------------


def parallel_dirichlet_family(tp1: TwoPortValues, tp2: TwoPortValues) -> tuple[float, float, float]:
    """``(phi_dd, phi_dn, phi_nd)`` of the parallel connection."""
    dd = tp1.phi_dd * tp2.phi_dd
    dn = tp1.phi_dn * tp2.phi_dd + tp1.phi_dd * tp2.phi_dn
    nd = tp1.phi_nd * tp2.phi_dd + tp1.phi_dd * tp2.phi_nd
    return dd, dn, nd


def _deltas(*tps: TwoPortValues) -> list[float]:
    out = []
    for tp in tps:
        if tp.delta is None:
            raise ValueError("two-port values lack the interior determinant")
        out.append(tp.delta)
    return out


def parallel_D(tp1: TwoPortValues, tp2: TwoPortValues, z: float | None = None) -> float:
    """Port-system determinant with endpoint data ``phi / delta``.

    Raises DeltaZero when either interior determinant vanishes; use
    :func:`parallel_phi_NN` there.
    """
    d1, d2 = _deltas(tp1, tp2)
    if d1 == 0.0 or d2 == 0.0:
        raise DeltaZero(math.nan if z is None else z)
    a = tp1.phi_dd / d1 + tp2.phi_dd / d2
    b = tp1.phi_nn / d1 + tp2.phi_nn / d2
    c = tp1.phi_dn / d1 - tp2.phi_dn / d2
    d = tp1.phi_nd / d1 - tp2.phi_nd / d2
    res = a * b - c * d
    if not math.isfinite(res):
        raise DeltaZero(math.nan if z is None else z)
    return res


def parallel_phi_NN(tp1: TwoPortValues, tp2: TwoPortValues) -> float:
    """``delta1 * delta2 * D`` without dividing by either delta.

    The self terms ``(dd_j nn_j - nd_j dn_j) / delta_j`` collapse to
    ``-delta_j`` because the Lagrange defect of a normalised two-port equals
    ``delta_j**2``; what remains is the cross sum minus ``2 delta1 delta2``.
    """
    d1, d2 = _deltas(tp1, tp2)
    cross = tp1.phi_dd * tp2.phi_nn + tp1.phi_nn * tp2.phi_dd + tp1.phi_nd * tp2.phi_dn + tp1.phi_dn * tp2.phi_nd
    return cross - 2.0 * d1 * d2


def parallel_phi_NN_expanded(tp1: TwoPortValues, tp2: TwoPortValues) -> float:
    """Same quantity with the self terms divided out literally (needs nonzero deltas)."""
    d1, d2 = _deltas(tp1, tp2)
    if d1 == 0.0 or d2 == 0.0:
        raise DeltaZero(math.nan)
    self1 = (tp1.phi_dd * tp1.phi_nn - tp1.phi_nd * tp1.phi_dn) / d1 * d2
    self2 = (tp2.phi_dd * tp2.phi_nn - tp2.phi_nd * tp2.phi_dn) / d2 * d1
    cross = tp1.phi_nn * tp2.phi_dd + tp2.phi_nn * tp1.phi_dd + tp1.phi_nd * tp2.phi_dn + tp2.phi_nd * tp1.phi_dn
    return self1 + cross + self2


def port_system_matrix(tps: Sequence[TwoPortValues]) -> np.ndarray:
    """Matrix of the glued-port system for ``m`` parallel subgraphs.

    Unknowns are the multipliers ``(R_1..R_m, Q_1..Q_m)`` of the ``y`` and
    ``u`` solutions of each subgraph.  Rows: continuity at the joint inlet,
    Kirchhoff at the inlet, continuity at the outlet, Kirchhoff at the outlet.
    """
    m = len(tps)
    if m < 2:
        raise MNotAtLeastTwo(f"need at least two subgraphs, got {m}")
    deltas = _deltas(*tps)
    mat = np.zeros((2 * m, 2 * m))
    r = 0
    for j in range(1, m):
        mat[r, m] = 1.0
        mat[r, m + j] = -1.0
        r += 1
    mat[r, :m] = 1.0
    r += 1
    for j in range(1, m):
        mat[r, 0] = tps[0].phi_dd / deltas[0]
        mat[r, m] = tps[0].phi_nd / deltas[0]
        mat[r, j] = -tps[j].phi_dd / deltas[j]
        mat[r, m + j] = -tps[j].phi_nd / deltas[j]
        r += 1
    for j, tp in enumerate(tps):
        mat[r, j] = tp.phi_dn / deltas[j]
        mat[r, m + j] = tp.phi_nn / deltas[j]
    return mat


def port_system_phi_NN(tps: Sequence[TwoPortValues]) -> float:
    """``prod(delta_j) * det(port_system_matrix)``, sign-aligned with :func:`parallel_m_phi_NN`.

    Divides by every delta, so it is only usable away from their zeros.
    """
    deltas = _deltas(*tps)
    if any(d == 0.0 for d in deltas):
        raise DeltaZero(math.nan)
    m = len(tps)
    sign = 1.0 if m % 2 else -1.0
    return sign * math.prod(deltas) * float(np.linalg.det(port_system_matrix(tps)))


def parallel_m_terms(tps: Sequence[TwoPortValues]) -> list[float]:
    """Summands of :func:`parallel_m_phi_NN`, exposed for cancellation estimates."""
    m = len(tps)
    if m < 2:
        raise MNotAtLeastTwo(f"need at least two subgraphs, got {m}")
    deltas = _deltas(*tps)
    dd = [tp.phi_dd for tp in tps]

    def prod_except(*skip):
        return math.prod(dd[i] for i in range(m) if i not in skip)

    terms = [tp.phi_nn * prod_except(j) for j, tp in enumerate(tps)]
    for j, k in itertools.combinations(range(m), 2):
        a, b = tps[j], tps[k]
        rest = prod_except(j, k)
        terms += [a.phi_nd * b.phi_dn * rest, b.phi_nd * a.phi_dn * rest, -2.0 * deltas[j] * deltas[k] * rest]
    return terms


def parallel_m_phi_NN(tps: Sequence[TwoPortValues]) -> float:
    """Neumann-Neumann function of ``m`` parallel subgraphs, denominators cleared.

    Expanding ``prod(delta_j) * det(port_system_matrix)`` and using the
    defect identity ``nd_j dn_j - dd_j nn_j = delta_j**2`` gives

        sum_j nn_j prod_{i!=j} dd_i
        + sum_{j<k} (nd_j dn_k + nd_k dn_j - 2 delta_j delta_k) prod_{i!=j,k} dd_i

    which stays finite at zeros of the deltas.  For ``m = 2`` the terms are
    those of :func:`parallel_phi_NN`.
    """
    return math.fsum(parallel_m_terms(tps))


# ---------------------------------------------------------------------------
# joined graphs (the direct-assembly oracle)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JoinedGraph:
    """A glued graph with the bookkeeping needed to compare against formulas.

    ``vertex_maps[j]`` maps vertex ids of the j-th (normalised) subgraph to
    ids in ``graph``; the j-th subgraph's edge ``k`` becomes ``edge_offsets[j] + k``.
    """

    graph: MetricGraph
    mode: str
    v_in: int
    v_out: int
    cut: int | None
    vertex_maps: tuple[dict[int, int], ...]
    edge_offsets: tuple[int, ...]

    def ported(self) -> PortedGraph:
        if self.mode != "series":
            raise ValueError("only a series connection keeps pendant ports")
        return PortedGraph(self.graph, self.v_in, self.v_out)

    def phi(self, in_kind: RootKind | str, out_kind: RootKind | str, z: float, tol: float = 1e-10) -> float:
        """Direct characteristic function with the given conditions at the joined ports.

        For a parallel connection the ports are interior vertices, so the
        conditions are the generalized Neumann / generalized Dirichlet ones.
        """
        out_kind = RootKind(out_kind)
        cond = DIRICHLET if out_kind is RootKind.DIRICHLET else GENERALIZED_NEUMANN
        if self.mode == "series":
            from .graph import NEUMANN

            cond = DIRICHLET if out_kind is RootKind.DIRICHLET else NEUMANN
        gr = with_condition(self.graph, self.v_out, cond)
        return phi(gr, self.v_in, in_kind, z, tol)


def _relabel(pgs: Sequence[PortedGraph], merge) -> tuple[list[Vertex], list, list[dict[int, int]], list[int]]:
    """Copy subgraphs side by side; ``merge(j, vid)`` returns a shared new id or None."""
    verts: dict[int, Vertex] = {}
    edges = []
    maps: list[dict[int, int]] = []
    offsets: list[int] = []
    next_id = 1
    shared: dict[object, int] = {}
    offset = 0
    for j, pg in enumerate(pgs):
        vmap: dict[int, int] = {}
        for v in pg.graph.vertices:
            key = merge(j, v.id)
            if key is not None:
                if key not in shared:
                    shared[key] = next_id
                    verts[next_id] = Vertex(next_id, GENERALIZED_NEUMANN)
                    next_id += 1
                vmap[v.id] = shared[key]
            else:
                vmap[v.id] = next_id
                verts[next_id] = replace(v, id=next_id)
                next_id += 1
        for e in pg.graph.edges:
            edges.append(replace(e, id=e.id + offset, tail=vmap[e.tail], head=vmap[e.head]))
        maps.append(vmap)
        offsets.append(offset)
        offset += pg.g
    return list(verts.values()), edges, maps, offsets


def join_series(pg1: PortedGraph, pg2: PortedGraph) -> JoinedGraph:
    """Identify ``v_out`` of the first graph with ``v_in`` of the second."""

    def merge(j, vid):
        if (j == 0 and vid == pg1.v_out) or (j == 1 and vid == pg2.v_in):
            return "cut"
        return None

    verts, edges, maps, offsets = _relabel((pg1, pg2), merge)
    graph = validate_graph(MetricGraph(tuple(verts), tuple(edges)))
    return JoinedGraph(
        graph, "series", maps[0][pg1.v_in], maps[1][pg2.v_out], maps[0][pg1.v_out], tuple(maps), tuple(offsets)
    )


def join_parallel(*pgs: PortedGraph) -> JoinedGraph:
    """Identify all inlets with each other and all outlets with each other."""
    if len(pgs) < 2:
        raise MNotAtLeastTwo(f"need at least two subgraphs, got {len(pgs)}")

    def merge(j, vid):
        if vid == pgs[j].v_in:
            return "in"
        if vid == pgs[j].v_out:
            return "out"
        return None

    verts, edges, maps, offsets = _relabel(pgs, merge)
    graph = validate_graph(MetricGraph(tuple(verts), tuple(edges)))
    return JoinedGraph(
        graph, "parallel", maps[0][pgs[0].v_in], maps[0][pgs[0].v_out], None, tuple(maps), tuple(offsets)
    )


def direct_two_port(joined: JoinedGraph, z: float, tol: float = 1e-10) -> TwoPortValues:
    """Four characteristic functions of the joined graph by direct assembly."""
    if joined.mode == "series":
        return two_port(joined.ported(), z, tol)
    vals = {
        i + o: joined.phi(i, o, z, tol)
        for i in ("dirichlet", "neumann")
        for o in ("dirichlet", "neumann")
    }
    return TwoPortValues(
        phi_dd=vals["dirichletdirichlet"],
        phi_dn=vals["dirichletneumann"],
        phi_nd=vals["neumanndirichlet"],
        phi_nn=vals["neumannneumann"],
    )
