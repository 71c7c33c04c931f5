import math

import pytest

from qgchar.builders import cycle, interval, path, star
from qgchar.errors import (
    Disconnected,
    DuplicateId,
    GraphValidationError,
    InteriorConditionOnPendant,
    InvalidPotential,
    MissingBoundaryCondition,
    NonpositiveLength,
    UnknownVertex,
)
from qgchar.graph import (
    DIRICHLET,
    GENERALIZED_NEUMANN,
    NEUMANN,
    ConditionKind,
    ConstantPotential,
    Edge,
    MetricGraph,
    PiecewiseConstantPotential,
    SampledPotential,
    ValidatedGraph,
    Vertex,
    normalize_root_orientation,
    reverse_edge,
    robin,
    validate_graph,
    with_condition,
)


def test_neumann_is_robin_zero():
    assert NEUMANN == robin(0.0)
    assert hash(NEUMANN) == hash(robin(0.0))
    assert robin(0.5) != NEUMANN
    assert DIRICHLET != GENERALIZED_NEUMANN


def test_robin_rejects_infinite_beta():
    with pytest.raises(ValueError):
        robin(math.inf)


def test_beta_only_on_robin():
    from qgchar.graph import VertexCondition

    with pytest.raises(ValueError):
        VertexCondition(ConditionKind.DIRICHLET, 1.0)


def test_interval_is_valid():
    g = interval(2.0, DIRICHLET, DIRICHLET)
    assert isinstance(g, ValidatedGraph)
    assert g.g == 1
    assert g.total_length == 2.0
    assert g.pendants == {1, 2}


def test_vertices_and_edges_sorted_by_id():
    g = MetricGraph((Vertex(3, NEUMANN), Vertex(1, NEUMANN), Vertex(2)), (Edge(2, 2, 3, 1.0), Edge(1, 1, 2, 1.0)))
    assert [v.id for v in g.vertices] == [1, 2, 3]
    assert [e.id for e in g.edges] == [1, 2]
    assert g.endpoints(2) == [(1, 1), (2, 0)]


class TestValidation:
    def test_nonpositive_length(self):
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 0.0),))
        with pytest.raises(NonpositiveLength):
            validate_graph(g)

    def test_nan_length(self):
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, math.nan),))
        with pytest.raises(NonpositiveLength):
            validate_graph(g)

    def test_disconnected(self):
        g = MetricGraph(
            tuple(Vertex(k, NEUMANN) for k in range(1, 5)), (Edge(1, 1, 2, 1.0), Edge(2, 3, 4, 1.0))
        )
        with pytest.raises(Disconnected):
            validate_graph(g)

    def test_generalized_neumann_on_pendant(self):
        g = MetricGraph((Vertex(1, GENERALIZED_NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 1.0),))
        with pytest.raises(InteriorConditionOnPendant):
            validate_graph(g)

    def test_robin_on_interior_vertex(self):
        g = path([1.0, 1.0])
        bad = MetricGraph(tuple(v if v.id != 2 else Vertex(2, robin(1.0)) for v in g.vertices), g.edges)
        with pytest.raises(MissingBoundaryCondition):
            validate_graph(bad)

    def test_dirichlet_on_interior_vertex_allowed(self):
        g = with_condition(path([1.0, 1.0]), 2, DIRICHLET)
        assert g.vertex(2).condition == DIRICHLET

    def test_duplicate_vertex(self):
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(1, NEUMANN)), (Edge(1, 1, 1, 1.0),))
        with pytest.raises(DuplicateId):
            validate_graph(g)

    def test_edge_ids_must_be_contiguous(self):
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(2, 1, 2, 1.0),))
        with pytest.raises(GraphValidationError):
            validate_graph(g)

    def test_unknown_vertex(self):
        g = MetricGraph((Vertex(1, NEUMANN),), (Edge(1, 1, 9, 1.0),))
        with pytest.raises(UnknownVertex):
            validate_graph(g)

    def test_bad_piecewise(self):
        pot = PiecewiseConstantPotential((0.5,), (1.0,))
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 1.0, pot),))
        with pytest.raises(InvalidPotential):
            validate_graph(g)

    def test_sampled_grid_must_span_edge(self):
        pot = SampledPotential((0.0, 0.5), (1.0, 2.0))
        g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 1.0, pot),))
        with pytest.raises(InvalidPotential):
            validate_graph(g)


def test_reverse_edge_reflects_potential():
    pot = PiecewiseConstantPotential((0.25,), (1.0, 3.0))
    g = validate_graph(MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 1.0, pot),)))
    r = reverse_edge(g, 1)
    e = r.edge(1)
    assert (e.tail, e.head) == (2, 1)
    assert e.potential == PiecewiseConstantPotential((0.75,), (3.0, 1.0))
    assert reverse_edge(r, 1) == g


def test_sampled_reflection_round_trip():
    pot = SampledPotential((0.0, 0.3, 1.0), (1.0, -2.0, 4.0))
    back = pot.reflected(1.0).reflected(1.0)
    assert back.values == pot.values
    assert back.grid == pytest.approx(pot.grid, abs=1e-15)


def test_normalize_root_orientation():
    g = star([1.0, 1.0, 1.0])
    flipped = reverse_edge(g, 2)
    n = normalize_root_orientation(flipped, 1)
    assert all(e.tail == 1 for e in n.edges)


def test_cycle_builder():
    g = cycle([1.0, 2.0, 3.0])
    assert g.degrees == {1: 2, 2: 2, 3: 2}
    assert g.pendants == frozenset()


def test_constant_potential_rejects_nan():
    g = MetricGraph((Vertex(1, NEUMANN), Vertex(2, NEUMANN)), (Edge(1, 1, 2, 1.0, ConstantPotential(math.nan)),))
    with pytest.raises(InvalidPotential):
        validate_graph(g)
