"""Characteristic functions, two-port composition and spectra of quantum graphs."""

__version__ = "0.1.0"

from .assembly import CharMatrix, RootKind, assemble, phi
from .composition import (
    JoinedGraph,
    direct_two_port,
    join_parallel,
    join_series,
    parallel_D,
    parallel_dirichlet_family,
    parallel_m_phi_NN,
    parallel_phi_NN,
    port_system_matrix,
    series_compose,
    series_lagrange_check,
)
from .document import GraphDocument, dump_graph_document, parse_graph_document
from .edges import FundamentalPair, fundamental_pair, wronskian
from .errors import (
    DeltaZero,
    DocumentError,
    DocumentSyntaxError,
    GraphValidationError,
    MNotAtLeastTwo,
    PortNotPendant,
    QGraphError,
    SchemaError,
    ToleranceNotMet,
)
from .graph import (
    DIRICHLET,
    GENERALIZED_NEUMANN,
    NEUMANN,
    ZERO,
    ConditionKind,
    ConstantPotential,
    Edge,
    MetricGraph,
    PiecewiseConstantPotential,
    SampledPotential,
    ValidatedGraph,
    Vertex,
    VertexCondition,
    ZeroPotential,
    reverse_edge,
    robin,
    validate_graph,
    with_condition,
)
from .spectrum import Multiplicity, RefinedBy, Root, ScanOptions, find_roots, graph_spectrum, weyl_count_estimate
from .twoport import PortedGraph, TwoPortValues, interior_determinant, lagrange_defect, two_port
