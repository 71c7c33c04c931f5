"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QGraphError(Exception):
    """Base class for every error raised by this package."""


class GraphValidationError(QGraphError, ValueError):
    pass


class Disconnected(GraphValidationError):
    pass


class NonpositiveLength(GraphValidationError):
    def __init__(self, edge: int, length: float):
        super().__init__(f"edge {edge} has non-positive length {length!r}")
        self.edge = edge


class MissingBoundaryCondition(GraphValidationError):
    def __init__(self, vertex: int, detail: str = ""):
        msg = f"vertex {vertex} lacks a valid boundary condition"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.vertex = vertex


class InteriorConditionOnPendant(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"pendant vertex {vertex} carries an interior (generalized Neumann) condition")
        self.vertex = vertex


class DuplicateId(GraphValidationError):
    pass


class UnknownEdge(QGraphError, KeyError):
    pass


class UnknownVertex(QGraphError, KeyError):
    pass


class InvalidPotential(QGraphError, ValueError):
    pass


class ToleranceNotMet(QGraphError, ArithmeticError):
    pass


class PortNotPendant(QGraphError, ValueError):
    pass


class DeltaZero(QGraphError, ZeroDivisionError):
    def __init__(self, z: float):
        super().__init__(f"interior determinant vanishes at z={z!r}")
        self.z = z


class MNotAtLeastTwo(QGraphError, ValueError):
    pass


class DocumentError(QGraphError, ValueError):
    pass


class DocumentSyntaxError(DocumentError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class SchemaError(DocumentError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path
