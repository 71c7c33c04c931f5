"""JSON graph documents: parsing with schema checks, and serialisation."""

from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema
from jsonschema.exceptions import best_match

from .errors import DocumentSyntaxError, SchemaError
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
    PotentialSpec,
    SampledPotential,
    ValidatedGraph,
    Vertex,
    VertexCondition,
    ZeroPotential,
    robin,
    validate_graph,
)

FORMAT_VERSION = 1

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM}
_ID = {"type": "integer"}


def _exact(props: dict, required: list[str]) -> dict:
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


_CONDITION = {
    "oneOf": [
        _exact({"type": {"enum": ["dirichlet", "neumann", "internal"]}}, ["type"]),
        _exact({"type": {"const": "robin"}, "beta": _NUM}, ["type", "beta"]),
    ]
}

_POTENTIAL = {
    "oneOf": [
        _exact({"type": {"const": "zero"}}, ["type"]),
        _exact({"type": {"const": "constant"}, "q": _NUM}, ["type", "q"]),
        _exact({"type": {"const": "piecewise"}, "breakpoints": _NUMS, "values": _NUMS}, ["type", "breakpoints", "values"]),
        _exact({"type": {"const": "sampled"}, "grid": _NUMS, "values": _NUMS}, ["type", "grid", "values"]),
    ]
}

SCHEMA = _exact(
    {
        "version": {"const": FORMAT_VERSION},
        "vertices": {"type": "array", "minItems": 1, "items": _exact({"id": _ID, "condition": _CONDITION}, ["id", "condition"])},
        "edges": {
            "type": "array",
            "items": _exact(
                {"id": _ID, "from": _ID, "to": _ID, "length": _NUM, "potential": _POTENTIAL},
                ["id", "from", "to", "length", "potential"],
            ),
        },
        "ports": _exact({"v_in": _ID, "v_out": _ID}, ["v_in", "v_out"]),
    },
    ["version", "vertices", "edges"],
)

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass(frozen=True)
class GraphDocument:
    graph: ValidatedGraph
    ports: tuple[int, int] | None = None


def _condition(obj: dict) -> VertexCondition:
    kind = obj["type"]
    if kind == "robin":
        return robin(obj["beta"])
    return {"dirichlet": DIRICHLET, "neumann": NEUMANN, "internal": GENERALIZED_NEUMANN}[kind]


def _potential(obj: dict) -> PotentialSpec:
    kind = obj["type"]
    if kind == "zero":
        return ZERO
    if kind == "constant":
        return ConstantPotential(float(obj["q"]))
    if kind == "piecewise":
        return PiecewiseConstantPotential(tuple(obj["breakpoints"]), tuple(obj["values"]))
    return SampledPotential(tuple(obj["grid"]), tuple(obj["values"]))


def parse_graph_document(text: bytes | str) -> GraphDocument:
    """Parse and validate a document; raises DocumentSyntaxError, SchemaError or a GraphValidationError."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(1, f"not UTF-8: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.lineno, exc.msg) from None
    err = best_match(_VALIDATOR.iter_errors(raw))
    if err is not None:
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SchemaError(path, err.message)

    vertices = tuple(Vertex(int(v["id"]), _condition(v["condition"])) for v in raw["vertices"])
    edges = tuple(
        Edge(int(e["id"]), int(e["from"]), int(e["to"]), float(e["length"]), _potential(e["potential"])) for e in raw["edges"]
    )
    graph = validate_graph(MetricGraph(vertices, edges))
    ports = raw.get("ports")
    return GraphDocument(graph, None if ports is None else (int(ports["v_in"]), int(ports["v_out"])))


def _dump_condition(c: VertexCondition) -> dict:
    if c.kind is ConditionKind.ROBIN:
        return {"type": "robin", "beta": c.beta}
    return {"type": c.kind.value}


def _dump_potential(p: PotentialSpec) -> dict:
    if isinstance(p, ZeroPotential):
        return {"type": "zero"}
    if isinstance(p, ConstantPotential):
        return {"type": "constant", "q": p.q0}
    if isinstance(p, PiecewiseConstantPotential):
        return {"type": "piecewise", "breakpoints": list(p.breakpoints), "values": list(p.values)}
    return {"type": "sampled", "grid": list(p.grid), "values": list(p.values)}


def dump_graph_document(graph: MetricGraph, ports: tuple[int, int] | None = None) -> str:
    doc: dict = {
        "version": FORMAT_VERSION,
        "vertices": [{"id": v.id, "condition": _dump_condition(v.condition)} for v in graph.vertices],
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "length": e.length, "potential": _dump_potential(e.potential)}
            for e in graph.edges
        ],
    }
    if ports is not None:
        doc["ports"] = {"v_in": ports[0], "v_out": ports[1]}
    return json.dumps(doc, indent=2) + "\n"
