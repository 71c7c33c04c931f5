"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 bad input, 3 failed verification.
Data goes to standard output as CSV, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .assembly import phi
from .composition import parallel_dirichlet_family, parallel_m_phi_NN, parallel_phi_NN, series_compose
from .document import GraphDocument, dump_graph_document, parse_graph_document
from .errors import QGraphError
from .spectrum import ScanOptions, default_grid_points, find_roots, weyl_gap
from .twoport import PortedGraph, two_port
from .verify import IDENTITIES, verify_identity

log = logging.getLogger("qgchar")

EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class InputError(Exception):
    """Problem with the files or values the user supplied."""


def parse_z_range(text: str, need_count: bool = True) -> tuple[float, float, int | None]:
    """``A:B:N`` (N inclusive samples) or, when ``need_count`` is false, ``A:B``."""
    parts = text.split(":")
    if len(parts) not in ((3,) if need_count else (2, 3)):
        form = "A:B:N" if need_count else "A:B or A:B:N"
        raise argparse.ArgumentTypeError(f"z-range must look like {form}, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read z-range {text!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo or (n is not None and n < 1):
        raise argparse.ArgumentTypeError(f"z-range {text!r} needs finite A <= B and N >= 1")
    if n is not None and n > 1 and hi == lo:
        raise argparse.ArgumentTypeError(f"z-range {text!r}: several samples need A < B")
    return lo, hi, n


def _grid(zr) -> np.ndarray:
    lo, hi, n = zr
    return np.linspace(lo, hi, n)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _write_csv(header: Sequence[str], rows) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([r if isinstance(r, str) else _fmt(r) for r in row])


def _load(path: str) -> GraphDocument:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_graph_document(data)
    except QGraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _ported(doc: GraphDocument, path: str) -> PortedGraph:
    if doc.ports is None:
        raise InputError(f"{path}: document has no 'ports' entry")
    try:
        return PortedGraph(doc.graph, *doc.ports)
    except QGraphError as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None


def _dump(args, path: str, doc: GraphDocument, pg: PortedGraph | None = None) -> None:
    if not args.dump_normalized:
        return
    out = Path(args.dump_normalized)
    out.mkdir(parents=True, exist_ok=True)
    graph, ports = (pg.graph, (pg.v_in, pg.v_out)) if pg is not None else (doc.graph, doc.ports)
    (out / f"{Path(path).stem}.normalized.json").write_text(dump_graph_document(graph, ports), newline="\n")


def _cmd_eval(args) -> int:
    doc = _load(args.graph)
    _dump(args, args.graph, doc)
    rows = [(z, phi(doc.graph, args.root, args.kind, z, args.tol)) for z in _grid(args.z_range)]
    _write_csv(("z", "phi"), rows)
    return 0


def _cmd_spectrum(args) -> int:
    doc = _load(args.graph)
    _dump(args, args.graph, doc)
    lo, hi, n = args.z_range
    if n is None:
        n = args.grid_points or default_grid_points(doc.graph.total_length, lo, hi)
    opts = ScanOptions(lo, hi, max(n, 2), args.tol_z, args.tol_value)
    roots = find_roots(lambda z: phi(doc.graph, args.root, args.kind, z, args.tol), opts)
    if hi > 0:
        gap = weyl_gap(doc.graph, roots, hi)
        if abs(gap) > len(doc.graph.vertices) + 2:
            log.warning("root count differs from the Weyl estimate by %+.1f; roots may be missing", gap)
    _write_csv(("z", "multiplicity_flag", "residual"), [(r.z, r.multiplicity_flag.value, r.residual) for r in roots])
    return 0


def _cmd_two_port(args) -> int:
    doc = _load(args.graph)
    pg = _ported(doc, args.graph)
    _dump(args, args.graph, doc, pg)
    rows = []
    for z in _grid(args.z_range):
        tp = two_port(pg, z, args.tol)
        rows.append((z, *tp.as_tuple(), tp.delta))
    _write_csv(("z", "phi_dd", "phi_dn", "phi_nd", "phi_nn", "delta"), rows)
    return 0


def _load_ported(args) -> list[PortedGraph]:
    pgs = []
    for path in args.graph:
        doc = _load(path)
        pg = _ported(doc, path)
        _dump(args, path, doc, pg)
        pgs.append(pg)
    return pgs


def _cmd_compose(args) -> int:
    if len(args.graph) < 2:
        raise InputError("compose needs at least two --graph documents")
    pgs = _load_ported(args)
    zs = _grid(args.z_range)
    rows = []
    if args.mode == "series":
        header = ("z", "phi_dd", "phi_dn", "phi_nd", "phi_nn")
        for z in zs:
            acc = two_port(pgs[0], z, args.tol)
            for pg in pgs[1:]:
                acc = series_compose(acc, two_port(pg, z, args.tol))
            rows.append((z, *acc.as_tuple()))
    elif len(pgs) == 2:
        header = ("z", "phi_dd", "phi_dn", "phi_nd", "phi_nn")
        for z in zs:
            t1, t2 = (two_port(pg, z, args.tol) for pg in pgs)
            rows.append((z, *parallel_dirichlet_family(t1, t2), parallel_phi_NN(t1, t2)))
    else:
        header = ("z", "phi_nn")
        rows = [(z, parallel_m_phi_NN([two_port(pg, z, args.tol) for pg in pgs])) for z in zs]
    _write_csv(header, rows)
    return 0


def _cmd_verify(args) -> int:
    pgs = _load_ported(args)
    report = verify_identity(
        args.identity,
        pgs,
        _grid(args.z_range),
        rtol=args.rtol,
        tol=args.tol,
        sources=args.graph,
        inject_sign_error=args.inject_sign_error,
    )
    sys.stdout.write(report.render())
    return 0 if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="integration tolerance for sampled potentials")
    common.add_argument("--dump-normalized", metavar="DIR", help="write each input graph, normalised, to DIR")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="qgchar", description="Characteristic functions of Sturm-Liouville problems on metric graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def z_range(need_count=True):
        return lambda s: parse_z_range(s, need_count)

    e = sub.add_parser("eval", parents=[common], help="characteristic function on a z-grid")
    e.add_argument("--graph", required=True)
    e.add_argument("--root", type=int, required=True)
    e.add_argument("--kind", choices=("neumann", "dirichlet"), required=True)
    e.add_argument("--z-range", type=z_range(), required=True, metavar="A:B:N")
    e.set_defaults(run=_cmd_eval)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues in a z-interval")
    s.add_argument("--graph", required=True)
    s.add_argument("--root", type=int, required=True)
    s.add_argument("--kind", choices=("neumann", "dirichlet"), required=True)
    s.add_argument("--z-range", type=z_range(False), required=True, metavar="A:B[:N]", help="N sets the scan grid")
    s.add_argument("--tol-z", type=float, default=1e-12)
    s.add_argument("--tol-value", type=float, default=1e-8)
    s.add_argument("--grid-points", type=int)
    s.set_defaults(run=_cmd_spectrum)

    t = sub.add_parser("two-port", parents=[common], help="the four port functions and the interior determinant")
    t.add_argument("--graph", required=True)
    t.add_argument("--z-range", type=z_range(), required=True, metavar="A:B:N")
    t.set_defaults(run=_cmd_two_port)

    c = sub.add_parser("compose", parents=[common], help="composed port functions of series or parallel connections")
    c.add_argument("--mode", choices=("series", "parallel"), required=True)
    c.add_argument("--graph", action="append", required=True)
    c.add_argument("--z-range", type=z_range(), required=True, metavar="A:B:N")
    c.set_defaults(run=_cmd_compose)

    v = sub.add_parser("verify", parents=[common], help="check a composition identity against direct assembly")
    v.add_argument("--identity", choices=IDENTITIES, required=True)
    v.add_argument("--graph", action="append", required=True)
    v.add_argument("--z-range", type=z_range(), required=True, metavar="A:B:N")
    v.add_argument("--rtol", type=float, default=1e-7, help="allowed deviation of the ratio from its median")
    v.add_argument("--inject-sign-error", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(run=_cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.run(args)
    except (InputError, QGraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
