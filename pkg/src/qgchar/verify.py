"""Identity checks: composed formulas against direct assembly of the joined graph.

Every identity holds up to one nonzero constant, so each check divides the
direct value by the composed one over a z-grid and measures how far the
ratios stray from their median.  Grid points where the composed value is
tiny compared to the sum of the magnitudes of its terms (a near zero, where
the ratio is pure rounding noise) are left out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .assembly import RootKind, phi
from .composition import (
    direct_two_port,
    join_parallel,
    join_series,
    parallel_dirichlet_family,
    parallel_m_phi_NN,
    parallel_m_terms,
    parallel_phi_NN,
    series_compose,
    series_dn_alternative,
    series_lagrange_check,
)
from .errors import MNotAtLeastTwo
from .twoport import PortedGraph, TwoPortValues, two_port

IDENTITIES = ("series-1.1", "series-3.x", "lagrange-3.5", "parallel-5.i", "parallel-theorem", "parallel-m")
MASK_REL = 1e-6
LAGRANGE_FLOOR = 1e-12


@dataclass(frozen=True)
class Check:
    label: str
    ratio: float
    max_rel_dev: float
    used: int
    total: int
    passed: bool
    informational: bool = False

    def line(self) -> str:
        verdict = "info" if self.informational else ("PASS" if self.passed else "FAIL")
        return (
            f"{self.label:<24} ratio={self.ratio:.15e} max_rel_dev={self.max_rel_dev:.3e} "
            f"points={self.used}/{self.total} {verdict}"
        )


@dataclass(frozen=True)
class VerifyReport:
    identity: str
    sources: tuple[str, ...]
    z_lo: float
    z_hi: float
    points: int
    rtol: float
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def render(self) -> str:
        lines = [
            f"identity: {self.identity}",
            f"graphs: {', '.join(self.sources)}",
            f"grid: {self.points} points in [{self.z_lo!r}, {self.z_hi!r}]",
            f"rtol: {self.rtol!r}",
        ]
        lines += [c.line() for c in self.checks]
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def ratio_check(
    label: str,
    direct: np.ndarray,
    composed: np.ndarray,
    keep: np.ndarray,
    rtol: float,
    informational: bool = False,
) -> Check:
    """Spread of ``direct / composed`` around its median over the kept points."""
    direct, composed = np.asarray(direct, float), np.asarray(composed, float)
    keep = np.asarray(keep, bool) & (composed != 0) & np.isfinite(direct) & np.isfinite(composed)
    n = int(keep.sum())
    if n == 0:
        return Check(label, float("nan"), float("inf"), 0, len(direct), False, informational)
    r = direct[keep] / composed[keep]
    med = float(np.median(r))
    if med == 0.0:
        return Check(label, 0.0, float("inf"), n, len(direct), False, informational)
    dev = float(np.max(np.abs(r / med - 1.0)))
    return Check(label, med, dev, n, len(direct), dev <= rtol, informational)


def _well_conditioned(value: np.ndarray, magnitude: np.ndarray) -> np.ndarray:
    return np.abs(value) >= MASK_REL * np.abs(magnitude)


def _two_ports(pgs: Sequence[PortedGraph], zs, tol) -> list[list[TwoPortValues]]:
    return [[two_port(pg, z, tol) for z in zs] for pg in pgs]


def _corrupt(tp: TwoPortValues) -> TwoPortValues:
    return TwoPortValues(tp.phi_dd, -tp.phi_dn, tp.phi_nd, tp.phi_nn, tp.delta)


def _need(pgs, n, identity):
    if len(pgs) != n:
        raise MNotAtLeastTwo(f"{identity} takes exactly {n} graphs, got {len(pgs)}")


def _series_11(pgs, zs, tol, rtol, inject):
    _need(pgs, 2, "series-1.1")
    g1, g2 = pgs
    joined = join_series(g1, g2)
    checks = []
    for kind in (RootKind.NEUMANN, RootKind.DIRICHLET):
        direct, comp, mag = [], [], []
        for z in zs:
            n1, d1 = phi(g1.graph, g1.v_out, "neumann", z, tol), phi(g1.graph, g1.v_out, "dirichlet", z, tol)
            n2, d2 = phi(g2.graph, g2.v_in, "neumann", z, tol), phi(g2.graph, g2.v_in, "dirichlet", z, tol)
            if inject:
                n2 = -n2
            if kind is RootKind.NEUMANN:
                comp.append(n1 * d2 + d1 * n2)
                mag.append(abs(n1 * d2) + abs(d1 * n2))
            else:
                comp.append(d1 * d2)
                mag.append(abs(d1 * d2))
            direct.append(phi(joined.graph, joined.cut, kind, z, tol))
        comp, mag = np.array(comp), np.array(mag)
        label = "phi_N (cut vertex)" if kind is RootKind.NEUMANN else "phi_D (cut vertex)"
        checks.append(ratio_check(label, np.array(direct), comp, _well_conditioned(comp, mag), rtol))
    return checks


def _series_3x(pgs, zs, tol, rtol, inject):
    _need(pgs, 2, "series-3.x")
    joined = join_series(*pgs)
    t1, t2 = _two_ports(pgs, zs, tol)
    if inject:
        t2 = [_corrupt(t) for t in t2]
    comp = [series_compose(a, b) for a, b in zip(t1, t2)]
    mag = [series_compose(a.map(abs), b.map(abs)) for a, b in zip(t1, t2)]
    direct = [direct_two_port(joined, z, tol) for z in zs]
    checks = []
    for name in ("phi_dd", "phi_dn", "phi_nd", "phi_nn"):
        c = np.array([getattr(x, name) for x in comp])
        m = np.array([getattr(x, name) for x in mag])
        d = np.array([getattr(x, name) for x in direct])
        checks.append(ratio_check(name, d, c, _well_conditioned(c, m), rtol))
    alt = np.array([series_dn_alternative(a, b) for a, b in zip(t1, t2)])
    alt_mag = np.array([series_dn_alternative(a.map(abs), b.map(abs)) for a, b in zip(t1, t2)])
    d = np.array([x.phi_dn for x in direct])
    checks.append(ratio_check("phi_dn alternative", d, alt, _well_conditioned(alt, alt_mag), rtol, informational=True))
    return checks


def _lagrange(pgs, zs, tol, rtol, inject):
    _need(pgs, 2, "lagrange-3.5")
    t1, t2 = _two_ports(pgs, zs, tol)
    lhs, rhs = [], []
    for a, b in zip(t1, t2):
        left, right = series_lagrange_check(a, _corrupt(b) if inject else b)
        if inject:
            right = series_lagrange_check(a, b)[1]
        lhs.append(left)
        rhs.append(right)
    lhs, rhs = np.array(lhs), np.array(rhs)
    return [ratio_check("defect lhs/rhs", lhs, rhs, np.abs(rhs) > LAGRANGE_FLOOR, rtol)]


def _parallel_5i(pgs, zs, tol, rtol, inject):
    _need(pgs, 2, "parallel-5.i")
    joined = join_parallel(*pgs)
    t1, t2 = _two_ports(pgs, zs, tol)
    if inject:
        t2 = [_corrupt(t) for t in t2]
    comp = np.array([parallel_dirichlet_family(a, b) for a, b in zip(t1, t2)])
    mag = np.array([parallel_dirichlet_family(a.map(abs), b.map(abs)) for a, b in zip(t1, t2)])
    checks = []
    ports = (("phi_dd", "dirichlet", "dirichlet"), ("phi_dn", "dirichlet", "neumann"), ("phi_nd", "neumann", "dirichlet"))
    for col, (name, in_kind, out_kind) in enumerate(ports):
        d = np.array([joined.phi(in_kind, out_kind, z, tol) for z in zs])
        checks.append(ratio_check(name, d, comp[:, col], _well_conditioned(comp[:, col], mag[:, col]), rtol))
    return checks


def _parallel_nn(pgs, zs, tol, rtol, inject, label, formula):
    joined = join_parallel(*pgs)
    tps = _two_ports(pgs, zs, tol)
    per_z = list(zip(*tps))
    if inject:
        per_z = [(*row[:-1], _corrupt(row[-1])) for row in per_z]
    comp = np.array([formula(row) for row in per_z])
    mag = np.array([sum(abs(t) for t in parallel_m_terms(row)) for row in per_z])
    d = np.array([joined.phi("neumann", "neumann", z, tol) for z in zs])
    return [ratio_check(label, d, comp, _well_conditioned(comp, mag), rtol)], per_z


def _parallel_theorem(pgs, zs, tol, rtol, inject):
    _need(pgs, 2, "parallel-theorem")
    checks, _ = _parallel_nn(pgs, zs, tol, rtol, inject, "phi_NN", lambda row: parallel_phi_NN(*row))
    return checks


def _parallel_m(pgs, zs, tol, rtol, inject):
    if len(pgs) < 2:
        raise MNotAtLeastTwo(f"parallel-m needs at least two graphs, got {len(pgs)}")
    checks, per_z = _parallel_nn(pgs, zs, tol, rtol, inject, f"phi_NN (m={len(pgs)})", parallel_m_phi_NN)
    if len(pgs) == 2:
        a = np.array([parallel_m_phi_NN(row) for row in per_z])
        b = np.array([parallel_phi_NN(*row) for row in per_z])
        mag = np.array([sum(abs(t) for t in parallel_m_terms(row)) for row in per_z])
        checks.append(ratio_check("m-way vs two-way", a, b, _well_conditioned(b, mag), rtol))
    return checks


_RUNNERS: dict[str, Callable] = {
    "series-1.1": _series_11,
    "series-3.x": _series_3x,
    "lagrange-3.5": _lagrange,
    "parallel-5.i": _parallel_5i,
    "parallel-theorem": _parallel_theorem,
    "parallel-m": _parallel_m,
}


def verify_identity(
    identity: str,
    graphs: Sequence[PortedGraph],
    zs: Sequence[float],
    *,
    rtol: float = 1e-7,
    tol: float = 1e-10,
    sources: Sequence[str] | None = None,
    inject_sign_error: bool = False,
) -> VerifyReport:
    """Run one identity check.

    ``inject_sign_error`` flips the sign of the last subgraph's out-Neumann
    value where it enters the composed formula only; a correct check must
    then fail.
    """
    if identity not in _RUNNERS:
        raise ValueError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITIES)}")
    zs = [float(z) for z in zs]
    checks = _RUNNERS[identity](list(graphs), zs, tol, rtol, inject_sign_error)
    names = tuple(sources) if sources is not None else tuple(f"graph{i + 1}" for i in range(len(graphs)))
    return VerifyReport(identity, names, min(zs), max(zs), len(zs), rtol, tuple(checks))
