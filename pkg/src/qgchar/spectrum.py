"""Real zeros of characteristic functions on a z-interval.

Sign changes on a uniform grid are refined by bracketing; touching zeros
(even multiplicity, no sign change) show up as local minima of ``|f|`` and
are refined separately and flagged.  The multiplicity flag is a heuristic.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .assembly import RootKind, phi
from .graph import MetricGraph

log = logging.getLogger(__name__)

POINTS_PER_SPACING = 40
MIN_GRID_POINTS = 400
# closer simple roots are reported as one touching root
_PAIR_SEPARATION = 1e-9
_BRENT_MAXITER = 200


class RefinedBy(enum.Enum):
    SIGN_CHANGE_BISECTION = "SignChangeBisection"
    MINIMUM_REFINEMENT = "MinimumRefinement"


class Multiplicity(enum.Enum):
    SIMPLE = "Simple"
    EVEN_SUSPECTED = "EvenSuspected"


@dataclass(frozen=True)
class Root:
    """A located zero.

    ``residual`` is ``|f(z)|`` divided by the largest ``|f|`` on the grid
    between the neighbouring local maxima of ``|f|``, so it is comparable
    across functions of very different size.
    """

    z: float
    refined_by: RefinedBy
    multiplicity_flag: Multiplicity
    residual: float

    @property
    def multiplicity(self) -> int:
        return 1 if self.multiplicity_flag is Multiplicity.SIMPLE else 2


@dataclass(frozen=True)
class ScanOptions:
    """Scan settings.

    A local minimum of ``|f|`` without a sign change is refined only when it
    is below ``max(sqrt(tol_value), screen)`` times the local scale; a
    touching zero sampled half a grid step away sits near ``(pi / points
    per gap)**2`` of the scale, hence the looser ``screen`` default.
    """

    z_lo: float
    z_hi: float
    grid_points: int = 2000
    tol_z: float = 1e-12
    tol_value: float = 1e-8
    screen: float = 1e-2

    def __post_init__(self):
        if not (math.isfinite(self.z_lo) and math.isfinite(self.z_hi) and self.z_lo < self.z_hi):
            raise ValueError(f"need finite z_lo < z_hi, got [{self.z_lo}, {self.z_hi}]")
        if int(self.grid_points) != self.grid_points or self.grid_points < 2:
            raise ValueError(f"grid_points must be an integer >= 2, got {self.grid_points}")
        if not (self.tol_z > 0 and self.tol_value > 0 and self.screen > 0):
            raise ValueError("tolerances must be positive")


def _local_scale(absf: np.ndarray, i: int) -> float:
    """Largest ``|f|`` on the humps either side of the cell ``[i, i + 1]``."""
    n = len(absf)
    lo = i
    while lo > 0 and absf[lo - 1] >= absf[lo]:
        lo -= 1
    hi = min(i + 1, n - 1)
    while hi < n - 1 and absf[hi + 1] >= absf[hi]:
        hi += 1
    s = max(float(absf[lo]), float(absf[hi]), float(absf[i]))
    return s if s > 0 else 1.0


def _bracketed_root(f, a: float, b: float, tol_z: float) -> float:
    """Brent's method on a sign-change bracket.

    Where ``f`` is dominated by rounding noise (flat high-order zeros) Brent
    can stall; the best iterate is returned and the caller's residual test
    decides whether to keep it.
    """
    z, info = brentq(
        f, float(a), float(b), xtol=tol_z, rtol=4 * np.finfo(float).eps, maxiter=_BRENT_MAXITER,
        full_output=True, disp=False,
    )
    if not info.converged:
        log.debug("bracket [%.12g, %.12g] did not converge; keeping z=%.12g", a, b, z)
    return float(z)


def _polish_touching(f, a: float, b: float, guess: float, tol_z: float) -> float:
    """Locate the extremum of ``f`` in ``[a, b]`` as a zero of its central difference."""
    h = 1e-5 * (b - a) + 1e-12 * (1 + abs(guess))

    def df(z):
        return f(z + h) - f(z - h)

    try:
        da, db = df(a), df(b)
        if da * db < 0:
            return brentq(df, a, b, xtol=tol_z)
    except (ValueError, ArithmeticError):
        pass
    return guess


def find_roots(f: Callable[[float], float], opts: ScanOptions) -> list[Root]:
    zs = np.linspace(opts.z_lo, opts.z_hi, int(opts.grid_points))
    fs = np.array([f(float(z)) for z in zs], dtype=float)
    absf = np.abs(fs)
    sgn = np.sign(fs)
    n = len(zs)
    found: list[Root] = []

    def accept(z, i, refined_by, flag):
        scale = _local_scale(absf, i)
        res = abs(f(z)) / scale
        if res <= opts.tol_value:
            found.append(Root(float(z), refined_by, flag, res))
        else:
            log.debug("discarded candidate z=%.12g with residual %.3g", z, res)

    for i in range(n):
        if fs[i] == 0.0:
            left = sgn[i - 1] if i > 0 else 0.0
            right = sgn[i + 1] if i + 1 < n else 0.0
            flag = Multiplicity.SIMPLE if left * right < 0 or i in (0, n - 1) else Multiplicity.EVEN_SUSPECTED
            by = RefinedBy.SIGN_CHANGE_BISECTION if flag is Multiplicity.SIMPLE else RefinedBy.MINIMUM_REFINEMENT
            accept(zs[i], i, by, flag)
        if i + 1 < n and sgn[i] * sgn[i + 1] < 0:
            z = _bracketed_root(f, zs[i], zs[i + 1], opts.tol_z)
            accept(z, i, RefinedBy.SIGN_CHANGE_BISECTION, Multiplicity.SIMPLE)

    for i in range(1, n - 1):
        if fs[i] == 0.0 or not (absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1]):
            continue
        if sgn[i - 1] != sgn[i] or sgn[i + 1] != sgn[i]:
            continue
        scale = _local_scale(absf, i)
        if absf[i] >= max(math.sqrt(opts.tol_value), opts.screen) * scale:
            continue
        a, b = float(zs[i - 1]), float(zs[i + 1])
        if absf[i] < min(absf[i - 1], absf[i + 1]):
            res = minimize_scalar(
                lambda z: abs(f(z)), bracket=(a, float(zs[i]), b), method="golden", tol=1e-12
            )
            guess = float(np.clip(res.x, a, b))
        else:
            guess = float(zs[i])
        extremum = _polish_touching(f, a, b, guess, opts.tol_z)
        split = False
        for zc in (extremum, guess):
            fz = f(zc)
            if fz != 0.0 and math.copysign(1.0, fz) != sgn[i]:
                # the grid stepped over a narrow lobe: two simple roots unless unresolvably close
                left = _bracketed_root(f, a, zc, opts.tol_z)
                right = _bracketed_root(f, zc, b, opts.tol_z)
                if right - left > _PAIR_SEPARATION * (1 + abs(zc)):
                    accept(left, i, RefinedBy.SIGN_CHANGE_BISECTION, Multiplicity.SIMPLE)
                    accept(right, i, RefinedBy.SIGN_CHANGE_BISECTION, Multiplicity.SIMPLE)
                    split = True
                break
        if split:
            continue
        z = extremum if abs(f(extremum)) <= abs(f(guess)) else guess
        accept(z, i, RefinedBy.MINIMUM_REFINEMENT, Multiplicity.EVEN_SUSPECTED)

    found.sort(key=lambda r: r.z)
    merged: list[Root] = []
    for r in found:
        if merged and abs(r.z - merged[-1].z) <= max(opts.tol_z, 1e-9 * (1 + abs(r.z))):
            if r.residual < merged[-1].residual:
                merged[-1] = r
            continue
        merged.append(r)
    return merged


def weyl_count_estimate(graph: MetricGraph, z: float) -> float:
    """Leading-order number of eigenvalues below ``z``: ``L sqrt(z) / pi``."""
    if not z > 0:
        raise ValueError(f"z must be positive, got {z!r}")
    return graph.total_length * math.sqrt(z) / math.pi


def weyl_gap(graph: MetricGraph, roots: list[Root], z: float) -> float:
    """Found count (with multiplicity) minus the Weyl estimate below ``z``."""
    count = sum(r.multiplicity for r in roots if r.z < z)
    return count - weyl_count_estimate(graph, z)


def default_grid_points(total_length: float, z_lo: float, z_hi: float) -> int:
    """``POINTS_PER_SPACING`` points per smallest expected eigenvalue gap.

    The expected gap ``2 pi sqrt(z) / L`` (inverse of the Weyl density) is
    smallest at the low end; it is evaluated no lower than the first
    Neumann gap ``(pi / L)**2``.
    """
    z_ref = max(z_lo, (math.pi / total_length) ** 2)
    gap = 2 * math.pi * math.sqrt(z_ref) / total_length
    return max(MIN_GRID_POINTS, int(math.ceil(POINTS_PER_SPACING * (z_hi - z_lo) / gap)) + 1)


def default_z_floor(total_length: float) -> float:
    return -25.0 / total_length**2


def graph_spectrum(
    graph: MetricGraph,
    root: int,
    kind: RootKind | str,
    z_hi: float,
    *,
    z_lo: float | None = None,
    grid_points: int | None = None,
    tol_z: float = 1e-12,
    tol_value: float = 1e-8,
    tol: float = 1e-10,
) -> list[Root]:
    """Eigenvalues of ``graph`` below ``z_hi`` with generalized ``kind`` at ``root``.

    Logs a warning when the count strays from the Weyl estimate by more than
    the number of vertices plus two.
    """
    length = graph.total_length
    if z_lo is None:
        z_lo = default_z_floor(length)
    if grid_points is None:
        grid_points = default_grid_points(length, z_lo, z_hi)
    opts = ScanOptions(z_lo, z_hi, grid_points, tol_z, tol_value)
    roots = find_roots(lambda z: phi(graph, root, kind, z, tol), opts)
    if z_hi > 0:
        gap = weyl_gap(graph, roots, z_hi)
        if abs(gap) > len(graph.vertices) + 2:
            log.warning("found %+.1f eigenvalues relative to the Weyl estimate below z=%g; roots may be missing", gap, z_hi)
    return roots
