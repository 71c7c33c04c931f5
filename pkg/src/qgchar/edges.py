"""Fundamental solutions of ``-y'' + q(x) y = z y`` on a single edge.

``s`` solves with ``s(0) = 0, s'(0) = 1`` and ``c`` with ``c(0) = 1, c'(0) = 0``.
Everything is parametrised by ``z = lambda**2`` so that no complex arithmetic
is needed; ``z < 0`` corresponds to imaginary ``lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidPotential, ToleranceNotMet
from .graph import (
    ConstantPotential,
    PiecewiseConstantPotential,
    PotentialSpec,
    SampledPotential,
    ZeroPotential,
)

SERIES_THRESHOLD = 1e-6
SERIES_TERMS = 6
MAX_HYPERBOLIC_ARG = 700.0
_MIN_RTOL = 1e-13  # DOP853 refuses anything below ~100 eps

_S_COEF = [(-1) ** k / math.factorial(2 * k + 1) for k in range(SERIES_TERMS)]
_C_COEF = [(-1) ** k / math.factorial(2 * k) for k in range(SERIES_TERMS)]


@dataclass(frozen=True)
class FundamentalPair:
    """Values ``s(l), s'(l), c(l), c'(l)`` at the far end of an edge."""

    s: float
    s_prime: float
    c: float
    c_prime: float

    def transfer(self) -> np.ndarray:
        """Matrix sending ``(y(0), y'(0))`` to ``(y(l), y'(l))``."""
        return np.array([[self.c, self.s], [self.c_prime, self.s_prime]])

    @classmethod
    def from_transfer(cls, m: np.ndarray) -> "FundamentalPair":
        return cls(s=float(m[0, 1]), s_prime=float(m[1, 1]), c=float(m[0, 0]), c_prime=float(m[1, 0]))


def wronskian(pair: FundamentalPair) -> float:
    return pair.c * pair.s_prime - pair.c_prime * pair.s


def _constant_transfer(mu2: float, length: float) -> np.ndarray:
    """Transfer matrix for ``y'' = -mu2 * y`` across ``length``."""
    x = mu2 * length * length
    if abs(x) < SERIES_THRESHOLD:
        s = length * math.fsum(a * x**k for k, a in enumerate(_S_COEF))
        c = math.fsum(a * x**k for k, a in enumerate(_C_COEF))
    elif mu2 > 0:
        mu = math.sqrt(mu2)
        c = math.cos(mu * length)
        s = math.sin(mu * length) / mu
    else:
        kappa = math.sqrt(-mu2)
        arg = kappa * length
        if arg > MAX_HYPERBOLIC_ARG:
            raise ToleranceNotMet(f"sqrt(-z+q)*l = {arg:.1f} exceeds {MAX_HYPERBOLIC_ARG}; values overflow")
        c = math.cosh(arg)
        s = math.sinh(arg) / kappa
    # constant potential: s' = c and c' = -mu2 * s
    return np.array([[c, s], [-mu2 * s, c]])


def _sampled_transfer(pot: SampledPotential, length: float, z: float, tol: float) -> np.ndarray:
    grid = np.asarray(pot.grid)
    vals = np.asarray(pot.values)

    def rhs(x, y):
        k = np.interp(x, grid, vals) - z
        return (y[1], k * y[0], y[3], k * y[2])

    # integrate cell by cell so the step control never straddles a kink of q
    step_tol = max(tol * 1e-2, _MIN_RTOL)
    y = np.array([1.0, 0.0, 0.0, 1.0])
    for a, b in zip(grid[:-1], grid[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=step_tol, atol=step_tol)
        if not sol.success:
            raise ToleranceNotMet(f"integrator failed on [{a}, {b}]: {sol.message}")
        y = sol.y[:, -1]
    c, cp, s, sp = (float(v) for v in y)
    w = c * sp - cp * s
    if abs(w - 1.0) > 100 * tol * max(1.0, abs(c * sp) + abs(cp * s)):
        raise ToleranceNotMet(f"Wronskian drifted to {w!r} at z={z}")
    return np.array([[c, s], [cp, sp]])


@lru_cache(maxsize=1 << 16)
def _cached_pair(potential: PotentialSpec, length: float, z: float, tol: float) -> FundamentalPair:
    if isinstance(potential, ZeroPotential):
        m = _constant_transfer(z, length)
    elif isinstance(potential, ConstantPotential):
        m = _constant_transfer(z - potential.q0, length)
    elif isinstance(potential, PiecewiseConstantPotential):
        m = np.eye(2)
        for h, q in potential.cells(length):
            if h > 0:
                m = _constant_transfer(z - q, h) @ m
    elif isinstance(potential, SampledPotential):
        m = _sampled_transfer(potential, length, z, tol)
    else:
        raise InvalidPotential(f"unsupported potential {potential!r}")
    return FundamentalPair.from_transfer(m)


def fundamental_pair(potential: PotentialSpec, length: float, z: float, tol: float = 1e-10) -> FundamentalPair:
    """Evaluate ``(s, s', c, c')`` at ``x = length`` for spectral value ``z``."""
    if not length > 0:
        raise InvalidPotential(f"edge length must be positive, got {length!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z!r}")
    potential.check(length)
    return _cached_pair(potential, float(length), float(z), float(tol))
