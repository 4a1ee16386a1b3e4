"""Radially symmetric standing transversal waves and the Bessel function J0."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import ElasticModuli
from .grid import Boundary, Field, GridSpec, laplacian

# the Hankel expansion bottoms out near 5e-13 at x = 12 and 1e-14 at x = 14
SERIES_LIMIT = 14.0
_SERIES_TERMS = 64
_ASYMPTOTIC_TERMS = 48

J0_FIRST_ZERO = 2.404825557695773


def _j0_series(x: np.ndarray) -> np.ndarray:
    # extended precision: at |x| = 14 the largest term is ~3e4, so doubles would
    # leave ~1e-11 of cancellation noise
    q = -(x.astype(np.longdouble) ** 2) / 4
    term = np.ones_like(q)
    total = np.ones_like(q)
    for m in range(1, _SERIES_TERMS):
        term = term * q / (m * m)
        total = total + term
    return total.astype(float)


def _j0_asymptotic(x: np.ndarray) -> np.ndarray:
    """Hankel expansion, each point truncated at its smallest term."""
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (-((2 * k - 1) ** 2)) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < prev
        prev = mag
        if k % 2 == 0:
            P = P + np.where(active, (-1) ** (k // 2) * term, 0.0)
        else:
            Q = Q + np.where(active, (-1) ** ((k - 1) // 2) * term, 0.0)
        if not np.any(active):
            break
    c, s = np.cos(x), np.sin(x)
    # cos(x - pi/4) and sin(x - pi/4) without rounding x - pi/4
    cos_chi = (c + s) / math.sqrt(2.0)
    sin_chi = (s - c) / math.sqrt(2.0)
    return np.sqrt(2.0 / (math.pi * x)) * (P * cos_chi - Q * sin_chi)


def bessel_j0(x):
    """Bessel function of the first kind of order zero."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_j0 needs finite arguments")
    ax = np.abs(x)
    out = np.empty_like(ax)
    near = ax <= SERIES_LIMIT
    if np.any(near):
        out[near] = _j0_series(ax[near])
    if np.any(~near):
        out[~near] = _j0_asymptotic(ax[~near])
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RadialMode:
    omega: float
    v0: float
    moduli: ElasticModuli

    @property
    def k(self) -> float:
        """Wavenumber from the transversal dispersion relation."""
        m = self.moduli
        return self.omega * math.sqrt(m.rho / (m.c2 + m.c3))

    @classmethod
    def from_wavenumber(cls, k: float, v0: float, moduli: ElasticModuli) -> "RadialMode":
        return cls(k * math.sqrt((moduli.c2 + moduli.c3) / moduli.rho), v0, moduli)


def radial_solution(mode: RadialMode, r):
    """``v(r) = v0 J0(k r)``, the profile regular at the origin."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    return mode.v0 * bessel_j0(mode.k * r)


def helmholtz_residual(v: Field, k: float) -> Field:
    """``Lap_h v + k^2 v`` on a planar grid."""
    if v.kind != "scalar" or v.grid.dims[2] != 1:
        raise ValueError("helmholtz_residual expects a scalar field on an (nx, ny, 1) grid")
    return v.with_data(laplacian(v).data + k * k * v.data)


def sampled_radial_field(k: float, v0: float, extent: float, points: int) -> Field:
    """``v0 J0(k r)`` on ``points x points`` nodes covering ``[-extent, extent]^2``.

    The centre of the square is a grid node whenever ``points`` is odd.
    """
    h = 2.0 * extent / (points - 1)
    grid = GridSpec((points, points, 1), h, Boundary.DIRICHLET_IDENTITY)
    X, Y, _ = grid.coords()
    r = np.hypot(X - extent, Y - extent)
    return Field(grid, v0 * bessel_j0(k * r))
