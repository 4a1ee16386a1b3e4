"""Uniform structured grids, sampled fields and second-order difference operators.

Every field stores its samples with three leading spatial axes ``(nx, ny, nz)``
followed by the component axes: ``()`` for scalars, ``(3,)`` for vectors,
``(3, 3)`` for matrices and ``(3, 3, 3)`` for rank-3 tensors.  An axis of
length one is degenerate: it carries no variation and its derivative is zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import so3

MIN_ACTIVE_POINTS = 4
AXIS_NAMES = ("x", "y", "z")

_KINDS = {(): "scalar", (3,): "vector", (3, 3): "matrix", (3, 3, 3): "tensor3"}


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET_IDENTITY = "dirichlet_identity"


class ResolutionError(ValueError):
    """Requested field content cannot be resolved on the grid."""


class GridMismatchError(ValueError):
    """Two fields live on different grids."""


@dataclass(frozen=True)
class GridSpec:
    dims: tuple[int, int, int]
    h: float
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) != 3:
            raise ValueError(f"dims must have three entries, got {self.dims!r}")
        for n in dims:
            if n < 1 or (1 < n < MIN_ACTIVE_POINTS):
                raise ValueError(
                    f"each axis needs 1 (degenerate) or >= {MIN_ACTIVE_POINTS} points, got {dims}"
                )
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"spacing must be positive, got {self.h!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @classmethod
    def cube(cls, n: int, length: float = 2 * np.pi, boundary=Boundary.PERIODIC) -> "GridSpec":
        """n^3 grid whose box edge is ``length``."""
        boundary = Boundary(boundary)
        h = length / n if boundary is Boundary.PERIODIC else length / (n - 1)
        return cls((n, n, n), h, boundary)

    @property
    def active_axes(self) -> tuple[int, ...]:
        return tuple(a for a, n in enumerate(self.dims) if n > 1)

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def cell_volume(self) -> float:
        return self.h ** len(self.active_axes)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.dims))

    def length(self, axis: int) -> float:
        n = self.dims[axis]
        if n == 1:
            return 0.0
        return n * self.h if self.periodic else (n - 1) * self.h

    def axis_coords(self, axis: int) -> np.ndarray:
        return np.arange(self.dims[axis]) * self.h

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(3)), indexing="ij"))

    def boundary_mask(self) -> np.ndarray:
        """True on the outermost layer of every active axis (Dirichlet grids only)."""
        mask = np.zeros(self.dims, dtype=bool)
        if self.periodic:
            return mask
        for a in self.active_axes:
            idx = [slice(None)] * 3
            idx[a] = 0
            mask[tuple(idx)] = True
            idx[a] = -1
            mask[tuple(idx)] = True
        return mask


@dataclass(frozen=True)
class Field:
    """Samples of a scalar, vector, matrix or rank-3 tensor field on a grid."""

    grid: GridSpec
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.shape[:3] != self.grid.dims:
            raise GridMismatchError(f"data shape {data.shape} does not match grid {self.grid.dims}")
        if data.shape[3:] not in _KINDS:
            raise ValueError(f"unsupported component shape {data.shape[3:]}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def kind(self) -> str:
        return _KINDS[self.data.shape[3:]]

    @property
    def component_shape(self) -> tuple[int, ...]:
        return self.data.shape[3:]

    @property
    def ncomponents(self) -> int:
        return int(np.prod(self.component_shape, dtype=int))

    def with_data(self, data) -> "Field":
        return Field(self.grid, data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


AxisLike = Union[int, str]


def _axis_index(axis: AxisLike) -> int:
    if isinstance(axis, str):
        if axis not in AXIS_NAMES:
            raise ValueError(f"unknown axis {axis!r}")
        return AXIS_NAMES.index(axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"unknown axis {axis!r}")
    return int(axis)


def check_same_grid(*fields: Field) -> GridSpec:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid {f.grid} differs from {grid}")
    return grid


# -- raw-array stencils ------------------------------------------------------


def diff(arr: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Second-order first derivative of raw samples along a spatial axis."""
    n = grid.dims[axis]
    if n == 1:
        return np.zeros_like(arr)
    inv2h = 0.5 / grid.h
    if grid.periodic:
        return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) * inv2h
    a = np.moveaxis(arr, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - a[:-2]) * inv2h
    out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) * inv2h
    out[-1] = (3.0 * a[-1] - 4.0 * a[-2] + a[-3]) * inv2h
    return np.moveaxis(out, 0, axis)


def diff_adjoint(arr: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Transpose of :func:`diff` under the plain Euclidean inner product."""
    n = grid.dims[axis]
    if n == 1:
        return np.zeros_like(arr)
    inv2h = 0.5 / grid.h
    if grid.periodic:
        return (np.roll(arr, 1, axis=axis) - np.roll(arr, -1, axis=axis)) * inv2h
    g = np.moveaxis(arr, axis, 0) * inv2h
    out = np.zeros_like(g)
    out[2:] += g[1:-1]
    out[:-2] -= g[1:-1]
    out[0] -= 3.0 * g[0]
    out[1] += 4.0 * g[0]
    out[2] -= g[0]
    out[-1] += 3.0 * g[-1]
    out[-2] -= 4.0 * g[-1]
    out[-3] += g[-1]
    return np.moveaxis(out, 0, axis)


def second_diff(arr: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Compact three-point second derivative (one-sided four-point on Dirichlet edges)."""
    n = grid.dims[axis]
    if n == 1:
        return np.zeros_like(arr)
    invh2 = 1.0 / grid.h**2
    if grid.periodic:
        return (np.roll(arr, -1, axis=axis) - 2.0 * arr + np.roll(arr, 1, axis=axis)) * invh2
    a = np.moveaxis(arr, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - 2.0 * a[1:-1] + a[:-2]) * invh2
    out[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) * invh2
    out[-1] = (2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]) * invh2
    return np.moveaxis(out, 0, axis)


def spectral_diff(arr: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Fourier derivative on a periodic grid; exact (to rounding) for band-limited samples.

    The unpaired Nyquist mode of an even-length axis is dropped.
    """
    if not grid.periodic:
        raise ValueError("spectral derivatives need a periodic grid")
    n = grid.dims[axis]
    if n == 1:
        return np.zeros_like(arr)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.h)
    if n % 2 == 0:
        k[n // 2] = 0.0
    shape = [1] * arr.ndim
    shape[axis] = n
    return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(arr, axis=axis), axis=axis).real


def spatial_jacobian(arr: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Stack the three partials right after the spatial axes: ``out[..., j, *comp]``."""
    return np.stack([diff(arr, a, grid) for a in range(3)], axis=3)


# -- field-level operators ---------------------------------------------------


def partial(f: Field, axis: AxisLike) -> Field:
    """Central difference along ``axis``; zero along degenerate axes."""
    return f.with_data(diff(f.data, _axis_index(axis), f.grid))


def gradient(f: Field) -> Field:
    if f.kind != "scalar":
        raise ValueError("gradient expects a scalar field")
    return Field(f.grid, np.stack([diff(f.data, a, f.grid) for a in range(3)], axis=-1))


def divergence(u: Field) -> Field:
    if u.kind != "vector":
        raise ValueError("divergence expects a vector field")
    g = u.grid
    d = u.data
    return Field(g, diff(d[..., 0], 0, g) + diff(d[..., 1], 1, g) + diff(d[..., 2], 2, g))


def curl(u: Field) -> Field:
    if u.kind != "vector":
        raise ValueError("curl expects a vector field")
    g = u.grid
    d = u.data
    dx = lambda c, a: diff(d[..., c], a, g)  # noqa: E731
    return Field(
        g,
        np.stack(
            [dx(2, 1) - dx(1, 2), dx(0, 2) - dx(2, 0), dx(1, 0) - dx(0, 1)],
            axis=-1,
        ),
    )


def laplacian(f: Field) -> Field:
    """Compact second-order Laplacian, componentwise."""
    return f.with_data(sum(second_diff(f.data, a, f.grid) for a in range(3)))


def integrate(f: Field) -> float:
    """Midpoint-rule integral of a scalar field (sum of samples times cell volume)."""
    if f.kind != "scalar":
        raise ValueError("integrate expects a scalar field")
    return float(np.sum(f.data)) * f.grid.cell_volume


def field_exp(u: Field) -> Field:
    """Pointwise Rodrigues map from rotation vectors to rotation matrices."""
    if u.kind != "vector":
        raise ValueError("field_exp expects a vector field")
    return Field(u.grid, so3.rot_exp(u.data))


def field_log(O: Field) -> Field:
    if O.kind != "matrix":
        raise ValueError("field_log expects a matrix field")
    return Field(O.grid, so3.rot_log(O.data))


def constant_field(grid: GridSpec, value) -> Field:
    value = np.asarray(value, dtype=float)
    return Field(grid, np.broadcast_to(value, grid.dims + value.shape))


def scalar_field(grid: GridSpec, fn) -> Field:
    """Sample ``fn(x, y, z)`` on the grid nodes."""
    X, Y, Z = grid.coords()
    return Field(grid, np.broadcast_to(fn(X, Y, Z), grid.dims))


def single_axis_field(phi: Field) -> Field:
    """Rotation vector ``(0, 0, phi)``: rotation about z by the angle ``phi``."""
    data = np.zeros(phi.grid.dims + (3,))
    data[..., 2] = phi.data
    return Field(phi.grid, data)


# -- band-limited random fields ---------------------------------------------


def _synthesize_on(s_axes, coefs, waves, dirichlet: bool) -> np.ndarray:
    comps = []
    for c in range(3):
        val = coefs[c]
        for k, s in zip(waves, s_axes):
            phase = np.exp(2j * np.pi * np.outer(k, s))
            val = np.tensordot(val, phase, axes=([0], [0]))
        comps.append(np.real(val))
    u = np.stack(comps, axis=-1)
    if dirichlet:
        bump = np.ones(u.shape[:-1])
        for ax, s in enumerate(s_axes):
            shape = [1] * len(s_axes)
            shape[ax] = len(s)
            bump = bump * (np.sin(np.pi * s) ** 3).reshape(shape)
        u = u * bump[..., None]
    return u


def synthesize_smooth_field(grid: GridSpec, seed: int, modes: int, amplitude: float) -> Field:
    """Deterministic band-limited random rotation-vector field.

    The field is a trigonometric polynomial of degree ``modes`` in the box
    coordinates scaled to ``[0, 1)``, so grids that cover the same box with
    different resolutions sample the same continuous function.  Dirichlet
    grids multiply it by ``prod sin^3(pi s)``, which vanishes together with
    its first two derivatives on the boundary.  The result is scaled so its
    largest Euclidean norm, measured on a fixed reference lattice, is
    ``amplitude``.
    """
    modes = int(modes)
    active = grid.active_axes
    if modes < 1:
        raise ResolutionError("need at least one Fourier mode")
    for a in active:
        if modes > grid.dims[a] / 4:
            raise ResolutionError(
                f"{modes} modes not resolvable on {grid.dims[a]} points along {AXIS_NAMES[a]}"
            )
    rng = np.random.default_rng(seed)
    waves = [np.arange(-modes, modes + 1) if a in active else np.zeros(1, dtype=int) for a in range(3)]
    kx, ky, kz = np.meshgrid(*waves, indexing="ij")
    decay = 1.0 / (1.0 + kx**2 + ky**2 + kz**2)
    decay[(kx == 0) & (ky == 0) & (kz == 0)] = 0.0
    shape = (3,) + decay.shape
    radius = rng.standard_normal(shape) * decay
    phase = rng.uniform(0.0, 2.0 * np.pi, shape)
    coefs = radius * np.exp(1j * phase)

    dirichlet = not grid.periodic

    def s_axis(n: int) -> np.ndarray:
        if n == 1:
            return np.zeros(1)
        return np.arange(n) / n if not dirichlet else np.arange(n) / (n - 1)

    n_ref = max(32, 8 * modes)
    ref = _synthesize_on([s_axis(n_ref if a in active else 1) for a in range(3)], coefs, waves, dirichlet)
    ref_max = float(np.max(np.linalg.norm(ref, axis=-1)))
    base = _synthesize_on([s_axis(grid.dims[a]) for a in range(3)], coefs, waves, dirichlet)
    if dirichlet:
        base[grid.boundary_mask()] = 0.0
    return Field(grid, base * (float(amplitude) / ref_max))
