"""Leapfrog simulation of single-axis rotational waves.

Under the single-axis ansatz ``u = (0, 0, phi)`` the nonlinear field equations
collapse to linear wave equations for ``phi``:

* transversal waves ``phi(x, y, t)`` with speed ``sqrt((c2 + c3) / rho)``,
* longitudinal waves ``phi(z, t)`` with speed ``sqrt((2 c1 + 4 c3) / (3 rho))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import so3
from .energy import ElasticModuli, kinetic_variational_term, variational_derivative
from .grid import Field, GridSpec, second_diff, single_axis_field
from .material import wave_speeds
from .radial import bessel_j0

CFL_LIMIT = 0.5


class WaveMode(str, enum.Enum):
    TRANSVERSAL_2D = "transversal"
    LONGITUDINAL_1D = "longitudinal"


class CFLViolation(ValueError):
    def __init__(self, courant: float, suggested_dt: float):
        super().__init__(
            f"Courant number {courant:.4f} exceeds {CFL_LIMIT}; use dt <= {suggested_dt:.6g}"
        )
        self.courant = courant
        self.suggested_dt = suggested_dt


class MeasurementWindowError(RuntimeError):
    """The tracked packet left the region where its position is unambiguous."""


@dataclass(frozen=True)
class GaussianPulse:
    """``amplitude * exp(-(s - center)^2 / (2 width^2))`` along the propagation axis, at rest."""

    center: float
    width: float
    amplitude: float = 1.0


@dataclass(frozen=True)
class PlaneMode:
    """Travelling wave ``amplitude * sin(k.x - v |k| t)``; ``wavevector`` in box-mode units."""

    wavevector: tuple[int, ...]
    amplitude: float = 1.0


@dataclass(frozen=True)
class RadialHalfTurn:
    """Standing radial mode ``v0 J0(k r)`` about the grid centre, at rest."""

    k: float = 1.0
    v0: float = math.pi


@dataclass(frozen=True)
class ProfileInitial:
    """Arbitrary initial angle and angular velocity samples."""

    phi: np.ndarray
    phi_dot: np.ndarray | None = None


InitialCondition = Union[GaussianPulse, PlaneMode, RadialHalfTurn, ProfileInitial]


@dataclass(frozen=True)
class WaveConfig:
    moduli: ElasticModuli
    grid: GridSpec
    dt: float
    steps: int
    mode: WaveMode
    initial: InitialCondition
    save_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", WaveMode(self.mode))
        if self.steps < 1 or self.save_every < 1:
            raise ValueError("steps and save_every must be positive")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        dims = self.grid.dims
        if self.mode is WaveMode.TRANSVERSAL_2D and not (dims[2] == 1 and dims[0] > 1 and dims[1] > 1):
            raise ValueError(f"transversal waves need an (nx, ny, 1) grid, got {dims}")
        if self.mode is WaveMode.LONGITUDINAL_1D and not (dims[0] == dims[1] == 1 and dims[2] > 1):
            raise ValueError(f"longitudinal waves need a (1, 1, nz) grid, got {dims}")

    @property
    def speed(self) -> float:
        v_t, v_l, _ = wave_speeds(self.moduli)
        return v_t if self.mode is WaveMode.TRANSVERSAL_2D else v_l

    @property
    def stiffness(self) -> float:
        """Coefficient of ``|grad phi|^2`` in the energy density (``rho v^2 * 2``)."""
        m = self.moduli
        if self.mode is WaveMode.TRANSVERSAL_2D:
            return 2.0 * (m.c2 + m.c3)
        return 4.0 * (m.c1 + 2.0 * m.c3) / 3.0

    @property
    def propagation_axis(self) -> int:
        return 0 if self.mode is WaveMode.TRANSVERSAL_2D else 2

    @property
    def courant(self) -> float:
        return self.speed * self.dt / self.grid.h

    def check_cfl(self) -> None:
        if self.courant > CFL_LIMIT * (1.0 + 1e-12):
            raise CFLViolation(self.courant, CFL_LIMIT * self.grid.h / self.speed)


@dataclass
class WaveTrajectory:
    snapshots: list
    times: list
    config: WaveConfig
    energy_series: list = field(default_factory=list)

    @property
    def relative_energy_drift(self) -> float:
        e = np.asarray(self.energy_series)
        return float(np.max(np.abs(e - e[0])) / abs(e[0])) if e[0] != 0 else float(np.max(np.abs(e)))


def _wrapped_offset(s: np.ndarray, center: float, length: float, periodic: bool) -> np.ndarray:
    d = s - center
    if periodic:
        d = (d + 0.5 * length) % length - 0.5 * length
    return d


def initial_state(config: WaveConfig) -> tuple[np.ndarray, np.ndarray]:
    """Initial angle and angular velocity sampled on the configuration grid."""
    g = config.grid
    X, Y, Z = g.coords()
    init = config.initial
    ax = config.propagation_axis
    s = (X, Y, Z)[ax]
    if isinstance(init, GaussianPulse):
        d = _wrapped_offset(s, init.center, g.length(ax), g.periodic)
        phi = init.amplitude * np.exp(-0.5 * (d / init.width) ** 2)
        phi_dot = np.zeros_like(phi)
    elif isinstance(init, PlaneMode):
        if not g.periodic:
            raise ValueError("plane modes need a periodic grid")
        k = np.zeros(3)
        for a, ka in zip(g.active_axes, init.wavevector):
            k[a] = 2.0 * np.pi * ka / g.length(a)
        arg = k[0] * X + k[1] * Y + k[2] * Z
        phi = init.amplitude * np.sin(arg)
        phi_dot = -init.amplitude * config.speed * np.linalg.norm(k) * np.cos(arg)
    elif isinstance(init, RadialHalfTurn):
        cx = 0.5 * g.length(0)
        cy = 0.5 * g.length(1)
        r = np.hypot(X - cx, Y - cy)
        phi = init.v0 * bessel_j0(init.k * r)
        phi_dot = np.zeros_like(phi)
    elif isinstance(init, ProfileInitial):
        phi = np.broadcast_to(np.asarray(init.phi, dtype=float), g.dims).copy()
        phi_dot = (
            np.zeros_like(phi)
            if init.phi_dot is None
            else np.broadcast_to(np.asarray(init.phi_dot, dtype=float), g.dims).copy()
        )
    else:
        raise TypeError(f"unsupported initial condition {init!r}")
    mask = g.boundary_mask()
    phi[mask] = 0.0
    phi_dot[mask] = 0.0
    return phi, phi_dot


def _laplacian(phi: np.ndarray, grid: GridSpec, mask: np.ndarray) -> np.ndarray:
    lap = sum(second_diff(phi, a, grid) for a in grid.active_axes)
    lap[mask] = 0.0
    return lap


def _energy(phi_now, phi_next, lap_now, config: WaveConfig) -> float:
    """Leapfrog invariant: kinetic at the half step plus the staggered potential.

    ``2 rho |(phi^{n+1} - phi^n)/dt|^2 - kappa <phi^{n+1}, Lap phi^n>`` with
    ``kappa`` the stiffness; it is conserved to rounding on periodic and
    homogeneous-Dirichlet grids.
    """
    rho = config.moduli.rho
    vel = (phi_next - phi_now) / config.dt
    cv = config.grid.cell_volume
    return float(2.0 * rho * np.sum(vel * vel) - config.stiffness * np.sum(phi_next * lap_now)) * cv


def simulate(config: WaveConfig) -> WaveTrajectory:
    config.check_cfl()
    g = config.grid
    mask = g.boundary_mask()
    c2dt2 = (config.speed * config.dt) ** 2
    phi_prev, phi_dot = initial_state(config)
    lap = _laplacian(phi_prev, g, mask)
    phi = phi_prev + config.dt * phi_dot + 0.5 * c2dt2 * lap
    phi[mask] = 0.0

    snapshots, times, energies = [], [], []

    def save(step, now, nxt, lap_now):
        snapshots.append(Field(g, now))
        times.append(step * config.dt)
        energies.append(_energy(now, nxt, lap_now, config))

    save(0, phi_prev, phi, lap)
    for n in range(1, config.steps + 1):
        lap = _laplacian(phi, g, mask)
        phi_next = 2.0 * phi - phi_prev + c2dt2 * lap
        phi_next[mask] = 0.0
        if n % config.save_every == 0:
            save(n, phi, phi_next, lap)
        phi_prev, phi = phi, phi_next
    return WaveTrajectory(snapshots, times, config, energies)


# -- speed measurement -------------------------------------------------------


@dataclass(frozen=True)
class SpeedMeasurement:
    speed: float
    fit_residual: float  # RMS deviation of the centroid track from the fitted line
    times: np.ndarray
    positions: np.ndarray


def _profile(snapshot: Field, axis: int) -> np.ndarray:
    other = tuple(a for a in range(3) if a != axis)
    return np.mean(snapshot.data, axis=other)


def measure_speed(traj: WaveTrajectory, origin: float | None = None) -> SpeedMeasurement:
    """Speed of the rightward packet from a least-squares fit of its centroid track.

    The packet is located in the half-domain ahead of ``origin`` (the pulse
    centre by default); its centroid is the ``phi^2``-weighted mean offset.
    Only the middle third of the saved times enters the fit.
    """
    cfg = traj.config
    g = cfg.grid
    ax = cfg.propagation_axis
    s = g.axis_coords(ax)
    L = g.length(ax)
    if origin is None:
        if isinstance(cfg.initial, GaussianPulse):
            origin = cfg.initial.center
        else:
            origin = float(s[np.argmax(np.abs(_profile(traj.snapshots[0], ax)))])
    d = _wrapped_offset(s, origin, L, g.periodic)
    n = len(traj.snapshots)
    lo, hi = n // 3, max(n // 3 + 2, (2 * n) // 3)
    times, positions = [], []
    for snap, t in zip(traj.snapshots[lo:hi], traj.times[lo:hi]):
        prof = _profile(snap, ax)
        ahead = (d > 0) & (d < 0.5 * L) if g.periodic else d > 0
        w = np.where(ahead, prof**2, 0.0)
        total = float(np.sum(w))
        if total == 0.0:
            raise MeasurementWindowError("no signal ahead of the origin")
        centroid = float(np.sum(w * d) / total)
        peak = d[np.argmax(w)]
        edge = 0.5 * L if g.periodic else float(d.max())
        spread = math.sqrt(max(float(np.sum(w * (d - centroid) ** 2) / total), 0.0))
        if peak + 3.0 * spread >= edge or centroid - 3.0 * spread <= 0.0:
            raise MeasurementWindowError(
                f"packet at offset {centroid:.4g} (spread {spread:.3g}) leaves the window (0, {edge:.4g})"
            )
        times.append(t)
        positions.append(centroid)
    times = np.asarray(times)
    positions = np.asarray(positions)
    slope, intercept = np.polyfit(times, positions, 1)
    resid = positions - (slope * times + intercept)
    return SpeedMeasurement(float(slope), float(np.sqrt(np.mean(resid**2))), times, positions)


def plane_mode_phase_speed(traj: WaveTrajectory) -> float:
    """Phase speed of a :class:`PlaneMode` run from the unwrapped Fourier phase."""
    cfg = traj.config
    init = cfg.initial
    if not isinstance(init, PlaneMode):
        raise TypeError("phase speed needs a PlaneMode trajectory")
    g = cfg.grid
    X, Y, Z = g.coords()
    k = np.zeros(3)
    for a, ka in zip(g.active_axes, init.wavevector):
        k[a] = 2.0 * np.pi * ka / g.length(a)
    basis = np.exp(-1j * (k[0] * X + k[1] * Y + k[2] * Z))
    phases = np.unwrap([np.angle(np.sum(s.data * basis)) for s in traj.snapshots])
    omega = -np.polyfit(np.asarray(traj.times), phases, 1)[0]
    return float(omega / np.linalg.norm(k))


# -- superposition -------------------------------------------------------------


@dataclass(frozen=True)
class SuperpositionResult:
    r_t: float
    r_l: float
    r_sum: float

    @property
    def ratio(self) -> float:
        base = max(self.r_t, self.r_l)
        return self.r_sum / base if base > 0 else (0.0 if self.r_sum == 0 else math.inf)


def field_equation_residual(frames: list[Field], dt: float, moduli: ElasticModuli) -> Field:
    """Nonlinear Euler-Lagrange residual of the full action at the middle frame.

    ``frames`` are three rotation-vector fields at ``t - dt``, ``t`` and
    ``t + dt``.  The residual is the potential's variational derivative plus
    the variation of ``-rho int |Od|^2``.
    """
    before, now, after = frames
    pot = variational_derivative("V1", now, moduli).data
    kin = kinetic_variational_term(
        now, Field(now.grid, so3.rot_exp(before.data)), Field(now.grid, so3.rot_exp(after.data)), dt, moduli.rho
    ).data
    return now.with_data(pot + kin)


def _l2_norm(f: Field) -> float:
    return float(np.sqrt(np.sum(f.data**2) * f.grid.cell_volume))


def superposition_residual(
    moduli: ElasticModuli,
    grid: GridSpec | None = None,
    seed: int = 0,
    amplitude: float = 1.0,
    time: float = 0.3,
    dt: float = 1e-3,
) -> SuperpositionResult:
    """Residuals of a transversal wave, a longitudinal wave and their sum.

    Each wave is an exact travelling solution of its reduced equation on a
    periodic box; ``seed`` picks the wave vectors and phases.  Residual norms
    are L2 over the box.
    """
    if grid is None:
        grid = GridSpec.cube(32)
    if not grid.periodic or len(grid.active_axes) != 3:
        raise ValueError("superposition check needs a 3D periodic grid")
    rng = np.random.default_rng(seed)
    v_t, v_l, _ = wave_speeds(moduli)
    kx, ky = rng.choice([-1, 1], size=2) * np.array([1.0, 1.0])
    kz = 1.0
    kx *= 2.0 * np.pi / grid.length(0)
    ky *= 2.0 * np.pi / grid.length(1)
    kz *= 2.0 * np.pi / grid.length(2)
    th_t, th_l = rng.uniform(0.0, 2.0 * np.pi, size=2)
    X, Y, Z = grid.coords()

    def transversal(t):
        return amplitude * np.cos(kx * X + ky * Y - v_t * math.hypot(kx, ky) * t + th_t)

    def longitudinal(t):
        return amplitude * np.cos(kz * Z - v_l * kz * t + th_l)

    def residual(profile) -> float:
        frames = [single_axis_field(Field(grid, profile(time + s))) for s in (-dt, 0.0, dt)]
        return _l2_norm(field_equation_residual(frames, dt, moduli))

    return SuperpositionResult(
        residual(transversal),
        residual(longitudinal),
        residual(lambda t: transversal(t) + longitudinal(t)),
    )
