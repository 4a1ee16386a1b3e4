"""Potential and kinetic energies, the curvature identity, linearisation checks
and discrete variational gradients."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import so3
from .grid import Field, GridSpec, check_same_grid, diff, diff_adjoint, divergence, curl, field_exp
from .grid import integrate, laplacian, spatial_jacobian, synthesize_smooth_field
from .strain import LEVI_CIVITA, _SWAP_IK, contortion_array, frobenius_sq, split_array, strain_array


@dataclass(frozen=True)
class ElasticModuli:
    c1: float
    c2: float
    c3: float
    rho: float = 1.0

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "rho"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def c1_hat(self) -> float:
        return self.c1 + 2.0 * self.c3

    @property
    def c2_hat(self) -> float:
        return self.c2 + self.c3

    @property
    def alpha(self) -> float:
        """Weight of ``(div u)^2`` in the linearised functional."""
        return 4.0 * self.c1_hat / 3.0

    @property
    def beta(self) -> float:
        """Weight of ``|curl u|^2`` in the linearised functional."""
        return 2.0 * self.c2_hat


@dataclass(frozen=True)
class EnergyBreakdown:
    term1: float
    term2: float
    term3: float
    kinetic: float = 0.0

    @property
    def potential(self) -> float:
        return self.term1 + self.term2 + self.term3

    @property
    def total(self) -> float:
        """Potential minus kinetic, i.e. the action density integrated in space."""
        return self.potential - self.kinetic


class Functional(str, enum.Enum):
    V1 = "V1"
    V2 = "V2"
    FULL_ACTION_POTENTIAL = "full-action-potential"


def piece_weights(functional, moduli: ElasticModuli) -> tuple[float, float, float]:
    functional = Functional(functional)
    if functional is Functional.V2:
        return (moduli.c1_hat, moduli.c2_hat, 0.0)
    return (moduli.c1, moduli.c2, moduli.c3)


def _piece_norms(O: Field) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    A = strain_array(contortion_array(O.data, O.grid))
    return tuple(frobenius_sq(p) for p in split_array(A))


def potential_v1(O: Field, moduli: ElasticModuli) -> EnergyBreakdown:
    cv = O.grid.cell_volume
    n1, n2, n3 = _piece_norms(O)
    return EnergyBreakdown(
        moduli.c1 * float(np.sum(n1)) * cv,
        moduli.c2 * float(np.sum(n2)) * cv,
        moduli.c3 * float(np.sum(n3)) * cv,
    )


def potential_v2(O: Field, moduli: ElasticModuli) -> float:
    cv = O.grid.cell_volume
    n1, n2, _ = _piece_norms(O)
    return (moduli.c1_hat * float(np.sum(n1)) + moduli.c2_hat * float(np.sum(n2))) * cv


def potential(O: Field, moduli: ElasticModuli, functional=Functional.V1) -> float:
    w = piece_weights(functional, moduli)
    cv = O.grid.cell_volume
    return sum(wi * float(np.sum(n)) for wi, n in zip(w, _piece_norms(O))) * cv


# -- curvature identity ------------------------------------------------------


@dataclass(frozen=True)
class IdentityResidual:
    """``-2|A1|^2 - |A2|^2 + |A3|^2 - 4 eps_ijk d_i A2_jk`` and its ingredients."""

    pointwise: Field
    integrated: float
    rhs: Field

    @property
    def rhs_integrated(self) -> float:
        return integrate(self.rhs)


def curl_of_skew_piece(A2: np.ndarray, grid: GridSpec) -> np.ndarray:
    """``eps_ijk d_i A2_jk`` for raw skew-piece samples."""
    dA2 = spatial_jacobian(A2, grid)  # dA2[..., i, j, k]
    return np.einsum("ijk,...ijk->...", LEVI_CIVITA, dA2)


def identity_residual(O: Field) -> IdentityResidual:
    g = O.grid
    A1, A2, A3 = split_array(strain_array(contortion_array(O.data, g)))
    rhs = 4.0 * curl_of_skew_piece(A2, g)
    r = -2.0 * frobenius_sq(A1) - frobenius_sq(A2) + frobenius_sq(A3) - rhs
    pointwise = Field(g, r)
    return IdentityResidual(pointwise, integrate(pointwise), Field(g, rhs))


# -- linearised theory -------------------------------------------------------


def linearized_v3(u: Field, alpha: float, beta: float) -> float:
    div = divergence(u).data
    rot = curl(u).data
    density = alpha * div**2 + beta * np.sum(rot**2, axis=-1)
    return float(np.sum(density)) * u.grid.cell_volume


def _grad_div(u: Field) -> np.ndarray:
    div = divergence(u).data
    return np.stack([diff(div, a, u.grid) for a in range(3)], axis=-1)


def linear_equilibrium_residual(u: Field, alpha: float, beta: float) -> Field:
    """``beta Lap u + (alpha - beta) grad div u`` with the compact Laplacian."""
    return u.with_data(beta * laplacian(u).data + (alpha - beta) * _grad_div(u))


def linear_equilibrium_residual_curl_form(u: Field, alpha: float, beta: float) -> Field:
    """``alpha grad div u - beta curl curl u``; equal to the Laplacian form up to O(h^2)."""
    return u.with_data(alpha * _grad_div(u) - beta * curl(curl(u)).data)


# -- kinetic energy ------------------------------------------------------------


def kinetic_energy(O_before: Field, O_after: Field, dt: float, rho: float) -> float:
    """``rho * int trace(Od Od^T)`` with ``Od`` the difference quotient of two frames."""
    check_same_grid(O_before, O_after)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    Od = (O_after.data - O_before.data) / dt
    return rho * float(np.sum(frobenius_sq(Od))) * O_before.grid.cell_volume


# -- linearisation orders ----------------------------------------------------


def _l2(values: np.ndarray, cell_volume: float) -> float:
    return float(np.sqrt(np.sum(values**2) * cell_volume))


def _loglog_slope(amplitudes, errors) -> float:
    x = np.log(np.asarray(amplitudes, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ExpansionReport:
    amplitudes: list
    errors: dict  # name -> list of errors per amplitude
    slopes: dict  # name -> fitted log-log slope

    def table(self) -> str:
        names = list(self.errors)
        head = "amplitude  " + "  ".join(f"{n:>12s}" for n in names)
        rows = [head]
        for i, a in enumerate(self.amplitudes):
            rows.append(f"{a:9.4g}  " + "  ".join(f"{self.errors[n][i]:12.4e}" for n in names))
        rows.append("slope      " + "  ".join(f"{self.slopes[n]:12.3f}" for n in names))
        return "\n".join(rows)


def expansion_check(
    seed: int,
    amplitudes,
    grid: GridSpec | None = None,
    modes: int = 2,
    base: Field | None = None,
    velocity: Field | None = None,
) -> ExpansionReport:
    """Measure how fast the quadratic approximations of the model lose accuracy.

    A fixed smooth field ``w`` is scaled to each amplitude ``a`` and
    ``u = a w`` is compared against its linearised counterparts.  Every error
    is the L2 norm of a pointwise discrepancy, so cubic contributions cannot
    cancel inside an integral:

    * ``A1``: ``|A1|^2 - 4/3 (div u)^2``
    * ``A2``: ``|A2|^2 - 2 |curl u|^2``
    * ``curl_A2``: ``eps_ijk d_i A2_jk - (d_m u_n d_n u_m - (div u)^2)``, the
      quadratic side differenced in its flux form ``d_m(u_n d_n u_m - u_m div u)``
    * ``kinetic``: ``|Od|^2 - 2 |ud|^2`` for ``u(t) = a (w + t v)``

    Returns the errors and the least-squares log-log slopes against ``a``.
    """
    amplitudes = [float(a) for a in amplitudes]
    if grid is None:
        grid = GridSpec.cube(16)
    if base is None:
        base = synthesize_smooth_field(grid, seed, modes, 1.0)
    if velocity is None:
        velocity = synthesize_smooth_field(grid, seed + 1, modes, 1.0)
    if not np.any(base.data):
        raise ValueError("expansion check needs a non-zero base field")
    g = base.grid
    cv = g.cell_volume
    dt = 1e-4
    errors = {"A1": [], "A2": [], "curl_A2": [], "kinetic": []}
    for a in amplitudes:
        u = base.with_data(a * base.data)
        A1, A2, _ = split_array(strain_array(contortion_array(field_exp(u).data, g)))
        du = spatial_jacobian(u.data, g)  # du[..., m, n] = d_m u_n
        div = np.trace(du, axis1=-2, axis2=-1)
        rot = curl(u).data
        e1 = frobenius_sq(A1) - 4.0 / 3.0 * div**2
        e2 = frobenius_sq(A2) - 2.0 * np.sum(rot**2, axis=-1)
        # conservative form d_m(u_n d_n u_m - u_m div u): the quadratic part of
        # eps_ijk A2_jk is exactly this flux, so no O(a^2 h^2) mismatch remains
        flux = np.einsum("...n,...nm->...m", u.data, du) - u.data * div[..., None]
        quad = sum(diff(flux[..., m], m, g) for m in range(3))
        ecurl = curl_of_skew_piece(A2, g) - quad
        u_minus = a * (base.data - 0.5 * dt * velocity.data)
        u_plus = a * (base.data + 0.5 * dt * velocity.data)
        Od = (so3.rot_exp(u_plus) - so3.rot_exp(u_minus)) / dt
        ud = (u_plus - u_minus) / dt
        ekin = frobenius_sq(Od) - 2.0 * np.sum(ud**2, axis=-1)
        for name, e in (("A1", e1), ("A2", e2), ("curl_A2", ecurl), ("kinetic", ekin)):
            errors[name].append(_l2(e, cv))
    slopes = {}
    for name, errs in errors.items():
        if min(errs) > 0 and len(amplitudes) > 1:
            slopes[name] = _loglog_slope(amplitudes, errs)
        else:
            slopes[name] = float("inf")
    return ExpansionReport(amplitudes, errors, slopes)


# -- discrete variational gradient -------------------------------------------


def _energy_of_axis(u: np.ndarray, grid: GridSpec, weights) -> float:
    A = strain_array(contortion_array(so3.rot_exp(u), grid))
    pieces = split_array(A)
    return sum(w * float(np.sum(frobenius_sq(p))) for w, p in zip(weights, pieces)) * grid.cell_volume


def discrete_energy(u: Field, moduli: ElasticModuli, functional=Functional.V1) -> float:
    """Discretised potential as a function of the rotation-vector samples."""
    return _energy_of_axis(u.data, u.grid, piece_weights(functional, moduli))


def _analytic_gradient(u: np.ndarray, grid: GridSpec, weights) -> np.ndarray:
    """Reverse-mode chain rule through rot_exp, the stencils and the projections."""
    O = so3.rot_exp(u)
    dO = spatial_jacobian(O, grid)  # [..., j, k, m]
    K = 0.5 * (
        np.einsum("...im,...jkm->...ijk", O, dO) - np.einsum("...km,...jim->...ijk", O, dO)
    )
    A = strain_array(K)
    A1, A2, A3 = split_array(A)
    w1, w2, w3 = weights
    # projections are orthogonal, so dE/dA = 2 cv sum_i w_i P_i A
    gA = 2.0 * grid.cell_volume * (w1 * A1 + w2 * A2 + w3 * A3)
    gK = np.einsum("mjl,...mn->...jnl", LEVI_CIVITA, gA)
    gKraw = 0.5 * (gK - gK.transpose(_SWAP_IK))
    gO = np.einsum("...ijk,...jkm->...im", gKraw, dO)
    gdO = np.einsum("...ijk,...im->...jkm", gKraw, O)
    for j in range(3):
        gO = gO + diff_adjoint(gdO[..., j, :, :], j, grid)
    J = so3.rot_exp_jacobian(u)  # [..., p, a, b]
    return np.einsum("...pab,...ab->...p", J, gO)


def _fd_gradient(u: np.ndarray, grid: GridSpec, weights, step: float, mask) -> np.ndarray:
    """Central differences of the scalar energy, Richardson-extrapolated over (step, 2 step)."""
    grad = np.zeros_like(u)
    work = np.array(u, dtype=float)
    for idx in zip(*np.nonzero(~mask)):
        for p in range(3):
            key = idx + (p,)
            orig = work[key]
            d = []
            for s in (step, 2.0 * step):
                work[key] = orig + s
                ep = _energy_of_axis(work, grid, weights)
                work[key] = orig - s
                em = _energy_of_axis(work, grid, weights)
                d.append((ep - em) / (2.0 * s))
            work[key] = orig
            grad[key] = (4.0 * d[0] - d[1]) / 3.0
    return grad


def discrete_variational_gradient(
    functional,
    u: Field,
    moduli: ElasticModuli,
    method: str = "analytic",
    step: float = 1e-6,
) -> Field:
    """Gradient of the discretised potential with respect to every sample of ``u``.

    ``method`` is ``"analytic"`` (adjoint chain rule, the fast path) or
    ``"finite_difference"``.  On Dirichlet grids the boundary layer is held at
    the identity and its entries are reported as zero.
    """
    if u.kind != "vector":
        raise ValueError("expected a rotation-vector field")
    weights = piece_weights(functional, moduli)
    g = u.grid
    mask = g.boundary_mask()
    if method == "analytic":
        grad = _analytic_gradient(u.data, g, weights)
    elif method == "finite_difference":
        grad = _fd_gradient(u.data, g, weights, step, mask)
    else:
        raise ValueError(f"unknown gradient method {method!r}")
    grad[mask] = 0.0
    return Field(g, grad)


def variational_derivative(functional, u: Field, moduli: ElasticModuli) -> Field:
    """Pointwise functional derivative: the discrete gradient per unit cell volume."""
    grad = discrete_variational_gradient(functional, u, moduli)
    return grad.with_data(grad.data / u.grid.cell_volume)


def kinetic_variational_term(u: Field, O_before: Field, O_after: Field, dt: float, rho: float) -> Field:
    """Variation of ``-rho int |Od|^2 dt`` with respect to ``u`` at the middle frame.

    Equals ``2 rho (dO/du)^T : Odd`` with ``Odd`` the central second difference
    of the three frames.
    """
    check_same_grid(u, O_before, O_after)
    O = so3.rot_exp(u.data)
    Odd = (O_after.data - 2.0 * O + O_before.data) / dt**2
    J = so3.rot_exp_jacobian(u.data)
    term = 2.0 * rho * np.einsum("...pab,...ab->...p", J, Odd)
    term[u.grid.boundary_mask()] = 0.0
    return u.with_data(term)
