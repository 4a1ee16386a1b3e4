"""Rotation algebra on SO(3): hat/vee duality, Rodrigues exponential and its inverse.

All functions broadcast over leading axes, so a field of rotation vectors
with shape ``(nx, ny, nz, 3)`` maps to rotations of shape ``(nx, ny, nz, 3, 3)``.
"""

from __future__ import annotations

import numpy as np

SMALL_ANGLE = 1e-4
_JACOBIAN_SERIES_ANGLE = 0.1
_LOG_SKEW_BRANCH = 0.75 * np.pi
_LOG_MAX_ANGLE = np.pi - 1e-6


class SkewToleranceError(ValueError):
    """Input to :func:`vee` has a symmetric part above tolerance."""


class BranchAmbiguityError(ValueError):
    """Rotation angle too close to pi for a unique logarithm."""


def star(u):
    """Return the skew matrix dual to ``u``, ``(u*)_ik = eps_ijk u_j``."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 3:
        raise ValueError(f"expected trailing axis of length 3, got shape {u.shape}")
    S = np.zeros(u.shape[:-1] + (3, 3))
    ux, uy, uz = u[..., 0], u[..., 1], u[..., 2]
    S[..., 0, 1] = -uz
    S[..., 0, 2] = uy
    S[..., 1, 0] = uz
    S[..., 1, 2] = -ux
    S[..., 2, 0] = -uy
    S[..., 2, 1] = ux
    return S


def vee(S, tol: float = 1e-12):
    """Inverse of :func:`star`; reads the vector off the skew part of ``S``."""
    S = np.asarray(S, dtype=float)
    if S.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing 3x3 block, got shape {S.shape}")
    sym = 0.5 * (S + np.swapaxes(S, -1, -2))
    worst = float(np.max(np.abs(sym))) if sym.size else 0.0
    if worst > tol:
        raise SkewToleranceError(f"symmetric part {worst:.3e} exceeds tolerance {tol:.1e}")
    return np.stack(
        [
            0.5 * (S[..., 2, 1] - S[..., 1, 2]),
            0.5 * (S[..., 0, 2] - S[..., 2, 0]),
            0.5 * (S[..., 1, 0] - S[..., 0, 1]),
        ],
        axis=-1,
    )


def _sinc(theta):
    return np.sinc(theta / np.pi)


def _rodrigues_coefficients(theta):
    """a = sin(t)/t and b = (1 - cos(t))/t**2, Taylor form below SMALL_ANGLE."""
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, _sinc(theta))
    # 1 - cos t = 2 sin^2(t/2) avoids cancellation
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 0.5 * _sinc(0.5 * theta) ** 2)
    return a, b


def _rodrigues_coefficient_rates(theta):
    """a'(t)/t and b'(t)/t, switching to power series for small t."""
    t2 = theta * theta
    # a'(t)/t = sum_{n>=1} (-1)^n 2n t^(2n-2) / (2n+1)!,  b'(t)/t likewise with (2n+2)!
    da_series = np.zeros_like(theta)
    db_series = np.zeros_like(theta)
    power = np.ones_like(theta)
    fact_a, fact_b = 6.0, 24.0
    for n in range(1, 8):
        sign = -1.0 if n % 2 else 1.0
        da_series = da_series + sign * 2 * n * power / fact_a
        db_series = db_series + sign * 2 * n * power / fact_b
        power = power * t2
        fact_a *= (2 * n + 2) * (2 * n + 3)
        fact_b *= (2 * n + 3) * (2 * n + 4)
    safe = np.where(theta < _JACOBIAN_SERIES_ANGLE, 1.0, theta)
    da_closed = (safe * np.cos(safe) - np.sin(safe)) / safe**3
    db_closed = (safe * np.sin(safe) - 2.0 * (1.0 - np.cos(safe))) / safe**4
    small = theta < _JACOBIAN_SERIES_ANGLE
    return np.where(small, da_series, da_closed), np.where(small, db_series, db_closed)


def rot_exp(u):
    """Rodrigues' formula ``I + a(t) u* + b(t) (u*)^2`` with ``t = |u|``."""
    u = np.asarray(u, dtype=float)
    theta = np.linalg.norm(u, axis=-1)
    a, b = _rodrigues_coefficients(theta)
    S = star(u)
    return np.eye(3) + a[..., None, None] * S + b[..., None, None] * (S @ S)


def rot_exp_jacobian(u):
    """Derivative of :func:`rot_exp` with respect to ``u``.

    Returns an array ``J`` with ``J[..., p, a, b] = d exp(u*)_ab / d u_p``.
    """
    u = np.asarray(u, dtype=float)
    theta = np.linalg.norm(u, axis=-1)
    a, b = _rodrigues_coefficients(theta)
    da, db = _rodrigues_coefficient_rates(theta)
    S = star(u)
    S2 = S @ S
    E = star(np.eye(3))  # E[p] = star(e_p)
    ES = E @ S[..., None, :, :]
    SE = S[..., None, :, :] @ E
    up = u[..., :, None, None]
    return (
        (da[..., None, None, None] * up) * S[..., None, :, :]
        + a[..., None, None, None] * E
        + (db[..., None, None, None] * up) * S2[..., None, :, :]
        + b[..., None, None, None] * (ES + SE)
    )


def rot_log(R):
    """Rotation vector ``u`` with ``rot_exp(u) == R`` and ``|u| < pi``.

    Raises :class:`BranchAmbiguityError` when the angle is within 1e-6 of pi.
    """
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing 3x3 block, got shape {R.shape}")
    w = 0.5 * np.stack(
        [R[..., 2, 1] - R[..., 1, 2], R[..., 0, 2] - R[..., 2, 0], R[..., 1, 0] - R[..., 0, 1]],
        axis=-1,
    )
    sin_t = np.linalg.norm(w, axis=-1)
    cos_t = 0.5 * (np.trace(R, axis1=-2, axis2=-1) - 1.0)
    theta = np.arctan2(sin_t, cos_t)
    if np.any(theta >= _LOG_MAX_ANGLE):
        raise BranchAmbiguityError(
            f"rotation angle {float(np.max(theta)):.9f} is within 1e-6 of pi"
        )

    # skew branch: u = w * t / sin t
    scale = np.where(theta < SMALL_ANGLE, 1.0 + theta**2 / 6.0, theta / np.where(sin_t > 0, sin_t, 1.0))
    u = w * scale[..., None]

    near_pi = theta >= _LOG_SKEW_BRANCH
    if np.any(near_pi):
        Rn = R[near_pi]
        cn = cos_t[near_pi]
        # n n^T = ((R + R^T)/2 - cos t I) / (1 - cos t)
        nn = (0.5 * (Rn + np.swapaxes(Rn, -1, -2)) - cn[:, None, None] * np.eye(3)) / (1.0 - cn)[:, None, None]
        col = np.argmax(np.diagonal(nn, axis1=-2, axis2=-1), axis=-1)
        n = nn[np.arange(len(col)), :, col]
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        sign = np.where(np.sum(n * w[near_pi], axis=-1) < 0, -1.0, 1.0)
        u[near_pi] = n * (sign * theta[near_pi])[:, None]
    return u
