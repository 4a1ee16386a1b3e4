"""Contortion, strain matrix, irreducible pieces and the torsion formulation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, spatial_jacobian

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0

_SWAP_IK = (0, 1, 2, 5, 4, 3)  # transpose the first and third tensor slots


def contortion_array(O: np.ndarray, grid) -> np.ndarray:
    """``K_ijk = O_im d_j O_km``, antisymmetrised in (i, k)."""
    dO = spatial_jacobian(O, grid)  # dO[..., j, k, m] = d_j O_km
    K = np.einsum("...im,...jkm->...ijk", O, dO)
    return 0.5 * (K - K.transpose(_SWAP_IK))


def raw_contortion_array(O: np.ndarray, dO: np.ndarray) -> np.ndarray:
    """``O_im d_j O_km`` from supplied partials ``dO[..., j, k, m]``, not antisymmetrised."""
    return np.einsum("...im,...jkm->...ijk", O, dO)


def strain_array(K: np.ndarray) -> np.ndarray:
    """``A_mn = eps_mjl K_jnl``."""
    return np.einsum("mjl,...jnl->...mn", LEVI_CIVITA, K)


def split_array(A: np.ndarray):
    """Trace, skew and trace-free symmetric parts of a stack of 3x3 matrices."""
    tr = np.trace(A, axis1=-2, axis2=-1)
    A1 = (tr / 3.0)[..., None, None] * np.eye(3)
    At = np.swapaxes(A, -1, -2)
    A2 = 0.5 * (A - At)
    A3 = 0.5 * (A + At) - A1
    return A1, A2, A3


def frobenius_sq(M: np.ndarray) -> np.ndarray:
    return np.einsum("...ab,...ab->...", M, M)


def contortion(O: Field) -> Field:
    if O.kind != "matrix":
        raise ValueError("contortion expects a rotation (matrix) field")
    return Field(O.grid, contortion_array(O.data, O.grid))


def strain_matrix(K: Field) -> Field:
    if K.kind != "tensor3":
        raise ValueError("strain_matrix expects a rank-3 tensor field")
    return Field(K.grid, strain_array(K.data))


@dataclass(frozen=True)
class StrainBundle:
    A: Field
    A1: Field
    A2: Field
    A3: Field

    def norms_sq(self) -> tuple[Field, Field, Field]:
        """Pointwise ``|A^(i)|^2`` for the three pieces."""
        return tuple(Field(p.grid, frobenius_sq(p.data)) for p in (self.A1, self.A2, self.A3))


def decompose(A: Field) -> StrainBundle:
    if A.kind != "matrix":
        raise ValueError("decompose expects a matrix field")
    A1, A2, A3 = split_array(A.data)
    g = A.grid
    return StrainBundle(A, Field(g, A1), Field(g, A2), Field(g, A3))


def strain_bundle(O: Field) -> StrainBundle:
    return decompose(strain_matrix(contortion(O)))


# -- torsion -----------------------------------------------------------------


def torsion(K: Field) -> Field:
    """``T_jkl = K_jkl - K_jlk``."""
    return K.with_data(K.data - np.swapaxes(K.data, -1, -2))


# Candidate ways of turning T into a 3x3 matrix.  Each entry is
# (label, einsum subscripts contracting eps with T, scalar prefactor).
TORSION_CONTRACTIONS = (
    ("eps_mjl T_jnl", "mjl,...jnl->...mn", 1.0),
    ("eps_mjl T_njl", "mjl,...njl->...mn", 1.0),
    ("eps_mjl T_jln", "mjl,...jln->...mn", 1.0),
    ("eps_njl T_mjl", "njl,...mjl->...mn", 1.0),
    ("1/2 eps_mjl T_njl", "mjl,...njl->...mn", 0.5),
    ("1/2 eps_njl T_mjl", "njl,...mjl->...mn", 0.5),
)

TARGET_RATIOS = (-1.0, -0.5, 0.5)


@dataclass
class TorsionReport:
    """Outcome of matching the torsion pieces against the strain pieces.

    ``ratios[label]`` holds, per piece, the least-squares ratio
    ``<T_i, A_i> / <A_i, A_i>`` and ``spread[label]`` the largest pointwise
    deviation ``|T_i - ratio * A_i|`` relative to ``max |A_i|``.
    """

    ratios: dict = field(default_factory=dict)
    spread: dict = field(default_factory=dict)
    winner: str | None = None
    tol: float = 1e-8

    @property
    def matched(self) -> bool:
        return self.winner is not None

    def summary(self) -> str:
        lines = []
        for label, r in self.ratios.items():
            mark = "*" if label == self.winner else " "
            lines.append(
                f"{mark} {label:<20s} ratios=({r[0]:+.6f}, {r[1]:+.6f}, {r[2]:+.6f}) "
                f"spread={max(self.spread[label]):.2e}"
            )
        if self.winner is None:
            lines.append("convention mismatch: no contraction reproduces (-1, -1/2, +1/2)")
        return "\n".join(lines)


def torsion_equivalence_report(O: Field, tol: float = 1e-8) -> TorsionReport:
    """Find the eps-contraction of T whose pieces are (-1, -1/2, 1/2) times (A1, A2, A3)."""
    K = contortion(O)
    T = torsion(K).data
    pieces_A = split_array(strain_array(K.data))
    report = TorsionReport(tol=tol)
    for label, subscripts, prefactor in TORSION_CONTRACTIONS:
        B = prefactor * np.einsum(subscripts, LEVI_CIVITA, T)
        pieces_B = split_array(B)
        ratios, spreads = [], []
        for PA, PB, target in zip(pieces_A, pieces_B, TARGET_RATIOS):
            scale = float(np.max(np.abs(PA)))
            if scale == 0.0:
                # vacuous: both must vanish
                ratios.append(target if float(np.max(np.abs(PB))) == 0.0 else np.inf)
                spreads.append(0.0 if float(np.max(np.abs(PB))) == 0.0 else np.inf)
                continue
            ratio = float(np.sum(PA * PB) / np.sum(PA * PA))
            ratios.append(ratio)
            spreads.append(float(np.max(np.abs(PB - ratio * PA))) / scale)
        report.ratios[label] = tuple(ratios)
        report.spread[label] = tuple(spreads)
        if report.winner is None and all(
            abs(r - t) <= tol and s <= tol for r, t, s in zip(ratios, TARGET_RATIOS, spreads)
        ):
            report.winner = label
    return report
