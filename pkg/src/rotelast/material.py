"""Closed-form constitutive quantities derived from the elastic moduli."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .energy import ElasticModuli

BOUNDARY_TOL = 1e-12


class MaterialClass(str, enum.Enum):
    ORDINARY = "ordinary"
    AUXETIC = "auxetic"
    OTHER = "other"


class SingularParameterError(ValueError):
    """Moduli for which Poisson's ratio and Young's modulus are undefined."""


@dataclass(frozen=True)
class LameParameters:
    lam: float
    mu: float

    @property
    def alpha(self) -> float:
        return self.lam + 2.0 * self.mu

    @property
    def beta(self) -> float:
        return self.mu


@dataclass(frozen=True)
class MaterialReport:
    lam: float
    mu: float
    sigma: float
    youngs_modulus: float
    v_t: float
    v_l: float
    nu: float
    material_class: MaterialClass
    boundary_flag: bool

    def to_json_dict(self) -> dict:
        d = asdict(self)
        return {
            "lambda": d["lam"],
            "mu": d["mu"],
            "sigma": d["sigma"],
            "youngs_modulus": d["youngs_modulus"],
            "v_t": d["v_t"],
            "v_l": d["v_l"],
            "nu": d["nu"],
            "class": self.material_class.value,
            "boundary_flag": self.boundary_flag,
        }


def _exact(m: ElasticModuli) -> tuple[Fraction, Fraction, Fraction]:
    return Fraction(m.c1), Fraction(m.c2), Fraction(m.c3)


def _lame_of(c1, c2, c3):
    return 4 * (c1 / 3 - c2 - c3 / 3), 2 * (c2 + c3)


def lame(m: ElasticModuli) -> LameParameters:
    """Lame constants matching the linearised rotational model to linear elasticity."""
    lam, mu = _lame_of(*_exact(m))
    return LameParameters(float(lam), float(mu))


def _sigma_youngs_from_lame(lam, mu):
    return lam / (2 * (lam + mu)), mu * (3 * lam + 2 * mu) / (lam + mu)


def _sigma_youngs_from_moduli(c1, c2, c3):
    den = 2 * c1 - 3 * c2 + c3
    return (c1 - 3 * c2 - c3) / den, 12 * (c1 - 2 * c2) * (c2 + c3) / den


# Both routes run in exact rational arithmetic on the (binary) input values:
# in floating point the Lame route loses up to ~1e-9 relative accuracy through
# cancellation when c3 dominates, which would mask a genuine formula mismatch.


def poisson_youngs_lame(m: ElasticModuli) -> tuple[float, float]:
    sigma, E = _sigma_youngs_from_lame(*_lame_of(*_exact(m)))
    return float(sigma), float(E)


def poisson_youngs_moduli(m: ElasticModuli) -> tuple[float, float]:
    sigma, E = _sigma_youngs_from_moduli(*_exact(m))
    return float(sigma), float(E)


def classify(m: ElasticModuli) -> tuple[MaterialClass, bool]:
    """Return the class and whether the moduli sit on a class boundary."""
    ordinary_edge = 3.0 * m.c2 + m.c3
    auxetic_edge = 2.0 * m.c2
    scale = max(m.c1, ordinary_edge)
    on_edge = (
        abs(m.c1 - ordinary_edge) <= BOUNDARY_TOL * scale
        or abs(m.c1 - auxetic_edge) <= BOUNDARY_TOL * scale
    )
    if on_edge:
        return MaterialClass.OTHER, True
    if m.c1 > ordinary_edge:
        return MaterialClass.ORDINARY, False
    if auxetic_edge < m.c1 < ordinary_edge:
        return MaterialClass.AUXETIC, False
    return MaterialClass.OTHER, False


def wave_speeds(m: ElasticModuli) -> tuple[float, float, float]:
    """Transversal speed, longitudinal speed and their ratio."""
    v_t = math.sqrt((m.c2 + m.c3) / m.rho)
    v_l = math.sqrt((2.0 * m.c1 + 4.0 * m.c3) / (3.0 * m.rho))
    nu = math.sqrt(1.5 * (m.c2 + m.c3) / (m.c1 + 2.0 * m.c3))
    return v_t, v_l, nu


def derived_properties(m: ElasticModuli) -> MaterialReport:
    c1, c2, c3 = _exact(m)
    den = 2 * c1 - 3 * c2 + c3
    if abs(den) <= BOUNDARY_TOL * max(c1, c2, c3):
        raise SingularParameterError(f"2 c1 - 3 c2 + c3 = {float(den)!r} vanishes")
    lam, mu = _lame_of(c1, c2, c3)
    sigma_l, E_l = _sigma_youngs_from_lame(lam, mu)
    sigma_c, E_c = _sigma_youngs_from_moduli(c1, c2, c3)
    if sigma_l != sigma_c or E_l != E_c:
        raise ArithmeticError(
            f"Lame and moduli routes disagree: sigma {sigma_l} vs {sigma_c}, E {E_l} vs {E_c}"
        )
    v_t, v_l, nu = wave_speeds(m)
    cls, edge = classify(m)
    return MaterialReport(float(lam), float(mu), float(sigma_c), float(E_c), v_t, v_l, nu, cls, edge)
