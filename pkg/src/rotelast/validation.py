"""Self-checks of the model run by ``rotelast validate``.

Each suite returns named checks (value, limit, verdict) together with the
convergence tables it printed along the way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np

from . import so3
from .energy import (
    ElasticModuli,
    Functional,
    discrete_energy,
    discrete_variational_gradient,
    expansion_check,
    identity_residual,
    kinetic_energy,
    potential,
)
from .grid import Boundary, Field, GridSpec, field_exp, scalar_field, single_axis_field
from .grid import spectral_diff, synthesize_smooth_field
from .material import (
    MaterialClass,
    classify,
    derived_properties,
    poisson_youngs_lame,
    poisson_youngs_moduli,
    wave_speeds,
)
from .parallel import ordered_map
from .radial import J0_FIRST_ZERO, RadialMode, bessel_j0, radial_solution
from .strain import contortion_array, frobenius_sq, raw_contortion_array, split_array, strain_array
from .strain import torsion_equivalence_report
from .wavesim import (
    GaussianPulse,
    RadialHalfTurn,
    WaveConfig,
    WaveMode,
    measure_speed,
    simulate,
    superposition_residual,
)

SUITES = ("identities", "material", "waves", "radial")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: str
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<46s} {self.value:<12.4g} {self.limit}"


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def at_most(self, name, value, limit):
        self.checks.append(Check(name, float(value), f"<= {limit:g}", bool(value <= limit)))

    def at_least(self, name, value, limit):
        self.checks.append(Check(name, float(value), f">= {limit:g}", bool(value >= limit)))

    def within(self, name, value, lo, hi):
        self.checks.append(Check(name, float(value), f"in [{lo:g}, {hi:g}]", bool(lo <= value <= hi)))

    def report(self) -> str:
        out = [f"== suite {self.name} =="]
        for t in self.tables:
            out.append(t)
            out.append("")
        out.extend(c.line() for c in self.checks)
        return "\n".join(out)


# -- identities ----------------------------------------------------------------


def _random_rotation(rng) -> np.ndarray:
    return so3.rot_exp(rng.normal(size=3))


def structural_defects(seed: int, grid: GridSpec | None = None) -> dict:
    """Worst violation of each pointwise structural identity on one random field."""
    grid = grid or GridSpec.cube(12)
    rng = np.random.default_rng(seed)
    u = synthesize_smooth_field(grid, seed, 2, 1.0)
    O = so3.rot_exp(u.data)
    # exact partials: spectral derivative of u pushed through the exponential's Jacobian
    du = np.stack([spectral_diff(u.data, a, grid) for a in range(3)], axis=3)
    J = so3.rot_exp_jacobian(u.data)
    dO = np.einsum("...pab,...jp->...jab", J, du)
    K_raw = raw_contortion_array(O, dO)
    skew = np.max(np.abs(K_raw + K_raw.transpose(0, 1, 2, 5, 4, 3)))

    K = contortion_array(O, grid)
    A = strain_array(K)
    pieces = split_array(A)
    reassembly = np.max(np.abs(A - sum(pieces)))
    ortho = max(
        np.max(np.abs(np.einsum("...ab,...ab->...", pieces[a], pieces[b])))
        for a, b in ((0, 1), (0, 2), (1, 2))
    )

    Q = _random_rotation(rng)
    OQ = O @ Q
    K_rot = contortion_array(OQ, grid)
    moduli = ElasticModuli(*rng.uniform(0.5, 3.0, size=3))
    Of, OQf = Field(grid, O), Field(grid, OQ)
    inv_K = np.max(np.abs(K_rot - K))
    inv_A = np.max(np.abs(strain_array(K_rot) - A))
    v1 = potential(Of, moduli, Functional.V1)
    v2 = potential(Of, moduli, Functional.V2)
    inv_V1 = abs(potential(OQf, moduli, Functional.V1) - v1) / abs(v1)
    inv_V2 = abs(potential(OQf, moduli, Functional.V2) - v2) / abs(v2)
    u2 = synthesize_smooth_field(grid, seed + 1000, 2, 1.0)
    O2 = so3.rot_exp(u2.data)
    T = kinetic_energy(Of, Field(grid, O2), 0.1, 1.0)
    T_rot = kinetic_energy(OQf, Field(grid, O2 @ Q), 0.1, 1.0)
    return {
        "K skew (i,k)": skew,
        "A reassembly": reassembly,
        "A piece orthogonality": ortho,
        "K rigid invariance": inv_K,
        "A rigid invariance": inv_A,
        "V1 rigid invariance (rel)": inv_V1,
        "V2 rigid invariance (rel)": inv_V2,
        "kinetic rigid invariance (rel)": abs(T_rot - T) / T,
    }


def single_axis_closed_forms(grid: GridSpec):
    """Discrete and exact ``|A_i|^2`` for ``phi = sin x cos 2y + 0.5 sin(y - z) + 0.3 cos 3z``."""

    def phi(X, Y, Z):
        return np.sin(X) * np.cos(2 * Y) + 0.5 * np.sin(Y - Z) + 0.3 * np.cos(3 * Z)

    X, Y, Z = grid.coords()
    px = np.cos(X) * np.cos(2 * Y)
    py = -2.0 * np.sin(X) * np.sin(2 * Y) + 0.5 * np.cos(Y - Z)
    pz = -0.5 * np.cos(Y - Z) - 0.9 * np.sin(3 * Z)
    exact = (4.0 / 3.0 * pz**2, 2.0 * (px**2 + py**2), 2.0 * px**2 + 2.0 * py**2 + 8.0 / 3.0 * pz**2)
    O = field_exp(single_axis_field(scalar_field(grid, phi)))
    discrete = tuple(frobenius_sq(p) for p in split_array(strain_array(contortion_array(O.data, grid))))
    return discrete, exact


def _ratio_table(title, hs, rows: dict) -> tuple[str, dict]:
    names = list(rows)
    lines = [title, "      h  " + "  ".join(f"{n:>14s}" for n in names)]
    ratios = {n: [] for n in names}
    for i, h in enumerate(hs):
        cells = []
        for n in names:
            e = rows[n][i]
            r = rows[n][i - 1] / e if i > 0 else None
            if r is not None:
                ratios[n].append(r)
            cells.append(f"{e:9.3e}" + (f" x{r:4.2f}" if r is not None else "      "))
        lines.append(f"{h:7.4f}  " + "  ".join(f"{c:>14s}" for c in cells))
    return "\n".join(lines), ratios


def gradient_agreement(seed: int, functional, grid: GridSpec | None = None, directions: int = 1) -> tuple[float, float]:
    """Relative gaps of the analytic gradient against full and directional central differences."""
    grid = grid or GridSpec.cube(6)
    rng = np.random.default_rng(seed)
    moduli = ElasticModuli(*rng.uniform(0.5, 3.0, size=3))
    u = synthesize_smooth_field(grid, seed, 1, 1.2)
    ga = discrete_variational_gradient(functional, u, moduli).data
    gf = discrete_variational_gradient(functional, u, moduli, method="finite_difference").data
    full = float(np.max(np.abs(ga - gf)) / np.max(np.abs(gf)))
    worst_dir = 0.0
    eps = 1e-5
    for _ in range(directions):
        d = rng.normal(size=u.data.shape)
        d[grid.boundary_mask()] = 0.0
        d /= np.linalg.norm(d)
        ep = discrete_energy(u.with_data(u.data + eps * d), moduli, functional)
        em = discrete_energy(u.with_data(u.data - eps * d), moduli, functional)
        ep2 = discrete_energy(u.with_data(u.data + 2 * eps * d), moduli, functional)
        em2 = discrete_energy(u.with_data(u.data - 2 * eps * d), moduli, functional)
        fd = (8.0 * (ep - em) - (ep2 - em2)) / (12.0 * eps)
        an = float(np.sum(ga * d))
        worst_dir = max(worst_dir, abs(an - fd) / max(abs(fd), np.linalg.norm(ga)))
    return full, worst_dir


def identities_suite(grid: int = 32, seed: int = 7, fields: int = 20) -> SuiteResult:
    res = SuiteResult("identities")

    defects = ordered_map(structural_defects, range(seed, seed + fields))
    for name in defects[0]:
        res.at_most(f"{name}, {fields} fields", max(d[name] for d in defects), 1e-10)

    sizes = [max(8, grid // 2), grid, 2 * grid]
    single = ordered_map(lambda n: single_axis_closed_forms(GridSpec.cube(n)), sizes[1:])
    rows = {
        f"|A{i + 1}|^2": [float(np.max(np.abs(d[i] - e[i]))) for d, e in single] for i in range(3)
    }
    table, ratios = _ratio_table("single-axis |A_i|^2 vs closed form, max error", [2 * np.pi / n for n in sizes[1:]], rows)
    res.tables.append(table)
    for name, rs in ratios.items():
        res.within(f"single-axis {name} convergence ratio", rs[-1], 3.0, 5.0)

    def residual_on(n):
        g = GridSpec.cube(n)
        ir = identity_residual(field_exp(synthesize_smooth_field(g, seed, 1, 0.8)))
        return float(np.max(np.abs(ir.pointwise.data))), ir.rhs_integrated

    outcomes = ordered_map(residual_on, sizes)
    table, ratios = _ratio_table(
        f"divergence identity, max pointwise residual (seed {seed})",
        [2 * np.pi / n for n in sizes],
        {"residual": [o[0] for o in outcomes]},
    )
    res.tables.append(table)
    for i, r in enumerate(ratios["residual"]):
        res.within(f"identity residual ratio {sizes[i]}->{sizes[i + 1]}", r, 3.0, 5.0)
    res.at_most(f"integrated RHS at {sizes[-1]}^3", abs(outcomes[-1][1]), 1e-6)

    report = expansion_check(seed, np.geomspace(0.01, 0.16, 5))
    res.tables.append("linearisation errors vs amplitude\n" + report.table())
    for name, slope in report.slopes.items():
        res.at_least(f"expansion slope {name}", slope, 2.7)

    for functional in (Functional.V1, Functional.V2):
        full, directional = gradient_agreement(seed, functional, directions=3)
        res.at_most(f"gradient {functional.value} analytic vs FD (rel)", full, 1e-6)
        res.at_most(f"gradient {functional.value} directional (rel)", directional, 1e-6)

    u = synthesize_smooth_field(GridSpec.cube(12), seed, 2, 1.0)
    torsion = torsion_equivalence_report(field_exp(u))
    res.tables.append("torsion contractions\n" + torsion.summary())
    res.at_least("torsion contraction matched", float(torsion.matched), 1.0)
    return res


# -- material ------------------------------------------------------------------


def _random_moduli(rng, n):
    return [ElasticModuli(*c) for c in np.exp(rng.uniform(np.log(0.05), np.log(20.0), size=(n, 3)))]


def material_suite(seed: int = 0, samples: int = 10_000) -> SuiteResult:
    res = SuiteResult("material")
    rng = np.random.default_rng(seed)
    worst_route = 0.0
    violations = 0
    counted = {c: 0 for c in MaterialClass}
    for m in _random_moduli(rng, samples):
        if abs(2 * m.c1 - 3 * m.c2 + m.c3) < 1e-9 * m.c1:
            continue
        (s1, e1), (s2, e2) = poisson_youngs_lame(m), poisson_youngs_moduli(m)
        worst_route = max(worst_route, abs(s1 - s2) / max(1.0, abs(s2)), abs(e1 - e2) / max(1.0, abs(e2)))
        cls, edge = classify(m)
        counted[cls] += 1
        _, _, nu = wave_speeds(m)
        if cls is MaterialClass.ORDINARY and not (nu < math.sqrt(0.5) and 0.0 < s2 < 0.5):
            violations += 1
        if cls is MaterialClass.AUXETIC and not (math.sqrt(0.5) < nu < math.sqrt(0.75) and -1.0 < s2 < 0.0):
            violations += 1
    res.tables.append(
        "sampled classes: " + ", ".join(f"{c.value} {n}" for c, n in counted.items())
    )
    res.at_most(f"sigma/E route gap over {samples} moduli", worst_route, 1e-12)
    res.at_most("classification bound violations", violations, 0)
    spots = {
        (5.0, 1.0, 1.0): (0.125, 9.0, math.sqrt(3 / 7)),
        (3.0, 1.0, 1.0): (-0.25, 6.0, math.sqrt(3 / 5)),
    }
    for c, (sigma, E, nu) in spots.items():
        rep = derived_properties(ElasticModuli(*c))
        gap = max(abs(rep.sigma - sigma), abs(rep.youngs_modulus - E), abs(rep.nu - nu))
        res.at_most(f"spot values {c}", gap, 1e-12)
    return res


# -- waves ---------------------------------------------------------------------


def pulse_config(moduli: ElasticModuli, mode, n: int, length: float = 25.6) -> WaveConfig:
    """Gaussian pulse of width ``5 n / 128`` points run for ``0.4 L / v``."""
    mode = WaveMode(mode)
    h = length / n
    dims = (n, n, 1) if mode is WaveMode.TRANSVERSAL_2D else (1, 1, n)
    grid = GridSpec(dims, h, Boundary.PERIODIC)
    v_t, v_l, _ = wave_speeds(moduli)
    v = v_t if mode is WaveMode.TRANSVERSAL_2D else v_l
    dt = 0.5 * h / v
    steps = int(round(0.4 * length / v / dt))
    width = 5.0 * h * n / 128.0
    return WaveConfig(moduli, grid, dt, steps, mode, GaussianPulse(0.25 * length, width), save_every=max(1, steps // 40))


def pulse_speed(moduli: ElasticModuli, mode, n: int) -> tuple[float, float, float]:
    """Measured speed, its relative error and the energy drift per domain crossing."""
    cfg = pulse_config(moduli, mode, n)
    traj = simulate(cfg)
    v = measure_speed(traj).speed
    run_length = cfg.speed * cfg.steps * cfg.dt
    drift_per_crossing = traj.relative_energy_drift * cfg.grid.length(cfg.propagation_axis) / run_length
    return v, abs(v - cfg.speed) / cfg.speed, drift_per_crossing


AUXETIC_SAMPLES = (ElasticModuli(3.0, 1.0, 1.0), ElasticModuli(2.5, 1.0, 2.0), ElasticModuli(5.0, 2.0, 0.5))
# c1 < (3 c2 - c3) / 2 puts the speed ratio above one
FAST_TRANSVERSAL_SAMPLES = (ElasticModuli(1.0, 1.0, 0.2), ElasticModuli(0.5, 1.0, 1.0), ElasticModuli(1.0, 2.0, 1.0))


def measured_speed_pair(moduli: ElasticModuli, n: int = 128) -> tuple[float, float]:
    v_t = pulse_speed(moduli, WaveMode.TRANSVERSAL_2D, n)[0]
    v_l = pulse_speed(moduli, WaveMode.LONGITUDINAL_1D, n)[0]
    return v_t, v_l


def waves_suite(seed: int = 0, sizes=(128, 256, 512)) -> SuiteResult:
    res = SuiteResult("waves")
    moduli = ElasticModuli(5.0, 1.0, 1.0)
    for mode in WaveMode:
        outcomes = ordered_map(lambda n: pulse_speed(moduli, mode, n), sizes)
        errs = [o[1] for o in outcomes]
        lines = [f"{mode.value} pulse speed (moduli 5, 1, 1, rho 1)", "      n   measured      rel.err  drift/crossing"]
        for n, (v, e, d) in zip(sizes, outcomes):
            lines.append(f"{n:7d}  {v:10.6f}  {e:10.3e}  {d:10.3e}")
        res.tables.append("\n".join(lines))
        res.at_most(f"{mode.value} speed error at n={sizes[0]}", errs[0], 0.02)
        res.at_least(f"{mode.value} speed error order", math.log2(errs[-2] / errs[-1]), 2.0)
        res.at_most(f"{mode.value} energy drift per crossing", max(o[2] for o in outcomes), 1e-3)

    samples = AUXETIC_SAMPLES + FAST_TRANSVERSAL_SAMPLES
    measured = ordered_map(measured_speed_pair, samples)
    lines = ["speed ratio v_t / v_l", "      moduli        class      formula   measured"]
    for m, (v_t, v_l) in zip(samples, measured):
        cls, _ = classify(m)
        lines.append(f"({m.c1:g}, {m.c2:g}, {m.c3:g})".ljust(16) + f"{cls.value:>9s}  {wave_speeds(m)[2]:9.5f}  {v_t / v_l:9.5f}")
    res.tables.append("\n".join(lines))
    lo, hi = math.sqrt(0.5), math.sqrt(0.75)
    for m, (v_t, v_l) in zip(AUXETIC_SAMPLES, measured):
        res.within(f"auxetic ({m.c1:g}, {m.c2:g}, {m.c3:g}) measured v_t/v_l", v_t / v_l, lo, hi)
    for m, (v_t, v_l) in zip(FAST_TRANSVERSAL_SAMPLES, measured[len(AUXETIC_SAMPLES):]):
        res.at_least(f"({m.c1:g}, {m.c2:g}, {m.c3:g}) measured v_t - v_l", v_t - v_l, 1e-12)

    amplitudes = (1.0, 0.1, 0.01)
    sup = ordered_map(lambda a: superposition_residual(moduli, seed=seed, amplitude=a), amplitudes)
    lines = ["superposition residuals on 32^3", "amplitude        r_t         r_l       r_sum   ratio"]
    for a, s in zip(amplitudes, sup):
        lines.append(f"{a:9.3g}  {s.r_t:10.3e}  {s.r_l:10.3e}  {s.r_sum:10.3e}  {s.ratio:6.2f}")
    res.tables.append("\n".join(lines))
    res.at_least("superposition ratio at amplitude 1", sup[0].ratio, 10.0)
    res.at_most(f"superposition ratio at amplitude {amplitudes[-1]:g}", sup[-1].ratio, 2.0)
    return res


# -- radial --------------------------------------------------------------------


def j0_reference(x: float, digits: int = 60) -> float:
    """Power series of J0 summed in decimal arithmetic with ``digits`` digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        q = -(Decimal(x) ** 2) / 4
        term = Decimal(1)
        total = Decimal(1)
        m = 0
        while True:
            m += 1
            term = term * q / (m * m)
            total += term
            if m > 10 and abs(term) < Decimal(10) ** (-digits + 5):
                break
        return float(total)


def bisect_zero(fn, lo: float, hi: float, tol: float = 1e-15) -> float:
    flo = fn(lo)
    if flo * fn(hi) > 0:
        raise ValueError("interval does not bracket a sign change")
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def radial_ode_residual(mode: RadialMode, r: np.ndarray, step: float = 1e-2) -> float:
    """Max of ``|v'' + v'/r + k^2 v|`` with fourth-order difference derivatives."""
    v = lambda s: radial_solution(mode, s)  # noqa: E731
    v0, vp, vm, vp2, vm2 = v(r), v(r + step), v(r - step), v(r + 2 * step), v(r - 2 * step)
    d1 = (8.0 * (vp - vm) - (vp2 - vm2)) / (12.0 * step)
    d2 = (-(vp2 + vm2) + 16.0 * (vp + vm) - 30.0 * v0) / (12.0 * step**2)
    return float(np.max(np.abs(d2 + d1 / r + mode.k**2 * v0)))


def standing_wave_error(h: float = 0.2, half_width: float = 24.0, radius: float = 10.0) -> float:
    """Max deviation from ``cos(t) pi J0(r)`` over one period, relative to ``pi``, for ``r <= radius``."""
    moduli = ElasticModuli(5.0, 0.5, 0.5)
    n = int(round(2 * half_width / h)) + 1
    grid = GridSpec((n, n, 1), h, Boundary.DIRICHLET_IDENTITY)
    period = 2.0 * math.pi
    steps = int(math.ceil(period / (0.5 * h)))
    dt = period / steps
    cfg = WaveConfig(moduli, grid, dt, steps, WaveMode.TRANSVERSAL_2D, RadialHalfTurn(1.0, math.pi), max(1, steps // 40))
    traj = simulate(cfg)
    X, Y, _ = grid.coords()
    r = np.hypot(X - half_width, Y - half_width)
    inside = r <= radius
    shape = math.pi * bessel_j0(r)
    worst = 0.0
    for snap, t in zip(traj.snapshots, traj.times):
        worst = max(worst, float(np.max(np.abs(snap.data - math.cos(t) * shape)[inside])))
    return worst / math.pi


def radial_suite() -> SuiteResult:
    res = SuiteResult("radial")
    xs = np.linspace(0.0, 50.0, 201)
    ref = np.array([j0_reference(float(x)) for x in xs])
    res.at_most("J0 vs decimal power series on [0, 50]", float(np.max(np.abs(bessel_j0(xs) - ref))), 1e-12)
    z = bisect_zero(bessel_j0, 2.0, 3.0)
    res.at_most("first J0 zero by bisection, |error|", abs(z - J0_FIRST_ZERO), 1e-9)
    mode = RadialMode.from_wavenumber(1.0, math.pi, ElasticModuli(5.0, 0.5, 0.5))
    res.at_most("radial ODE residual on [0.5, 30]", radial_ode_residual(mode, np.linspace(0.5, 30.0, 300)), 1e-8)
    res.at_most("standing wave over one period (rel)", standing_wave_error(), 0.03)
    return res


def run_suite(name: str, grid: int = 32, seed: int = 7) -> SuiteResult:
    if name == "identities":
        return identities_suite(grid, seed)
    if name == "material":
        return material_suite(seed)
    if name == "waves":
        return waves_suite(seed)
    if name == "radial":
        return radial_suite()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
