import numpy as np
import pytest

from rotelast import so3
from rotelast.energy import (
    ElasticModuli,
    Functional,
    discrete_variational_gradient,
    expansion_check,
    identity_residual,
    kinetic_energy,
    kinetic_variational_term,
    linear_equilibrium_residual,
    linear_equilibrium_residual_curl_form,
    linearized_v3,
    potential,
    potential_v1,
    potential_v2,
    variational_derivative,
)
from rotelast.grid import Boundary, Field, GridSpec, constant_field, field_exp, scalar_field
from rotelast.grid import single_axis_field, synthesize_smooth_field

MODULI = ElasticModuli(5.0, 1.0, 1.5)


def test_moduli_must_be_positive():
    with pytest.raises(ValueError):
        ElasticModuli(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ElasticModuli(1.0, 1.0, 1.0, rho=-1.0)


def test_potentials_of_rigid_state_vanish():
    O = constant_field(GridSpec.cube(6), so3.rot_exp(np.array([0.1, 0.2, 0.3])))
    assert potential_v1(O, MODULI).potential == pytest.approx(0.0, abs=1e-25)
    assert potential_v2(O, MODULI) == pytest.approx(0.0, abs=1e-25)


def test_potential_dispatch_matches_named_functions():
    O = field_exp(synthesize_smooth_field(GridSpec.cube(8), 2, 2, 1.0))
    assert potential(O, MODULI, "V1") == pytest.approx(potential_v1(O, MODULI).potential, rel=1e-14)
    assert potential(O, MODULI, Functional.V2) == pytest.approx(potential_v2(O, MODULI), rel=1e-14)
    assert potential(O, MODULI, "full-action-potential") == pytest.approx(potential(O, MODULI, "V1"), rel=1e-14)
    with pytest.raises(ValueError):
        potential(O, MODULI, "V7")


@pytest.mark.parametrize("seed", [0, 3])
def test_identity_residual_converges_at_second_order(seed):
    res = []
    for n in (16, 32):
        ir = identity_residual(field_exp(synthesize_smooth_field(GridSpec.cube(n), seed, 1, 0.8)))
        res.append(np.max(np.abs(ir.pointwise.data)))
        assert abs(ir.rhs_integrated) < 1e-12
    assert 3.0 < res[0] / res[1] < 5.0


def test_identity_residual_vanishes_for_single_axis_fields():
    # A2 is then exactly linear in grad phi, and both sides are quadratic forms the stencil reproduces
    g = GridSpec.cube(16)
    phi = scalar_field(g, lambda x, y, z: np.sin(x) * np.cos(y))
    ir = identity_residual(field_exp(single_axis_field(phi)))
    assert np.max(np.abs(ir.pointwise.data)) < 0.2
    assert abs(ir.integrated) < 1e-10


@pytest.mark.parametrize("seed", [1, 3])
def test_linearisation_errors_are_cubic(seed):
    report = expansion_check(seed, np.geomspace(0.01, 0.16, 5))
    for name in ("A1", "A2", "curl_A2", "kinetic"):
        assert report.slopes[name] >= 2.7, report.table()


def test_expansion_check_needs_nonzero_field():
    g = GridSpec.cube(8)
    with pytest.raises(ValueError):
        expansion_check(0, [0.1, 0.2], base=constant_field(g, np.zeros(3)))


def test_quadratic_potential_is_the_small_amplitude_limit():
    g = GridSpec.cube(12)
    w = synthesize_smooth_field(g, 5, 2, 1.0)
    rel = []
    for a in (0.02, 0.01):
        u = w.with_data(a * w.data)
        v2 = potential(field_exp(u), MODULI, "V2")
        v3 = linearized_v3(u, MODULI.alpha, MODULI.beta)
        rel.append(abs(v2 - v3) / v3)
    assert rel[0] < 0.05
    assert rel[0] / rel[1] > 1.8


def test_linear_residual_forms_agree_to_second_order():
    gaps = []
    for n in (16, 32):
        u = synthesize_smooth_field(GridSpec.cube(n), 8, 2, 1.0)
        a = linear_equilibrium_residual(u, 2.0, 0.7).data
        b = linear_equilibrium_residual_curl_form(u, 2.0, 0.7).data
        gaps.append(np.max(np.abs(a - b)))
    assert 3.0 < gaps[0] / gaps[1] < 5.0


def test_uniform_spin_kinetic_energy():
    g = GridSpec.cube(4)
    omega, dt = 0.7, 1e-5
    before = constant_field(g, so3.rot_exp(np.array([0.0, 0.0, -0.5 * omega * dt])))
    after = constant_field(g, so3.rot_exp(np.array([0.0, 0.0, 0.5 * omega * dt])))
    expected = 2.0 * omega**2 * (2 * np.pi) ** 3
    assert kinetic_energy(before, after, dt, 1.0) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("functional", ["V1", "V2"])
@pytest.mark.parametrize("boundary", list(Boundary))
def test_analytic_gradient_matches_finite_differences(functional, boundary):
    g = GridSpec.cube(6, boundary=boundary) if boundary is Boundary.PERIODIC else GridSpec.cube(7, boundary=boundary)
    u = synthesize_smooth_field(g, 11, 1, 1.3)
    ga = discrete_variational_gradient(functional, u, MODULI).data
    gf = discrete_variational_gradient(functional, u, MODULI, method="finite_difference").data
    assert np.max(np.abs(ga - gf)) <= 1e-6 * np.max(np.abs(gf))
    np.testing.assert_array_equal(ga[g.boundary_mask()], 0.0)


def test_gradient_rejects_unknown_method():
    u = synthesize_smooth_field(GridSpec.cube(4), 0, 1, 1.0)
    with pytest.raises(ValueError):
        discrete_variational_gradient("V1", u, MODULI, method="symbolic")


@pytest.mark.parametrize("kind", ["transversal", "longitudinal"])
def test_single_axis_variational_derivative(kind):
    m = MODULI
    errs = []
    for n in (32, 64):
        g = GridSpec.cube(n)
        X, Y, Z = g.coords()
        if kind == "transversal":
            phi = scalar_field(g, lambda x, y, z: np.sin(x) * np.cos(2 * y))
            exact = -2.0 * 2.0 * (m.c2 + m.c3) * (-5.0 * np.sin(X) * np.cos(2 * Y))
        else:
            phi = scalar_field(g, lambda x, y, z: 2.0 * np.cos(z))
            exact = -2.0 * (4.0 * m.c1 / 3.0 + 8.0 * m.c3 / 3.0) * (-2.0 * np.cos(Z))
        vd = variational_derivative("V1", single_axis_field(phi), m).data
        np.testing.assert_allclose(vd[..., :2], 0.0, atol=1e-9)
        errs.append(np.max(np.abs(vd[..., 2] - exact)))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_kinetic_term_for_uniform_acceleration():
    g = GridSpec.cube(4)
    dt, acc = 1e-3, 0.8
    frames = [constant_field(g, np.array([0.0, 0.0, 0.5 * acc * t * t])) for t in (-dt, 0.0, dt)]
    term = kinetic_variational_term(frames[1], *(field_exp(f) for f in (frames[0], frames[2])), dt, 2.0)
    # at zero rotation dO/du_z : d2O/dt2 = 2 * acc, so the term is 2 rho 2 acc along z
    np.testing.assert_allclose(term.data[..., 2], 8.0 * acc, rtol=1e-6)
    np.testing.assert_allclose(term.data[..., :2], 0.0, atol=1e-9)


def test_field_kind_is_checked():
    g = GridSpec.cube(4)
    with pytest.raises(ValueError):
        discrete_variational_gradient("V1", Field(g, np.zeros(g.dims)), MODULI)
