import numpy as np
import pytest
import sympy as sp

from rotelast.grid import GridSpec, constant_field, field_exp, scalar_field, single_axis_field
from rotelast.grid import synthesize_smooth_field
from rotelast.so3 import rot_exp
from rotelast.strain import (
    contortion,
    decompose,
    strain_bundle,
    strain_matrix,
    torsion,
    torsion_equivalence_report,
)


@pytest.fixture(scope="module")
def symbolic_single_axis():
    """Norms of the strain pieces for a rotation by phi(x, y, z) about z, derived with sympy."""
    x, y, z = sp.symbols("x y z", real=True)
    phi = sp.Function("phi", real=True)(x, y, z)
    c, s = sp.cos(phi), sp.sin(phi)
    O = sp.Matrix([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    X = (x, y, z)
    K = [[[sum(O[i, m] * sp.diff(O[k, m], X[j]) for m in range(3)) for k in range(3)] for j in range(3)] for i in range(3)]
    A = sp.Matrix(3, 3, lambda m, n: sum(sp.LeviCivita(m, j, l) * K[j][n][l] for j in range(3) for l in range(3)))
    A1 = A.trace() / 3 * sp.eye(3)
    A2 = (A - A.T) / 2
    A3 = (A + A.T) / 2 - A1
    fro = lambda M: sp.simplify(sum(e**2 for e in M))  # noqa: E731
    px, py, pz = (sp.diff(phi, v) for v in X)
    return {
        "A": sp.simplify(A),
        "grads": (px, py, pz),
        "norms": tuple(fro(P) for P in (A1, A2, A3)),
    }


def test_single_axis_strain_is_twice_e3_times_gradient(symbolic_single_axis):
    px, py, pz = symbolic_single_axis["grads"]
    expected = sp.Matrix([[0, 0, 0], [0, 0, 0], [2 * px, 2 * py, 2 * pz]])
    assert sp.simplify(symbolic_single_axis["A"] - expected) == sp.zeros(3, 3)


def test_single_axis_closed_forms(symbolic_single_axis):
    px, py, pz = symbolic_single_axis["grads"]
    n1, n2, n3 = symbolic_single_axis["norms"]
    assert sp.simplify(n1 - sp.Rational(4, 3) * pz**2) == 0
    assert sp.simplify(n2 - 2 * (px**2 + py**2)) == 0
    assert sp.simplify(n3 - (2 * px**2 + 2 * py**2 + sp.Rational(8, 3) * pz**2)) == 0


def _single_axis_errors(n):
    g = GridSpec.cube(n)
    X, Y, Z = g.coords()
    phi = scalar_field(g, lambda x, y, z: np.sin(x) * np.cos(2 * y) + 0.5 * np.sin(y - z))
    px = np.cos(X) * np.cos(2 * Y)
    py = -2 * np.sin(X) * np.sin(2 * Y) + 0.5 * np.cos(Y - Z)
    pz = -0.5 * np.cos(Y - Z)
    b = strain_bundle(field_exp(single_axis_field(phi)))
    n1, n2, n3 = (p.data for p in b.norms_sq())
    return (
        np.max(np.abs(n1 - 4 / 3 * pz**2)),
        np.max(np.abs(n2 - 2 * (px**2 + py**2))),
        np.max(np.abs(n3 - (2 * px**2 + 2 * py**2 + 8 / 3 * pz**2))),
    )


def test_discrete_single_axis_norms_converge_at_second_order():
    coarse, fine = _single_axis_errors(32), _single_axis_errors(64)
    for c, f in zip(coarse, fine):
        assert 3.5 < c / f < 4.5


def test_contortion_of_uniform_twist():
    g = GridSpec((8, 1, 1), 2 * np.pi / 8)
    phi = scalar_field(g, lambda x, y, z: x)
    K = contortion(field_exp(single_axis_field(phi))).data
    # O d_x O^T for O = Rz(x) is -star(e3), times sin(h)/h from the central difference
    expected = np.zeros((3, 3, 3))
    expected[0, 0, 1] = 1.0
    expected[1, 0, 0] = -1.0
    np.testing.assert_allclose(K, np.broadcast_to(np.sin(g.h) / g.h * expected, K.shape), atol=1e-14)


def test_constant_rotation_has_no_strain():
    g = GridSpec.cube(6)
    b = strain_bundle(constant_field(g, rot_exp(np.array([0.3, -0.2, 1.0]))))
    for piece in (b.A, b.A1, b.A2, b.A3):
        np.testing.assert_allclose(piece.data, 0.0, atol=1e-15)


def test_contortion_is_skew_and_pieces_reassemble():
    g = GridSpec.cube(8)
    O = field_exp(synthesize_smooth_field(g, 4, 2, 1.5))
    K = contortion(O).data
    np.testing.assert_allclose(K, -np.transpose(K, (0, 1, 2, 5, 4, 3)), atol=1e-15)
    A = strain_matrix(contortion(O))
    b = decompose(A)
    np.testing.assert_allclose(b.A1.data + b.A2.data + b.A3.data, A.data, atol=1e-14)
    tr = np.trace(b.A3.data, axis1=-2, axis2=-1)
    np.testing.assert_allclose(tr, 0.0, atol=1e-14)


def test_torsion_is_antisymmetric_in_last_pair():
    g = GridSpec.cube(6)
    T = torsion(contortion(field_exp(synthesize_smooth_field(g, 1, 1, 1.0)))).data
    np.testing.assert_allclose(T, -np.swapaxes(T, -1, -2), atol=0)


def test_torsion_pairing_is_found_and_unique():
    g = GridSpec.cube(8)
    rep = torsion_equivalence_report(field_exp(synthesize_smooth_field(g, 9, 2, 1.0)))
    assert rep.winner == "1/2 eps_njl T_mjl"
    hits = [
        label
        for label, r in rep.ratios.items()
        if np.allclose(r, (-1.0, -0.5, 0.5), atol=1e-8) and max(rep.spread[label]) < 1e-8
    ]
    assert hits == [rep.winner]
