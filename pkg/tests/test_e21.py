import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullcurves.dynamics import hamiltonian_k
from nullcurves.e21 import (ALGEBRA_BASIS, AlgebraElement, CoalgebraElement,
                            GroupElement, ad_star, adjoint, bracket, casimirs,
                            coadjoint, exp_algebra, group_compose, group_inverse,
                            isotropy_basis, pairing, reorthonormalize)
from nullcurves.errors import SingularElement
from nullcurves.mink3 import E1, E2, G, mink_cross

from strategies import algebra, coalgebra, groups, vectors


@given(groups)
def test_exponentials_are_group_elements(g):
    assert g.is_valid(1e-9)


def test_compose_and_inverse_examples():
    b = exp_algebra(AlgebraElement([0.3, -1, 2], 0.4, 0.1, -0.7))
    assert np.allclose((GroupElement.identity() @ b).matrix, b.matrix)
    assert np.allclose((b @ b.inverse()).matrix, np.eye(4), atol=1e-12)
    q1, q2 = np.array([1.0, 2, 3]), np.array([-4.0, 0.5, 2])
    t = GroupElement.translation(q1) @ GroupElement.translation(q2)
    np.testing.assert_array_equal(t.q, q1 + q2)


@given(groups, groups)
def test_compose_is_matrix_product(a, b):
    np.testing.assert_array_equal(group_compose(a, b).matrix, a.matrix @ b.matrix)
    np.testing.assert_allclose(group_inverse(a).matrix, np.linalg.inv(a.matrix), atol=1e-9)


@given(algebra)
def test_rotation_block_preserves_metric(X):
    R = X.rotation
    assert np.max(np.abs(R.T @ G + G @ R)) <= 1e-14


def test_exp_examples():
    X = AlgebraElement([0.2, 1, -1], 0.3, 0.5, -0.2)
    np.testing.assert_array_equal(exp_algebra(X, 0.0).matrix, np.eye(4))
    np.testing.assert_allclose(exp_algebra(AlgebraElement(E1), 2.5).q, [2.5, 0, 0])
    t = 1.7
    g = exp_algebra(hamiltonian_k(0.0), t)
    np.testing.assert_allclose(g.q, [t, t**2 / 2, t**3 / 6], rtol=1e-13)


def test_pairing_examples():
    assert pairing(CoalgebraElement(E2, np.zeros(3)), AlgebraElement(E2)) == 1
    eta = CoalgebraElement([1.0, 2, 3], [4.0, 5, 6])
    assert pairing(eta, AlgebraElement.zero()) == 0


@given(groups, coalgebra, algebra)
def test_pairing_fixes_index_placement(g, eta, X):
    lhs = pairing(coadjoint(g, eta), X)
    rhs = pairing(eta, adjoint(group_inverse(g), X))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@given(groups, groups, coalgebra)
def test_coadjoint_is_left_action(a, b, eta):
    lhs = coadjoint(a, coadjoint(b, eta)).vector
    rhs = coadjoint(a @ b, eta).vector
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(rhs).max()))


def test_coadjoint_examples():
    eta = CoalgebraElement([1.0, -2, 0.5], [0.3, 0.1, 2])
    np.testing.assert_array_equal(coadjoint(GroupElement.identity(), eta).vector, eta.vector)
    q = np.array([0.5, 1, -1])
    out = coadjoint(GroupElement.translation(q), eta)
    np.testing.assert_allclose(out.v, eta.v - mink_cross(eta.p, q))
    np.testing.assert_array_equal(ad_star(AlgebraElement.zero(), eta).vector, np.zeros(6))


unit = st.lists(st.floats(-1, 1), min_size=6, max_size=6).map(np.array)


@given(unit, unit)
def test_ad_star_is_derivative_of_coadjoint(x, y):
    # unit-scale inputs keep the O(t^2) remainder below the bound
    X, eta = AlgebraElement.from_coeffs(x), CoalgebraElement.from_vector(y)
    t = 1e-4
    lhs = coadjoint(exp_algebra(X, t), eta).vector
    rhs = eta.vector + t * ad_star(X, eta).vector
    assert np.max(np.abs(lhs - rhs)) <= 1e-7


@given(algebra, algebra, coalgebra)
def test_ad_star_is_a_lie_algebra_action(X, Y, eta):
    # ad*([X, Y]) = ad*(X) ad*(Y) - ad*(Y) ad*(X) for a left action
    lhs = ad_star(bracket(X, Y), eta).vector
    rhs = (ad_star(X, ad_star(Y, eta)) - ad_star(Y, ad_star(X, eta))).vector
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_casimir_examples():
    assert casimirs(CoalgebraElement(E2, np.zeros(3))) == (1.0, 0.0)
    assert casimirs(CoalgebraElement([0, 1, -0.5], [-0.5, 0, 1])) == (1.0, -0.25)


@given(groups, coalgebra)
def test_casimirs_are_invariant(g, eta):
    a, b = casimirs(eta), casimirs(coadjoint(g, eta))
    scale = max(1.0, np.abs(coadjoint(g, eta).vector).max() ** 2)
    assert abs(a[0] - b[0]) <= 1e-10 * scale and abs(a[1] - b[1]) <= 1e-10 * scale


def test_isotropy_examples():
    mu = CoalgebraElement(E2, np.zeros(3))
    basis = isotropy_basis(mu)
    assert len(basis) == 2
    for X in basis:
        assert np.max(np.abs(ad_star(X, mu).vector)) <= 1e-10
    assert np.max(np.abs(bracket(*basis).coeffs)) <= 1e-10
    with pytest.raises(SingularElement):
        isotropy_basis(CoalgebraElement(np.zeros(3), [1.0, 2, 3]))


@given(coalgebra)
def test_isotropy_is_two_dimensional_and_abelian(mu):
    if np.max(np.abs(mu.p)) < 1e-2:
        return
    basis = isotropy_basis(mu)
    assert len(basis) == 2
    assert np.max(np.abs(bracket(*basis).coeffs)) <= 1e-10


def test_algebra_round_trips():
    for X in ALGEBRA_BASIS:
        np.testing.assert_array_equal(AlgebraElement.from_matrix(X.matrix).coeffs, X.coeffs)


def test_reorthonormalize_repairs_small_errors(rng):
    g = exp_algebra(AlgebraElement.from_coeffs(rng.normal(size=6)))
    A = g.A + 1e-9 * rng.normal(size=(3, 3))
    B = reorthonormalize(A)
    assert GroupElement(g.q, B).invariant_error() <= 1e-13
    assert np.max(np.abs(B - g.A)) <= 1e-7
