import numpy as np
import pytest
from hypothesis import given

from nullcurves.mink3 import (E1, E2, E3, G, Kind, Orientation, causal_class,
                              mink_cross, mink_inner, vec)

from strategies import finite, vectors


def test_inner_on_basis():
    assert mink_inner(E1, E3) == -1
    assert mink_inner(E2, E2) == 1
    assert mink_inner(E1 + E3, E1 + E3) == -2


def cross_oracle(v, w):
    # solve <x, e_j> = det(v, w, e_j) for x
    rhs = np.array([np.linalg.det(np.array([v, w, e])) for e in np.eye(3)])
    return np.linalg.solve(G, rhs)


def test_cross_on_basis():
    np.testing.assert_allclose(mink_cross(E1, E2), -E1)
    np.testing.assert_allclose(mink_cross(E2, E3), -E3)
    np.testing.assert_allclose(mink_cross(E2, E1), E1)
    np.testing.assert_allclose(mink_cross(E3, E1), E2)
    np.testing.assert_allclose(mink_cross(E2, E3), cross_oracle(E2, E3))


@given(vectors, vectors, vectors)
def test_cross_is_determinant(v, w, u):
    det = np.linalg.det(np.array([v, w, u]))
    assert abs(mink_inner(mink_cross(v, w), u) - det) <= 1e-12 * max(1.0, abs(det)) * 1e2
    np.testing.assert_allclose(mink_cross(v, w), cross_oracle(v, w), atol=1e-9)


@given(vectors, vectors, finite)
def test_bilinear_antisymmetric(v, w, s):
    np.testing.assert_array_equal(mink_cross(v, w), -mink_cross(w, v))
    assert mink_inner(v, w) == mink_inner(w, v)
    np.testing.assert_allclose(mink_inner(s * v, w), s * mink_inner(v, w), rtol=1e-14, atol=1e-300)
    np.testing.assert_allclose(mink_cross(s * v, w), s * mink_cross(v, w), rtol=1e-14, atol=1e-12)
    np.testing.assert_array_equal(mink_cross(v, v), np.zeros(3))


def test_inner_broadcasts():
    a = np.stack([E1, E2, E1 + E3])
    np.testing.assert_array_equal(mink_inner(a, a), [0, 1, -2])


@pytest.mark.parametrize("v, kind, orient", [
    (E1 + E3, Kind.TIMELIKE, Orientation.FUTURE),
    (-(E1 + E3), Kind.TIMELIKE, Orientation.PAST),
    (E2, Kind.SPACELIKE, Orientation.NONE),
    (E1, Kind.NULL, Orientation.FUTURE),
    (-E3, Kind.NULL, Orientation.PAST),
    (np.zeros(3), Kind.ZERO, Orientation.NONE),
])
def test_causal_class(v, kind, orient):
    c = causal_class(v)
    assert (c.kind, c.orientation) == (kind, orient)


def test_null_within_tolerance():
    assert causal_class(E1 + 1e-12 * E2).kind is Kind.NULL
    assert causal_class(E1 + 1e-3 * E2, tol=1e-10).kind is Kind.SPACELIKE
    assert causal_class(E1).future_null


def test_vec_rejects_bad_input():
    with pytest.raises(ValueError):
        vec([1.0, 2.0])
    with pytest.raises(ValueError):
        vec([1.0, np.nan, 0.0])
