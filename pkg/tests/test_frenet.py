import numpy as np
import pytest
from scipy.linalg import expm

from nullcurves.dynamics import PhaseState, hamiltonian_matrix
from nullcurves.e21 import AlgebraElement, exp_algebra
from nullcurves.elliptic import closed_form_from_state
from nullcurves.errors import FlexPoint, NotNormalized, NotNull
from nullcurves.frenet import (AnalyticCurve, NullCurveSamples, analyze_curve,
                               fd_derivatives, frenet_residual, normalize_parameter,
                               synthesize_curve)
from nullcurves.mink3 import E3, mink_inner


def cubic_curve(t):
    return AnalyticCurve(t, lambda s: [s, s * s / 2, s**3 / 6], lambda s: [1, s, s * s / 2],
                         lambda s: [0, 1, s], lambda s: [0, 0, 1])


def exponential_curve(c, t):
    """alpha^(j)(s) = (exp(s H) H^j)[1:, 0] for constant curvature c."""
    H = hamiltonian_matrix(c)
    Hj = [np.linalg.matrix_power(H, j) for j in range(4)]
    d = [lambda s, j=j: (expm(s * H) @ Hj[j])[1:, 0] for j in range(4)]
    return AnalyticCurve(t, *d)


def test_cubic_curve_has_zero_curvature():
    t = np.linspace(-2, 2, 41)
    fr = analyze_curve(cubic_curve(t))
    np.testing.assert_array_equal(fr.k, np.zeros_like(t))
    np.testing.assert_allclose(fr.A[:, :, 2], np.tile(E3, (len(t), 1)), atol=1e-15)


def test_cubic_curve_from_samples():
    t = np.linspace(0, 4, 81)
    a = np.stack([t, t * t / 2, t**3 / 6], axis=1)
    fr = analyze_curve(NullCurveSamples(t, a))
    assert np.max(np.abs(fr.k)) <= 1e-8


def test_synthesized_zero_curvature_is_the_cubic():
    t = np.linspace(0, 3, 61)
    fr = synthesize_curve(lambda s: 0.0, grid=t)
    np.testing.assert_allclose(fr.alpha, np.stack([t, t * t / 2, t**3 / 6], axis=1), atol=1e-12)


@pytest.mark.parametrize("c", [-0.5, 0.0, 0.05, 0.3])
def test_constant_curvature_from_exact_derivatives(c):
    fr = analyze_curve(exponential_curve(c, np.linspace(0, 5, 26)))
    assert np.max(np.abs(fr.k - c)) <= 1e-8


@pytest.mark.parametrize("c", [-0.5, 0.0, 0.05])
def test_round_trip_constant(c):
    grid = np.linspace(0, 10, 501)
    fr = synthesize_curve(lambda s: c, grid=grid)
    back = analyze_curve(fr.curve(), tol=1e-7)
    assert np.max(np.abs(back.k - c)) <= 1e-6
    assert frenet_residual(back) <= 1e-4


def test_round_trip_elliptic_curvature():
    path = closed_form_from_state(PhaseState(1.0, 0.0, 0.1, 0.0))
    grid = np.linspace(0, 10, 501)
    fr = synthesize_curve(lambda s: float(path.evaluate(s)[0]), grid=grid)
    back = analyze_curve(fr.curve(), tol=1e-7)
    assert np.max(np.abs(back.k - fr.k)) <= 1e-6
    A = fr.A
    assert np.max(np.abs(mink_inner(A[:, :, 0], A[:, :, 0]))) <= 1e-8
    assert np.max(np.abs(mink_inner(A[:, :, 1], A[:, :, 1]) - 1)) <= 1e-7


def test_equivariance():
    t = np.linspace(0, 4, 201)
    fr = synthesize_curve(lambda s: 0.2 * np.sin(s), grid=t)
    g = exp_algebra(AlgebraElement([0.5, -1.0, 0.3], 0.2, -0.4, 0.1))
    a = analyze_curve(fr.curve())
    moved = fr.translate(g)
    b = analyze_curve(moved.curve())
    np.testing.assert_allclose(b.k, a.k, atol=1e-9)
    np.testing.assert_allclose(b.frames, g.matrix @ a.frames, rtol=1e-6, atol=1e-6)


def test_rejects_bad_curves():
    t = np.linspace(-1, 1, 41)
    with pytest.raises(NotNormalized):
        analyze_curve(NullCurveSamples(t, np.stack([t, t * t, t**3], axis=1)))
    with pytest.raises(NotNull):
        analyze_curve(AnalyticCurve(t, lambda s: [s, s * s / 2, 0], lambda s: [1, s, 0],
                                    lambda s: [0, 1, 0], lambda s: [0, 0, 0]))
    with pytest.raises(FlexPoint):
        analyze_curve(AnalyticCurve(t, lambda s: [s, 0, 0], lambda s: [1, 0, 0],
                                    lambda s: [0, 0, 0], lambda s: [0, 0, 0]))


def test_fd_derivatives_of_polynomials():
    t = np.linspace(0, 1, 21) ** 1.2
    d1, d2, d3 = fd_derivatives(t, t**3, 3)
    np.testing.assert_allclose(d1, 3 * t**2, atol=1e-10)
    np.testing.assert_allclose(d3, 6, atol=1e-6)


def test_normalize_parameter_recovers_arclength():
    # the cubic curve at twice the speed: alpha(2u)
    u = np.linspace(0, 1.5, 301)
    a = np.stack([2 * u, 2 * u**2, 8 * u**3 / 6], axis=1)
    c = normalize_parameter(NullCurveSamples(u, a))
    np.testing.assert_allclose(c.t, 2 * u, atol=1e-6)
