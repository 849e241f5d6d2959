import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from nullcurves.dynamics import PhaseState, integrate_extremal, phase_embed
from nullcurves.e21 import casimirs
from nullcurves.elliptic import (CASE_I, CASE_II_COMPACT, CASE_II_UNBOUNDED, DEGENERATE,
                                 WeierstrassInvariants, closed_form_from_state,
                                 closed_form_state, cubic_analysis, cubic_roots,
                                 invariants_from_casimirs, laurent_coefficients,
                                 level_set_l4_squared, level_set_l5, measured_time_scale,
                                 portrait_branches, wp, wp3)
from nullcurves.errors import DegenerateCubic, NearPole, WrongBranch


def test_zero_invariants_are_degenerate():
    inv = WeierstrassInvariants(0, 0)
    with pytest.raises(DegenerateCubic):
        cubic_analysis(inv)
    p, dp = wp(0.5, inv)
    assert p == pytest.approx(4.0) and dp == pytest.approx(-16.0)


def test_lemniscatic_roots():
    inv = cubic_analysis(WeierstrassInvariants(4, 0))
    assert inv.D == -64
    np.testing.assert_allclose(inv.roots, [1, 0, -1], atol=1e-15)
    assert inv.case == "II"


def test_roots_match_numpy():
    for g2, g3 in [(4, 1), (1, 3), (-2, 0.5), (7, -2)]:
        mine = np.sort_complex(np.array(cubic_roots(g2, g3), dtype=complex))
        ref = np.sort_complex(np.roots([4, 0, -g2, -g3]))
        np.testing.assert_allclose(mine, ref, atol=1e-12)


@pytest.mark.parametrize("g2,g3", [(4, 1), (1, 3), (-2, 0.5), (3, 2)])
def test_laurent_expansion_near_zero(g2, g3):
    inv = cubic_analysis(WeierstrassInvariants(g2, g3))
    c2, c3, c4 = laurent_coefficients(g2, g3, 4)
    z = np.array([0.02, 0.05, 0.03 + 0.02j, 0.04j])
    p, _ = wp(z, inv)
    approx = 1 / z**2 + c2 * z**2 + c3 * z**4 + c4 * z**6
    np.testing.assert_allclose(p, approx, rtol=1e-11, atol=1e-11)


def test_laurent_coefficients_against_series():
    # invert the series of z^-2 + c2 z^2 + ... in the ODE p'' = 6 p^2 - g2/2
    z = sp.symbols("z")
    g2, g3 = sp.Rational(13, 10), sp.Rational(-7, 10)
    c = sp.symbols("c2:6")
    p = z**-2 + sum(ci * z ** (2 * i + 2) for i, ci in enumerate(c))
    expr = sp.expand((sp.diff(p, z, 2) - 6 * p**2 + g2 / 2) * z**4)
    eqs = [expr.coeff(z, j) for j in (4, 6, 8, 10)]
    sol = sp.solve(eqs + [sp.expand(p.diff(z) ** 2 - 4 * p**3 + g2 * p + g3).coeff(z, 0)], c[:4], dict=True)[0]
    mine = laurent_coefficients(1.3, -0.7, 5)
    np.testing.assert_allclose(mine, [float(sol[ci]) for ci in c[:4]], rtol=1e-12)


@pytest.mark.parametrize("g2,g3", [(4, 1), (1, 3), (-2, 0.5), (4, 0), (1 / 12, -53 / 216)])
def test_differential_equation(g2, g3):
    inv = cubic_analysis(WeierstrassInvariants(g2, g3))
    rng = np.random.default_rng(3)
    t = rng.uniform(0.05, 2 * inv.omega1 - 0.05, 1000)
    p, dp = wp(t, inv)
    scale = np.maximum(1.0, np.abs(dp) ** 2)
    assert np.max(np.abs(dp**2 - inv.cubic(p)) / scale) <= 1e-10
    assert np.all(np.isreal(p))


def test_periods():
    inv = cubic_analysis(WeierstrassInvariants(4, 1))
    t = np.linspace(0.1, 1.0, 7)
    np.testing.assert_allclose(wp(t + 2 * inv.omega1, inv)[0], wp(t, inv)[0], rtol=1e-12)
    np.testing.assert_allclose(wp(t + 2 * inv.omega3, inv)[0], wp(t, inv)[0], rtol=1e-10)
    # bounded branch is p shifted by omega3
    np.testing.assert_allclose(wp3(t, inv)[0], wp(t + inv.omega3, inv)[0].real, rtol=1e-10)


def test_pole_is_refused():
    inv = cubic_analysis(WeierstrassInvariants(4, 1))
    with pytest.raises(NearPole):
        wp(2 * inv.omega1, inv)
    with pytest.raises(WrongBranch):
        wp3(0.3, cubic_analysis(WeierstrassInvariants(1, 3)))


def test_invariants_examples():
    portrait, true_time = invariants_from_casimirs(1, 1, -0.25)
    assert true_time.g2 == pytest.approx(1 / 12)
    assert true_time.g3 == pytest.approx(-53 / 216)
    portrait, _ = invariants_from_casimirs(1, 0, 0)
    assert portrait.g2 == pytest.approx(4 ** (2 / 3) / 3)
    assert portrait.g3 == pytest.approx(-4 / 27)


@given(st.floats(-3, 3).filter(lambda m: abs(m) > 0.2), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-2, 2))
def test_level_set_matches_casimirs(m, k, l4, l5):
    C1, C2 = casimirs(phase_embed(PhaseState(m, k, l4, l5)))
    assert level_set_l4_squared(m, C1, C2, k) == pytest.approx(l4 * l4, abs=1e-9)
    assert level_set_l5(m, C2, k) == pytest.approx(l5, abs=1e-9)


STATES = [
    (PhaseState(1.0, 0.0, 0.1, 0.0), CASE_II_COMPACT),
    (PhaseState(1.0, -1.0, 0.3, 0.5), CASE_II_COMPACT),
    (PhaseState(-1.0, -3.0, 0.3, -1.5), CASE_II_COMPACT),
    (PhaseState(1.0, 0.0, 1.0, 0.0), CASE_I),
    (PhaseState(1.0, 3.0, 0.5, 0.2), None),
]


@pytest.mark.parametrize("s,branch", STATES)
def test_closed_form_matches_integrator(s, branch):
    path = closed_form_from_state(s)
    if branch is not None:
        assert path.branch == branch
    T = 1.0 if path.branch != CASE_II_COMPACT else 8.0
    traj = integrate_extremal(s, T=T, tol=1e-11, dt_out=0.05)
    k, l4, l5 = path.evaluate(traj.t)
    scale = 1 + np.max(np.abs(traj.k))
    assert np.max(np.abs(k - traj.k)) <= 1e-8 * scale
    assert np.max(np.abs(l4 - traj.l4)) <= 1e-8 * scale**1.5
    assert np.max(np.abs(l5 - traj.l5)) <= 1e-8 * scale**2


def test_closed_form_period():
    path = closed_form_from_state(PhaseState(1.0, 0.0, 0.1, 0.0))
    T = path.period
    t = np.linspace(0, 3, 11)
    np.testing.assert_allclose(path.evaluate(t + T)[0], path.evaluate(t)[0], atol=1e-12)
    end = closed_form_state(path, 0.0)
    assert (end.k, end.l4, end.l5) == pytest.approx((0.0, 0.1, 0.0), abs=1e-12)


def test_wrong_branch_request():
    with pytest.raises(WrongBranch):
        closed_form_from_state(PhaseState(1.0, 0.0, 0.1, 0.0), branch=CASE_II_UNBOUNDED)


def test_degenerate_paths():
    # an equilibrium of the flow sits on a degenerate cubic
    eq = closed_form_from_state(PhaseState(1.0, 1.0, 0.0, 0.0))
    assert eq.branch == DEGENERATE
    k, l4, l5 = eq.evaluate(np.linspace(0, 5, 6))
    np.testing.assert_allclose(k, 1.0, atol=1e-12)
    np.testing.assert_allclose(l4, 0.0, atol=1e-12)
    assert eq.invariants_true_time.degenerate


def test_degenerate_homoclinic_against_integrator():
    # choose a state on the homoclinic loop of the degenerate fiber through k = 1/3 + 4e
    m, e = 1.0, 0.1
    g2, g3 = 12 * e * e, -8 * e**3
    # true-time invariants: g2 = (C2 + 1/3)/m^2, g3 = -(m C1/4 + C2/6 + 1/27)/m^3
    C2 = g2 * m * m - 1 / 3
    C1 = (-g3 * m**3 - C2 / 6 - 1 / 27) * 4 / m
    k = 4 * (e - 1.5 * e) + 1 / (3 * m)
    l4 = np.sqrt(level_set_l4_squared(m, C1, C2, k))
    s = PhaseState(m, k, float(l4), float(level_set_l5(m, C2, k)))
    path = closed_form_from_state(s)
    assert path.branch == DEGENERATE and path.kind == "homoclinic"
    traj = integrate_extremal(s, T=6.0, tol=1e-11, dt_out=0.1)
    assert np.max(np.abs(path.evaluate(traj.t)[0] - traj.k)) <= 1e-8


@pytest.mark.parametrize("m,C1,C2", [(1, 0, 0), (1, 1, -0.25), (2, 0.1, 0.2), (-1, 0.5, 0.1)])
def test_portrait_components_lie_on_level_set(m, C1, C2):
    inv, comps = portrait_branches(m, C1, C2, n=200)
    assert comps
    for c in comps:
        ok = np.isfinite(c["l4"])
        assert np.max(np.abs(c["l4"][ok] ** 2 - level_set_l4_squared(m, C1, C2, c["k"][ok]))
                      / np.maximum(1, c["l4"][ok] ** 2)) <= 1e-9


def test_portrait_component_names():
    names = {(1, 0, 0): {"degenerate"}, (1, 0.5, 0): {"caseI"}}
    for args, want in names.items():
        _, comps = portrait_branches(*args)
        assert {c["name"] for c in comps} == want
    inv, comps = portrait_branches(1, 0.01, -0.25)
    assert inv.case == "II"
    assert {c["name"] for c in comps} == {"compact", "unbounded"}


@pytest.mark.parametrize("m", [1.0, 2.0, -1.0, 0.5])
def test_portrait_time_scale_is_constant(m):
    vals = measured_time_scale(m, 0.3, 0.1)
    assert np.ptp(vals) <= 1e-8
    assert np.mean(vals) == pytest.approx(-np.cbrt(2 * m), rel=1e-8)
