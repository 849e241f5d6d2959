"""Momentum space of the functional  int (1 + m k) omega  on null curves.

The phase space is E(2,1) x R^3 with fiber coordinates (k, l4, l5) and a
nonzero coupling constant m.  Coframe on it, in this order:

    omega, eta1, eta2, eta3, eta4, eta5, dk, dl4, dl5

where, in Maurer-Cartan components (w1, w2, w3, w11, w21, w12),
omega = w1, eta1 = w12 - k w1, eta2 = w11, eta3 = w21 - w1, eta4 = w2,
eta5 = w3.  Two-forms are stored as antisymmetric 9x9 matrices M with
Psi = sum_{i<j} M[i, j] theta_i ^ theta_j, so that Psi(X, Y) = X @ M @ Y.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import null_space, orth

from ._lie import transport
from .e21 import (ALGEBRA_BASIS, AlgebraElement, CoalgebraElement, GroupElement,
                  ad_star, ad_star_matrix, casimirs, coadjoint, isotropy_basis)
from .errors import IntegrationFailure, NonFiniteState

BLOWUP = 1e8
OMEGA, ETA1, ETA2, ETA3, ETA4, ETA5, DK, DL4, DL5 = range(9)


@dataclass(frozen=True)
class PhaseState:
    m: float
    k: float
    l4: float
    l5: float

    def __post_init__(self):
        for name in ("m", "k", "l4", "l5"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.m == 0:
            raise ValueError("coupling constant m must be nonzero")

    # multipliers eliminated on the momentum space
    @property
    def l1(self):
        return self.m

    @property
    def l2(self):
        return 0.0

    @property
    def l3(self):
        return 0.5 * (1 + self.m * self.k)

    @property
    def y(self):
        return np.array([self.k, self.l4, self.l5])


def phase_embed(s: PhaseState) -> CoalgebraElement:
    m, k = s.m, s.k
    return CoalgebraElement([-s.l5, s.l4, -0.5 * (1 - m * k)],
                            [-0.5 * (1 + m * k), 0.0, m])


def phase_unembed(eta: CoalgebraElement) -> PhaseState:
    """Inverse of phase_embed on its image (m = v3, k from v1)."""
    m = eta.v[2]
    return PhaseState(m, -(2 * eta.v[0] + 1) / m, eta.p[1], -eta.p[0])


def hamiltonian_k(k) -> AlgebraElement:
    return AlgebraElement([1.0, 0.0, 0.0], 0.0, 1.0, k)


def hamiltonian(s: PhaseState) -> AlgebraElement:
    return hamiltonian_k(s.k)


def hamiltonian_matrix(k):
    H = np.zeros((4, 4))
    H[1, 0] = 1.0
    H[2, 1] = H[3, 2] = 1.0
    H[1, 2] = H[2, 3] = k
    return H


def _field(m, y):
    k, l4, l5 = y
    return np.array([-2 * l4 / m, l5 + 0.5 * k * (1 - m * k), k * l4])


def el_field(s: PhaseState):
    return tuple(_field(s.m, s.y))


def is_bifurcation(s: PhaseState, tol=1e-10):
    return abs(s.l4) <= tol and abs(s.l5 + 0.5 * s.k * (1 - s.m * s.k)) <= tol


def first_integral_cubic(m, C1, C2, k):
    """Right-hand side P(k) of (k')^2 = P(k)."""
    return (k**3 - k**2 / m - (4 * C2 + 1) * k / m**2
            + (4 * m * C1 + 4 * C2 + 1) / m**3)


def lax_matrix(s: PhaseState):
    m, k, l4, l5 = s.m, s.k, s.l4, s.l5
    a, b = 0.5 * (1 + m * k), 0.5 * (1 - m * k)
    return np.array([[0.0, 0.0, 0.0, 0.0],
                     [a, -l4, -l5, 0.0],
                     [0.0, b, 0.0, -l5],
                     [-m, 0.0, b, l4]])


def charpoly(L):
    """(c1, .., cn) with det(z I - L) = z^n + c1 z^(n-1) + ... + cn.

    Faddeev-LeVerrier recursion; for even n this is also det(L - z I).
    """
    n = L.shape[0]
    c = np.zeros(n)
    M = np.zeros_like(L)
    prev = 1.0
    for j in range(1, n + 1):
        M = L @ M + prev * np.eye(n)
        c[j - 1] = -np.trace(L @ M) / j
        prev = c[j - 1]
    return c


def lax_data(s: PhaseState):
    L = lax_matrix(s)
    return L, charpoly(L)


# ---------------------------------------------------------------------------
# exterior calculus on the coframe

def _w(i, j):
    M = np.zeros((9, 9))
    M[i, j] += 1.0
    M[j, i] -= 1.0
    return M


def _w1(a, b):
    """Wedge of two 1-forms given as coefficient vectors."""
    return np.outer(a, b) - np.outer(b, a)


def _e(i, c=1.0):
    v = np.zeros(9)
    v[i] = c
    return v


def structure_equations(k):
    """Exterior derivatives of omega, eta1..eta5 as 9x9 matrices.

    pi = dk + k^2 eta4 plays the role of the curvature differential.
    """
    om = _e(OMEGA)
    pi = _e(DK) + _e(ETA4, k * k)
    d_omega = _w1(_e(ETA4, k) - _e(ETA2), om) - _w(ETA1, ETA4)
    d_eta1 = -_w1(pi, om) + _w(ETA1, ETA2) + k * _w(ETA1, ETA4)
    d_eta2 = _w1(_e(ETA3, k) - _e(ETA1), om) - _w(ETA1, ETA3)
    d_eta3 = _w1(_e(ETA2, 2.0) - _e(ETA4, k), om) + _w(ETA1, ETA4) + _w(ETA2, ETA3)
    d_eta4 = _w1(_e(ETA5, k) - _e(ETA3), om) - _w(ETA1, ETA5)
    d_eta5 = _w(ETA4, OMEGA) + _w(ETA2, ETA5) - _w(ETA3, ETA4)
    return [d_omega, d_eta1, d_eta2, d_eta3, d_eta4, d_eta5]


@dataclass(frozen=True, eq=False)
class CoframeTwoForm:
    matrix: np.ndarray

    def __call__(self, X, Y):
        return float(np.asarray(X) @ self.matrix @ np.asarray(Y))

    def rank(self, tol=1e-9):
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return int(np.sum(s > tol * max(1.0, s[0])))

    def kernel(self, tol=1e-9):
        _, s, Vt = np.linalg.svd(self.matrix)
        return Vt[s <= tol * max(1.0, s[0])]

    def top_coefficient(self):
        """Coefficient of omega^dk^dl4^dl5^eta1^..^eta5 in omega ^ Psi^4."""
        order = [DK, DL4, DL5, ETA1, ETA2, ETA3, ETA4, ETA5]
        return 24.0 * pfaffian(self.matrix[np.ix_(order, order)])


def pfaffian(M):
    """Pfaffian by expansion along the first row (fine for n <= 10)."""
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    rest = list(range(1, n))
    for jj, j in enumerate(rest):
        if M[0, j] == 0:
            continue
        idx = rest[:jj] + rest[jj + 1:]
        total += (-1) ** jj * M[0, j] * pfaffian(M[np.ix_(idx, idx)])
    return total


def canonical_two_form(s: PhaseState) -> CoframeTwoForm:
    """d of  (1+mk) omega + m eta1 + (1+mk)/2 eta3 + l4 eta4 + l5 eta5."""
    m, k = s.m, s.k
    d = structure_equations(k)
    coef = [1 + m * k, m, 0.0, 0.5 * (1 + m * k), s.l4, s.l5]
    dcoef = [_e(DK, m), None, None, _e(DK, 0.5 * m), _e(DL4), _e(DL5)]
    M = np.zeros((9, 9))
    for a in range(6):
        M += coef[a] * d[a]
        if dcoef[a] is not None:
            M += _w1(dcoef[a], _e(a))
    return CoframeTwoForm(M)


def characteristic_vector(s: PhaseState):
    """Coefficients of the kernel direction normalized by omega = 1."""
    return np.array([1.0, 0, 0, 0, 0, 0, *el_field(s)])


def mc_to_coframe(X: AlgebraElement, k):
    """Coframe components of a group direction given in Maurer-Cartan form."""
    x1, x2, x3, y1, y2, y3 = X.coeffs
    return np.array([x1, y3 - k * x1, y1, y2 - x1, x2, x3, 0.0, 0.0, 0.0])


def polar_generators(s: PhaseState, bare=False):
    """The two isotropy directions S1, S2 completing the kernel to the polar.

    S1 needs the w1-component (1 + mk)/2.  bare=True drops it; that variant
    is not isotropic and lies outside the polar space.
    """
    m, k, l4, l5 = s.m, s.k, s.l4, s.l5
    b = 0.5 * (1 - m * k)
    x1 = 0.0 if bare else 0.5 * (1 + m * k)
    S1 = AlgebraElement([x1, 0.0, -m], -l4, b, -l5)
    S2 = AlgebraElement([l5, -l4, b], 0.0, 0.0, 0.0)
    return S1, S2


def _rank(A, tol):
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def embed_jacobian(s: PhaseState):
    """Columns d phase_embed / d(k, l4, l5) as 6-vectors."""
    m = s.m
    dk = np.array([0, 0, 0.5 * m, -0.5 * m, 0, 0])
    dl4 = np.array([0, 1.0, 0, 0, 0, 0])
    dl5 = np.array([-1.0, 0, 0, 0, 0, 0])
    return np.column_stack([dk, dl4, dl5])


def portrait_tangent(s: PhaseState, tol=1e-8):
    """Basis of F(eta) meet O(eta): fiber directions tangent to the orbit."""
    F = embed_jacobian(s)
    O = ad_star_matrix(phase_embed(s))
    # (a, b) in ker [F | -O]  <=>  F a = O b
    ker = null_space(np.hstack([F, -O]), rcond=tol)
    if ker.size == 0:
        return np.zeros((0, 6))
    return orth(F @ ker[:3], rcond=tol).T


def coisotropy_report(s: PhaseState, tol=1e-8):
    Psi = canonical_two_form(s).matrix
    polar = null_space(Psi[:6, :], rcond=tol).T
    S1, S2 = polar_generators(s)
    cand = np.array([characteristic_vector(s), mc_to_coframe(S1, s.k), mc_to_coframe(S2, s.k)])
    in_polar = max(np.max(np.abs(Psi[:6, :] @ c)) for c in cand) <= tol * max(1.0, np.abs(Psi).max())
    matches = (len(polar) == 3 and in_polar and _rank(cand, tol) == 3
               and _rank(np.vstack([polar, cand]), tol) == 3)
    eta = phase_embed(s)
    rank_g = len(isotropy_basis(eta)) if np.max(np.abs(eta.p)) > tol else None
    bare = mc_to_coframe(polar_generators(s, bare=True)[0], s.k)
    return {
        "bare_s1_residual": float(np.max(np.abs(Psi[:6, :] @ bare))),
        "polar_dim": int(len(polar)),
        "polar_matches_span": bool(matches),
        "linearized_portrait_dim": int(len(portrait_tangent(s, tol))),
        "is_bifurcation": bool(is_bifurcation(s, tol)),
        "dim_identity": rank_g is not None and 9 == 6 + rank_g + 1,
    }


def moment_map(g: GroupElement, s: PhaseState) -> CoalgebraElement:
    return coadjoint(g, phase_embed(s))


# ---------------------------------------------------------------------------
# trajectories

@dataclass(eq=False)
class Trajectory:
    """Time samples of an extremal with conserved-quantity diagnostics."""
    t: np.ndarray
    m: float
    k: np.ndarray
    l4: np.ndarray
    l5: np.ndarray
    frames: np.ndarray          # (n, 4, 4) group matrices
    J: np.ndarray = None        # (n, 6) moment map values (p, v)
    C: np.ndarray = None        # (n, 2) Casimirs
    charpoly: np.ndarray = None  # (n, 4)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.J is None:
            self.fill_diagnostics()

    def fill_diagnostics(self):
        n = len(self.t)
        self.J = np.empty((n, 6))
        self.C = np.empty((n, 2))
        self.charpoly = np.empty((n, 4))
        for i in range(n):
            s = self.state(i)
            eta = phase_embed(s)
            self.J[i] = coadjoint(self.group(i), eta).vector
            # same values as casimirs(J), without the cancellation a large
            # frame brings into J
            self.C[i] = casimirs(eta)
            self.charpoly[i] = lax_data(s)[1]

    def __len__(self):
        return len(self.t)

    def group(self, i) -> GroupElement:
        return GroupElement.from_matrix(self.frames[i])

    def state(self, i) -> PhaseState:
        return PhaseState(self.m, self.k[i], self.l4[i], self.l5[i])

    @property
    def alpha(self):
        return self.frames[:, 1:, 0]

    def drifts(self):
        return {
            "C1": float(np.max(np.abs(self.C[:, 0] - self.C[0, 0]))),
            "C2": float(np.max(np.abs(self.C[:, 1] - self.C[0, 1]))),
            "J": float(np.max(np.abs(self.J - self.J[0]))),
            "J_relative": float(np.max(np.abs(self.J - self.J[0])) / max(1.0, np.max(np.abs(self.J)))),
            "charpoly": float(np.max(np.abs(self.charpoly - self.charpoly[0]))),
        }


def integrate_extremal(s0: PhaseState, g0: GroupElement = None, T=10.0, tol=1e-10,
                       dt_out=0.01, dt_max=None, t_eval=None) -> Trajectory:
    """Integrate the Euler-Lagrange flow together with the frame g' = g H(k).

    The phase variables are advanced by an adaptive explicit Runge-Kutta
    method (DOP853).  Its local tolerance is tol / 100 so that the global
    error, which the moment map amplifies by |q|, stays near tol.  The frame
    is transported on the output grid with a fourth-order Magnus step fed
    by the dense output.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    g0 = GroupElement.identity() if g0 is None else g0
    if t_eval is None:
        n = max(2, int(round(T / dt_out)) + 1)
        t_eval = np.linspace(0.0, T, n)
    t_eval = np.asarray(t_eval, dtype=float)
    dt_max = dt_out if dt_max is None else dt_max
    m = s0.m
    rtol = max(tol / 100, 1e-14)

    def escape(t, y):
        return np.sum(np.abs(y)) - BLOWUP
    escape.terminal = True

    sol = solve_ivp(lambda t, y: _field(m, y), (t_eval[0], t_eval[-1]), s0.y,
                    method="DOP853", rtol=rtol, atol=rtol, dense_output=True,
                    events=escape)
    if sol.status == 1:
        raise NonFiniteState(f"phase state escapes to infinity near t = {sol.t_events[0][0]:.6g}",
                             t=float(sol.t_events[0][0]))
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise IntegrationFailure(sol.message)
    y = sol.sol(t_eval)
    frames = transport(lambda t: hamiltonian_matrix(sol.sol(t)[0]), g0, t_eval, dt_max)
    return Trajectory(t_eval, m, y[0], y[1], y[2], frames)


_D3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0


def third_derivative(f, h):
    """Fourth-order central third derivative at the interior points f[3:-3]."""
    f = np.asarray(f)
    n = len(f)
    return sum(c * f[j:n - 6 + j] for j, c in enumerate(_D3)) / h**3


def third_order_residual(traj: Trajectory, h=0.05):
    """sup |m k''' - 3 m k k' + k'| with k''' by finite differences.

    Samples are thinned to a spacing near h: the stencil divides by h^3,
    so too fine a grid turns solver noise into residual.
    """
    dt = traj.t[1] - traj.t[0]
    if not np.allclose(np.diff(traj.t), dt, rtol=1e-9, atol=0):
        raise ValueError("third_order_residual needs a uniform grid")
    stride = max(1, int(round(h / dt)))
    m = traj.m
    k = traj.k[::stride]
    k3 = third_derivative(k, stride * dt)
    k = k[3:-3]
    k1 = -2 * traj.l4[::stride][3:-3] / m
    return float(np.max(np.abs(m * k3 - 3 * m * k * k1 + k1)))


def first_integral_residual(traj: Trajectory):
    C1, C2 = traj.C[0]
    k1 = -2 * traj.l4 / traj.m
    return float(np.max(np.abs(k1**2 - first_integral_cubic(traj.m, C1, C2, traj.k))))
