"""Coadjoint orbits of E(2,1), cross-sections of the moment-map fibration and
reconstruction of extremals by one quadrature.

An extremal (G(t), eta(t)) with moment map value mu is recovered from its
phase curve eta(t) alone.  A section g(t) with coadjoint(g(t), mu) = eta(t)
is built pointwise; then G = h g^{-1}, where h lives in the Abelian isotropy
group of mu and solves h^{-1} h' = g^{-1} H g + g^{-1} g'.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .dynamics import (PhaseState, Trajectory, el_field, hamiltonian_matrix,
                       phase_embed, phase_unembed)
from .e21 import (AlgebraElement, CoalgebraElement, GroupElement, ad_star,
                  casimirs, coadjoint, exp_algebra, isotropy_basis)
from .errors import FrameDegenerate, NotInIsotropy, SingularOrbit
from .mink3 import E1, E2, E3, TIME, mink_cross, mink_inner

SECTION_TOL = 1e-9
_NEG_AXIS = E1 + E3


class OrbitKind(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE_FUTURE = "NegativeFuture"
    NEGATIVE_PAST = "NegativePast"
    NULL_FUTURE = "NullFuture"
    NULL_PAST = "NullPast"
    SINGULAR = "Singular"


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    C1: float
    C2: float

    @property
    def future(self):
        return self.kind in (OrbitKind.NEGATIVE_FUTURE, OrbitKind.NULL_FUTURE)

    @property
    def null(self):
        return self.kind in (OrbitKind.NULL_FUTURE, OrbitKind.NULL_PAST)

    @property
    def negative(self):
        return self.kind in (OrbitKind.NEGATIVE_FUTURE, OrbitKind.NEGATIVE_PAST)


@dataclass(frozen=True)
class SectionResult:
    g: GroupElement
    mu_std: CoalgebraElement


def classify_orbit(eta: CoalgebraElement, tol=1e-10) -> OrbitClass:
    """Orbit type of eta from the sign of C1 and the time orientation of p."""
    C1, C2 = casimirs(eta)
    p = eta.p
    if np.max(np.abs(p)) <= tol:
        return OrbitClass(OrbitKind.SINGULAR, float(C1), float(C2))
    if abs(C1) <= tol:
        future = mink_inner(p, TIME) < 0
        kind = OrbitKind.NULL_FUTURE if future else OrbitKind.NULL_PAST
    elif C1 > 0:
        kind = OrbitKind.POSITIVE
    else:
        future = mink_inner(p, TIME) < 0
        kind = OrbitKind.NEGATIVE_FUTURE if future else OrbitKind.NEGATIVE_PAST
    return OrbitClass(kind, float(C1), float(C2))


def _sigma(cls: OrbitClass):
    return 1.0 if cls.future else -1.0


def standard_form(cls: OrbitClass) -> CoalgebraElement:
    """Normal form (m1, m2) of the orbit; past-directed kinds mirror the
    future-directed ones through p -> -p."""
    C1, C2 = cls.C1, cls.C2
    if cls.kind == OrbitKind.SINGULAR:
        raise SingularOrbit("p = 0 has no standard form here")
    if cls.kind == OrbitKind.POSITIVE:
        r = np.sqrt(C1)
        return CoalgebraElement(r * E2, C2 / r * E2)
    sg = _sigma(cls)
    if cls.negative:
        c = np.sqrt(2 * abs(C1))
        return CoalgebraElement(sg * np.sqrt(abs(C1) / 2) * _NEG_AXIS, -sg * C2 / c * _NEG_AXIS)
    return CoalgebraElement(sg * E1, -sg * C2 * E3)


def _positive_section(p, v, C1):
    S = np.array([p[1], p[2] - p[0], -p[1]])
    n2 = mink_inner(S, S)
    if n2 <= 0:
        raise FrameDegenerate("auxiliary vector S is not spacelike")
    S = S / np.sqrt(n2)
    A2 = p / np.sqrt(C1)
    T = mink_cross(A2, S)
    A1 = (T + S) / np.sqrt(2)
    if mink_inner(A1, TIME) > 0:
        S = -S
        T = -T
        A1 = (T + S) / np.sqrt(2)
    A3 = (T - S) / np.sqrt(2)
    Q = -mink_cross(A2, v) / np.sqrt(C1)
    return Q, np.column_stack([A1, A2, A3])


def _negative_section(p, v, C1, sg):
    pf = sg * p
    if abs(pf[2]) < 1e-300:
        raise FrameDegenerate("p3 vanishes on a timelike p")
    c = np.sqrt(2 * abs(C1))
    S = np.array([pf[1] / pf[2], 1.0, 0.0])
    pS = mink_cross(pf, S)
    A = np.column_stack([(pf - pS) / c, S, (pf + pS) / c])
    return mink_cross(p, v) / abs(C1), A


def _null_section(p, v, sg, branch, tol):
    if branch == "primary":
        if abs(p[2]) <= tol * max(1.0, np.max(np.abs(p))):
            raise FrameDegenerate("p3 vanishes; use the alternate null branch")
        A3 = sg * E1 / p[2]
        A2 = np.array([p[1] / p[2], 1.0, 0.0])
    else:
        if abs(p[0]) <= tol * max(1.0, np.max(np.abs(p))):
            raise FrameDegenerate("p1 vanishes; use the primary null branch")
        A3 = sg * E3 / p[0]
        A2 = np.array([0.0, 1.0, p[1] / p[0]])
    A = np.column_stack([sg * p, A2, A3])
    if np.linalg.det(A) < 0:
        A[:, 1] = -A[:, 1]
    return sg * mink_cross(A3, v), A


def cross_section(eta: CoalgebraElement, tol=SECTION_TOL, branch=None,
                  cls: OrbitClass = None) -> SectionResult:
    """Group element g with coadjoint(g, standard_form) = eta.

    For null p two frame completions exist: "primary" divides by p3 and
    "alternate" by p1.  Without a choice the one with the larger divisor is
    used.  The result is checked against eta before it is returned.
    """
    cls = classify_orbit(eta) if cls is None else cls
    p, v = eta.p, eta.v
    if cls.kind == OrbitKind.SINGULAR:
        raise SingularOrbit("p = 0")
    if cls.kind == OrbitKind.POSITIVE:
        Q, A = _positive_section(p, v, cls.C1)
    elif cls.negative:
        Q, A = _negative_section(p, v, cls.C1, _sigma(cls))
    else:
        if branch is None:
            branch = "primary" if abs(p[2]) >= abs(p[0]) else "alternate"
        Q, A = _null_section(p, v, _sigma(cls), branch, tol)
    g = GroupElement(Q, A)
    mu = standard_form(cls)
    err = np.max(np.abs(coadjoint(g, mu).vector - eta.vector))
    if not np.isfinite(err) or err > tol * max(1.0, np.max(np.abs(eta.vector))):
        raise FrameDegenerate(f"section misses eta by {err:.3g}")
    return SectionResult(g, mu)


class SectionPath:
    """A section t -> g(t) along a phase curve eta(t).

    Positive and negative orbits have a single smooth recipe.  On null
    orbits the primary completion degenerates where p3 = 0 and the
    alternate one where p1 = 0; both can happen along one orbit, so the
    branch is chosen per interval, keeping the current one until its divisor
    drops below half of the other.
    """

    def __init__(self, eta, t0=0.0, tol=SECTION_TOL):
        self.eta = eta
        self.tol = tol
        self.cls = classify_orbit(eta(t0), tol=1e-8)
        self.mu = standard_form(self.cls)

    def branch_at(self, t, current=None):
        if not self.cls.null:
            return None
        p = self.eta(t).p
        d = {"primary": abs(p[2]), "alternate": abs(p[0])}
        if current is not None and d[current] >= 0.5 * max(d.values()):
            return current
        return max(d, key=d.get)

    def matrix(self, t, branch=None):
        return cross_section(self.eta(t), self.tol, branch=branch, cls=self.cls).g.matrix

    def __call__(self, t, branch=None) -> SectionResult:
        return SectionResult(GroupElement.from_matrix(self.matrix(t, branch)), self.mu)

    def derivative(self, t, branch=None, delta=1e-3):
        """g'(t) by fourth-order central differences on one branch."""
        f = [self.matrix(t + j * delta, branch) for j in (-2, -1, 1, 2)]
        return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * delta)


# ---------------------------------------------------------------------------
# quadrature

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _integrand(section: SectionPath, eta, vmu, t, branch):
    """Matrix of g^{-1} H g vmu + g^{-1} g' at t."""
    M = section.matrix(t, branch)
    Minv = np.linalg.inv(M)
    k = phase_unembed(eta(t)).k
    return vmu * Minv @ hamiltonian_matrix(k) @ M + Minv @ section.derivative(t, branch)


def _isotropy_coords(Z, basis):
    """Least-squares coordinates of the algebra matrix Z on the isotropy
    basis and the residual of that projection."""
    z = AlgebraElement.from_matrix(Z).coeffs
    B = np.stack([b.coeffs for b in basis], axis=1)
    c, *_ = np.linalg.lstsq(B, z, rcond=None)
    return c, float(np.max(np.abs(B @ c - z)))


def measure_vmu(section: SectionPath, eta, ts):
    """Time-scale factor that puts the integrand into the isotropy algebra.

    The integrand is vmu a + b with a = g^{-1} H g and b = g^{-1} g'; vmu is
    the least-squares value killing the component off the isotropy algebra.
    Returns one value per sample.
    """
    basis = isotropy_basis(section.mu)
    B = np.stack([b.coeffs for b in basis], axis=1)
    P = np.eye(6) - B @ np.linalg.pinv(B)
    out = []
    for t in np.atleast_1d(ts):
        br = section.branch_at(t)
        M = section.matrix(t, br)
        Minv = np.linalg.inv(M)
        a = P @ AlgebraElement.from_matrix(Minv @ hamiltonian_matrix(phase_unembed(eta(t)).k) @ M).coeffs
        b = P @ AlgebraElement.from_matrix(Minv @ section.derivative(t, br)).coeffs
        out.append(-(a @ b) / (a @ a))
    return np.array(out)


@dataclass
class QuadratureResult:
    t: np.ndarray
    h: np.ndarray            # (n, 4, 4) isotropy-group elements
    sections: np.ndarray     # (n, 4, 4) section frames g(t)
    mu: CoalgebraElement
    residual: float          # worst isotropy-projection residual of the integrand
    switches: list           # times where the null frame branch changes

    def group(self, i) -> GroupElement:
        return GroupElement.from_matrix(self.h[i])


def _check_isotropic(Hm, mu, tol, what):
    err = np.max(np.abs(coadjoint(GroupElement.from_matrix(Hm), mu).vector - mu.vector))
    if err > tol * max(1.0, np.max(np.abs(mu.vector))):
        raise NotInIsotropy(f"{what} moves mu by {err:.3g}")


def gauge_quadrature(section: SectionPath, eta, vmu=1.0, t0=0.0, t=1.0, tol=1e-8,
                     dt=0.01) -> QuadratureResult:
    """Integrate h^{-1} h' = g^{-1} H g vmu + g^{-1} g' from h(t0) = 1.

    The integrand lies in the Abelian isotropy algebra of mu, so each grid
    interval contributes the exponential of the integral of its coordinates
    (5-point Gauss-Legendre).  A change of null frame branch at a grid
    point multiplies h by g_old^{-1} g_new, which fixes mu, so h g^{-1} stays
    continuous.  `t` is an end time or a grid.
    """
    grid = np.asarray(t, dtype=float)
    if grid.ndim == 0:
        n = max(1, int(np.ceil(abs(float(grid) - t0) / dt)))
        grid = np.linspace(t0, float(grid), n + 1)
    basis = isotropy_basis(section.mu)
    Bm = [b.matrix for b in basis]
    n = len(grid)
    frames = np.empty((n, 4, 4))
    hs = np.empty((n, 4, 4))
    branch = section.branch_at(grid[0])
    frames[0] = section.matrix(grid[0], branch)
    hs[0] = h = np.eye(4)
    worst = 0.0
    switches = []
    for i in range(1, n):
        a, b = grid[i - 1], grid[i]
        mid, half = (a + b) / 2, (b - a) / 2
        new = section.branch_at(mid, branch)
        if new != branch:
            jump = np.linalg.solve(frames[i - 1], section.matrix(a, new))
            _check_isotropic(jump, section.mu, 1e-8, "branch change")
            h = h @ jump
            branch = new
            switches.append(float(a))
        acc = np.zeros(len(basis))
        for x, w in zip(_GL_X, _GL_W):
            u = mid + half * x
            c, r = _isotropy_coords(_integrand(section, eta, vmu, u, branch), basis)
            scale = max(1.0, np.max(np.abs(c)))
            if r > tol * scale:
                raise NotInIsotropy(f"integrand leaves the isotropy algebra by {r:.3g} at t = {u:.6g}")
            worst = max(worst, r / scale)
            acc += w * half * c
        h = h @ expm(sum(ci * Bi for ci, Bi in zip(acc, Bm)))
        hs[i] = h
        frames[i] = section.matrix(b, branch)
    _check_isotropic(hs[-1], section.mu, 10 * tol, "quadrature output")
    return QuadratureResult(grid, hs, frames, section.mu, worst, switches)


def reconstruct_horizontal(quad: QuadratureResult, eta, m) -> Trajectory:
    """Extremal (h g^{-1}, eta) on the quadrature grid."""
    frames = np.array([H @ np.linalg.inv(M) for H, M in zip(quad.h, quad.sections)])
    states = [phase_unembed(eta(t)) for t in quad.t]
    return Trajectory(quad.t, m, np.array([s.k for s in states]),
                      np.array([s.l4 for s in states]), np.array([s.l5 for s in states]),
                      frames)


def characteristic_residual(traj: Trajectory):
    """Sup-norm residuals of G^{-1} G' = H(k) and eta' = -ad*(H) eta on the
    trajectory grid, with derivatives by 7-point finite differences."""
    from .frenet import fd_derivatives

    t = traj.t
    n = len(t)
    dG = fd_derivatives(t, traj.frames.reshape(n, 16), order=1)[0].reshape(n, 4, 4)
    eta = np.array([phase_embed(traj.state(i)).vector for i in range(n)])
    deta = fd_derivatives(t, eta, order=1)[0]
    group = fiber = 0.0
    for i in range(n):
        Hm = hamiltonian_matrix(traj.k[i])
        group = max(group, np.max(np.abs(np.linalg.solve(traj.frames[i], dG[i]) - Hm)))
        e = CoalgebraElement.from_vector(eta[i])
        H = AlgebraElement.from_matrix(Hm)
        fiber = max(fiber, np.max(np.abs(deta[i] + ad_star(H, e).vector)))
    return {"group": float(group), "fiber": float(fiber)}


def left_alignment(a: Trajectory, b: Trajectory):
    """Constant L with a.frames[0] = L b.frames[0] and the sup deviation of
    a.frames from L b.frames over the common grid."""
    L = a.frames[0] @ np.linalg.inv(b.frames[0])
    dev = np.max(np.abs(a.frames - L @ b.frames))
    return GroupElement.from_matrix(L), float(dev)


@dataclass
class Reconstruction:
    trajectory: Trajectory
    quadrature: QuadratureResult
    orbit: OrbitClass


def reconstruct_from_state(s0: PhaseState, T, dt=0.01, vmu=1.0, tol=1e-8) -> Reconstruction:
    """Four steps: closed-form phase curve, section, quadrature, extremal."""
    from .elliptic import closed_form_from_state, closed_form_state

    path = closed_form_from_state(s0)

    def eta(t):
        return phase_embed(closed_form_state(path, t))

    section = SectionPath(eta, 0.0)
    quad = gauge_quadrature(section, eta, vmu=vmu, t0=0.0, t=T, tol=tol, dt=dt)
    return Reconstruction(reconstruct_horizontal(quad, eta, s0.m), quad, section.cls)


def one_parameter_orbit(s: PhaseState, g0: GroupElement, t):
    """Frames g0 Exp(t H) through a bifurcation state (constant curvature)."""
    if np.max(np.abs(el_field(s))) > 1e-10:
        raise ValueError("state is not a bifurcation point")
    H = AlgebraElement.from_matrix(hamiltonian_matrix(s.k))
    return np.array([(g0 @ exp_algebra(H, float(ti))).matrix for ti in np.atleast_1d(t)])
