"""Weierstrass p-function toolkit and closed-form extremals.

Along an extremal with Casimirs (C1, C2) the curvature obeys

    (k')^2 = k^3 - k^2/m - (4 C2 + 1) k / m^2 + (4 m C1 + 4 C2 + 1) / m^3.

With h = (k - 1/(3m)) / 4 this becomes (h')^2 = 4 h^3 - g2 h - g3 in the
same time variable (true-time or h-form invariants).  The phase-portrait
form uses chi = |m/4|^(2/3) (k - 1/(3m)) instead, for which
l4^2 = 4 chi^3 - g2^ chi - g3^.

p is evaluated through Jacobi elliptic functions: with three real roots
e1 > e2 > e3 (D < 0),

    p(u) = e3 + (e1 - e3) / sn^2(u sqrt(e1 - e3) | (e2 - e3)/(e1 - e3)),

and with one real root e2 (D > 0), H = sqrt((e2-e1)(e2-e3)),

    p(u) = e2 + H (1 + cn(2 sqrt(H) u)) / (1 - cn(2 sqrt(H) u)),  m = 1/2 - 3 e2 / (4H).
"""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ellipj, ellipk, ellipkinc

from .errors import DegenerateCubic, NearPole, WrongBranch

CASE_I = "CaseI"
CASE_II_COMPACT = "CaseII_compact"
CASE_II_UNBOUNDED = "CaseII_unbounded"
DEGENERATE = "Degenerate"

DEGENERATE_TOL = 1e-12
POLE_TOL = 1e-8


def discriminant(g2, g3):
    return 27.0 * g3 * g3 - g2**3


def _degenerate(g2, g3, D):
    return abs(D) <= DEGENERATE_TOL * max(1.0, abs(g2) ** 3, 27.0 * g3 * g3)


@dataclass(frozen=True)
class WeierstrassInvariants:
    g2: float
    g3: float
    D: float = None
    roots: tuple = ()
    omega1: Optional[float] = None
    omega3: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "g2", float(self.g2))
        object.__setattr__(self, "g3", float(self.g3))
        object.__setattr__(self, "D", discriminant(self.g2, self.g3))

    @property
    def degenerate(self):
        return _degenerate(self.g2, self.g3, self.D)

    @property
    def case(self):
        if self.degenerate:
            return "degenerate"
        return "I" if self.D > 0 else "II"

    def cubic(self, z):
        return 4 * z**3 - self.g2 * z - self.g3

    @property
    def double_root(self):
        """Repeated root of a degenerate cubic."""
        # 4z^3 - g2 z - g3 = 4 (z - e)^2 (z + 2e): g2 = 12 e^2, g3 = -8 e^3
        return -np.sign(self.g3) * np.sqrt(max(self.g2, 0.0) / 12.0)


def _polish(z, g2, g3):
    for _ in range(3):
        f = 4 * z**3 - g2 * z - g3
        df = 12 * z * z - g2
        if df == 0:
            break
        z = z - f / df
    return z


def cubic_roots(g2, g3):
    """Roots of 4 z^3 - g2 z - g3: (e1 > e2 > e3) if real, else (e1, e2, e3)
    with e2 real and e1 = conj(e3), Im e1 > 0."""
    D = discriminant(g2, g3)
    p, q = -g2 / 4.0, -g3 / 4.0
    if D < 0:
        r = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * r), -1.0, 1.0)
        th = np.arccos(arg) / 3.0
        e = sorted((r * np.cos(th - 2 * np.pi * j / 3) for j in range(3)), reverse=True)
        return tuple(_polish(z, g2, g3) for z in e)
    disc = np.sqrt(max(q * q / 4 + p**3 / 27, 0.0))
    e2 = np.cbrt(-q / 2 + disc) + np.cbrt(-q / 2 - disc)
    e2 = _polish(e2, g2, g3)
    im = np.sqrt(max(0.75 * e2 * e2 - g2 / 4.0, 0.0))
    return (complex(-e2 / 2, im), float(e2), complex(-e2 / 2, -im))


def cubic_analysis(inv: WeierstrassInvariants) -> WeierstrassInvariants:
    """Attach roots and half-periods; DegenerateCubic when D = 0."""
    if inv.degenerate:
        raise DegenerateCubic(f"D = {inv.D:.3g}: repeated root, p is elementary")
    roots = cubic_roots(inv.g2, inv.g3)
    if inv.D < 0:
        e1, e2, e3 = roots
        lam = np.sqrt(e1 - e3)
        mp = (e2 - e3) / (e1 - e3)
        w1 = ellipk(mp) / lam
        w3 = 1j * ellipk(1 - mp) / lam
    else:
        e2 = roots[1]
        H = np.sqrt(3 * e2 * e2 - inv.g2 / 4)
        mp = 0.5 - 0.75 * e2 / H
        w1 = ellipk(mp) / np.sqrt(H)
        w3 = (ellipk(mp) + 1j * ellipk(1 - mp)) / (2 * np.sqrt(H))
    return replace(inv, roots=roots, omega1=float(w1), omega3=complex(w3))


def analyzed(g2, g3):
    inv = WeierstrassInvariants(g2, g3)
    try:
        return cubic_analysis(inv)
    except DegenerateCubic:
        return inv


def invariants_from_casimirs(m, C1, C2):
    """(portrait form, true-time form) invariants for given Casimirs."""
    if m == 0:
        raise ValueError("m must be nonzero")
    a = abs(4.0 / m) ** (2.0 / 3.0)
    portrait = analyzed(a * (1.0 / 3.0 + C2), -(C1 + 2.0 * C2 / (3 * m) + 4.0 / (27 * m)))
    true_time = analyzed((C2 + 1.0 / 3.0) / m**2, -(m * C1 / 4 + C2 / 6 + 1.0 / 27) / m**3)
    return portrait, true_time


# ---------------------------------------------------------------------------
# Jacobi functions with complex argument

def jacobi(u, mp):
    """sn, cn, dn for real or complex u (parameter mp in [0, 1])."""
    u = np.asarray(u)
    if not np.iscomplexobj(u):
        sn, cn, dn, _ = ellipj(u, mp)
        return sn, cn, dn
    s, c, d, _ = ellipj(u.real, mp)
    s1, c1, d1, _ = ellipj(u.imag, 1 - mp)
    den = c1 * c1 + mp * s * s * s1 * s1
    sn = (s * d1 + 1j * c * d * s1 * c1) / den
    cn = (c * c1 - 1j * s * d * s1 * d1) / den
    dn = (d * c1 * d1 - 1j * mp * s * c * s1) / den
    return sn, cn, dn


def _lattice_reduce(u, inv):
    """Shift u by periods towards the fundamental cell and return it with
    the distance to the nearest pole."""
    w1, w3 = 2 * inv.omega1, 2 * inv.omega3
    if not np.iscomplexobj(u):
        # the real axis has period 2 omega1 in both cases
        u = np.asarray(u, dtype=float)
        red = u - w1 * np.round(u / w1)
        return red, np.abs(red)
    u = np.asarray(u, dtype=complex)
    B = np.array([[w1, w3.real], [0.0, w3.imag]])
    ab = np.linalg.solve(B, np.stack([np.ravel(u.real), np.ravel(u.imag)]))
    n = np.round(ab)
    red = u - (n[0] * w1 + n[1] * w3).reshape(u.shape)
    dist = np.full(u.shape, np.inf)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            dist = np.minimum(dist, np.abs(red - (i * w1 + j * w3)))
    return red, dist


def wp(t, inv: WeierstrassInvariants):
    """Values of p and p' at t (scalar or array, real or complex)."""
    if inv.degenerate:
        return _wp_degenerate(t, inv)
    if inv.omega1 is None:
        inv = cubic_analysis(inv)
    u, dist = _lattice_reduce(t, inv)
    if np.any(dist < POLE_TOL):
        raise NearPole(f"argument within {np.min(dist):.2g} of a pole")
    if inv.D < 0:
        e1, e2, e3 = inv.roots
        lam = np.sqrt(e1 - e3)
        sn, cn, dn = jacobi(lam * u, (e2 - e3) / (e1 - e3))
        p = e3 + (e1 - e3) / sn**2
        dp = -2 * lam**3 * cn * dn / sn**3
    else:
        e2 = inv.roots[1]
        H = np.sqrt(3 * e2 * e2 - inv.g2 / 4)
        sn, cn, dn = jacobi(2 * np.sqrt(H) * u, 0.5 - 0.75 * e2 / H)
        p = e2 + H * (1 + cn) / (1 - cn)
        dp = -4 * H**1.5 * sn * dn / (1 - cn) ** 2
    return p, dp


def _wp_degenerate(t, inv):
    t = np.asarray(t)
    if np.any(np.abs(t) < POLE_TOL):
        raise NearPole("argument too close to 0")
    e = inv.double_root
    if e == 0 or abs(e) < 1e-300:
        return 1 / t**2, -2 / t**3
    if e > 0:
        kap = np.sqrt(3 * e)
        s = np.sinh(kap * t)
        return e + 3 * e / s**2, -6 * e * kap * np.cosh(kap * t) / s**3
    kap = np.sqrt(-3 * e)
    s = np.sin(kap * t)
    if np.any(np.abs(s) < POLE_TOL):
        raise NearPole("argument too close to a pole")
    return e - 3 * e / s**2, 6 * e * kap * np.cos(kap * t) / s**3


def wp3(t, inv: WeierstrassInvariants):
    """p(t + omega3) on the real line for three real roots (bounded branch)."""
    if inv.omega1 is None:
        inv = cubic_analysis(inv)
    if inv.D >= 0:
        raise WrongBranch("the bounded real branch needs three real roots (D < 0)")
    e1, e2, e3 = inv.roots
    lam = np.sqrt(e1 - e3)
    sn, cn, dn = jacobi(lam * np.asarray(t, dtype=float), (e2 - e3) / (e1 - e3))
    return e3 + (e2 - e3) * sn**2, 2 * (e2 - e3) * lam * sn * cn * dn


def laurent_coefficients(g2, g3, n):
    """c_2..c_n with p(z) = 1/z^2 + sum_k c_k z^(2k-2)."""
    c = {2: g2 / 20.0, 3: g3 / 28.0}
    for k in range(4, n + 1):
        c[k] = 3.0 / ((2 * k + 1) * (k - 3)) * sum(c[j] * c[k - j] for j in range(2, k - 1))
    return [c[k] for k in range(2, n + 1)]


# ---------------------------------------------------------------------------
# closed-form extremals

@dataclass(frozen=True)
class ClosedFormPath:
    """k, l4, l5 in closed form along one extremal.

    At flow time t the p-argument is u = t - t0.  For degenerate invariants
    `kind` names the elementary solution (unbounded, homoclinic, periodic,
    rational or equilibrium).
    """
    m: float
    C1: float
    C2: float
    t0: float
    branch: str
    invariants_true_time: WeierstrassInvariants
    invariants_portrait: WeierstrassInvariants
    kind: str = ""

    def h(self, t):
        """h and dh/dt at flow times t."""
        u = np.asarray(t, dtype=float) - self.t0
        inv = self.invariants_true_time
        if self.branch == CASE_II_COMPACT:
            return wp3(u, inv)
        if self.branch != DEGENERATE:
            return wp(u, inv)
        e = inv.double_root
        if self.kind == "equilibrium":
            return np.full(np.shape(u), e), np.zeros(np.shape(u))
        if self.kind == "homoclinic":
            kap = np.sqrt(3 * e)
            c = np.cosh(kap * u)
            return e - 3 * e / c**2, 6 * e * kap * np.sinh(kap * u) / c**3
        return _wp_degenerate(u, inv)

    def evaluate(self, t):
        """Arrays k, l4, l5 at flow times t."""
        m = self.m
        h, dh = self.h(t)
        k = 4 * h + 1 / (3 * m)
        l4 = -2 * m * dh
        l5 = (self.C2 + 0.25 * (1 - m * m * k * k)) / m
        return k, l4, l5

    @property
    def period(self):
        """Period in t of the bounded branches (None otherwise)."""
        if self.branch in (CASE_II_COMPACT, CASE_II_UNBOUNDED, CASE_I):
            return 2 * self.invariants_true_time.omega1
        return None


def _branch_argument(branch, kind, inv, h0):
    """u* >= 0 on the monotone half-branch with p(u*) = h0, and the sign of
    p' there (+1 or -1)."""
    if branch == CASE_II_COMPACT:
        e1, e2, e3 = inv.roots
        x = np.clip((h0 - e3) / (e2 - e3), 0.0, 1.0)
        return ellipkinc(np.arcsin(np.sqrt(x)), (e2 - e3) / (e1 - e3)) / np.sqrt(e1 - e3), 1
    if branch == CASE_II_UNBOUNDED:
        e1, e2, e3 = inv.roots
        x = np.clip((e1 - e3) / (h0 - e3), 0.0, 1.0)
        return ellipkinc(np.arcsin(np.sqrt(x)), (e2 - e3) / (e1 - e3)) / np.sqrt(e1 - e3), -1
    if branch == CASE_I:
        e2 = inv.roots[1]
        H = np.sqrt(3 * e2 * e2 - inv.g2 / 4)
        c = np.clip((h0 - e2 - H) / (h0 - e2 + H), -1.0, 1.0)
        return ellipkinc(np.arccos(c), 0.5 - 0.75 * e2 / H) / (2 * np.sqrt(H)), -1
    e = inv.double_root
    if kind == "equilibrium":
        return 0.0, 1
    if kind == "rational":
        return 1 / np.sqrt(h0), -1
    if kind == "homoclinic":
        kap = np.sqrt(3 * e)
        return np.arccosh(np.sqrt(max(3 * e / (e - h0), 1.0))) / kap, 1
    if kind == "unbounded":
        kap = np.sqrt(3 * e)
        return np.arcsinh(np.sqrt(3 * e / (h0 - e))) / kap, -1
    kap = np.sqrt(-3 * e)  # periodic blow-up, e < 0
    return np.arcsin(np.sqrt(min(-3 * e / (h0 - e), 1.0))) / kap, -1


def _degenerate_kind(inv, h0, tol):
    e = inv.double_root
    scale = max(1.0, abs(e))
    if abs(h0 - e) <= tol * scale:
        return "equilibrium"
    if abs(e) <= tol:
        return "rational"
    if e > 0:
        return "homoclinic" if h0 < e else "unbounded"
    return "periodic"


def closed_form_from_state(s, branch=None, tol=1e-9) -> ClosedFormPath:
    """Closed-form path through the phase state s at t = 0.

    t0 solves p(-t0) = h(k0) on the branch containing h(k0), with the sign of
    p'(-t0) fixed by l4; at turning points both signs give the same point.
    """
    from .dynamics import el_field, phase_embed
    from .e21 import casimirs

    m = s.m
    C1, C2 = casimirs(phase_embed(s))
    portrait, inv = invariants_from_casimirs(m, C1, C2)
    h0 = (s.k - 1 / (3 * m)) / 4
    dh0 = -s.l4 / (2 * m)
    kind = ""
    if inv.degenerate:
        found = DEGENERATE
        kind = _degenerate_kind(inv, h0, tol)
    elif inv.D > 0:
        found = CASE_I
    else:
        e1, e2, e3 = inv.roots
        slack = tol * max(1.0, abs(e1), abs(e3))
        if h0 <= e2 + slack:
            found = CASE_II_COMPACT
        elif h0 >= e1 - slack:
            found = CASE_II_UNBOUNDED
        else:
            raise WrongBranch("state is between the middle and largest root")
    if branch is not None and branch != found:
        raise WrongBranch(f"state lies on the {found} branch, not {branch}")

    ustar, sign = _branch_argument(found, kind, inv, h0)
    scale = max(1.0, abs(dh0))
    if abs(dh0) <= tol * scale:
        # turning point: decide with the acceleration; both choices coincide
        dl4 = el_field(s)[1]
        want = -dl4
    else:
        want = dh0
    u0 = ustar if want * sign >= 0 else -ustar
    return ClosedFormPath(m, C1, C2, -u0, found, inv, portrait, kind)


def closed_form_state(path: ClosedFormPath, t):
    from .dynamics import PhaseState
    k, l4, l5 = path.evaluate(float(t))
    return PhaseState(path.m, float(k), float(l4), float(l5))


def portrait_chi(m, k):
    return abs(m / 4.0) ** (2.0 / 3.0) * (k - 1 / (3 * m))


def level_set_l4_squared(m, C1, C2, k):
    """l4^2 on the fiber of the moment map as a cubic in k."""
    return (m * m / 4 * k**3 - m / 4 * k**2 - (0.25 + C2) * k
            + C1 + C2 / m + 1 / (4 * m))


def level_set_l5(m, C2, k):
    return (0.25 * (1 - m * m * k * k) + C2) / m


def measured_time_scale(m, C1, C2, s=None):
    """dt/ds between the portrait parameter s (chi = p(s), l4 = p'(s)) and
    flow time, measured from the two parametrizations at sample points."""
    portrait, _ = invariants_from_casimirs(m, C1, C2)
    inv = portrait if portrait.degenerate else cubic_analysis(portrait)
    if s is None:
        w = inv.omega1 if inv.omega1 is not None else 1.0
        # stay away from s = omega1, where p' vanishes and the ratio is 0/0
        s = np.linspace(0.15, 0.8, 9) * w
    eps = 1e-3
    chi, dchi = wp(s, inv)
    a = abs(4.0 / m) ** (2.0 / 3.0)
    # k(s) = a chi(s) + 1/(3m); dk/ds by 5-point central differences of p
    f = [wp(s + j * eps, inv)[0] for j in (-2, -1, 1, 2)]
    kp = a * (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * eps)
    dkdt = -2 * dchi / m
    return kp / dkdt


def portrait_branches(m, C1, C2, n=400, chi_max=None):
    """Sampled components of the level curve l4^2 = 4 chi^3 - g2 chi - g3.

    Each component is a dict with keys name, s, chi, l4, k, l5.
    """
    portrait, _ = invariants_from_casimirs(m, C1, C2)
    a = abs(4.0 / m) ** (2.0 / 3.0)
    comps = []

    def pack(name, s, chi, l4):
        k = a * chi + 1 / (3 * m)
        return {"name": name, "s": s, "chi": chi, "l4": l4, "k": k,
                "l5": level_set_l5(m, C2, k)}

    if portrait.degenerate:
        e = portrait.double_root
        top = chi_max if chi_max is not None else 4 * max(1.0, abs(e)) + 4
        if e > 0:
            # nodal loop through chi = e, p(s + omega3) in the limit
            kap = np.sqrt(3 * e)
            s = np.linspace(-12, 12, n) / kap
            c = np.cosh(kap * s)
            comps.append(pack("degenerate", s, e - 3 * e / c**2, 6 * e * kap * np.sinh(kap * s) / c**3))
        sgrid = _unbounded_grid(portrait, top, n)
        chi, dchi = wp(sgrid, portrait)
        comps.append(pack("degenerate", sgrid, chi, dchi))
        return portrait, comps

    inv = cubic_analysis(portrait)
    w1 = inv.omega1
    top = chi_max if chi_max is not None else max(4.0, 2 * abs(inv.roots[0]) + 2)
    if inv.D < 0:
        s = np.linspace(0, 2 * w1, n)
        chi, dchi = wp3(s, inv)
        comps.append(pack("compact", s, chi, dchi))
    sgrid = _unbounded_grid(inv, top, n)
    chi, dchi = wp(sgrid, inv)
    comps.append(pack("unbounded" if inv.D < 0 else "caseI", sgrid, chi, dchi))
    return inv, comps


def _first_s_below(inv, top):
    """Smallest s > 0 with p(s) <= top on the branch with a pole at 0."""
    if inv.degenerate:
        e = inv.double_root
        if e == 0:
            return 1 / np.sqrt(top)
        if e > 0:
            kap = np.sqrt(3 * e)
            return np.arcsinh(np.sqrt(3 * e / max(top - e, 1e-300))) / kap
        kap = np.sqrt(-3 * e)
        return np.arcsin(np.sqrt(min(-3 * e / (top - e), 1.0))) / kap
    branch = CASE_I if inv.D > 0 else CASE_II_UNBOUNDED
    return _branch_argument(branch, "", inv, top)[0]


def _unbounded_grid(inv, top, n):
    s0 = _first_s_below(inv, top)
    if inv.degenerate:
        e = inv.double_root
        if e < 0:
            half = np.pi / (2 * np.sqrt(-3 * e))
            return np.linspace(s0, 2 * half - s0, n)
        # not periodic: both halves of the branch, s < 0 and s > 0
        half = np.geomspace(s0, s0 + 20, n // 2)
        return np.concatenate([-half[::-1], half])
    return np.linspace(s0, 2 * inv.omega1 - s0, n)
