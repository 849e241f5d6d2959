"""The restricted Poincare group E(2,1) of Minkowski 3-space.

A group element g = (q, A) acts by x -> A x + q and is represented by the
4x4 matrix

    [[1, 0],
     [q, A]].

The columns A1, A2, A3 of A form a frame with <Ai, Aj> = G[i, j], det A = 1
and A1, A3 future-directed null.  Algebra elements are (qdot, w11, w21, w12)
with rotational block

    [[w11, w12,   0],
     [w21,   0, w12],
     [  0, w21, -w11]].

Dual elements are pairs (p, v) of Minkowski vectors; the group acts on them by
(p, v) -> (A p, A v - (A p) x q).
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import SingularElement
from .mink3 import G, TIME, mink_cross, mink_inner


def rotation_block(w11, w21, w12):
    return np.array([[w11, w12, 0.0],
                     [w21, 0.0, w12],
                     [0.0, w21, -w11]])


@dataclass(frozen=True, eq=False)
class GroupElement:
    q: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(3))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float).reshape(3, 3))

    @classmethod
    def identity(cls):
        return cls(np.zeros(3), np.eye(3))

    @classmethod
    def translation(cls, q):
        return cls(q, np.eye(3))

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M, dtype=float)
        return cls(M[1:, 0].copy(), M[1:, 1:].copy())

    @property
    def matrix(self):
        M = np.zeros((4, 4))
        M[0, 0] = 1.0
        M[1:, 0] = self.q
        M[1:, 1:] = self.A
        return M

    def __matmul__(self, other):
        return group_compose(self, other)

    def inverse(self):
        return group_inverse(self)

    def invariant_error(self):
        """Largest violation of det A = 1 and <Ai, Aj> = G[i, j]."""
        gram = self.A.T @ G @ self.A
        return max(abs(np.linalg.det(self.A) - 1.0), np.max(np.abs(gram - G)))

    def is_valid(self, tol=1e-10):
        if self.invariant_error() > tol:
            return False
        # A1, A3 future directed
        return mink_inner(self.A[:, 0], TIME) < 0 and mink_inner(self.A[:, 2], TIME) < 0


def group_compose(a: GroupElement, b: GroupElement) -> GroupElement:
    return GroupElement.from_matrix(a.matrix @ b.matrix)


def group_inverse(a: GroupElement) -> GroupElement:
    # A^{-1} = G A^T G for a metric-preserving A
    Ainv = G @ a.A.T @ G
    return GroupElement(-Ainv @ a.q, Ainv)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    qdot: np.ndarray
    w11: float = 0.0
    w21: float = 0.0
    w12: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "qdot", np.asarray(self.qdot, dtype=float).reshape(3))
        for name in ("w11", "w21", "w12"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def zero(cls):
        return cls(np.zeros(3))

    @classmethod
    def from_coeffs(cls, c):
        c = np.asarray(c, dtype=float)
        return cls(c[:3], c[3], c[4], c[5])

    @classmethod
    def from_matrix(cls, M):
        """Read an algebra element off a 4x4 matrix (no shape check)."""
        M = np.asarray(M, dtype=float)
        return cls(M[1:, 0].copy(), M[1, 1], M[2, 1], M[1, 2])

    @property
    def coeffs(self):
        """Coefficients (qdot1, qdot2, qdot3, w11, w21, w12)."""
        return np.array([*self.qdot, self.w11, self.w21, self.w12])

    @property
    def rotation(self):
        return rotation_block(self.w11, self.w21, self.w12)

    @property
    def matrix(self):
        M = np.zeros((4, 4))
        M[1:, 0] = self.qdot
        M[1:, 1:] = self.rotation
        return M

    def __add__(self, other):
        return AlgebraElement.from_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return AlgebraElement.from_coeffs(self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement.from_coeffs(-self.coeffs)

    def __mul__(self, s):
        return AlgebraElement.from_coeffs(self.coeffs * s)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class CoalgebraElement:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[:3], x[3:])

    @property
    def vector(self):
        return np.concatenate([self.p, self.v])

    def __add__(self, other):
        return CoalgebraElement(self.p + other.p, self.v + other.v)

    def __sub__(self, other):
        return CoalgebraElement(self.p - other.p, self.v - other.v)

    def __mul__(self, s):
        return CoalgebraElement(self.p * s, self.v * s)

    __rmul__ = __mul__


ALGEBRA_BASIS = [AlgebraElement.from_coeffs(row) for row in np.eye(6)]

# <(p, v); X> = eta @ PAIRING @ X.coeffs with eta = (p1, p2, p3, v1, v2, v3).
# p pairs with qdot through the metric; v1, v2, v3 pair with -w21, w11, w12.
PAIRING = np.zeros((6, 6))
PAIRING[:3, :3] = G
PAIRING[3, 4] = -1.0
PAIRING[4, 3] = 1.0
PAIRING[5, 5] = 1.0


def exp_algebra(X: AlgebraElement, t=1.0) -> GroupElement:
    return GroupElement.from_matrix(expm(t * X.matrix))


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    MX, MY = X.matrix, Y.matrix
    return AlgebraElement.from_matrix(MX @ MY - MY @ MX)


def adjoint(g: GroupElement, X: AlgebraElement) -> AlgebraElement:
    """g X g^{-1}."""
    return AlgebraElement.from_matrix(g.matrix @ X.matrix @ group_inverse(g).matrix)


def pairing(eta: CoalgebraElement, X: AlgebraElement) -> float:
    return float(eta.vector @ PAIRING @ X.coeffs)


def coadjoint(g: GroupElement, eta: CoalgebraElement) -> CoalgebraElement:
    Ap = g.A @ eta.p
    return CoalgebraElement(Ap, g.A @ eta.v - mink_cross(Ap, g.q))


def ad_star(X: AlgebraElement, eta: CoalgebraElement) -> CoalgebraElement:
    """Derivative at t = 0 of coadjoint(exp_algebra(X, t), eta)."""
    R = X.rotation
    return CoalgebraElement(R @ eta.p, R @ eta.v - mink_cross(eta.p, X.qdot))


def ad_star_matrix(eta: CoalgebraElement):
    """6x6 matrix of the linear map X.coeffs -> ad_star(X, eta).vector."""
    return np.column_stack([ad_star(b, eta).vector for b in ALGEBRA_BASIS])


def casimirs(eta: CoalgebraElement):
    return float(mink_inner(eta.p, eta.p)), float(mink_inner(eta.p, eta.v))


def isotropy_basis(mu: CoalgebraElement, tol=1e-10):
    """Orthonormal coefficient basis of {X : ad_star(X, mu) = 0}."""
    if np.max(np.abs(mu.p)) <= tol:
        raise SingularElement("p = 0: the dual element is not regular")
    _, s, Vt = np.linalg.svd(ad_star_matrix(mu))
    cut = tol * max(1.0, s[0])
    return [AlgebraElement.from_coeffs(row) for sv, row in zip(s, Vt) if sv <= cut]


def reorthonormalize(A):
    """Lorentzian Gram-Schmidt: pull A back onto <Ai, Aj> = G[i, j].

    A2 is normalized first, then the null pair (A1, A3) is made orthogonal
    to A2, null, and scaled so that <A1, A3> = -1.  Intended for frames that
    are already within rounding of the group.
    """
    A1, A2, A3 = (np.array(c) for c in A.T)
    A2 = A2 / np.sqrt(mink_inner(A2, A2))
    A1 = A1 - mink_inner(A1, A2) * A2
    A3 = A3 - mink_inner(A3, A2) * A2
    c = mink_inner(A1, A3)
    A1 = A1 - 0.5 * mink_inner(A1, A1) / c * A3
    A3 = A3 - 0.5 * mink_inner(A3, A3) / c * A1
    s = np.sqrt(-mink_inner(A1, A3))
    return np.column_stack([A1 / s, A2, A3 / s])
