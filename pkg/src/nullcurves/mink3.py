"""Vector algebra of Minkowski 3-space.

Vectors are plain numpy arrays of shape (3,) (or (..., 3) where noted) in the
null basis (e1, e2, e3) with inner product

    <v, w> = -(v1 w3 + v3 w1) + v2 w2.

e1 and e3 are future-directed null vectors with <e1, e3> = -1, and e2 is a
unit spacelike vector orthogonal to both.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

# metric matrix; it is its own inverse
G = np.array([[0.0, 0.0, -1.0],
              [0.0, 1.0, 0.0],
              [-1.0, 0.0, 0.0]])

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

# <v, TIME> < 0 defines the future cone
TIME = E1 + E3


def vec(x) -> np.ndarray:
    """Coerce to a finite float vector of length 3."""
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def mink_inner(v, w):
    """Lorentzian inner product; broadcasts over leading axes."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return -(v[..., 0] * w[..., 2] + v[..., 2] * w[..., 0]) + v[..., 1] * w[..., 1]


def mink_norm2(v):
    return mink_inner(v, v)


def mink_cross(v, w):
    """Cross product with <v x w, u> = det(v, w, u) for every u.

    The Euclidean cross product c satisfies c . u = det(v, w, u), so the
    metric cross product is G c (G is an involution).
    """
    c = np.cross(np.asarray(v, dtype=float), np.asarray(w, dtype=float))
    return c @ G


class Kind(str, Enum):
    TIMELIKE = "Timelike"
    SPACELIKE = "Spacelike"
    NULL = "Null"
    ZERO = "Zero"


class Orientation(str, Enum):
    FUTURE = "Future"
    PAST = "Past"
    NONE = "None"


@dataclass(frozen=True)
class CausalClass:
    kind: Kind
    orientation: Orientation

    @property
    def future_null(self):
        return self.kind is Kind.NULL and self.orientation is Orientation.FUTURE


def causal_class(v, tol=1e-10) -> CausalClass:
    """Causal character and time orientation with an absolute tolerance."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v)) <= tol:
        return CausalClass(Kind.ZERO, Orientation.NONE)
    n2 = mink_inner(v, v)
    if abs(n2) <= tol:
        kind = Kind.NULL
    elif n2 < 0:
        kind = Kind.TIMELIKE
    else:
        return CausalClass(Kind.SPACELIKE, Orientation.NONE)
    # a nonzero null or timelike vector is never orthogonal to TIME
    t = mink_inner(v, TIME)
    return CausalClass(kind, Orientation.FUTURE if t < 0 else Orientation.PAST)
