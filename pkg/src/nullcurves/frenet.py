"""Frenet frames of normalized null curves.

A null curve alpha is normalized when <alpha'', alpha''> = 1.  Its frame is

    A1 = alpha',  A2 = alpha'',  A3 = alpha''' - k alpha',
    k = -1/2 <alpha''', alpha'''>,

and g = (alpha, A) solves g' = g H(k) in E(2,1).
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson

from ._lie import transport
from .dynamics import hamiltonian_matrix
from .e21 import GroupElement, group_inverse
from .errors import FlexPoint, IntegrationFailure, NotNormalized, NotNull
from .mink3 import TIME, mink_inner


@dataclass(eq=False)
class NullCurveSamples:
    t: np.ndarray
    alpha: np.ndarray   # (n, 3)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.alpha.shape != (len(self.t), 3):
            raise ValueError("alpha must have shape (len(t), 3)")


@dataclass(eq=False)
class AnalyticCurve:
    """Curve given by callables for alpha and its first three derivatives."""
    t: np.ndarray
    d0: Callable
    d1: Callable
    d2: Callable
    d3: Callable


@dataclass(eq=False)
class FrameField:
    t: np.ndarray
    frames: np.ndarray  # (n, 4, 4)
    k: np.ndarray

    def group(self, i) -> GroupElement:
        return GroupElement.from_matrix(self.frames[i])

    @property
    def alpha(self):
        return self.frames[:, 1:, 0]

    @property
    def A(self):
        return self.frames[:, 1:, 1:]

    def curve(self) -> NullCurveSamples:
        return NullCurveSamples(self.t, self.alpha)

    def translate(self, g: GroupElement) -> "FrameField":
        return FrameField(self.t, g.matrix @ self.frames, self.k.copy())


def fd_weights(x, x0, order):
    """Finite-difference weights for derivatives 0..order at x0 (Fornberg)."""
    n = len(x)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def fd_derivatives(t, y, order=3, width=7):
    """Derivatives 1..order of samples y (n, ...) on the grid t.

    Uses a window of `width` nodes, centred where possible and shifted at
    the ends (one-sided stencils keep the same number of nodes).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(t)
    if n < width:
        raise ValueError(f"need at least {width} samples")
    out = np.zeros((order,) + y.shape)
    half = width // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = slice(lo, lo + width)
        w = fd_weights(t[idx], t[i], order)
        out[:, i] = np.tensordot(w[:, 1:].T, y[idx], axes=1)
    return out


def _frame(d1, d2, d3):
    k = -0.5 * mink_inner(d3, d3)
    A3 = d3 - k[..., None] * d1
    return np.stack([d1, d2, A3], axis=-1), k


def analyze_curve(curve, tol=1e-8) -> FrameField:
    """Frenet frame and curvature of a normalized null curve."""
    if isinstance(curve, AnalyticCurve):
        t = np.asarray(curve.t, dtype=float)
        a = np.array([curve.d0(s) for s in t], dtype=float)
        d1 = np.array([curve.d1(s) for s in t], dtype=float)
        d2 = np.array([curve.d2(s) for s in t], dtype=float)
        d3 = np.array([curve.d3(s) for s in t], dtype=float)
    else:
        t, a = curve.t, curve.alpha
        d1, d2, d3 = fd_derivatives(t, a, 3)

    flex = np.linalg.norm(np.cross(d1, d2), axis=1)
    if np.any(flex <= tol):
        i = int(np.argmin(flex))
        raise FlexPoint(f"alpha' and alpha'' are dependent at t = {t[i]:g}")
    n2 = mink_inner(d2, d2)
    dev = np.abs(np.sqrt(np.maximum(n2, 0.0)) - 1.0)
    if np.any(dev > tol):
        i = int(np.argmax(dev))
        raise NotNormalized(f"<alpha'', alpha''> = {n2[i]:.6g} at t = {t[i]:g}")
    null = np.abs(mink_inner(d1, d1))
    if np.any(null > tol) or np.any(mink_inner(d1, TIME) >= 0):
        i = int(np.argmax(null))
        raise NotNull(f"alpha' is not future null at t = {t[i]:g}")

    A, k = _frame(d1, d2, d3)
    frames = np.zeros((len(t), 4, 4))
    frames[:, 0, 0] = 1.0
    frames[:, 1:, 0] = a
    frames[:, 1:, 1:] = A
    return FrameField(np.asarray(t, dtype=float), frames, k)


def synthesize_curve(k, g0: GroupElement = None, grid=None, dt_max=0.01) -> FrameField:
    """Integrate g' = g H(k(t)) from g(grid[0]) = g0."""
    g0 = GroupElement.identity() if g0 is None else g0
    grid = np.asarray(grid, dtype=float)
    kv = np.array([k(s) for s in grid], dtype=float)
    if not np.all(np.isfinite(kv)):
        raise IntegrationFailure("curvature is not finite on the grid")
    frames = transport(lambda s: hamiltonian_matrix(k(s)), g0, grid, dt_max)
    return FrameField(grid, frames, kv)


def frenet_residual(frame: FrameField):
    """sup |g^{-1} g' - H(k)| with g' by finite differences of the frames."""
    dg = fd_derivatives(frame.t, frame.frames, 1)[0]
    res = 0.0
    for i in range(len(frame.t)):
        X = group_inverse(frame.group(i)).matrix @ dg[i]
        res = max(res, np.max(np.abs(X - hamiltonian_matrix(frame.k[i]))))
    return float(res)


def normalize_parameter(curve: NullCurveSamples) -> NullCurveSamples:
    """Reparametrize by s = int <alpha'', alpha''>^(1/4) dt.

    Only the parameter changes; the samples are kept.  Unreliable near flex
    points, where the integrand vanishes.
    """
    d1, d2 = fd_derivatives(curve.t, curve.alpha, 2)
    dens = np.maximum(mink_inner(d2, d2), 0.0) ** 0.25
    s = cumulative_simpson(dens, x=curve.t, initial=0.0)
    return NullCurveSamples(s, curve.alpha.copy())
