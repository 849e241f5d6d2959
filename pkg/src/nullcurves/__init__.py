"""Extremal null curves in Minkowski 3-space: the E(2,1) group, the
Euler-Lagrange flow of the curvature functional, Weierstrass closed forms
and reconstruction by quadratures."""

__version__ = "0.1.0"
