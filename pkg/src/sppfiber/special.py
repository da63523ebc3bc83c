"""Bessel functions for the mode solvers (real and complex arguments).

Thin wrappers over scipy's AMOS-backed routines, plus overflow-safe
ratio helpers used by the dispersion relations at large |z|. Accuracy
against a high-precision series oracle is pinned in the test suite.
"""

import numpy as np
from scipy import special as _sp


def j0(z):
    return _sp.jv(0, z)


def j1(z):
    return _sp.jv(1, z)


def i0(z):
    return _sp.iv(0, z)


def i1(z):
    return _sp.iv(1, z)


def k0(z):
    return _sp.kv(0, z)


def k1(z):
    return _sp.kv(1, z)


def i0_over_i1(z):
    """I0(z)/I1(z) without overflow (exponential scalings cancel)."""
    return _sp.ive(0, z) / _sp.ive(1, z)


def k0_over_k1(z):
    """K0(z)/K1(z) without underflow."""
    return _sp.kve(0, z) / _sp.kve(1, z)


def i1_ratio(z, z_ref):
    """I1(z)/I1(z_ref), stable for Re z <= Re z_ref (both in right half-plane)."""
    return _sp.ive(1, z) / _sp.ive(1, z_ref) * np.exp(np.real(z) - np.real(z_ref))


def i0_ratio(z, z_ref):
    """I0(z)/I1(z_ref), stable for Re z <= Re z_ref."""
    return _sp.ive(0, z) / _sp.ive(1, z_ref) * np.exp(np.real(z) - np.real(z_ref))


def k1_ratio(z, z_ref):
    """K1(z)/K1(z_ref), stable for Re z >= Re z_ref."""
    return _sp.kve(1, z) / _sp.kve(1, z_ref) * np.exp(z_ref - z)


def k0_ratio(z, z_ref):
    """K0(z)/K1(z_ref), stable for Re z >= Re z_ref."""
    return _sp.kve(0, z) / _sp.kve(1, z_ref) * np.exp(z_ref - z)
