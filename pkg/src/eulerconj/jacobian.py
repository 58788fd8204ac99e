"""Closed-form Jacobian of the exponential map on the strata N1 and N2.

On N1 the determinant ``d(x, y, theta)/d(phi, k, r)`` is a negative multiple
of ``J1 = a0 + a1 z + a2 z^2`` with ``z = sn^2(tau)``; on N2 it is a negative
multiple of ``J2 = c0 + c1 z + c2 z^2``.  All functions broadcast over numpy
arrays.

Two forms are pinned by tests against a finite-difference determinant:

* the N1 numerator ``x2`` carries ``2(1-k^2) p E``, which gives
  ``x2 ~ 4/45 k^2 (1-k^2) p^6`` and ``x2(2Kn) = cn(2Kn) x4``;
* on N2, ``f2 = dn((2-k^2)p - 2E) + k^2 sn cn`` satisfies ``f2(0) = 0`` and
  ``(f2/dn)' = k^4 cn^2 sn^2 / dn^2``, and ``c0 = -f2 x2``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from eulerconj.elliptic import jacobi_with_epsilon
from eulerconj.errors import DomainError
from eulerconj.strata import Covector, Stratum, _require, reparam_N1_arrays, reparam_N2_arrays

_Z_SLACK = 1e-12


@dataclass(frozen=True)
class JacobianEval:
    stratum: str  # "N1" or "N2"
    coeff0: float
    coeff1: float
    coeff2: float
    p: float
    k: float
    z: Optional[float] = None
    value: Optional[float] = None

    def at(self, z: float) -> "JacobianEval":
        z = _check_z(z)
        value = self.coeff0 + self.coeff1 * z + self.coeff2 * z * z
        return replace(self, z=float(z), value=float(value))


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < -_Z_SLACK) or np.any(z > 1.0 + _Z_SLACK) or np.any(np.isnan(z)):
        raise DomainError("z must lie in [0, 1]")
    return np.clip(z, 0.0, 1.0)


def _check_open_modulus(k):
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0.0):
        raise DomainError("modulus must be positive here")
    return k


# -- stratum N1 -------------------------------------------------------------

def _f1(s, c, d, E, p):
    return s * d - (2.0 * E - p) * c


def _x1_n1(s, c, d, E, p, k2):
    s2 = s * s
    e3 = 2.0 * s * d
    e2 = (4.0 * k2 - 5.0) * p * s * d + c * (3.0 - 6.0 * k2 * s2)
    e1 = (4.0 * k2 - 5.0) * c * (1.0 - 2.0 * k2 * s2) * p + s * d * (
        4.0 * p * p - 1.0 + k2 * (6.0 * s2 - 4.0 - 4.0 * p * p)
    )
    e0 = p * s * d * (1.0 - (1.0 - k2) * p * p + k2 * (4.0 * k2 - 5.0) * s2) + 2.0 * c * (
        k2 * s2 * d * d + (1.0 - k2) * (1.0 - 2.0 * k2 * s2) * p * p
    )
    return -d * (((e3 * E + e2) * E + e1) * E + e0)


def _x2_n1(s, c, d, E, p, k2):
    kp2 = 1.0 - k2
    return c * ((2.0 * kp2 * p - E) * E - kp2 * p * p) + s * d * (E - kp2 * p)


def f1(p, k):
    """``sn p dn p - (2E(p) - p) cn p``."""
    s, c, d, E = jacobi_with_epsilon(p, k)
    return _f1(s, c, d, E, np.asarray(p, dtype=float))


def x1_N1(p, k):
    s, c, d, E = jacobi_with_epsilon(p, k)
    k = np.asarray(k, dtype=float)
    return _x1_n1(s, c, d, E, np.asarray(p, dtype=float), k * k)


def x2_N1(p, k):
    s, c, d, E = jacobi_with_epsilon(p, k)
    k = np.asarray(k, dtype=float)
    return _x2_n1(s, c, d, E, np.asarray(p, dtype=float), k * k)


def n1_coefficients(p, k):
    """Arrays ``(a0, a1, a2, a0 + a1 + a2)``."""
    s, c, d, E = jacobi_with_epsilon(p, k)
    p = np.asarray(p, dtype=float)
    k2 = np.asarray(k, dtype=float) ** 2
    x1 = _x1_n1(s, c, d, E, p, k2)
    a0 = _f1(s, c, d, E, p) * _x2_n1(s, c, d, E, p, k2)
    total = (1.0 - k2) * s * x1
    a2 = -k2 * s * x1
    a1 = total - a0 - a2
    return a0, a1, a2, total


def coeffs_N1(p: float, k: float) -> JacobianEval:
    a0, a1, a2, _ = n1_coefficients(p, k)
    return JacobianEval("N1", float(a0), float(a1), float(a2), float(p), float(k))


def J1(p, k, z):
    """``(1 - z) a0 + z (1 - k^2 z)/(1 - k^2) (a0 + a1 + a2)``."""
    _check_open_modulus(k)
    z = _check_z(z)
    a0, _, _, total = n1_coefficients(p, k)
    k2 = np.asarray(k, dtype=float) ** 2
    return (1.0 - z) * a0 + z * (1.0 - k2 * z) / (1.0 - k2) * total


def full_jacobian_N1(lam: Covector, t):
    """``-32k / ((1-k^2) r^(3/2) Delta^2) J1(p, k, z)`` at times ``t``."""
    _require(lam, Stratum.N1)
    p, _, z, delta = reparam_N1_arrays(lam, t)
    k = lam.k
    pref = -32.0 * k / ((1.0 - k * k) * lam.r**1.5 * delta * delta)
    return pref * J1(p, k, z)


# -- stratum N2 -------------------------------------------------------------

def _f2(s, c, d, E, p, k2):
    return d * ((2.0 - k2) * p - 2.0 * E) + k2 * s * c


def _x1_n2(s, c, d, E, p, k2):
    s2 = s * s
    cs = c * s
    e3 = 2.0 * cs
    e2 = d * (3.0 - 6.0 * s2) - (2.0 - k2) * p * cs
    e1 = d * (k2 - 2.0) * p * (1.0 - 2.0 * s2) + cs * (
        k2 * (2.0 * p * p - 1.0 + 6.0 * s2) - 2.0 * (2.0 + p * p)
    )
    e0 = d * (2.0 * k2 * c * c * s2 + (1.0 - k2) * p * p * (2.0 * s2 - 1.0)) + p * cs * (
        2.0 * (2.0 + p * p) - k2 * (3.0 + (3.0 - k2) * p * p + (2.0 - k2) * s2)
    )
    return ((e3 * E + e2) * E + e1) * E + e0


def _x2_n2(s, c, d, E, p, k2):
    return (d * E - k2 * c * s) * E - (1.0 - k2) * p * p * d


def f2(p, k):
    _check_open_modulus(k)
    s, c, d, E = jacobi_with_epsilon(p, k)
    k = np.asarray(k, dtype=float)
    return _f2(s, c, d, E, np.asarray(p, dtype=float), k * k)


def x1_N2(p, k):
    _check_open_modulus(k)
    s, c, d, E = jacobi_with_epsilon(p, k)
    k = np.asarray(k, dtype=float)
    return _x1_n2(s, c, d, E, np.asarray(p, dtype=float), k * k)


def x2_N2(p, k):
    _check_open_modulus(k)
    s, c, d, E = jacobi_with_epsilon(p, k)
    k = np.asarray(k, dtype=float)
    return _x2_n2(s, c, d, E, np.asarray(p, dtype=float), k * k)


def n2_coefficients(p, k):
    """Arrays ``(c0, c1, c2)``; ``c1`` comes from ``c0 + c1 + c2 = (1-k^2) c0``."""
    _check_open_modulus(k)
    s, c, d, E = jacobi_with_epsilon(p, k)
    p = np.asarray(p, dtype=float)
    k2 = np.asarray(k, dtype=float) ** 2
    c0 = -_f2(s, c, d, E, p, k2) * _x2_n2(s, c, d, E, p, k2)
    c2 = k2 * k2 * s * c * _x1_n2(s, c, d, E, p, k2)
    c1 = -k2 * c0 - c2
    return c0, c1, c2


def coeffs_N2(p: float, k: float) -> JacobianEval:
    c0, c1, c2 = n2_coefficients(p, k)
    return JacobianEval("N2", float(c0), float(c1), float(c2), float(p), float(k))


def J2(p, k, z):
    z = _check_z(z)
    c0, c1, c2 = n2_coefficients(p, k)
    return (c2 * z + c1) * z + c0


def full_jacobian_N2(lam: Covector, t):
    """``-32 / ((1-k^2) k^2 r^(3/2) Delta^2) J2(p, k, z)`` at times ``t``."""
    _require(lam, Stratum.N2plus, Stratum.N2minus)
    p, _, z, delta = reparam_N2_arrays(lam, t)
    k = lam.k
    pref = -32.0 / ((1.0 - k * k) * k * k * lam.r**1.5 * delta * delta)
    return pref * J2(p, k, z)


def full_jacobian(lam: Covector, t):
    if lam.stratum == Stratum.N1:
        return full_jacobian_N1(lam, t)
    return full_jacobian_N2(lam, t)


__all__ = [
    "J1",
    "J2",
    "JacobianEval",
    "coeffs_N1",
    "coeffs_N2",
    "f1",
    "f2",
    "full_jacobian",
    "full_jacobian_N1",
    "full_jacobian_N2",
    "n1_coefficients",
    "n2_coefficients",
    "x1_N1",
    "x1_N2",
    "x2_N1",
    "x2_N2",
]
