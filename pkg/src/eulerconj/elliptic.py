"""Complete/incomplete elliptic integrals and Jacobi elliptic functions.

Everything is driven by the arithmetic-geometric mean of ``1`` and
``k' = sqrt(1 - k^2)``:

* ``K(k) = pi / (2 a_N)`` and ``E(k) = K (1 - sum 2^(n-1) c_n^2)``;
* the amplitude ``am(u)`` comes from the descending Landen recursion
  ``phi_(n-1) = (phi_n + asin(c_n sin(phi_n) / a_n)) / 2`` started at
  ``phi_N = 2^N a_N u``;
* the incomplete integral ``E(u) = int_0^u dn^2`` is ``u E/K + Z(u)`` where
  the Jacobi zeta function is ``Z(u) = sum_(n>=1) c_n sin(phi_n)``.

All functions accept scalars or numpy arrays (broadcast against each other)
and return numpy scalars/arrays.  The modulus must satisfy ``0 <= k < 1``;
the separatrix value ``k = 1`` is only reachable through
:func:`jacobi_critical` and :func:`epsilon_critical`.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from eulerconj.errors import DomainError

_EPS = np.finfo(float).eps
_MAX_AGM_STEPS = 40


class JacobiTriple(NamedTuple):
    sn: np.ndarray
    cn: np.ndarray
    dn: np.ndarray


def _check_modulus(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k)) or np.any(k < 0.0) or np.any(k >= 1.0):
        raise DomainError(f"modulus must satisfy 0 <= k < 1, got {k!r}")
    return k


def _check_argument(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError(f"argument must be finite, got {u!r}")
    return u


def _agm_sequence(k: np.ndarray) -> tuple[list, list]:
    """Return the lists ``a_n`` and ``c_n`` of the AGM started at (1, k')."""
    a = np.ones_like(k)
    b = np.sqrt((1.0 - k) * (1.0 + k))
    c = k.copy()
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_STEPS):
        if not np.any(np.abs(c) > _EPS * a):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def _complete_pair(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a_seq, c_seq = _agm_sequence(k)
    K = 0.5 * np.pi / a_seq[-1]
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return K, K * (1.0 - s)


@lru_cache(maxsize=4096)
def _complete_pair_scalar(k: float) -> tuple[float, float]:
    K, E = _complete_pair(np.asarray(k, dtype=float))
    return float(K), float(E)


def complete_KE(k) -> tuple[np.ndarray, np.ndarray]:
    """Both complete integrals ``(K(k), E(k))`` from one AGM run."""
    k = _check_modulus(k)
    if k.ndim == 0:
        K, E = _complete_pair_scalar(float(k))
        return np.float64(K), np.float64(E)
    return _complete_pair(k)


def complete_K(k) -> np.ndarray:
    """Complete elliptic integral of the first kind, ``int_0^(pi/2) dphi / sqrt(1 - k^2 sin^2 phi)``."""
    return complete_KE(k)[0]


def complete_E(k) -> np.ndarray:
    """Complete elliptic integral of the second kind, ``int_0^(pi/2) sqrt(1 - k^2 sin^2 phi) dphi``."""
    return complete_KE(k)[1]


def _landen_phases(u: np.ndarray, k: np.ndarray):
    """Amplitude phases ``phi_0..phi_N`` (phi_0 = am(u)) and the AGM lists."""
    a_seq, c_seq = _agm_sequence(k)
    N = len(a_seq) - 1
    phi = [None] * (N + 1)
    phi[N] = (2.0**N) * a_seq[N] * u
    for n in range(N, 0, -1):
        phi[n - 1] = 0.5 * (phi[n] + np.arcsin(c_seq[n] / a_seq[n] * np.sin(phi[n])))
    return phi, a_seq, c_seq


def _reduce(u: np.ndarray, K: np.ndarray):
    """Split ``u = 2K m + v`` with ``|v| <= K``; returns ``(m, v)``."""
    m = np.rint(u / (2.0 * K))
    return m, u - 2.0 * K * m


def jacobi_with_epsilon(u, k) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(sn, cn, dn, E(u))`` sharing one AGM/Landen evaluation.

    ``E(u)`` is the incomplete integral ``int_0^u dn^2(t) dt`` (Jacobi's
    epsilon function), the quantity written ``E(p)`` in the Jacobian formulas.
    """
    u = _check_argument(u)
    k = _check_modulus(k)
    u, k = np.broadcast_arrays(u, k)
    u = np.array(u, dtype=float)
    k = np.array(k, dtype=float)
    K, E = complete_KE(k)
    m, v = _reduce(u, K)
    phi, a_seq, c_seq = _landen_phases(v, k)
    sign = np.where(np.mod(m, 2.0) == 0.0, 1.0, -1.0)
    s0 = np.sin(phi[0])
    c0 = np.cos(phi[0])
    kp2 = (1.0 - k) * (1.0 + k)
    # dn^2 = cn^2 + k'^2 sn^2 is a sum of non-negative terms: no cancellation
    dn = np.sqrt(c0 * c0 + kp2 * s0 * s0)
    zeta = np.zeros_like(v)
    for n in range(1, len(phi)):
        zeta = zeta + c_seq[n] * np.sin(phi[n])
    eps_u = 2.0 * m * E + v * (E / K) + zeta
    if u.ndim == 0:
        return (np.float64(sign * s0), np.float64(sign * c0), np.float64(dn), np.float64(eps_u))
    return sign * s0, sign * c0, dn, eps_u


def jacobi(u, k) -> JacobiTriple:
    """Jacobi elliptic functions ``(sn u, cn u, dn u)`` for modulus ``k``."""
    sn, cn, dn, _ = jacobi_with_epsilon(u, k)
    return JacobiTriple(sn, cn, dn)


def jacobi_epsilon(u, k) -> np.ndarray:
    """Jacobi's epsilon function ``E(u) = int_0^u dn^2(t, k) dt``."""
    return jacobi_with_epsilon(u, k)[3]


def jacobi_am(u, k) -> np.ndarray:
    """Jacobi amplitude ``am(u)``, continuous and increasing in ``u``."""
    u = _check_argument(u)
    k = _check_modulus(k)
    u, k = np.broadcast_arrays(u, k)
    K = complete_K(np.array(k))
    m, v = _reduce(np.array(u, dtype=float), K)
    phi, _, _ = _landen_phases(v, np.array(k, dtype=float))
    return m * np.pi + phi[0]


def jacobi_critical(u) -> JacobiTriple:
    """The ``k -> 1`` limit: ``sn = tanh``, ``cn = dn = sech``."""
    u = _check_argument(u)
    sech = 1.0 / np.cosh(u)
    return JacobiTriple(np.tanh(u), sech, sech)


def epsilon_critical(u) -> np.ndarray:
    """The ``k -> 1`` limit of :func:`jacobi_epsilon`, ``int_0^u sech^2 = tanh u``."""
    return np.tanh(_check_argument(u))


@lru_cache(maxsize=1)
def find_k0() -> float:
    """The unique modulus in (0, 1) with ``2 E(k) = K(k)`` (about 0.909).

    ``2E - K`` is positive on ``[0, k0)`` and negative on ``(k0, 1)``, so a
    plain bisection is certified.
    """
    lo, hi = 0.5, 0.99
    g = lambda k: 2.0 * complete_E(k) - complete_K(k)  # noqa: E731
    assert g(lo) > 0.0 > g(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo)) <= abs(g(hi)) else hi


__all__ = [
    "JacobiTriple",
    "complete_E",
    "complete_K",
    "complete_KE",
    "epsilon_critical",
    "find_k0",
    "jacobi",
    "jacobi_am",
    "jacobi_critical",
    "jacobi_epsilon",
    "jacobi_with_epsilon",
]
