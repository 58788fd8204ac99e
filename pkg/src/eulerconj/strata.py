"""Covectors, their elliptic coordinates, and the pendulum they drive.

A covector fixes the initial state of the pendulum ``beta' = c``,
``c' = -r sin(beta)``; the extremal is then ``x' = cos(theta)``,
``y' = sin(theta)``, ``theta' = c`` started at the origin with heading 0.
``theta - beta`` is constant along the flow, so ``theta = beta - beta0``.

Meaning of the fields per stratum:

========  ==========  ==========================  ===========================
stratum   ``k``       ``phase``                   ``r``
========  ==========  ==========================  ===========================
N1        (0, 1)      phi; ``c = 2k sqrt(r) cn``  > 0
N2plus    (0, 1)      psi; ``beta/2 = am``        > 0
N2minus   (0, 1)      psi; mirror image of N2plus > 0
N3        unused      phi; separatrix, ``k = 1``  > 0
N6        unused      the constant curvature c    0 (a circle has no pendulum)
Line      unused      unused                      >= 0, pendulum at rest
========  ==========  ==========================  ===========================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from eulerconj.elliptic import (
    complete_K,
    jacobi,
    jacobi_critical,
)
from eulerconj.errors import DomainError, StratumError
from eulerconj.integrate import Integrator

DEFAULT_TOL = 1e-10


class Stratum(str, Enum):
    N1 = "N1"
    N2plus = "N2plus"
    N2minus = "N2minus"
    N3 = "N3"
    N6 = "N6"
    Line = "Line"

    @property
    def is_n2(self) -> bool:
        return self in (Stratum.N2plus, Stratum.N2minus)


@dataclass(frozen=True)
class Covector:
    stratum: Stratum
    k: float | None = None
    phase: float = 0.0
    r: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stratum", Stratum(self.stratum))
        if not (math.isfinite(self.phase) and math.isfinite(self.r)):
            raise DomainError("phase and r must be finite")
        s = self.stratum
        if s in (Stratum.N1, Stratum.N2plus, Stratum.N2minus):
            if self.k is None or not (0.0 < self.k < 1.0):
                raise DomainError(f"{s.value} needs 0 < k < 1, got k={self.k!r}")
        elif self.k is not None:
            raise DomainError(f"{s.value} takes no modulus")
        if s == Stratum.N6:
            if self.r != 0.0 or self.phase == 0.0:
                raise DomainError("N6 needs r = 0 and a nonzero curvature in phase")
        elif s == Stratum.Line:
            if self.r < 0.0:
                raise DomainError("r must be non-negative")
        elif self.r <= 0.0:
            raise DomainError(f"{s.value} needs r > 0")

    @classmethod
    def n1(cls, k: float, phi: float = 0.0, r: float = 1.0) -> "Covector":
        return cls(Stratum.N1, k, phi, r)

    @classmethod
    def n2(cls, k: float, psi: float = 0.0, r: float = 1.0, sign: int = 1) -> "Covector":
        return cls(Stratum.N2plus if sign > 0 else Stratum.N2minus, k, psi, r)

    @classmethod
    def n3(cls, phi: float = 0.0, r: float = 1.0) -> "Covector":
        return cls(Stratum.N3, None, phi, r)

    @classmethod
    def n6(cls, curvature: float) -> "Covector":
        return cls(Stratum.N6, None, curvature, 0.0)

    @classmethod
    def line(cls, r: float = 1.0) -> "Covector":
        return cls(Stratum.Line, None, 0.0, r)

    def to_dict(self) -> dict:
        return {"stratum": self.stratum.value, "k": self.k, "phase": self.phase, "r": self.r}


@dataclass(frozen=True)
class ReparamPoint:
    p: float
    tau: float
    z: float
    delta: float


@dataclass(frozen=True)
class PendulumState:
    beta: float
    c: float
    r: float

    @property
    def energy(self) -> float:
        return 0.5 * self.c * self.c - self.r * math.cos(self.beta)


def _require(lam: Covector, *allowed: Stratum) -> None:
    if lam.stratum not in allowed:
        names = ", ".join(s.value for s in allowed)
        raise StratumError(f"expected stratum in {{{names}}}, got {lam.stratum.value}")


def _check_time(t) -> None:
    if np.any(np.asarray(t) < 0.0):
        raise DomainError("time must be non-negative")


def _reparam(k: float, p, tau):
    sp = jacobi(p, k).sn
    st = jacobi(tau, k).sn
    z = np.minimum(st * st, 1.0)
    delta = 1.0 - k * k * sp * sp * z
    return z, delta


def reparam_N1_arrays(lam: Covector, t):
    """Vectorized ``(p, tau, z, delta)`` for N1; ``t`` may be an array."""
    _require(lam, Stratum.N1)
    _check_time(t)
    t = np.asarray(t, dtype=float)
    sr = math.sqrt(lam.r)
    p = 0.5 * sr * t
    tau = sr * (lam.phase + 0.5 * t)
    z, delta = _reparam(lam.k, p, tau)
    return p, tau, z, delta


def reparam_N2_arrays(lam: Covector, t):
    """Vectorized ``(p, tau, z, delta)`` for N2 (either sign)."""
    _require(lam, Stratum.N2plus, Stratum.N2minus)
    _check_time(t)
    t = np.asarray(t, dtype=float)
    sr = math.sqrt(lam.r)
    p = sr * t / (2.0 * lam.k)
    tau = 0.5 * sr * (2.0 * lam.phase + t / lam.k)
    z, delta = _reparam(lam.k, p, tau)
    return p, tau, z, delta


def reparam_N1(lam: Covector, t: float) -> ReparamPoint:
    return ReparamPoint(*(float(v) for v in reparam_N1_arrays(lam, t)))


def reparam_N2(lam: Covector, t: float) -> ReparamPoint:
    return ReparamPoint(*(float(v) for v in reparam_N2_arrays(lam, t)))


def curvature_N1(lam: Covector, s):
    """Curvature ``2 k sqrt(r) cn(sqrt(r)(phi + s))`` of an inflectional elastica."""
    _require(lam, Stratum.N1)
    sr = math.sqrt(lam.r)
    return 2.0 * lam.k * sr * jacobi(sr * (lam.phase + np.asarray(s, dtype=float)), lam.k).cn


def period_N1(lam: Covector) -> float:
    """Period ``4K/sqrt(r)`` of the oscillating pendulum."""
    _require(lam, Stratum.N1)
    return float(4.0 * complete_K(lam.k) / math.sqrt(lam.r))


def period_N2(lam: Covector) -> float:
    """Time ``2kK/sqrt(r)`` for the rotating pendulum to make one full turn."""
    _require(lam, Stratum.N2plus, Stratum.N2minus)
    return float(2.0 * lam.k * complete_K(lam.k) / math.sqrt(lam.r))


def natural_period(lam: Covector) -> float:
    """Time scale used for relative tolerances: the pendulum period where one
    exists, the time to turn by 2*pi for a circle, and 1 for a line."""
    s = lam.stratum
    if s == Stratum.N1:
        return period_N1(lam)
    if s.is_n2:
        return period_N2(lam)
    if s == Stratum.N3:
        # no period on the separatrix; use the small-oscillation period
        return 2.0 * math.pi / math.sqrt(lam.r)
    if s == Stratum.N6:
        return 2.0 * math.pi / abs(lam.phase)
    return 1.0


def initial_state(lam: Covector) -> PendulumState:
    """Pendulum state ``(beta, c, r)`` at ``t = 0``."""
    s = lam.stratum
    r = lam.r
    sr = math.sqrt(r)
    if s == Stratum.N1:
        sn, cn, dn = (float(v) for v in jacobi(sr * lam.phase, lam.k))
        beta = 2.0 * math.atan2(lam.k * sn, dn)
        c = 2.0 * lam.k * sr * cn
    elif s.is_n2:
        sn, cn, dn = (float(v) for v in jacobi(sr * lam.phase, lam.k))
        beta = 2.0 * math.atan2(sn, cn)
        c = 2.0 * sr * dn / lam.k
        if s == Stratum.N2minus:
            beta, c = -beta, -c
    elif s == Stratum.N3:
        sn, cn, _ = (float(v) for v in jacobi_critical(sr * lam.phase))
        beta = 2.0 * math.atan2(sn, cn)
        c = 2.0 * sr * cn
    elif s == Stratum.N6:
        beta, c = 0.0, lam.phase
    else:
        beta, c = 0.0, 0.0
    return PendulumState(beta, c, r)


def _pendulum_rhs(r: float):
    def f(y):
        return np.array([y[1], -r * np.sin(y[0])])

    return f


def pendulum_trajectory(state0: PendulumState, times, tol: float = DEFAULT_TOL):
    """States at the non-decreasing ``times``; returns arrays ``(beta, c)``.

    The integrator runs a hundred times tighter than ``tol`` so that the
    accumulated energy drift, not just the local error, stays below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    _check_time(times)
    inner = max(tol * 1e-2, 1e-14)
    stepper = Integrator(_pendulum_rhs(state0.r), [state0.beta, state0.c], rtol=inner, atol=inner)
    out = np.empty((times.size, 2))
    for i, t in enumerate(times):
        out[i] = stepper.advance(float(t))
    return out[:, 0], out[:, 1]


def pendulum_flow(state0: PendulumState, t: float, tol: float = DEFAULT_TOL) -> PendulumState:
    beta, c = pendulum_trajectory(state0, [t], tol)
    return PendulumState(float(beta[0]), float(c[0]), state0.r)


def curvature(lam: Covector, s, tol: float = DEFAULT_TOL):
    """Curvature along the extremal: closed form on N1, constant on N6 and
    lines, pendulum integration elsewhere."""
    s_arr = np.asarray(s, dtype=float)
    if lam.stratum == Stratum.N1:
        return curvature_N1(lam, s_arr)
    if lam.stratum in (Stratum.N6, Stratum.Line):
        return np.full_like(s_arr, initial_state(lam).c)
    flat = s_arr.ravel()
    order = np.argsort(flat)
    _, c = pendulum_trajectory(initial_state(lam), flat[order], tol)
    out = np.empty_like(flat)
    out[order] = c
    return out.reshape(s_arr.shape)


__all__ = [
    "Covector",
    "PendulumState",
    "ReparamPoint",
    "Stratum",
    "curvature",
    "curvature_N1",
    "initial_state",
    "natural_period",
    "pendulum_flow",
    "pendulum_trajectory",
    "period_N1",
    "period_N2",
    "reparam_N1",
    "reparam_N1_arrays",
    "reparam_N2",
    "reparam_N2_arrays",
]
