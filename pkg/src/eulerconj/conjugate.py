"""Conjugate times along elastica extremals.

On N1 the Jacobian of the exponential map vanishes exactly where
``J1(p, k, sn^2(tau0 + p))`` does, with ``p = sqrt(r) t / 2`` and
``tau0 = sqrt(r) phi``.  The first zero lies between ``2K`` and the first
root ``p1`` of f1, so it is found by a sign scan of that segment followed by
bisection.  Extremals in N2, N3, N6 and lines carry no conjugate points.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from eulerconj.elliptic import complete_K, find_k0, jacobi
from eulerconj.errors import AmbiguousEndpointError, ConsistencyError, DomainError
from eulerconj.jacobian import J1, J2, n1_coefficients, n2_coefficients
from eulerconj.roots import bisect_increasing, root_p1, root_px1, root_px2
from eulerconj.strata import Covector, Stratum, _require, natural_period

FIRST_ROOT_SAMPLES = 512
# relative size below which J1 counts as zero at an end of the search segment
ENDPOINT_ZERO = 1e-12
# below this p the closed form loses its digits to cancellation (x1 = O(p^10))
# while both Jacobians keep the sign of their leading terms
SCAN_START_P = 0.1
SCAN_STEPS_PER_K = 256
TANGENTIAL_ZERO = 1e-10
AMBIGUOUS_REL = 1e-9


class ConjugateRule(str, Enum):
    N1Computed = "N1Computed"
    NoConjugateN2 = "NoConjugateN2"
    NoConjugateN3N6 = "NoConjugateN3N6"
    NoConjugateLineCircle = "NoConjugateLineCircle"


class CenteredAt(str, Enum):
    Vertex = "Vertex"
    Inflection = "Inflection"


class TangentialZeroWarning(UserWarning):
    """The Jacobian touches zero without changing sign."""


@dataclass(frozen=True)
class ConjugateResult:
    lam: Covector
    first_time: Optional[float]
    bracket: Optional[tuple[float, float]]
    stratum_rule: ConjugateRule
    count_up_to: Optional[tuple[float, int]] = None

    def to_json(self) -> dict:
        out = dict(self.lam.to_dict())
        out["t1conj"] = self.first_time
        out["bracket"] = list(self.bracket) if self.bracket is not None else None
        out["rule"] = self.stratum_rule.value
        if self.count_up_to is not None:
            out["morse_index"] = {"t": self.count_up_to[0], "count": self.count_up_to[1]}
        return out


class CenteredRoot(NamedTuple):
    p: float
    multiplicity: int
    families: tuple[str, ...]


def _no_conjugate_rule(stratum: Stratum) -> ConjugateRule:
    if stratum.is_n2:
        return ConjugateRule.NoConjugateN2
    if stratum == Stratum.N3:
        return ConjugateRule.NoConjugateN3N6
    if stratum == Stratum.N6:
        return ConjugateRule.NoConjugateN3N6
    return ConjugateRule.NoConjugateLineCircle


def _conjugate_segment(k: float) -> tuple[float, float]:
    """``[min, max]`` of ``{2K, p1}`` in the p variable."""
    a, b = 2.0 * float(complete_K(k)), root_p1(1, k)
    return (a, b) if a <= b else (b, a)


def _n1_scale(p, k):
    a0, a1, a2, _ = n1_coefficients(p, k)
    return np.abs(a0) + np.abs(a1) + np.abs(a2)


def _first_root(h: Callable, lo: float, hi: float, scale: Callable,
                samples: int = FIRST_ROOT_SAMPLES) -> float:
    """First zero of ``h`` on ``[lo, hi]``, given ``h > 0`` just before ``lo``.

    ``h`` is vectorized.  A value with ``|h| <= ENDPOINT_ZERO * scale`` at an
    end of the segment counts as a zero there.
    """
    ps = np.linspace(lo, hi, samples + 1)
    hs = h(ps)
    small = np.abs(hs) <= ENDPOINT_ZERO * scale(ps)
    if small[0]:
        return lo
    nonpos = np.nonzero(hs <= 0.0)[0]
    if nonpos.size == 0:
        if small[-1]:
            return hi
        raise ConsistencyError(f"Jacobian keeps its sign on the segment [{lo!r}, {hi!r}]")
    i = int(nonpos[0])
    if i == 0:
        raise ConsistencyError(f"Jacobian already negative at {lo!r}")
    if hs[i] == 0.0:
        return float(ps[i])
    return bisect_increasing(lambda p: -float(h(p)), ps[i - 1], ps[i])


def p1conj_fixed_z(k: float, z: float) -> float:
    """First positive zero of ``p -> J1(p, k, z)``."""
    if not (0.0 < k < 1.0):
        raise DomainError("modulus must satisfy 0 < k < 1")
    if not (0.0 <= z <= 1.0):
        raise DomainError("z must lie in [0, 1]")
    if k == find_k0():
        return 2.0 * float(complete_K(k))
    lo, hi = _conjugate_segment(k)
    return _first_root(lambda p: J1(p, k, z), lo, hi, lambda p: _n1_scale(p, k))


def p1conj_along(k: float, tau0: float) -> float:
    """First positive zero of ``p -> J1(p, k, sn^2(tau0 + p))``."""
    if k == find_k0():
        return 2.0 * float(complete_K(k))
    lo, hi = _conjugate_segment(k)

    def h(p):
        sn = jacobi(tau0 + np.asarray(p, dtype=float), k).sn
        return J1(p, k, np.minimum(sn * sn, 1.0))

    return _first_root(h, lo, hi, lambda p: _n1_scale(p, k))


def conjugate_bracket(lam: Covector) -> tuple[float, float]:
    """Ordered endpoints ``{4K/sqrt(r), 2 p1/sqrt(r)}`` of the first conjugate time."""
    _require(lam, Stratum.N1)
    lo, hi = _conjugate_segment(lam.k)
    s = 2.0 / math.sqrt(lam.r)
    return float(lo * s), float(hi * s)


def t1conj(lam: Covector) -> ConjugateResult:
    """First conjugate time of the extremal, or none with the rule that excludes it."""
    if lam.stratum != Stratum.N1:
        return ConjugateResult(lam, None, None, _no_conjugate_rule(lam.stratum))
    sr = math.sqrt(lam.r)
    br = conjugate_bracket(lam)
    p = p1conj_along(lam.k, sr * lam.phase)
    return ConjugateResult(lam, float(2.0 * p / sr), br, ConjugateRule.N1Computed)


def cut_bound(lam: Covector) -> float:
    """``min(4K, 2 p1) / sqrt(r)``, an upper bound on the cut time."""
    _require(lam, Stratum.N1)
    return conjugate_bracket(lam)[0]


def _jacobian_along(lam: Covector):
    """``(h, scale, dp/dt)`` with ``h(p)`` the closed-form Jacobian factor
    whose zero set in p is the conjugate set, for N1 or N2."""
    k = lam.k
    sr = math.sqrt(lam.r)
    if lam.stratum == Stratum.N1:
        tau0 = sr * lam.phase

        def h(p):
            sn = jacobi(tau0 + p, k).sn
            return J1(p, k, np.minimum(sn * sn, 1.0))

        return h, (lambda p: _n1_scale(p, k)), 0.5 * sr

    tau0 = sr * lam.phase

    def h(p):
        sn = jacobi(tau0 + p, k).sn
        return J2(p, k, np.minimum(sn * sn, 1.0))

    def scale(p):
        c0, c1, c2 = n2_coefficients(p, k)
        return np.abs(c0) + np.abs(c1) + np.abs(c2)

    return h, scale, sr / (2.0 * k)


def conjugate_times(lam: Covector, t_max: float) -> list[float]:
    """All sign changes of the closed-form Jacobian on ``(0, t_max]``.

    Strata without a closed form have no conjugate points and return an empty list.
    """
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    if lam.stratum not in (Stratum.N1, Stratum.N2plus, Stratum.N2minus):
        return []
    h, scale, dp_dt = _jacobian_along(lam)
    p_max = dp_dt * t_max
    if p_max <= SCAN_START_P:
        return []
    K = float(complete_K(lam.k))
    n = max(2, int(math.ceil((p_max - SCAN_START_P) / K * SCAN_STEPS_PER_K)))
    ps = np.linspace(SCAN_START_P, p_max, n + 1)
    hs = h(ps)
    sg = np.sign(hs)
    roots = []
    for i in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
        a, b = ps[i], ps[i + 1]
        s = sg[i]
        roots.append(float(bisect_increasing(lambda p: -s * float(h(p)), a, b) / dp_dt))
    # exact zeros on grid points: count them when the sign changes across
    for i in np.nonzero(sg == 0)[0]:
        if 0 < i < n and sg[i - 1] * sg[i + 1] < 0:
            roots.append(float(ps[i] / dp_dt))
    mag = np.abs(hs) / np.maximum(scale(ps), np.finfo(float).tiny)
    for i in range(1, n):
        if (mag[i] < TANGENTIAL_ZERO and mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]
                and sg[i - 1] == sg[i + 1] != 0):
            warnings.warn(f"Jacobian touches zero near t={ps[i] / dp_dt:.12g} without crossing",
                          TangentialZeroWarning, stacklevel=2)
    return sorted(roots)


def morse_index(lam: Covector, t: float) -> int:
    """Number of conjugate times in ``(0, t)``, each counted once."""
    if t <= 0:
        raise DomainError("t must be positive")
    tol = AMBIGUOUS_REL * natural_period(lam)
    times = conjugate_times(lam, t + 2 * tol)
    for tc in times:
        if abs(tc - t) <= tol:
            raise AmbiguousEndpointError(f"t={t!r} is within {tol:.3g} of the conjugate time {tc!r}")
    return sum(1 for tc in times if tc < t)


def with_morse_index(result: ConjugateResult, t: float) -> ConjugateResult:
    return ConjugateResult(result.lam, result.first_time, result.bracket, result.stratum_rule,
                           (float(t), morse_index(result.lam, t)))


def _merge(values: list[tuple[float, str]], tol: float) -> list[CenteredRoot]:
    values.sort()
    out: list[CenteredRoot] = []
    for p, fam in values:
        if out and p - out[-1].p <= tol:
            last = out[-1]
            out[-1] = CenteredRoot(last.p, last.multiplicity + 1, last.families + (fam,))
        else:
            out.append(CenteredRoot(p, 1, (fam,)))
    return out


def conj_enumerate_centered(k: float, centered_at: CenteredAt, p_max: float) -> list[CenteredRoot]:
    """All zeros in ``(0, p_max]`` of ``J1(., k, 0)`` (vertex-centered arcs)
    or ``J1(., k, 1)`` (inflection-centered arcs), with coinciding roots of
    the two families merged."""
    if not (0.0 < k < 1.0):
        raise DomainError("modulus must satisfy 0 < k < 1")
    if p_max <= 0:
        raise DomainError("p_max must be positive")
    centered_at = CenteredAt(centered_at)
    K = float(complete_K(k))
    vals: list[tuple[float, str]] = []
    if centered_at == CenteredAt.Vertex:
        families = (("p1", root_p1), ("px2", root_px2))
    else:
        families = (("2Kn", lambda n, k: 2.0 * n * K), ("px1", root_px1))
    for name, fn in families:
        n = 1
        while True:
            v = fn(n, k)
            if v > p_max:
                break
            vals.append((v, name))
            n += 1
    return _merge(vals, 1e-12 * max(K, p_max))


__all__ = [
    "CenteredAt",
    "CenteredRoot",
    "ConjugateResult",
    "ConjugateRule",
    "TangentialZeroWarning",
    "conj_enumerate_centered",
    "conjugate_bracket",
    "conjugate_times",
    "cut_bound",
    "morse_index",
    "p1conj_along",
    "p1conj_fixed_z",
    "t1conj",
    "with_morse_index",
]
