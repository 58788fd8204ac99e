"""Roots of f1, x2 and x1 on N1, and the moduli k0 and kbar.

Each root is found by bisection of a quotient that is strictly increasing
between two singular points: ``f1/cn``, ``x2/(sn dn)`` and ``x1/(dn f1)``.
Bisection only ever looks at signs, so it needs no derivative and cannot
leave the bracket.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

from eulerconj.elliptic import complete_K, find_k0, jacobi_with_epsilon
from eulerconj.errors import ConsistencyError, DomainError
from eulerconj.jacobian import _f1, _x1_n1, _x2_n1

# initial distance kept from the poles, relative to the bracket width
SINGULAR_OFFSET = 1e-9
MAX_BISECTIONS = 200


class RootKind(str, Enum):
    P1 = "P1"
    PX1 = "PX1"
    PX2 = "PX2"


@dataclass(frozen=True)
class RootEntry:
    n: int
    lo: float
    hi: float
    root: float


@dataclass(frozen=True)
class RootTable:
    kind: RootKind
    k: float
    entries: tuple[RootEntry, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "n", "k", "lo", "hi", "root"])
        for e in self.entries:
            w.writerow([self.kind.value, e.n, repr(self.k), repr(e.lo), repr(e.hi), repr(e.root)])
        return buf.getvalue()


def _check(n: int, k: float) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"root index must be a positive integer, got {n!r}")
    if not (0.0 < k < 1.0):
        raise DomainError(f"modulus must satisfy 0 < k < 1, got {k!r}")


def bisect_increasing(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Sign change of an increasing ``g`` with ``g(lo) < 0 < g(hi)``.

    Halves the bracket until the midpoint is no longer representable
    strictly inside it.
    """
    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 < ghi):  # also rejects nan
        raise ConsistencyError(f"no sign change on [{lo!r}, {hi!r}]: g = {glo!r}, {ghi!r}")
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return float(mid)
        if gm != gm:
            raise ConsistencyError(f"quotient undefined at {mid!r}")
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def bisect_between_poles(g: Callable[[float], float], a: float, b: float,
                         open_left: bool = True, open_right: bool = True) -> float:
    """Sign change of an increasing ``g`` that tends to -inf at ``a`` and
    +inf at ``b`` (for the ends flagged open).

    Open ends are approached to within ``SINGULAR_OFFSET * (b - a)``; when
    rounding noise still hides the limiting sign there (a zero of high order
    in the denominator), the offset is doubled until the sign shows.
    """
    width = b - a
    lo, hi = a, b
    if open_left:
        d = SINGULAR_OFFSET * width
        while not g(a + d) < 0.0:
            d *= 2.0
            if d > 0.25 * width:
                raise ConsistencyError(f"quotient never negative near {a!r}")
        lo = a + d
    if open_right:
        d = SINGULAR_OFFSET * width
        while not g(b - d) > 0.0:
            d *= 2.0
            if d > 0.25 * width:
                raise ConsistencyError(f"quotient never positive near {b!r}")
        hi = b - d
    return bisect_increasing(g, lo, hi)


def _ratio(num: float, den: float) -> float:
    return num / den if den != 0.0 else float("nan")


def _parts(p: float, k: float):
    s, c, d, E = (float(v) for v in jacobi_with_epsilon(p, k))
    return s, c, d, E


def _f1_over_cn(k: float):
    def g(p):
        s, c, d, E = _parts(p, k)
        return _ratio(_f1(s, c, d, E, p), c)

    return g


def _x2_over_sndn(k: float):
    k2 = k * k

    def g(p):
        s, c, d, E = _parts(p, k)
        return _ratio(_x2_n1(s, c, d, E, p, k2), s * d)

    return g


def _x1_over_dnf1(k: float):
    k2 = k * k

    def g(p):
        s, c, d, E = _parts(p, k)
        return _ratio(_x1_n1(s, c, d, E, p, k2), d * _f1(s, c, d, E, p))

    return g


@lru_cache(maxsize=4096)
def root_p1(n: int, k: float) -> float:
    """n-th positive root of f1; exactly ``2Kn`` when ``k = k0``."""
    _check(n, k)
    K = float(complete_K(k))
    if k == find_k0():
        return 2.0 * K * n
    # f1/cn runs from -inf to +inf between consecutive zeros of cn
    return bisect_between_poles(_f1_over_cn(k), (2 * n - 1) * K, (2 * n + 1) * K)


@lru_cache(maxsize=4096)
def root_px2(n: int, k: float) -> float:
    """n-th positive root of x2, inside ``(2Kn, 2Kn + K)``."""
    _check(n, k)
    K = float(complete_K(k))
    return bisect_between_poles(_x2_over_sndn(k), 2 * n * K, (2 * n + 1) * K, open_right=False)


@lru_cache(maxsize=4096)
def root_px1(n: int, k: float) -> float:
    """The unique root of x1 between the n-th and (n+1)-th roots of f1."""
    _check(n, k)
    return bisect_between_poles(_x1_over_dnf1(k), root_p1(n, k), root_p1(n + 1, k))


def _kbar_gap(k: float) -> float:
    return root_px1(1, k) - 2.0 * float(complete_K(k))


@lru_cache(maxsize=1)
def find_kbar() -> float:
    """The modulus where the first root of x1 meets 2K.

    Below it the first root of x1 lies beyond 2K, above it before 2K.  The
    gap is bisected on ``[k0, 0.9999]``; the crossing is near 0.988.
    """
    lo, hi = find_k0(), 0.9999
    if not (_kbar_gap(lo) > 0.0 > _kbar_gap(hi)):
        raise ConsistencyError("first root of x1 does not cross 2K above k0")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _kbar_gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(_kbar_gap(lo)) <= abs(_kbar_gap(hi)) else hi


def bracket(kind: RootKind, n: int, k: float) -> tuple[float, float]:
    """The interval that provably contains the n-th root of the given kind."""
    kind = RootKind(kind)
    _check(n, k)
    K = float(complete_K(k))
    if kind == RootKind.P1:
        k0 = find_k0()
        if k == k0:
            return 2 * n * K, 2 * n * K
        if k < k0:
            return 2 * n * K, (2 * n + 1) * K
        return (2 * n - 1) * K, 2 * n * K
    if kind == RootKind.PX2:
        lo = 2 * n * K
        if k < find_k0():
            lo = root_p1(n, k)
        return lo, (2 * n + 1) * K
    return root_p1(n, k), root_p1(n + 1, k)


_FINDERS = {RootKind.P1: root_p1, RootKind.PX1: root_px1, RootKind.PX2: root_px2}


def root(kind: RootKind, n: int, k: float) -> float:
    return _FINDERS[RootKind(kind)](n, k)


def root_table(kind: RootKind, k: float, n_max: int, n_min: int = 1) -> RootTable:
    kind = RootKind(kind)
    if n_max < n_min:
        raise DomainError("empty index range")
    entries = []
    for n in range(n_min, n_max + 1):
        lo, hi = bracket(kind, n, k)
        entries.append(RootEntry(n, lo, hi, root(kind, n, k)))
    return RootTable(kind, k, tuple(entries))


def residual_scale(kind: RootKind, p: float, k: float) -> float:
    """Size of the terms summed in the function, for relative residuals."""
    s, c, d, E = (abs(v) for v in _parts(p, k))
    kind = RootKind(kind)
    if kind == RootKind.P1:
        return s * d + (2 * E + p) * c
    if kind == RootKind.PX2:
        return c * (2 * p * E + E * E + p * p) + s * d * (E + p)
    return d * (E + p + 1) ** 3 * 8


def residual(kind: RootKind, p: float, k: float) -> float:
    s, c, d, E = _parts(p, k)
    kind = RootKind(kind)
    if kind == RootKind.P1:
        return _f1(s, c, d, E, p)
    if kind == RootKind.PX2:
        return _x2_n1(s, c, d, E, p, k * k)
    return _x1_n1(s, c, d, E, p, k * k)


__all__ = [
    "RootEntry",
    "RootKind",
    "RootTable",
    "bisect_between_poles",
    "bisect_increasing",
    "bracket",
    "find_kbar",
    "residual",
    "residual_scale",
    "root",
    "root_p1",
    "root_px1",
    "root_px2",
    "root_table",
]
