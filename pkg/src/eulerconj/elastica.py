"""Sampled elastica arcs, their inflection points, and stability verdicts."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from eulerconj.conjugate import conjugate_times, t1conj
from eulerconj.elliptic import complete_K, find_k0
from eulerconj.errors import DomainError
from eulerconj.oracle import DEFAULT_TOL, exp_trajectory
from eulerconj.strata import Covector, Stratum, natural_period

BOUNDARY_REL = 1e-8
# inflections closer than this (relative to the period) to an end of the arc
# count as boundary inflections
INFLECTION_END_REL = 1e-10


class Status(str, Enum):
    LocallyOptimal = "LocallyOptimal"
    NotLocallyOptimal = "NotLocallyOptimal"
    UndeterminedBoundary = "Undetermined-Boundary"

    @property
    def slug(self) -> str:
        return {"LocallyOptimal": "locally-optimal", "NotLocallyOptimal": "not-locally-optimal",
                "Undetermined-Boundary": "undetermined-boundary"}[self.value]


class Rule(str, Enum):
    NoInflection = "NoInflection"
    OneInflectionSmallK = "OneInflectionSmallK"
    ThreePlusInflections = "ThreePlusInflections"
    ConjugateTimeComparison = "ConjugateTimeComparison"


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    rule: Rule
    certificate: Optional[float] = None

    def to_json(self) -> dict:
        return {"status": self.status.value, "rule": self.rule.value, "certificate": self.certificate}


@dataclass
class ElasticaArc:
    lam: Covector
    t_end: float
    samples: np.ndarray  # columns s, x, y, theta, curvature

    @property
    def s(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def curvature(self) -> np.ndarray:
        return self.samples[:, 4]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "x", "y", "theta", "curvature"])
        for row in self.samples:
            w.writerow([f"{v:.12g}" for v in row])
        return buf.getvalue()


@dataclass(frozen=True)
class Marker:
    kind: str  # "inflection" or "conjugate"
    s: float


def sample_arc(lam: Covector, t: float, n: int = 200, tol: float = DEFAULT_TOL) -> ElasticaArc:
    """``n + 1`` equispaced states of the extremal on ``[0, t]``."""
    if t <= 0:
        raise DomainError("t must be positive")
    if n < 2:
        raise DomainError("need at least two intervals")
    s = np.linspace(0.0, t, n + 1)
    rows = exp_trajectory(lam, s, tol)
    samples = np.column_stack([s, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 4]])
    return ElasticaArc(lam, float(t), samples)


def inflection_times(lam: Covector, t: float) -> list[float]:
    """Zeros of the curvature in ``[0, t]``: ``sqrt(r)(phi + s) = K + 2Km`` on N1."""
    if lam.stratum != Stratum.N1:
        return []
    K = float(complete_K(lam.k))
    sr = math.sqrt(lam.r)
    u0 = sr * lam.phase
    # smallest m with K + 2Km >= u0, minus one for safety at the boundary
    m = math.ceil((u0 - K) / (2 * K)) - 1
    tol = INFLECTION_END_REL * natural_period(lam)
    out = []
    while True:
        s = (K + 2 * K * m - u0) / sr
        if s > t + tol:
            break
        if s >= -tol:
            out.append(float(min(max(s, 0.0), t)))
        m += 1
    return out


def inflection_counts(lam: Covector, t: float) -> tuple[int, int]:
    """``(interior, boundary)`` inflection counts of the arc ``[0, t]``."""
    tol = INFLECTION_END_REL * natural_period(lam)
    zs = inflection_times(lam, t)
    boundary = sum(1 for s in zs if s <= tol or s >= t - tol)
    return len(zs) - boundary, boundary


def count_inflections(arc: ElasticaArc) -> tuple[int, int]:
    """``(interior, boundary)`` inflection counts of an arc."""
    return inflection_counts(arc.lam, arc.t_end)


def classify_stability(lam: Covector, t: float, boundary_rel: float = BOUNDARY_REL) -> StabilityVerdict:
    """Local optimality of the arc ``[0, t]``, by inflection count where that
    decides, otherwise by comparison with the first conjugate time."""
    if t <= 0:
        raise DomainError("t must be positive")
    interior, boundary = inflection_counts(lam, t)
    total = interior + boundary
    if total == 0:
        return StabilityVerdict(Status.LocallyOptimal, Rule.NoInflection)
    if total == 1 and lam.k <= find_k0():
        return StabilityVerdict(Status.LocallyOptimal, Rule.OneInflectionSmallK)
    if interior >= 3:
        return StabilityVerdict(Status.NotLocallyOptimal, Rule.ThreePlusInflections)
    tc = t1conj(lam).first_time
    tol = boundary_rel * natural_period(lam)
    if abs(t - tc) <= tol:
        status = Status.UndeterminedBoundary
    elif t < tc:
        status = Status.LocallyOptimal
    else:
        status = Status.NotLocallyOptimal
    return StabilityVerdict(status, Rule.ConjugateTimeComparison, tc)


def markers_for(lam: Covector, t: float) -> list[Marker]:
    """Inflection and conjugate-point markers along ``[0, t]``."""
    out = [Marker("inflection", s) for s in inflection_times(lam, t)]
    out += [Marker("conjugate", s) for s in conjugate_times(lam, t)] if t > 0 else []
    return out


def _fmt(v: float) -> str:
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


def render_svg(arc: ElasticaArc, markers: Iterable[Marker] = (), size: int = 480, tol: float = DEFAULT_TOL) -> str:
    xs, ys = arc.samples[:, 1], arc.samples[:, 2]
    pts = {m: exp_trajectory(arc.lam, [m.s], tol)[0] for m in markers}
    allx = np.concatenate([xs, [p[0] for p in pts.values()]])
    ally = np.concatenate([ys, [p[1] for p in pts.values()]])
    x0, x1, y0, y1 = allx.min(), allx.max(), ally.min(), ally.max()
    span = max(x1 - x0, y1 - y0, 1e-9)
    margin = 20.0
    scale = (size - 2 * margin) / span

    def to_px(x, y):
        return margin + (x - x0) * scale, size - margin - (y - y0) * scale

    poly = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (to_px(x, y) for x, y in zip(xs, ys)))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<polyline fill="none" stroke="black" stroke-width="1.5" points="{poly}"/>',
    ]
    for m, p in pts.items():
        cx, cy = to_px(p[0], p[1])
        if m.kind == "inflection":
            lines.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="4" fill="none" stroke="blue"/>')
        else:
            d = 5.0
            lines.append(
                f'<path d="M {_fmt(cx - d)} {_fmt(cy - d)} L {_fmt(cx + d)} {_fmt(cy + d)} '
                f'M {_fmt(cx - d)} {_fmt(cy + d)} L {_fmt(cx + d)} {_fmt(cy - d)}" stroke="red" stroke-width="1.5"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_plot(arc: ElasticaArc, markers: Iterable[Marker], path) -> tuple[Path, Path]:
    """Write the SVG to ``path`` and the samples to the sibling ``.csv``."""
    path = Path(path)
    markers = list(markers)
    path.write_text(render_svg(arc, markers), encoding="utf-8")
    csv_path = path.with_suffix(".csv")
    csv_path.write_text(arc.to_csv(), encoding="utf-8")
    return path, csv_path


__all__ = [
    "ElasticaArc",
    "Marker",
    "Rule",
    "StabilityVerdict",
    "Status",
    "classify_stability",
    "count_inflections",
    "emit_plot",
    "inflection_counts",
    "inflection_times",
    "markers_for",
    "render_svg",
    "sample_arc",
]
