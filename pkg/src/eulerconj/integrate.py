"""Adaptive Dormand-Prince 5(4) integration of batched autonomous systems.

The right-hand side acts on an array of any shape; one step size is chosen
for the whole batch (error norm = max over all components).  Sharing the
step sequence matters for the finite-difference oracle: the perturbed
trajectories then differ by a smooth function of the perturbation, so the
step controller does not inject noise into the differences.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from eulerconj.errors import IntegrationError

# Dormand & Prince (1980), RK5(4)7M; FSAL
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B_LOW = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bl for b, bl in zip(_B, _B_LOW))

Rhs = Callable[[np.ndarray], np.ndarray]


def _step(f: Rhs, y: np.ndarray, k1: np.ndarray, h: float):
    ks = [k1]
    for i in range(1, 7):
        yi = y.copy()
        for a, kj in zip(_A[i], ks):
            if a:
                yi += (h * a) * kj
        ks.append(f(yi))
    y_new = yi  # stage 7 is evaluated at the 5th-order solution (FSAL)
    err = np.zeros_like(y)
    for e, kj in zip(_E, ks):
        if e:
            err += (h * e) * kj
    return y_new, err, ks[-1]


def _initial_step(f: Rhs, y0: np.ndarray, f0: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    d2 = np.max(np.abs(f(y1) - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


class Integrator:
    """Stateful DP5(4) stepper for ``y' = f(y)``.

    ``advance(t1)`` moves the state to exactly ``t1``; the step-size
    controller state carries over between calls, so integrating to a
    sequence of output times costs about the same as one long run.
    """

    def __init__(self, f: Rhs, y0, t0: float = 0.0, rtol: float = 1e-10, atol: float = 1e-10,
                 max_steps: int = 1_000_000):
        if rtol <= 0 or atol <= 0:
            raise ValueError("tolerances must be positive")
        self.f = f
        self.t = float(t0)
        self.y = np.array(y0, dtype=float)
        self.rtol = rtol
        self.atol = atol
        self.max_steps = max_steps
        self.n_steps = 0
        self._f = f(self.y)
        self._h = _initial_step(f, self.y, self._f, rtol, atol)

    def advance(self, t1: float) -> np.ndarray:
        if t1 < self.t:
            raise ValueError("only forward integration is supported")
        while self.t < t1:
            h = min(self._h, t1 - self.t)
            if h <= 16 * np.finfo(float).eps * max(1.0, abs(self.t)):
                if t1 - self.t <= 16 * np.finfo(float).eps * max(1.0, abs(t1)):
                    self.t = t1
                    break
                raise IntegrationError(f"step size underflow at t={self.t:.17g}")
            y_new, err, f_new = _step(self.f, self.y, self._f, h)
            scale = self.atol + self.rtol * np.maximum(np.abs(self.y), np.abs(y_new))
            err_norm = float(np.max(np.abs(err) / scale))
            if not np.isfinite(err_norm):
                raise IntegrationError(f"non-finite state at t={self.t:.17g}")
            if err_norm <= 1.0:
                clipped = h < self._h
                self.t = t1 if h == t1 - self.t else self.t + h
                self.y = y_new
                self._f = f_new
                factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
                if not clipped:
                    self._h = h * factor
                else:
                    self._h = max(self._h, h * factor)
                self.n_steps += 1
                if self.n_steps > self.max_steps:
                    raise IntegrationError("maximum number of steps exceeded")
            else:
                self._h = h * max(0.2, 0.9 * err_norm ** -0.2)
        return self.y

    def copy(self) -> "Integrator":
        other = object.__new__(Integrator)
        other.__dict__.update(self.__dict__)
        other.y = self.y.copy()
        other._f = self._f.copy()
        return other


def integrate(f: Rhs, y0, times, rtol: float = 1e-10, atol: float = 1e-10, t0: float = 0.0) -> np.ndarray:
    """States at the (non-decreasing) ``times``; shape ``(len(times),) + y0.shape``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if times.size and (times[0] < t0 or np.any(np.diff(times) < 0)):
        raise ValueError("times must be non-decreasing and start at or after t0")
    stepper = Integrator(f, y0, t0=t0, rtol=rtol, atol=atol)
    out = np.empty((times.size,) + stepper.y.shape)
    for i, t in enumerate(times):
        out[i] = stepper.advance(float(t))
    return out
