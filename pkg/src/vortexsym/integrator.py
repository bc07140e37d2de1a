"""Adaptive Dormand-Prince 5(4) integrator with manifold projection.

States are numpy arrays of any shape. After every accepted step the
optional ``project`` callback maps the state back onto the constraint
manifold (for us: each row renormalised onto the sphere). Time may run
backwards: the sign of ``t_end - t0`` sets the direction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import NonFiniteError, ToleranceError

MIN_STEP = 1e-13

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

Field = Callable[[float, np.ndarray], np.ndarray]
Projector = Callable[[np.ndarray], np.ndarray]


def _identity(y: np.ndarray) -> np.ndarray:
    return y


def rk_stages(f: Field, t: float, y: np.ndarray, h: float, k1: np.ndarray | None = None):
    """One Dormand-Prince step. Returns ``(y5, error_vector, k7)``."""
    ks = [f(t, y) if k1 is None else k1]
    for i in range(1, 7):
        incr = sum(a * k for a, k in zip(_A[i], ks) if a != 0.0)
        ks.append(f(t + _C[i] * h, y + h * incr))
    y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    err = h * sum(e * k for e, k in zip(_E, ks))
    return y5, err, ks[6]


def advance(f: Field, t: float, y: np.ndarray, dt: float, project: Projector | None = None) -> np.ndarray:
    """A single fifth-order step of size ``dt`` with no error control.

    Used to land exactly on sample or event times from the start of an
    accepted step, so ``|dt|`` never exceeds the accepted step size.
    """
    if dt == 0.0:
        return y.copy()
    y5, _, _ = rk_stages(f, t, y, dt)
    return (project or _identity)(y5)


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, tol: float) -> float:
    scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _initial_step(f: Field, t: float, y: np.ndarray, direction: float, tol: float, f0: np.ndarray) -> float:
    scale = tol + tol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y + direction * h0 * f0
    f1 = f(t + direction * h0, y1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)
    return min(100.0 * h0, h1)


@dataclass(frozen=True)
class AcceptedStep:
    t0: float
    y0: np.ndarray
    t1: float
    y1: np.ndarray


def step_iter(
    f: Field,
    y0,
    t_end: float,
    *,
    t0: float = 0.0,
    tol: float = 1e-10,
    project: Projector | None = None,
    max_steps: int = 10_000_000,
) -> Iterator[AcceptedStep]:
    """Yield accepted steps from ``t0`` towards ``t_end``."""
    project = project or _identity
    y = project(np.array(y0, dtype=float))
    t = float(t0)
    span = float(t_end) - t
    if span == 0.0:
        return
    direction = 1.0 if span > 0 else -1.0
    # short spans (time-rescaled fields) get a proportionally smaller floor
    min_step = MIN_STEP * min(1.0, abs(span))
    k1 = f(t, y)
    if not np.all(np.isfinite(k1)):
        raise NonFiniteError("vector field is not finite at the initial state")
    h = direction * min(_initial_step(f, t, y, direction, tol, k1), abs(span))
    for _ in range(max_steps):
        remaining = t_end - t
        if direction * remaining <= 0.0:
            return
        if abs(h) >= abs(remaining):
            h = remaining
        y_new, err, k7 = rk_stages(f, t, y, h, k1)
        if not np.all(np.isfinite(y_new)):
            enorm = math.inf
        else:
            enorm = _error_norm(err, y, y_new, tol)
        if enorm <= 1.0:
            t_new = t + h if abs(h) < abs(remaining) else float(t_end)
            y_new = project(y_new)
            yield AcceptedStep(t, y, t_new, y_new)
            t, y = t_new, y_new
            # FSAL stage is invalid after projection moved the state
            k1 = f(t, y) if project is not _identity else k7
            factor = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
        else:
            factor = 0.2 if not math.isfinite(enorm) else max(0.2, 0.9 * enorm ** -0.25)
        h *= factor
        if abs(h) < min_step and direction * (t_end - t) > min_step:
            raise ToleranceError(f"step size underflow at t={t!r}")
    raise ToleranceError("maximum number of steps exceeded")


@dataclass(frozen=True)
class Solution:
    times: np.ndarray
    states: np.ndarray


def solve(
    f: Field,
    y0,
    t_end: float,
    *,
    tol: float = 1e-10,
    project: Projector | None = None,
    stride: float | None = None,
    t0: float = 0.0,
    max_steps: int = 10_000_000,
) -> Solution:
    """Integrate and return samples.

    With ``stride`` the samples are at ``t0 + k*stride`` (towards ``t_end``)
    plus the endpoint; without it every accepted step is recorded.
    """
    y0 = (project or _identity)(np.array(y0, dtype=float))
    times = [float(t0)]
    states = [y0]
    direction = 1.0 if t_end >= t0 else -1.0
    eps_t = 1e-15 * max(abs(t_end), abs(t0)) if t_end != t0 else 0.0
    if stride is not None:
        if stride <= 0:
            raise ValueError("stride must be positive")
        n_samples = int(math.floor(abs(t_end - t0) / stride + 1e-9))
        targets = [t0 + direction * k * stride for k in range(1, n_samples + 1)]
        if not targets or abs(targets[-1] - t_end) > 1e3 * eps_t:
            targets.append(float(t_end))
        idx = 0
    for step in step_iter(f, y0, t_end, t0=t0, tol=tol, project=project, max_steps=max_steps):
        if stride is None:
            times.append(step.t1)
            states.append(step.y1)
            continue
        while idx < len(targets) and direction * (targets[idx] - step.t1) <= eps_t:
            tt = targets[idx]
            if abs(tt - step.t1) <= eps_t:
                states.append(step.y1)
            else:
                states.append(advance(f, step.t0, step.y0, tt - step.t0, project))
            times.append(tt)
            idx += 1
    return Solution(np.array(times), np.array(states))
