"""Points, tangent vectors and charts on the unit sphere.

Every function here accepts plain array-likes of shape ``(3,)`` for points;
the small dataclasses exist for records and user-facing I/O.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteError, PoleError

TWO_PI = 2.0 * math.pi
POLE_TOL = 1e-14


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def wrap_angle(theta: float) -> float:
    """Map an angle to ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod can return exactly 2*pi after the shift for tiny negative inputs
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class UnitVector3:
    x: float
    y: float
    z: float

    @classmethod
    def from_xyz(cls, x, y=None, z=None) -> "UnitVector3":
        v = np.asarray([x, y, z] if y is not None else x, dtype=float)
        v = normalize(v)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype or float)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class TangentVector:
    base: UnitVector3
    vec: tuple[float, float, float]


@dataclass(frozen=True)
class CylindricalPoint:
    z: float
    theta: float


@dataclass(frozen=True)
class GnomonicPolarPoint:
    R: float
    Theta: float


def to_cylindrical(u) -> CylindricalPoint:
    """Cylindrical coordinates ``(z, theta)`` with ``x = sqrt(1-z^2) cos(theta)``."""
    x, y, z = np.asarray(u, dtype=float)
    if abs(z) >= 1.0 - POLE_TOL:
        raise PoleError(f"cylindrical chart undefined at the pole z={z!r}")
    return CylindricalPoint(float(z), wrap_angle(math.atan2(y, x)))


def from_cylindrical(p: CylindricalPoint) -> np.ndarray:
    r = math.sqrt(max(0.0, 1.0 - p.z * p.z))
    return normalize([r * math.cos(p.theta), r * math.sin(p.theta), p.z])


def cylindrical_to_xyz(z, theta) -> np.ndarray:
    """Vectorised cylindrical map; returns an array of shape ``z.shape + (3,)``."""
    z = np.asarray(z, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack(np.broadcast_arrays(r * np.cos(theta), r * np.sin(theta), z), axis=-1)


def from_gnomonic(p: GnomonicPolarPoint) -> np.ndarray:
    """Inverse gnomonic projection from the tangent plane at the north pole."""
    X = p.R * math.cos(p.Theta)
    Y = p.R * math.sin(p.Theta)
    return normalize([X, Y, 1.0])


def to_gnomonic(u) -> GnomonicPolarPoint:
    x, y, z = np.asarray(u, dtype=float)
    if z <= 0.0:
        raise PoleError("gnomonic chart covers the open northern hemisphere only")
    X, Y = x / z, y / z
    return GnomonicPolarPoint(math.hypot(X, Y), wrap_angle(math.atan2(Y, X)))


def tangent_frame(u) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair ``(e1, e2)`` spanning the tangent plane at ``u``.

    The pair is positively oriented: ``e1 x e2 = u``.
    """
    u = np.asarray(u, dtype=float)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(u)))] = 1.0
    e1 = normalize(axis - np.dot(axis, u) * u)
    e2 = np.cross(u, e1)
    return e1, e2


def project_tangent(u, w) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    return w - np.dot(w, u) * u


def exp_map(u, w) -> np.ndarray:
    """Follow the great circle from ``u`` along tangent vector ``w``."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    r = float(np.linalg.norm(w))
    if r == 0.0:
        return u.copy()
    return normalize(math.cos(r) * u + (math.sin(r) / r) * w)


def geodesic_distance(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    # atan2 form stays accurate for nearly equal and nearly antipodal points
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def spherical_gradient(f: Callable[[np.ndarray], float], u, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar field on the sphere.

    Parameters
    ----------
    f : callable
        Scalar field evaluated at unit vectors.
    u : array-like, shape (3,)
        Base point.
    h : float
        Geodesic step, in ``(0, 1e-3]``.

    Returns
    -------
    ndarray, shape (3,)
        Tangent vector at ``u``.
    """
    if not 0.0 < h <= 1e-3:
        raise ValueError("step must lie in (0, 1e-3]")
    u = normalize(u)
    grad = np.zeros(3)
    for e in tangent_frame(u):
        fp = f(exp_map(u, h * e))
        fm = f(exp_map(u, -h * e))
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise NonFiniteError(f"field is not finite near {u}")
        grad += (fp - fm) / (2.0 * h) * e
    return project_tangent(u, grad)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform sample of ``n`` points on the sphere."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    theta = math.pi * (1.0 + math.sqrt(5.0)) * i
    return cylindrical_to_xyz(z, theta)


def random_points(rng: np.random.Generator, n: int) -> np.ndarray:
    return normalize(rng.standard_normal((n, 3)))
