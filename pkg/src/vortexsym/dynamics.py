"""The N-vortex problem on the unit sphere with equal strengths.

A configuration is an ``(N, 3)`` array of unit vectors. All functions
accept anything ``np.asarray`` turns into that shape.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CollisionError
from .integrator import solve
from .sphere import normalize

COLLISION_TOL = 1e-14
NEAR_COLLISION = 1e-6
# local error target relative to the caller's tolerance; keeps the global
# energy drift comfortably under 100 * tol over O(10) time units
LOCAL_TOL_FACTOR = 0.1


def _config(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError(f"configuration must have shape (N, 3), got {v.shape}")
    return v


def _pair_sq_distances(v: np.ndarray) -> np.ndarray:
    diff = v[None, :, :] - v[:, None, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def min_pairwise_distance(v) -> float:
    v = _config(v)
    if len(v) < 2:
        return math.inf
    d2 = _pair_sq_distances(v)
    iu = np.triu_indices(len(v), 1)
    return float(math.sqrt(max(0.0, d2[iu].min())))


def _check_collision(v: np.ndarray) -> np.ndarray:
    d2 = _pair_sq_distances(v)
    iu = np.triu_indices(len(v), 1)
    if len(v) > 1 and d2[iu].min() < COLLISION_TOL**2:
        raise CollisionError("two vortices coincide")
    return d2


def hamiltonian(v) -> float:
    """Energy ``-1/2 sum_{i<j} ln |v_i - v_j|^2``."""
    v = _config(v)
    d2 = _check_collision(v)
    iu = np.triu_indices(len(v), 1)
    return float(-0.5 * np.sum(np.log(d2[iu])))


def regularized_hamiltonian(v) -> float:
    """``exp(-2H)``, the product of squared pairwise distances."""
    v = _config(v)
    d2 = _pair_sq_distances(v)
    iu = np.triu_indices(len(v), 1)
    return float(np.prod(d2[iu]))


def momentum(v) -> np.ndarray:
    return _config(v).sum(axis=0)


def vector_field(v) -> np.ndarray:
    """Velocities ``sum_{i != j} (v_i x v_j) / |v_j - v_i|^2``."""
    v = _config(v)
    d2 = _check_collision(v)
    np.fill_diagonal(d2, 1.0)
    cross = np.cross(v[:, None, :], v[None, :, :])  # [i, j] = v_i x v_j
    return _exact_column_sums(cross / d2[:, :, None])


def _exact_column_sums(terms: np.ndarray) -> np.ndarray:
    # correctly rounded sums do not depend on summation order, so a field
    # evaluated at a symmetric configuration is symmetric to the last bit and
    # invariant subspaces are not left through round-off
    N = terms.shape[0]
    cols = terms.reshape(N, -1).T.tolist()
    return np.array([math.fsum(c) for c in cols]).reshape(terms.shape[1:])


def _products_excluding_each(values: np.ndarray) -> np.ndarray:
    # product of all entries but one, without dividing (entries may be zero)
    prefix = np.concatenate(([1.0], np.cumprod(values[:-1])))
    suffix = np.concatenate((np.cumprod(values[::-1][:-1])[::-1], [1.0]))
    return prefix * suffix


def regularized_vector_field(v) -> np.ndarray:
    """Smooth field ``-v_j x grad_j exp(-2H)``; defined at collisions too.

    Away from collisions it equals ``-2 exp(-2H) * vector_field(v)``.
    """
    v = _config(v)
    N = len(v)
    iu = np.triu_indices(N, 1)
    d2 = _pair_sq_distances(v)[iu]
    others = np.zeros((N, N))
    if N > 1:
        others[iu] = _products_excluding_each(d2)
        others = others + others.T
    cross = np.cross(v[:, None, :], v[None, :, :])
    return -2.0 * np.einsum("ijk,ij->jk", cross, others)


def _project_rows(y: np.ndarray) -> np.ndarray:
    return normalize(y)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the full system with conservation diagnostics."""

    times: np.ndarray
    states: np.ndarray
    energy0: float
    momentum0: np.ndarray
    energies: np.ndarray = field(repr=False)
    momenta: np.ndarray = field(repr=False)
    near_collision: bool = False

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energy0)))

    @property
    def relative_energy_drift(self) -> float:
        return self.energy_drift / max(abs(self.energy0), 1e-300)

    @property
    def momentum_drift(self) -> float:
        return float(np.max(np.abs(self.momenta - self.momentum0)))

    @property
    def min_distance(self) -> float:
        return min(min_pairwise_distance(s) for s in self.states)

    def to_csv(self) -> str:
        return trajectory_csv(self.times, self.states)


def integrate(v0, t_end: float, tol: float = 1e-10, stride: float | None = None) -> Trajectory:
    """Integrate the full system from ``v0`` with per-step sphere projection."""
    v0 = normalize(_config(v0))
    _check_collision(v0)
    sol = solve(
        lambda t, y: vector_field(y), v0, t_end,
        tol=tol * LOCAL_TOL_FACTOR, project=_project_rows, stride=stride,
    )
    energies = np.array([hamiltonian(s) for s in sol.states])
    momenta = sol.states.sum(axis=1)
    near = any(min_pairwise_distance(s) < NEAR_COLLISION for s in sol.states)
    return Trajectory(sol.times, sol.states, energies[0], momenta[0], energies, momenta, near)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_csv(times, states) -> str:
    states = np.asarray(states, dtype=float)
    N = states.shape[1]
    header = ["t"] + [f"v{i}{c}" for i in range(1, N + 1) for c in "xyz"] + ["H", "Jx", "Jy", "Jz"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for t, s in zip(times, states):
        try:
            H = hamiltonian(s)
        except CollisionError:
            H = math.inf
        J = s.sum(axis=0)
        w.writerow([_fmt(t)] + [_fmt(x) for x in s.ravel()] + [_fmt(H)] + [_fmt(x) for x in J])
    return buf.getvalue()


def read_configuration_csv(text: str) -> np.ndarray:
    """Parse ``x,y,z`` rows (optional header) into a configuration."""
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec or all(not c.strip() for c in rec):
            continue
        try:
            vals = [float(c) for c in rec]
        except ValueError:
            if rows:
                raise
            continue  # header line
        if len(vals) != 3:
            raise ValueError("each row must have exactly three coordinates")
        rows.append(vals)
    if len(rows) < 2:
        raise ValueError("a configuration needs at least two vortices")
    v = np.array(rows)
    if not np.all(np.isfinite(v)) or np.any(np.linalg.norm(v, axis=1) == 0.0):
        raise ValueError("coordinates must be finite and nonzero")
    return normalize(v)


def platonic_solid(name: str) -> np.ndarray:
    """Vertex set of a regular polyhedron inscribed in the unit sphere."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    name = name.lower()
    if name == "tetrahedron":
        pts = [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)]
    elif name == "octahedron":
        pts = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    elif name == "cube":
        pts = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    elif name == "icosahedron":
        pts = []
        for a in (1, -1):
            for b in (phi, -phi):
                pts += [(0, a, b), (a, b, 0), (b, 0, a)]
    elif name == "dodecahedron":
        pts = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
        for a in (1, -1):
            for b in (1, -1):
                # the orientation that contains the orbit of (phi, 1/phi, 0) under T
                pts += [(b * phi, a / phi, 0), (0, b * phi, a / phi), (a / phi, 0, b * phi)]
    else:
        raise ValueError(f"unknown solid {name!r}")
    return normalize(np.array(pts, dtype=float))


PLATONIC_SOLIDS = ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron")
