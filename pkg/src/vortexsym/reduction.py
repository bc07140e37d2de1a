"""Symmetry reduction of the N-vortex problem to one point on the sphere.

A scheme pairs an ordered rotation group ``K = (g_1 = e, ..., g_m)`` with
an ordered ``K``-invariant list of fixed points ``F``. The slice of
symmetric configurations is the image of the embedding

    u  ->  (g_1 u, ..., g_m u, f_1, ..., f_k)

and the dynamics on that slice is a one-degree-of-freedom Hamiltonian
system in ``u``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import groups
from .errors import CollisionError, UnsupportedGroup
from .dynamics import LOCAL_TOL_FACTOR
from .integrator import solve
from .sphere import CylindricalPoint, normalize

FIXED_SET_TOL = 1e-9
# squared distances this small are rotation round-off at an isotropy point
ROUNDOFF_SQ_DISTANCE = (8.0 * np.finfo(float).eps) ** 2
INV_SQRT3 = 1.0 / math.sqrt(3.0)

POLES = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
# two inscribed tetrahedra making up the cube, first one listed first
TETRA_1 = INV_SQRT3 * np.array([[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]], dtype=float)
TETRA_2 = INV_SQRT3 * np.array([[-1, -1, -1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]], dtype=float)
CUBE = np.vstack([TETRA_1, TETRA_2])


@dataclass(frozen=True, eq=False)
class SymmetryScheme:
    """An ordered group together with an ordered invariant fixed set."""

    group: groups.FiniteRotationGroup
    fixed_points: np.ndarray
    twist: groups.TwistMorphism
    fixed_label: str = "none"
    fixed_set: groups.FixedSet = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return self.group.order

    @property
    def n_vortices(self) -> int:
        return self.m + len(self.fixed_points)

    @property
    def label(self) -> str:
        return f"({self.group.name},{self.fixed_label})"

    @cached_property
    def _moving(self) -> np.ndarray:
        return self.group.elements[1:]

    @cached_property
    def _moving_complement(self) -> np.ndarray:
        # (I - g)^T for every non-identity element, used by the gradients
        return np.transpose(np.eye(3)[None] - self._moving, (0, 2, 1))

    def to_json(self) -> dict:
        out = {"group": "Dn" if self.group.kind == "D" else self.group.kind, "fixed": self.fixed_label}
        if self.group.kind == "D":
            out["n"] = self.group.n
        return out


def make_scheme(group: str, n: int | None = None, fixed: str = "none") -> SymmetryScheme:
    """Resolve a scheme from its textual description.

    ``group`` is ``"Dn"`` (with ``n``) or ``"T"``; ``fixed`` is ``"none"``,
    ``"poles"`` (dihedral only) or ``"cube"`` (tetrahedral only).
    """
    g = str(group)
    if g.lower() in ("dn", "d", "dihedral"):
        G = groups.build_group("D", n)
    elif g.upper().startswith("D") and g[1:].isdigit() and n is None:
        G = groups.build_group("D", int(g[1:]))
    elif g.upper() in ("T", "TETRAHEDRAL"):
        if n is not None:
            raise UnsupportedGroup("the tetrahedral group takes no n")
        G = groups.build_group("T")
    else:
        raise UnsupportedGroup(f"no reduction implemented for group {group!r}")
    fixed = str(fixed).lower()
    if fixed == "none":
        F = np.zeros((0, 3))
    elif fixed == "poles" and G.kind == "D":
        F = POLES.copy()
    elif fixed == "cube" and G.kind == "T":
        F = CUBE.copy()
    else:
        raise UnsupportedGroup(f"fixed set {fixed!r} is not available for {G.name}")
    return scheme_from_parts(G, F, fixed)


def scheme_from_parts(G: groups.FiniteRotationGroup, F, label: str = "custom") -> SymmetryScheme:
    F = np.asarray(F, dtype=float).reshape(-1, 3)
    tm = groups.twist_morphism(G, F)
    return SymmetryScheme(G, F, tm, label, groups.fixed_point_set(G))


STANDARD_SCHEMES = (
    ("Dn", 2, "none"), ("Dn", 3, "none"), ("Dn", 4, "none"),
    ("Dn", 2, "poles"), ("Dn", 3, "poles"), ("Dn", 5, "poles"),
    ("T", None, "none"), ("T", None, "cube"),
)


def symmetry_supergroup(s: SymmetryScheme) -> groups.FiniteRotationGroup:
    """A supergroup of ``K`` whose action leaves the reduced energy invariant.

    These are the normalisers that also preserve the fixed list as a set:
    the octahedral group for ``D2`` and ``T``, and ``D_{2n}`` otherwise.
    """
    G = s.group
    if G.kind == "T":
        return groups.build_group("O")
    if G.n == 2 and len(s.fixed_points) == 0:
        return groups.build_group("O")
    return groups.build_group("D", 2 * G.n)


def embed(u, s: SymmetryScheme) -> np.ndarray:
    """Symmetric configuration generated by ``u``, shape ``(N, 3)``."""
    u = normalize(u)
    return np.vstack([s.group.apply(u), s.fixed_points])


def distance_to_fixed_set(u, s: SymmetryScheme) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.min(np.linalg.norm(s.fixed_set.points - u, axis=1)))


def _require_regular(u, s: SymmetryScheme) -> np.ndarray:
    u = normalize(u)
    if distance_to_fixed_set(u, s) < FIXED_SET_TOL:
        raise CollisionError("u lies on a point of nontrivial isotropy")
    return u


def _orbit_terms(u: np.ndarray, s: SymmetryScheme):
    diff_g = u[None] - s._moving @ u  # u - g u
    diff_f = u[None] - s.fixed_points  # u - f
    return diff_g, diff_f


def reduced_hamiltonian(u, s: SymmetryScheme) -> float:
    """``-(m/4) sum_j ln|u - g_j u|^2 - (m/2) sum_f ln|u - f|^2``."""
    u = _require_regular(u, s)
    dg, df = _orbit_terms(u, s)
    m = s.m
    return float(-(m / 4.0) * np.sum(np.log(np.einsum("ij,ij->i", dg, dg)))
                 - (m / 2.0) * np.sum(np.log(np.einsum("ij,ij->i", df, df))))


def _euclidean_gradient(u: np.ndarray, s: SymmetryScheme) -> np.ndarray:
    dg, df = _orbit_terms(u, s)
    m = s.m
    d2g = np.einsum("ij,ij->i", dg, dg)
    d2f = np.einsum("ij,ij->i", df, df)
    grad_g = np.einsum("kab,kb->ka", s._moving_complement, dg) * (2.0 / d2g)[:, None]
    grad_f = df * (2.0 / d2f)[:, None]
    return -(m / 4.0) * grad_g.sum(axis=0) - (m / 2.0) * grad_f.sum(axis=0)


def reduced_gradient(u, s: SymmetryScheme) -> np.ndarray:
    u = _require_regular(u, s)
    g = _euclidean_gradient(u, s)
    return g - np.dot(g, u) * u


def reduced_gradient_many(points, s: SymmetryScheme) -> np.ndarray:
    """Tangential gradients of ``h`` at many points at once, shape ``(M, 3)``.

    No collision check: points on the fixed set give infinities.
    """
    U = normalize(np.asarray(points, dtype=float).reshape(-1, 3))
    m = s.m
    dg = U[:, None, :] - np.einsum("kab,mb->mka", s._moving, U)
    d2g = np.einsum("mka,mka->mk", dg, dg)
    grad = -(m / 2.0) * np.einsum("kab,mkb->ma", s._moving_complement, dg / d2g[..., None])
    if len(s.fixed_points):
        df = U[:, None, :] - s.fixed_points[None]
        d2f = np.einsum("mka,mka->mk", df, df)
        grad -= m * np.sum(df / d2f[..., None], axis=1)
    return grad - np.einsum("ma,ma->m", grad, U)[:, None] * U


def reduced_field(u, s: SymmetryScheme) -> np.ndarray:
    """``-(1/m) u x grad h``."""
    u = _require_regular(u, s)
    return -np.cross(u, _euclidean_gradient(u, s)) / s.m


def _factor_data(u: np.ndarray, s: SymmetryScheme):
    dg, df = _orbit_terms(u, s)
    m = s.m
    d2 = np.concatenate([np.einsum("ij,ij->i", dg, dg), np.einsum("ij,ij->i", df, df)])
    d2[d2 < ROUNDOFF_SQ_DISTANCE] = 0.0
    # exponents on the (unsquared) distances
    expo = np.concatenate([np.full(len(dg), float(m)), np.full(len(df), 2.0 * m)])
    return dg, df, d2, expo


def regularized_reduced_hamiltonian(u, s: SymmetryScheme, scale: float = 1.0) -> float:
    """``prod |u - g_j u|^m * prod |u - f|^(2m)``, times ``scale``.

    Evaluated as a product, so it is finite everywhere and zero exactly on
    the points of nontrivial isotropy.
    """
    u = normalize(u)
    _, _, d2, expo = _factor_data(u, s)
    return float(scale * np.prod(d2 ** (expo / 2.0)))


def _regularized_euclidean_gradient(u: np.ndarray, s: SymmetryScheme, scale: float) -> np.ndarray:
    dg, df, d2, expo = _factor_data(u, s)
    half = (expo / 2.0).astype(int)
    factors = d2 ** half
    # grad (d^e) = e d^(e-2) (I - g)^T (u - g u); e is even so this is polynomial
    inner_g = np.einsum("kab,kb->ka", s._moving_complement, dg)
    inner = np.vstack([inner_g, df])
    grads = (expo * d2 ** (half - 1))[:, None] * inner
    prefix = np.concatenate(([1.0], np.cumprod(factors[:-1])))
    suffix = np.concatenate((np.cumprod(factors[::-1][:-1])[::-1], [1.0]))
    return scale * np.einsum("k,ka->a", prefix * suffix, grads)


def regularized_reduced_gradient(u, s: SymmetryScheme, scale: float = 1.0) -> np.ndarray:
    u = normalize(u)
    g = _regularized_euclidean_gradient(u, s, scale)
    return g - np.dot(g, u) * u


def regularized_reduced_field(u, s: SymmetryScheme, scale: float = 1.0) -> np.ndarray:
    """``-(1/m) u x grad h~``; smooth on the whole sphere."""
    u = normalize(u)
    return -np.cross(u, _regularized_euclidean_gradient(u, s, scale)) / s.m


def time_rescale_factor(u0, s: SymmetryScheme, scale: float = 1.0) -> float:
    """Factor ``a`` with ``w(t) = u(a t)``; equals ``-2 scale exp(-2 h(u0))``."""
    u0 = _require_regular(u0, s)
    return -2.0 * regularized_reduced_hamiltonian(u0, s, scale)


def natural_scale(s: SymmetryScheme, samples: int = 2000) -> float:
    """Normaliser making the maximum of the regularised energy about one.

    The raw product reaches ~1e40 for the larger schemes, which makes the
    regularised flow absurdly fast; the rescaled flow has O(1) speeds.
    """
    from .sphere import fibonacci_sphere

    pts = fibonacci_sphere(samples)
    vals = [regularized_reduced_hamiltonian(p, s) for p in pts]
    return 1.0 / max(vals)


def _project_unit(y: np.ndarray) -> np.ndarray:
    return normalize(y)


def integrate_reduced(u0, s: SymmetryScheme, t_end: float, tol: float = 1e-10,
                      stride: float | None = None, regularized: bool = False, scale: float = 1.0):
    """Integrate the reduced (or regularised reduced) system from ``u0``."""
    if regularized:
        f = lambda t, y: regularized_reduced_field(y, s, scale)  # noqa: E731
    else:
        _require_regular(u0, s)
        f = lambda t, y: reduced_field(y, s)  # noqa: E731
        # energy error is about |grad h| times position error
        steepness = float(np.linalg.norm(reduced_gradient(u0, s)))
        tol = tol / min(100.0, max(1.0, steepness / 10.0))
    return solve(f, normalize(u0), t_end, tol=tol * LOCAL_TOL_FACTOR, project=_project_unit, stride=stride)


# ---------------------------------------------------------------- dihedral closed forms

def _cheb_t(k: int, x):
    t0, t1 = np.ones_like(x), x
    if k == 0:
        return t0
    for _ in range(k - 1):
        t0, t1 = t1, 2.0 * x * t1 - t0
    return t1


def cylindrical_hamiltonian_sum(p: CylindricalPoint, n: int, with_poles: bool = False) -> float:
    """Dihedral reduced energy in cylindrical coordinates, direct sum form."""
    z, theta = p.z, p.theta
    zeta = 2.0 * math.pi / n
    one_minus = 1.0 - z * z
    if one_minus <= 0.0:
        raise CollisionError("the poles are collision points")
    r = math.sqrt(one_minus)
    angles = theta + np.arange(1, 2 * n + 1) * zeta / 2.0
    args = 1.0 - r * np.cos(angles)
    if np.min(args) <= 0.0:
        raise CollisionError("point lies on an equatorial collision point")
    h = -(n * (n - 1) / 2.0) * math.log(one_minus) - (n / 2.0) * float(np.sum(np.log(args)))
    if with_poles:
        h -= n * math.log(one_minus)
    return h


def cylindrical_hamiltonian_chebyshev(p: CylindricalPoint, n: int, with_poles: bool = False) -> float:
    """Same energy (up to a constant) through ``r^{2n} T_{2n}(1/r)``."""
    z, theta = p.z, p.theta
    one_minus = 1.0 - z * z
    if one_minus <= 0.0:
        raise CollisionError("the poles are collision points")
    arg = chebyshev_log_argument(z, theta, n)
    if arg <= 0.0:
        raise CollisionError("point lies on an equatorial collision point")
    h = -(n * (n - 1) / 2.0) * math.log(one_minus) - (n / 2.0) * math.log(arg)
    if with_poles:
        h -= n * math.log(one_minus)
    return h


def chebyshev_log_argument(z: float, theta: float, n: int) -> float:
    """``q_{2n}(r) - r^{2n} cos(2 n theta)`` with ``r = sqrt(1 - z^2)``."""
    r = math.sqrt(max(0.0, 1.0 - z * z))
    # r^{2n} T_{2n}(1/r) expanded so r = 0 is harmless
    coeffs = _chebyshev_t_coefficients(2 * n)
    q = sum(c * r ** (2 * n - k) for k, c in enumerate(coeffs) if c)
    return float(q - r ** (2 * n) * math.cos(2 * n * theta))


def _chebyshev_t_coefficients(k: int) -> list[int]:
    prev, cur = [1], [0, 1]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


# ---------------------------------------------------------------- structural checks

def check_pullback(u, s: SymmetryScheme, a, b) -> tuple[float, float]:
    """Compare the full symplectic form on pushed-forward vectors with ``m`` times the area form."""
    u = normalize(u)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pos = embed(u, s)
    push_a = np.vstack([s.group.elements @ a, np.zeros((len(s.fixed_points), 3))])
    push_b = np.vstack([s.group.elements @ b, np.zeros((len(s.fixed_points), 3))])
    full = float(np.sum(np.einsum("ij,ij->i", pos, np.cross(push_a, push_b))))
    return full, s.m * float(np.dot(u, np.cross(a, b)))


def trig_identity_check(n: int) -> tuple[float, float]:
    if n < 2:
        raise ValueError("n must be at least 2")
    zeta = 2.0 * math.pi / n
    ang = zeta / 4.0 + np.arange(1, 2 * n + 1) * zeta / 2.0
    c = np.cos(ang)
    return float(np.sum(c / (1.0 - c))), float(2 * n * (n - 1))


def collision_multiplicities(u, s: SymmetryScheme, tol: float = 1e-9) -> list[tuple[np.ndarray, int]]:
    """Clusters of coincident vortices in ``embed(u)`` as ``(location, size)`` pairs."""
    pos = embed(u, s)
    clusters: list[list] = []
    for p in pos:
        for c in clusters:
            if np.linalg.norm(c[0] - p) < tol:
                c[1] += 1
                break
        else:
            clusters.append([p, 1])
    return [(c[0], c[1]) for c in clusters]


def expected_collision_multiplicity(u, s: SymmetryScheme) -> int:
    iso = groups.isotropy_order(s.group, u)
    in_f = len(s.fixed_points) and np.min(np.linalg.norm(s.fixed_points - np.asarray(u), axis=1)) < 1e-9
    return iso + 1 if in_f else iso
