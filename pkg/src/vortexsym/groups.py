"""Finite rotation subgroups of SO(3) and their action on the sphere.

Group elements are stored as a stacked ``(m, 3, 3)`` array with the
identity first. Products are snapped to integer indices once, at
construction, through the multiplication table; everything downstream
(twist permutations, inverses) is exact integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInFixedSet, NotInvariant, UnsupportedGroup
from .sphere import normalize

MATCH_TOL = 1e-9
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

_KIND_ALIASES = {
    "d": "D", "dn": "D", "dihedral": "D",
    "t": "T", "tetrahedral": "T",
    "o": "O", "octahedral": "O",
    "i": "I", "icosahedral": "I",
}


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a right-handed turn about ``axis``."""
    k = normalize(axis)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def dihedral_generators(n: int) -> tuple[np.ndarray, np.ndarray]:
    zeta = 2.0 * math.pi / n
    c, s = math.cos(zeta), math.sin(zeta)
    A = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    B = np.diag([1.0, -1.0, -1.0])
    return A, B


CYCLE3 = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
FLIP_X = np.diag([1.0, -1.0, -1.0])


def _clean(M: np.ndarray) -> np.ndarray:
    # kill -0.0 and 1e-17 noise so lexicographic ordering is stable
    M = np.where(np.abs(M) < 1e-14, 0.0, M)
    return M


def _find(elements: list[np.ndarray], M: np.ndarray) -> int:
    for i, E in enumerate(elements):
        if np.max(np.abs(E - M)) < MATCH_TOL:
            return i
    return -1


def _bfs_closure(gens: list[np.ndarray], max_order: int = 120) -> list[np.ndarray]:
    elements = [np.eye(3)]
    level = [np.eye(3)]
    while level:
        fresh: list[np.ndarray] = []
        for X in level:
            for g in gens:
                P = _clean(g @ X)
                if _find(elements, P) < 0 and _find(fresh, P) < 0:
                    fresh.append(P)
        fresh.sort(key=lambda M: tuple(np.round(M, 9).ravel()))
        elements.extend(fresh)
        level = fresh
        if len(elements) > max_order:
            raise UnsupportedGroup("generators do not close to a finite group")
    return elements


@dataclass(frozen=True, eq=False)
class FiniteRotationGroup:
    """An ordered finite rotation group.

    Attributes
    ----------
    kind : {"D", "T", "O", "I"}
    n : int or None
        Dihedral parameter.
    elements : ndarray, shape (m, 3, 3)
    table : ndarray, shape (m, m)
        ``table[i, j]`` is the index of ``elements[i] @ elements[j]``.
    """

    kind: str
    n: int | None
    elements: np.ndarray
    table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def name(self) -> str:
        return f"D{self.n}" if self.kind == "D" else self.kind

    @property
    def inverse(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1)

    def index_of(self, M) -> int:
        d = np.max(np.abs(self.elements - np.asarray(M)[None]), axis=(1, 2))
        i = int(np.argmin(d))
        if d[i] >= MATCH_TOL:
            raise KeyError("matrix is not an element of the group")
        return i

    def contains(self, M) -> bool:
        try:
            self.index_of(M)
        except KeyError:
            return False
        return True

    def apply(self, u) -> np.ndarray:
        """All images ``g u`` in group order, shape ``(m, 3)``."""
        return self.elements @ np.asarray(u, dtype=float)

    def to_json(self) -> dict:
        fs = fixed_point_set(self)
        return {
            "group": self.name,
            "order": self.order,
            "elements": [g.ravel().tolist() for g in self.elements],
            "fixed_points": fs.points.tolist(),
            "isotropy_orders": fs.isotropy_orders.tolist(),
        }


def _multiplication_table(elements: np.ndarray) -> np.ndarray:
    m = len(elements)
    prods = np.einsum("iab,jbc->ijac", elements, elements)
    diff = np.abs(prods[:, :, None] - elements[None, None]).max(axis=(3, 4))
    table = np.argmin(diff, axis=2)
    if np.take_along_axis(diff, table[..., None], axis=2).max() >= MATCH_TOL:
        raise UnsupportedGroup("element set is not closed under multiplication")
    assert table.shape == (m, m)
    return table


def build_group(kind: str, n: int | None = None) -> FiniteRotationGroup:
    """Construct D_n, T, O or I with a deterministic ordering.

    The dihedral ordering is ``A^0..A^{n-1}, B A^0..B A^{n-1}``; the
    polyhedral groups are ordered by breadth-first generator word length,
    ties broken lexicographically.
    """
    key = _KIND_ALIASES.get(str(kind).lower())
    if key is None:
        raise UnsupportedGroup(f"unknown group kind {kind!r}")
    if key == "D":
        if n is None or int(n) < 2:
            raise UnsupportedGroup("dihedral group requires n >= 2")
        n = int(n)
        A, B = dihedral_generators(n)
        powers = [np.linalg.matrix_power(A, j) for j in range(n)]
        elements = [_clean(P) for P in powers] + [_clean(B @ P) for P in powers]
    else:
        if n is not None:
            raise UnsupportedGroup(f"group {key} takes no parameter n")
        if key == "T":
            gens = [CYCLE3, FLIP_X]
        elif key == "O":
            gens = [rotation_about([0, 0, 1], math.pi / 2), CYCLE3]
        else:
            gens = [CYCLE3, FLIP_X, rotation_about([0.0, 1.0, GOLDEN], 2.0 * math.pi / 5.0)]
        elements = _bfs_closure(gens)
    elements = np.array(elements)
    expected = {"D": 2 * (n or 0), "T": 12, "O": 24, "I": 60}[key]
    if len(elements) != expected:
        raise UnsupportedGroup(f"closure produced {len(elements)} elements, expected {expected}")
    return FiniteRotationGroup(key, n if key == "D" else None, elements, _multiplication_table(elements))


def group_sum(G: FiniteRotationGroup) -> np.ndarray:
    return G.elements.sum(axis=0)


@dataclass(frozen=True, eq=False)
class FixedSet:
    points: np.ndarray
    isotropy_orders: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


def isotropy_order(G: FiniteRotationGroup, u, tol: float = MATCH_TOL) -> int:
    u = np.asarray(u, dtype=float)
    return int(np.sum(np.linalg.norm(G.apply(u) - u, axis=1) < tol))


def _dedup(points, tol: float = MATCH_TOL) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - q) >= tol for q in out):
            out.append(p)
    return np.array(out).reshape(-1, 3)


def _rotation_axis(g: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eig(g)
    k = int(np.argmin(np.abs(w - 1.0)))
    return normalize(np.real(V[:, k]))


def fixed_point_set(G: FiniteRotationGroup) -> FixedSet:
    """Points with non-trivial isotropy: both endpoints of every rotation axis."""
    cand = []
    for g in G.elements[1:]:
        a = _rotation_axis(g)
        cand.extend([a, -a])
    pts = _dedup(np.where(np.abs(cand) < 1e-15, 0.0, cand))
    # canonical order: descending z, then azimuth
    az = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * math.pi)
    order = np.lexsort((np.round(az, 9), -np.round(pts[:, 2], 9)))
    pts = pts[order]
    iso = np.array([isotropy_order(G, p) for p in pts], dtype=int)
    return FixedSet(pts, iso)


def orbit(G: FiniteRotationGroup, u) -> np.ndarray:
    return _dedup(G.apply(u))


def nearest_fixed_point_distance(G: FiniteRotationGroup, u, fixed: FixedSet | None = None) -> float:
    fs = fixed if fixed is not None else fixed_point_set(G)
    return float(np.min(np.linalg.norm(fs.points - np.asarray(u, dtype=float), axis=1)))


@dataclass(frozen=True, eq=False)
class TwistMorphism:
    """Permutation representation of K on vortex labels.

    ``perms[i]`` is the image of group element ``i`` as a 0-based array:
    ``perms[i][j]`` is where label ``j`` goes. Composition follows
    ``(s1 s2)(j) = s1(s2(j))``.
    """

    perms: np.ndarray

    @property
    def size(self) -> int:
        return self.perms.shape[1]

    def __call__(self, i: int) -> np.ndarray:
        return self.perms[i]

    def is_homomorphism(self, G: FiniteRotationGroup) -> bool:
        for i in range(G.order):
            for k in range(G.order):
                if not np.array_equal(self.perms[G.table[i, k]], self.perms[i][self.perms[k]]):
                    return False
        return True

    def is_injective(self) -> bool:
        return len({tuple(p) for p in self.perms}) == len(self.perms)


def _index_point(points: np.ndarray, p: np.ndarray) -> int:
    d = np.linalg.norm(points - p, axis=1)
    i = int(np.argmin(d))
    return i if d[i] < MATCH_TOL else -1


def twist_morphism(G: FiniteRotationGroup, fixed_ordered) -> TwistMorphism:
    """Build the morphism that relabels vortices alongside each rotation.

    The first ``m`` labels follow left multiplication in the group, the
    remaining ones follow the action on the ordered fixed points.
    """
    F = np.asarray(fixed_ordered, dtype=float).reshape(-1, 3)
    m = G.order
    for f in F:
        if isotropy_order(G, f) < 2:
            raise NotInFixedSet(f"{f} has trivial isotropy in {G.name}")
    perms = np.empty((m, m + len(F)), dtype=int)
    perms[:, :m] = G.table
    for i, g in enumerate(G.elements):
        for j, f in enumerate(F):
            k = _index_point(F, g @ f)
            if k < 0:
                raise NotInvariant(f"fixed set is not {G.name}-invariant at {f}")
            perms[i, m + j] = m + k
    return TwistMorphism(perms)


def is_twisted_fixed(v, tm: TwistMorphism, G: FiniteRotationGroup, tol: float = 1e-9) -> bool:
    """Whether ``(tau(g), g) . v == v`` for every group element."""
    v = np.asarray(v, dtype=float)
    if v.shape != (tm.size, 3):
        return False
    for i, g in enumerate(G.elements):
        inv = np.argsort(tm.perms[i])
        moved = v[inv] @ g.T
        if np.max(np.abs(moved - v)) > tol:
            return False
    return True


def is_subgroup(H: FiniteRotationGroup, G: FiniteRotationGroup) -> bool:
    return all(G.contains(h) for h in H.elements)


def conjugation_preserves(G: FiniteRotationGroup, K: FiniteRotationGroup) -> bool:
    """True when every element of ``G`` normalises ``K``."""
    for g in G.elements:
        for k in K.elements:
            if not K.contains(g.T @ k @ g):
                return False
    return True
