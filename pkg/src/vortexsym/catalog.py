"""Equilibria and collision points of the reduced dihedral and tetrahedral systems.

The heights of the (anti-)prism equilibria solve integer combinations of
Chebyshev polynomials in ``lambda = 1/sqrt(1 - z^2)``; the tetrahedral
truncated-tetrahedron equilibria solve a cubic in ``alpha^2``. Roots are
bracketed by a sign scan, which also checks that they are unique.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHessian, MultipleRoots, NoBracket, UnsupportedDegree
from .reduction import (
    CUBE,
    SymmetryScheme,
    distance_to_fixed_set,
    make_scheme,
    reduced_gradient,
    reduced_gradient_many,
    reduced_hamiltonian,
    symmetry_supergroup,
)
from .sphere import (
    CylindricalPoint,
    GnomonicPolarPoint,
    exp_map,
    normalize,
    tangent_frame,
    to_cylindrical,
    to_gnomonic,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
MAX_DIHEDRAL_N = 16
SCAN_POINTS = 1000
SCAN_STEP = 1e-3
DIHEDRAL_BRACKET = (1.0, 4.0)
TETRAHEDRAL_BRACKET = (0.0, 0.5)


# ---------------------------------------------------------------- Chebyshev polynomials

def chebyshev(kind: str, k: int, x: float) -> float:
    """``T_k(x)`` or ``U_k(x)`` by the three-term recurrence."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    kind = kind.upper()
    if kind not in ("T", "U"):
        raise ValueError("kind must be 'T' or 'U'")
    p0, p1 = 1.0, (x if kind == "T" else 2.0 * x)
    if k == 0:
        return p0
    for _ in range(k - 1):
        p0, p1 = p1, 2.0 * x * p1 - p0
    return p1


def chebyshev_coefficients(kind: str, k: int) -> list[int]:
    """Exact integer coefficients of ``T_k`` or ``U_k``, ascending powers."""
    kind = kind.upper()
    prev, cur = [1], ([0, 1] if kind == "T" else [0, 2])
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


@dataclass(frozen=True)
class DefiningPolynomial:
    """Polynomial with ascending integer coefficients."""

    coefficients: tuple
    label: str

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "DefiningPolynomial":
        coeffs = tuple(k * c for k, c in enumerate(self.coefficients))[1:] or (0,)
        return DefiningPolynomial(coeffs, self.label + "'")

    def pretty(self, var: str = "λ") -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mag = abs(c)
            body = (str(mag) if mag != 1 or k == 0 else "") + (var if k >= 1 else "") + (f"^{k}" if k > 1 else "")
            terms.append(("- " if c < 0 else "+ ") + body)
        if not terms:
            return "0"
        head = terms[0]
        return " ".join([head[2:] if head.startswith("+") else "-" + head[2:]] + terms[1:])


_DIHEDRAL_WEIGHTS = {
    # label: (coefficient of T_2n, coefficient of U_2n, constant) as functions of n
    "Pa": lambda n: (3 * n - 1, -n, 2 * n - 1),
    "Pp": lambda n: (3 * n - 1, -n, -(2 * n - 1)),
    "Pa_hat": lambda n: (3 * n + 1, -n, 2 * n + 1),
    "Pp_hat": lambda n: (3 * n + 1, -n, -(2 * n + 1)),
}
_TETRAHEDRAL = {
    "p_T": (1, -13, -13, 33),
    "p_T_cube": (1, -21, -29, 57),
}


def build_polynomial(label: str, n: int | None = None) -> DefiningPolynomial:
    if label in _TETRAHEDRAL:
        return DefiningPolynomial(_TETRAHEDRAL[label], label)
    if label not in _DIHEDRAL_WEIGHTS:
        raise UnsupportedDegree(f"unknown polynomial label {label!r}")
    if n is None or not 2 <= int(n) <= MAX_DIHEDRAL_N:
        raise UnsupportedDegree(f"dihedral polynomials need 2 <= n <= {MAX_DIHEDRAL_N}")
    n = int(n)
    a, b, c = _DIHEDRAL_WEIGHTS[label](n)
    T = chebyshev_coefficients("T", 2 * n)
    U = chebyshev_coefficients("U", 2 * n)
    coeffs = [a * t + b * u for t, u in zip(T, U)]
    coeffs[0] += c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return DefiningPolynomial(tuple(coeffs), f"{label}({n})")


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def root_in_interval(poly: DefiningPolynomial, lo: float, hi: float) -> float:
    """The unique root of ``poly`` in ``(lo, hi]``, to about 1e-13.

    The interval is scanned at no fewer than ``SCAN_POINTS`` points spaced at
    most ``SCAN_STEP`` apart; more than one sign change is reported rather
    than silently picking a root.
    """
    count = max(SCAN_POINTS, math.ceil((hi - lo) / SCAN_STEP))
    xs = lo + (hi - lo) * np.arange(1, count + 1) / count
    vals = [poly(float(x)) for x in xs]
    brackets = []
    for i in range(len(xs)):
        if vals[i] == 0.0:
            brackets.append((xs[i], xs[i]))
        elif i + 1 < len(xs) and vals[i + 1] != 0.0 and _sign(vals[i]) != _sign(vals[i + 1]):
            brackets.append((xs[i], xs[i + 1]))
    if not brackets:
        raise NoBracket(f"{poly.label} has no sign change in ({lo}, {hi}]")
    if len(brackets) > 1:
        raise MultipleRoots(f"{poly.label} changes sign {len(brackets)} times in ({lo}, {hi}]")
    a, b = (float(v) for v in brackets[0])
    if a == b:
        return a
    fa = poly(a)
    while b - a > 1e-14 * max(1.0, abs(a)):
        mid = 0.5 * (a + b)
        fm = poly(mid)
        if fm == 0.0:
            return mid
        if _sign(fm) == _sign(fa):
            a, fa = mid, fm
        else:
            b = mid
        if b - a < 1e-13:
            break
    x = 0.5 * (a + b)
    d = poly.derivative()
    for _ in range(3):
        dx = d(x)
        if dx == 0.0:
            break
        step = poly(x) / dx
        if abs(step) > (b - a) + 1e-12:
            break
        x -= step
    return x


def height_from_lambda(lam: float) -> float:
    return math.sqrt(1.0 - 1.0 / (lam * lam))


# ---------------------------------------------------------------- records

@dataclass(frozen=True, eq=False)
class EquilibriumRecord:
    point: np.ndarray
    chart_point: CylindricalPoint | GnomonicPolarPoint | None
    kind: str
    name: str
    defining_root: float | None = None
    label: str = ""

    def to_json(self) -> dict:
        chart = None
        if isinstance(self.chart_point, CylindricalPoint):
            chart = {"type": "cylindrical", "z": self.chart_point.z, "theta": self.chart_point.theta}
        elif isinstance(self.chart_point, GnomonicPolarPoint):
            chart = {"type": "gnomonic", "R": self.chart_point.R, "Theta": self.chart_point.Theta}
        return {
            "name": self.name,
            "label": self.label,
            "kind": self.kind,
            "point": [float(x) for x in self.point],
            "chart": chart,
            "defining_root": self.defining_root,
        }


def _cyl_chart(p: np.ndarray) -> CylindricalPoint:
    if abs(p[2]) >= 1.0 - 1e-14:
        return CylindricalPoint(float(np.sign(p[2])), 0.0)
    return to_cylindrical(p)


def _ring(z: float, angles) -> np.ndarray:
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return np.array([[r * math.cos(a), r * math.sin(a), z] for a in angles])


@dataclass(frozen=True)
class DihedralRoots:
    n: int
    with_poles: bool
    lambda_anti: float | None
    lambda_prism: float

    @property
    def z_anti(self) -> float | None:
        return None if self.lambda_anti is None else height_from_lambda(self.lambda_anti)

    @property
    def z_prism(self) -> float:
        return height_from_lambda(self.lambda_prism)


def dihedral_roots(n: int, with_poles: bool) -> DihedralRoots:
    suffix = "_hat" if with_poles else ""
    lo, hi = DIHEDRAL_BRACKET
    try:
        lam_a = root_in_interval(build_polynomial("Pa" + suffix, n), lo, hi)
    except NoBracket:
        if not (with_poles and n == 2):
            raise
        lam_a = None
    lam_p = root_in_interval(build_polynomial("Pp" + suffix, n), lo, hi)
    return DihedralRoots(n, with_poles, lam_a, lam_p)


def dihedral_catalog(n: int, with_poles: bool = False) -> list[EquilibriumRecord]:
    """Every equilibrium and collision point of the ``D_n`` reduced system."""
    if n < 2:
        raise UnsupportedDegree("n must be at least 2")
    roots = dihedral_roots(n, with_poles)
    zeta = 2.0 * math.pi / n
    odd = [(2 * j - 1) * zeta / 4.0 for j in range(1, 2 * n + 1)]
    even = [(j - 1) * zeta / 2.0 for j in range(1, 2 * n + 1)]
    tag = "-with-poles" if with_poles else ""
    hat = "^" if with_poles else ""
    records: list[EquilibriumRecord] = []

    def add(points, kind, name, root, prefix):
        for j, p in enumerate(points):
            p = normalize(p)
            records.append(EquilibriumRecord(p, _cyl_chart(p), kind, name, root, prefix(j)))

    if roots.lambda_anti is not None:
        za = roots.z_anti
        for sgn, s in ((1, "+"), (-1, "-")):
            add(_ring(sgn * za, odd), "min", "anti-prism" + tag, roots.lambda_anti,
                lambda j, s=s: f"A{hat}_{j + 1}{s}")
    zp = roots.z_prism
    for sgn, s in ((1, "+"), (-1, "-")):
        add(_ring(sgn * zp, even), "saddle", "prism" + tag, roots.lambda_prism,
            lambda j, s=s: f"P{hat}_{j + 1}{s}")
    polygon_kind = "min" if (with_poles and n == 2) else "saddle"
    add(_ring(0.0, odd), polygon_kind, "polygon" + tag, None, lambda j: f"Q{hat}_{j + 1}")
    add(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), "collision", "polar-collision" + tag, None,
        lambda j: "north" if j == 0 else "south")
    add(_ring(0.0, even), "collision", "polygonal-collision" + tag, None, lambda j: f"C{hat}_{j + 1}")
    return records


def signed_permutations(v) -> np.ndarray:
    """All distinct coordinate permutations and sign flips of ``v``."""
    out: list[tuple] = []
    for perm in itertools.permutations(v):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            p = tuple(float(s * x) + 0.0 for s, x in zip(signs, perm))
            if all(max(abs(a - b) for a, b in zip(p, q)) > 1e-12 for q in out):
                out.append(p)
    return np.array(out)


def tetrahedral_root(with_cube: bool) -> float:
    """``alpha^2`` (or its cube-compound analogue) in ``(0, 1/2)``."""
    poly = build_polynomial("p_T_cube" if with_cube else "p_T")
    return root_in_interval(poly, *TETRAHEDRAL_BRACKET)


def _gnomonic_chart(p: np.ndarray) -> GnomonicPolarPoint | None:
    return to_gnomonic(p) if p[2] > 1e-12 else None


def tetrahedral_catalog(with_cube: bool = False) -> list[EquilibriumRecord]:
    """Every equilibrium and collision point of the ``T`` reduced system."""
    alpha_sq = tetrahedral_root(with_cube)
    alpha = math.sqrt(alpha_sq)
    if with_cube:
        stable = signed_permutations(np.array([GOLDEN, 1.0 / GOLDEN, 0.0]) / math.sqrt(3.0))
        names = ("dodecahedron", "truncated-tetrahedron-cube", "cuboctahedron-cube",
                 "tetrahedral-cube-collision", "octahedral-cube-collision")
    else:
        stable = signed_permutations(np.array([GOLDEN, 1.0, 0.0]) / math.sqrt(1.0 + GOLDEN**2))
        names = ("icosahedron", "truncated-tetrahedron", "cuboctahedron",
                 "tetrahedral-collision", "octahedral-collision")
    truncated = signed_permutations([alpha, alpha, math.sqrt(1.0 - 2.0 * alpha_sq)])
    cubocta = signed_permutations([1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0])
    octa = signed_permutations([1.0, 0.0, 0.0])
    groups_of_points = [
        (stable, "min", names[0], None),
        (truncated, "saddle", names[1], alpha_sq),
        (cubocta, "saddle", names[2], None),
        (CUBE, "collision", names[3], None),
        (octa, "collision", names[4], None),
    ]
    records = []
    for pts, kind, name, root in groups_of_points:
        for j, p in enumerate(pts):
            p = normalize(p)
            records.append(EquilibriumRecord(p, _gnomonic_chart(p), kind, name, root, f"{name}_{j + 1}"))
    return records


def catalog_for(s: SymmetryScheme) -> list[EquilibriumRecord]:
    if s.group.kind == "D":
        return dihedral_catalog(s.group.n, with_poles=len(s.fixed_points) > 0)
    return tetrahedral_catalog(with_cube=len(s.fixed_points) > 0)


def catalog_to_json(records: list[EquilibriumRecord]) -> list[dict]:
    return [r.to_json() for r in records]


# ---------------------------------------------------------------- classification

def chart_hessian(f, u, step: float = 1e-4) -> np.ndarray:
    """Second-difference Hessian of ``f`` in geodesic normal coordinates at ``u``."""
    e1, e2 = tangent_frame(u)

    def at(x, y):
        return f(exp_map(u, x * e1 + y * e2))

    f0 = at(0.0, 0.0)
    hxx = (at(step, 0) - 2 * f0 + at(-step, 0)) / step**2
    hyy = (at(0, step) - 2 * f0 + at(0, -step)) / step**2
    hxy = (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) / (4 * step**2)
    return np.array([[hxx, hxy], [hxy, hyy]])


def classify_critical_point(u, s: SymmetryScheme, step: float = 1e-4, rel_threshold: float = 1e-6) -> str:
    """``collision``, ``min``, ``max`` or ``saddle`` for a critical point of ``h``."""
    u = normalize(u)
    if distance_to_fixed_set(u, s) < 1e-9:
        return "collision"
    g = np.linalg.norm(reduced_gradient(u, s))
    if g > 1e-7:
        raise ValueError(f"not a critical point (|grad h| = {g:.3e})")
    eig = np.linalg.eigvalsh(chart_hessian(lambda x: reduced_hamiltonian(x, s), u, step))
    big = np.max(np.abs(eig))
    if big == 0.0 or np.min(np.abs(eig)) < rel_threshold * big:
        raise DegenerateHessian(f"Hessian eigenvalues {eig} are degenerate")
    if np.all(eig > 0):
        return "min"
    if np.all(eig < 0):
        return "max"
    return "saddle"


# ---------------------------------------------------------------- completeness search

CRITICAL_GRAD_TOL = 1e-8


@dataclass(frozen=True)
class CriticalPointSearch:
    """Outcome of a dense search for critical points of ``h``."""

    candidates: int
    critical_points: np.ndarray  # refined points with |grad h| below CRITICAL_GRAD_TOL
    distances: np.ndarray  # distance of each one to the nearest catalogue image
    rejected_gradients: np.ndarray  # |grad h| at candidates that did not refine to a critical point

    @property
    def max_distance(self) -> float:
        return float(self.distances.max()) if len(self.distances) else 0.0


def chart_grid(s: SymmetryScheme, rows: int, cols: int) -> np.ndarray:
    """Cell-centred ``(rows, cols, 3)`` grid: cylindrical for dihedral, latitude-longitude otherwise."""
    theta = (np.arange(cols) + 0.5) * 2.0 * math.pi / cols
    if s.group.kind == "D":
        z = -1.0 + (np.arange(rows) + 0.5) * 2.0 / rows
    else:
        z = np.sin(-math.pi / 2 + (np.arange(rows) + 0.5) * math.pi / rows)
    Z, TH = np.meshgrid(z, theta, indexing="ij")
    r = np.sqrt(1.0 - Z**2)
    return np.stack([r * np.cos(TH), r * np.sin(TH), Z], axis=-1)


def _grid_local_minima(values: np.ndarray) -> list[tuple[int, int]]:
    # azimuth wraps around, the height/latitude direction does not
    padded = np.pad(values, ((1, 1), (0, 0)), constant_values=np.inf)
    padded = np.concatenate([padded[:, -1:], padded, padded[:, :1]], axis=1)
    centre = padded[1:-1, 1:-1]
    is_min = np.ones_like(centre, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                other = padded[1 + di:padded.shape[0] - 1 + di, 1 + dj:padded.shape[1] - 1 + dj]
                is_min &= centre <= other
    return [tuple(ix) for ix in np.argwhere(is_min & np.isfinite(centre))]


def _refine_critical_point(u0: np.ndarray, s: SymmetryScheme) -> tuple[np.ndarray, float]:
    from scipy.optimize import least_squares

    e1, e2 = tangent_frame(u0)

    def point(x):
        return exp_map(u0, x[0] * e1 + x[1] * e2)

    def residual(x):
        p = point(x)
        if distance_to_fixed_set(p, s) < 1e-9:
            return np.full(3, 1e6)
        return reduced_gradient(p, s)

    sol = least_squares(residual, np.zeros(2), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    p = point(sol.x)
    return p, float(np.linalg.norm(residual(sol.x)))


def catalogue_images(s: SymmetryScheme, records: list[EquilibriumRecord] | None = None) -> np.ndarray:
    """All images of the non-collision catalogue points under the symmetry supergroup."""
    records = catalog_for(s) if records is None else records
    K = symmetry_supergroup(s)
    pts = [K.apply(r.point) for r in records if r.kind != "collision"]
    return np.vstack(pts) if pts else np.zeros((0, 3))


def critical_point_search(s: SymmetryScheme, grid: tuple[int, int] = (200, 200)) -> CriticalPointSearch:
    """Look for critical points of ``h`` from the discrete minima of ``|grad h|`` on a chart grid."""
    rows, cols = grid
    pts = chart_grid(s, rows, cols)
    with np.errstate(divide="ignore", invalid="ignore"):
        norms = np.linalg.norm(reduced_gradient_many(pts.reshape(-1, 3), s), axis=1).reshape(rows, cols)
    norms[~np.isfinite(norms)] = np.inf
    candidates = _grid_local_minima(norms)
    images = catalogue_images(s)
    found, dists, rejected = [], [], []
    for i, j in candidates:
        p, g = _refine_critical_point(pts[i, j], s)
        if g < CRITICAL_GRAD_TOL:
            found.append(p)
            dists.append(float(np.min(np.linalg.norm(images - p, axis=1))) if len(images) else math.inf)
        else:
            rejected.append(g)
    return CriticalPointSearch(
        len(candidates), np.array(found).reshape(-1, 3), np.array(dists), np.array(rejected)
    )


# ---------------------------------------------------------------- tables

def dihedral_table(n_values=range(2, 6), with_poles: bool = False) -> list[dict]:
    rows = []
    for n in n_values:
        r = dihedral_roots(n, with_poles)
        rows.append({
            "n": n,
            "lambda_a": r.lambda_anti,
            "z_a": r.z_anti,
            "lambda_p": r.lambda_prism,
            "z_p": r.z_prism,
            "P_a": build_polynomial("Pa_hat" if with_poles else "Pa", n).pretty(),
            "P_p": build_polynomial("Pp_hat" if with_poles else "Pp", n).pretty(),
        })
    return rows


def format_catalog_table(records: list[EquilibriumRecord]) -> str:
    """Human readable summary, one line per geometric family."""
    lines = [f"{'name':34s} {'kind':10s} {'count':>5s}  {'root':>14s}  representative"]
    seen: dict[str, list[EquilibriumRecord]] = {}
    for r in records:
        seen.setdefault(r.name, []).append(r)
    for name, recs in seen.items():
        r = recs[0]
        root = "" if r.defining_root is None else f"{r.defining_root:.10f}"
        rep = " ".join(f"{x:+.10f}" for x in r.point)
        lines.append(f"{name:34s} {r.kind:10s} {len(recs):5d}  {root:>14s}  ({rep})")
    return "\n".join(lines)


def format_dihedral_table(n: int, with_poles: bool) -> str:
    r = dihedral_roots(n, with_poles)
    la = "-" if r.lambda_anti is None else f"{r.lambda_anti:.10f}"
    za = "-" if r.z_anti is None else f"{r.z_anti:.10f}"
    hat = "_hat" if with_poles else ""
    names = [f"{name}{hat}" for name in ("lambda_a", "z_a", "lambda_p", "z_p")]
    return (
        f"{'n':>3s} " + " ".join(f"{name:>14s}" for name in names) + "\n"
        f"{n:3d} {la:>14s} {za:>14s} {r.lambda_prism:14.10f} {r.z_prism:14.10f}"
    )


def format_tetrahedral_table(with_cube: bool) -> str:
    a2 = tetrahedral_root(with_cube)
    a = math.sqrt(a2)
    name = "alpha_hat" if with_cube else "alpha"
    hexagon = 2.0 * math.sqrt(2.0) * a
    triangle = math.sqrt(2.0) * (-a + math.sqrt(1.0 - 2.0 * a2))
    return (
        f"{name:>10s} {name + '^2':>14s} {'hexagon edge':>14s} {'triangle edge':>14s}\n"
        f"{a:10.6f} {a2:14.10f} {hexagon:14.6f} {triangle:14.6f}"
    )


def default_scheme_catalog(group: str, n: int | None, fixed: str):
    s = make_scheme(group, n, fixed)
    return s, catalog_for(s)


__all__ = [
    "DefiningPolynomial", "EquilibriumRecord", "build_polynomial", "catalog_for", "catalog_to_json",
    "chebyshev", "chebyshev_coefficients", "classify_critical_point", "critical_point_search", "dihedral_catalog",
    "dihedral_roots", "height_from_lambda", "root_in_interval", "signed_permutations",
    "tetrahedral_catalog", "tetrahedral_root",
]
