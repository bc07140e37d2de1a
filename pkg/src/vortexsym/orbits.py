"""Periodic orbits of the reduced system, their families and their lifts.

Closure is detected with a Poincare section: the great circle through the
starting point ``u0`` whose normal is the initial velocity. A return is
an upward crossing of that circle close to ``u0``; the crossing time is
refined by bisection on single Runge-Kutta steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .catalog import EquilibriumRecord, catalog_for
from .dynamics import hamiltonian, momentum, trajectory_csv, vector_field
from .errors import CollisionError, EnergyUnreachable, NoReturn, NotRegular, ResidualTooLarge
from .integrator import advance, solve, step_iter
from .reduction import (
    SymmetryScheme,
    distance_to_fixed_set,
    embed,
    natural_scale,
    reduced_field,
    reduced_gradient,
    reduced_hamiltonian,
    regularized_reduced_field,
    regularized_reduced_hamiltonian,
    symmetry_supergroup,
)
from .sphere import exp_map, normalize, tangent_frame

CLOSURE_TOL = 1e-6
CROSSING_GATE = 1e-3
CROSSING_TIME_TOL = 1e-10
REGULAR_TOL = 1e-7
DEFAULT_T_SPAN = 1e3
RETRY_T_SPAN = 1e4
DEFAULT_SAMPLES = 400


def _unit(y: np.ndarray) -> np.ndarray:
    return normalize(y)


@dataclass(frozen=True, eq=False)
class ReducedOrbit:
    """A closed orbit sampled uniformly in reduced time over one period.

    The last sample is the state after exactly one period, so
    ``points[-1]`` should coincide with ``points[0]`` up to
    ``closure_error``.
    """

    times: np.ndarray
    points: np.ndarray
    period: float
    energy: float
    closure_error: float
    regularized_period: float | None = None
    time_factor: float | None = None

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.points))

    def to_csv(self) -> str:
        lines = ["t,ux,uy,uz"]
        for t, p in zip(self.times, self.points):
            lines.append(",".join(format(float(x), ".17g") for x in (t, *p)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class OrbitFamily:
    center: EquilibriumRecord
    orbits: list[ReducedOrbit]
    energies: list[float]
    failure_energy: float | None = None

    @property
    def periods(self) -> list[float]:
        return [o.period for o in self.orbits]


def _field(s: SymmetryScheme, regularized: bool, scale: float):
    if regularized:
        return lambda t, y: regularized_reduced_field(y, s, scale)
    return lambda t, y: reduced_field(y, s)


def _check_regular(u0: np.ndarray, s: SymmetryScheme, regularized: bool) -> None:
    if distance_to_fixed_set(u0, s) < 1e-9:
        if regularized:
            raise NotRegular("starting point is a collision equilibrium")
        raise CollisionError("starting point is a collision point")
    if np.linalg.norm(reduced_gradient(u0, s)) <= REGULAR_TOL:
        raise NotRegular("starting point is a critical point of the reduced energy")


@dataclass
class _Return:
    time: float
    point: np.ndarray


def _find_return(f, u0: np.ndarray, t_span: float, tol: float, gate: float) -> tuple[_Return | None, list]:
    """First upward crossing of the section near ``u0``, plus the accepted steps."""
    v0 = f(0.0, u0)
    normal = v0 / np.linalg.norm(v0)
    steps = []
    best: tuple[float, float, object] | None = None
    left = False
    for st in step_iter(f, u0, t_span, tol=tol, project=_unit):
        steps.append(st)
        d1 = float(np.linalg.norm(st.y1 - u0))
        if d1 > 10 * gate:
            left = True
        s0 = float(np.dot(normal, st.y0))
        s1 = float(np.dot(normal, st.y1))
        if left and s0 < 0.0 <= s1:
            # refine the crossing inside this step
            lo, hi = 0.0, st.t1 - st.t0
            while hi - lo > CROSSING_TIME_TOL:
                mid = 0.5 * (lo + hi)
                if float(np.dot(normal, advance(f, st.t0, st.y0, mid, _unit))) < 0.0:
                    lo = mid
                else:
                    hi = mid
            tc = st.t0 + hi
            pc = advance(f, st.t0, st.y0, hi, _unit)
            dist = float(np.linalg.norm(pc - u0))
            if dist < gate:
                return _Return(tc, pc), steps
            if best is None or dist < best[0]:
                best = (dist, tc, pc)
    if best is not None and best[0] < CLOSURE_TOL:
        return _Return(best[1], best[2]), steps
    return None, steps


def trace_periodic(
    u0,
    s: SymmetryScheme,
    use_regularized: bool = False,
    *,
    tol: float = 1e-10,
    t_span: float | None = None,
    scale: float | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> ReducedOrbit:
    """Integrate from ``u0`` until it returns, then resample one period.

    With the regularised field and no explicit ``scale`` the field is
    normalised by its energy value at ``u0``, so the time factor is -2.
    Near high-order collisions the globally normalised field is too slow.
    """
    u0 = normalize(u0)
    _check_regular(u0, s, use_regularized)
    if use_regularized and scale is None:
        scale = 1.0 / regularized_reduced_hamiltonian(u0, s)
    f = _field(s, use_regularized, scale or 1.0)
    # a position error d moves the energy by about |grad h| d; steep levels
    # near collisions get a proportionally tighter tolerance
    steepness = float(np.linalg.norm(reduced_gradient(u0, s)))
    tol = tol / min(100.0, max(1.0, steepness / 10.0))
    spans = [t_span] if t_span is not None else [DEFAULT_T_SPAN, RETRY_T_SPAN]
    ret = None
    for span in spans:
        ret, _ = _find_return(f, u0, span, tol, CROSSING_GATE)
        if ret is not None:
            break
    if ret is None:
        raise NoReturn(f"no return to the section within t = {spans[-1]}")
    T = ret.time
    sol = solve(f, u0, T, tol=tol, project=_unit, stride=T / samples)
    times, points = sol.times, sol.states
    closure = float(np.linalg.norm(points[-1] - u0))
    energy = reduced_hamiltonian(u0, s)
    if not use_regularized:
        return ReducedOrbit(times, points, T, energy, closure)
    a = -2.0 * scale * regularized_reduced_hamiltonian(u0, s)
    # w(t) = u(a t) with a < 0: the reduced orbit runs the samples backwards
    red_times = abs(a) * times
    red_points = points[::-1].copy()
    return ReducedOrbit(red_times, red_points, abs(a) * T, energy, closure, T, a)


# ---------------------------------------------------------------- families

def _ray_direction(c: np.ndarray, s: SymmetryScheme) -> np.ndarray:
    e1, e2 = tangent_frame(c)
    return normalize(e1 + 0.5 * e2)


def _point_on_level(center: np.ndarray, direction: np.ndarray, s: SymmetryScheme, energy: float,
                    increasing: bool, r_start: float, r_max: float = 1.5) -> np.ndarray:
    """March along the geodesic ray until ``h`` crosses ``energy``, then solve."""

    def h_at(r: float) -> float:
        return reduced_hamiltonian(exp_map(center, r * direction), s)

    def gap(r: float) -> float:
        return h_at(r) - energy

    r_prev, g_prev = r_start, gap(r_start)
    if (g_prev > 0) == increasing and g_prev != 0.0:
        raise EnergyUnreachable("target energy lies inside the starting radius")
    others = s.fixed_set.points[np.linalg.norm(s.fixed_set.points - center, axis=1) > 1e-9]
    r = r_start
    while r < r_max:
        r = min(r * 1.25, r + 0.01)
        p = exp_map(center, r * direction)
        if np.min(np.linalg.norm(others - p, axis=1)) < 1e-6:
            raise EnergyUnreachable("ray ran into a collision point")
        g = gap(r)
        if (g >= 0) == increasing:
            root = brentq(gap, r_prev, r, xtol=1e-15, rtol=1e-15)
            return exp_map(center, root * direction)
        # h must change monotonically along the ray inside the basin
        if (g < g_prev) == increasing or np.linalg.norm(reduced_gradient(p, s)) < REGULAR_TOL:
            raise EnergyUnreachable("ray left the basin before reaching the energy")
        r_prev, g_prev = r, g
    raise EnergyUnreachable("ray search exhausted")


def family_from_center(c: EquilibriumRecord, s: SymmetryScheme, energies, *,
                       tol: float = 1e-10, samples: int = DEFAULT_SAMPLES) -> OrbitFamily:
    """Closed orbits on the given energy levels around a minimum or a collision."""
    if c.kind not in ("min", "collision"):
        raise ValueError("families emanate only from minima and collision points")
    energies = sorted(float(e) for e in energies)
    center = normalize(c.point)
    direction = _ray_direction(center, s)
    orbits, reached = [], []
    failure = None
    if c.kind == "min":
        h0 = reduced_hamiltonian(center, s)
        if energies and energies[0] <= h0:
            raise ValueError("energies must exceed the energy of the minimum")
        for e in energies:
            try:
                u0 = _point_on_level(center, direction, s, e, increasing=True, r_start=1e-6)
            except EnergyUnreachable:
                failure = e
                break
            orbits.append(trace_periodic(u0, s, False, tol=tol, samples=samples))
            reached.append(e)
    else:
        for e in energies:
            try:
                u0 = _point_on_level(center, direction, s, e, increasing=False, r_start=1e-8)
            except EnergyUnreachable:
                failure = e
                break
            orbits.append(trace_periodic(u0, s, True, tol=tol, samples=samples))
            reached.append(e)
    if not orbits and failure is not None:
        raise EnergyUnreachable(f"no orbit reachable, first failure at energy {failure}")
    return OrbitFamily(c, orbits, reached, failure)


def default_family_energies(c: EquilibriumRecord, s: SymmetryScheme, count: int = 3) -> list[float]:
    """Energies well inside the basin of ``c``.

    Around a minimum they sit at fixed fractions of the gap to the lowest
    saddle; around a collision they are the energies at small geodesic
    distances from it.
    """
    center = normalize(c.point)
    if c.kind == "min":
        h0 = reduced_hamiltonian(center, s)
        saddle = min(reduced_hamiltonian(r.point, s) for r in catalog_for(s) if r.kind == "saddle")
        gap = saddle - h0
        return [h0 + gap * frac for frac in (0.05, 0.15, 0.3)[:count]]
    direction = _ray_direction(center, s)
    radii = (0.05, 0.02, 0.01)[:count]
    return [reduced_hamiltonian(exp_map(center, r * direction), s) for r in radii]


# ---------------------------------------------------------------- lifting

STENCIL_WIDTH = 9


def stencil_weights(offsets) -> np.ndarray:
    """First-derivative finite-difference weights for integer ``offsets`` (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    k = len(offsets)
    V = np.vander(offsets, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


def sampled_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """Eighth-order time derivative of uniformly spaced samples.

    Interior points use central stencils, the first and last few use
    shifted one-sided ones, so no periodic wrap (and no closure gap) is
    involved.
    """
    n = len(values)
    w = STENCIL_WIDTH
    if n < w:
        raise ValueError(f"need at least {w} samples")
    half = w // 2
    out = np.empty_like(values)
    cache: dict[int, np.ndarray] = {}
    for i in range(n):
        start = min(max(i - half, 0), n - w)
        shift = i - start
        if shift not in cache:
            cache[shift] = stencil_weights(np.arange(w) - shift)
        out[i] = np.tensordot(cache[shift], values[start:start + w], axes=1)
    return out / dt


@dataclass(frozen=True, eq=False)
class LiftedOrbit:
    times: np.ndarray
    states: np.ndarray
    residual: float

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.states))

    def energy_drift(self) -> float:
        H = np.array([hamiltonian(x) for x in self.states])
        return float(np.max(np.abs(H - H[0])))

    def momentum_max(self) -> float:
        return float(max(np.abs(momentum(x)).max() for x in self.states))

    def to_csv(self) -> str:
        return trajectory_csv(self.times, self.states)


def lift_orbit(o: ReducedOrbit, s: SymmetryScheme, residual_tol: float = 1e-5) -> LiftedOrbit:
    """Embed every sample and check the result solves the full equations.

    The residual compares periodic finite differences of the lifted samples
    with the full vector field, scaled by ``max(1, peak speed)``.
    """
    states = np.array([embed(p, s) for p in o.points])
    dt = o.period / (len(states) - 1)
    deriv = sampled_derivative(states, dt)
    fields = np.array([vector_field(x) for x in states])
    # relative to the peak speed: orbits hugging a collision move fast and
    # their tiny sampling step amplifies integration error in the differences
    speed = max(1.0, float(np.abs(fields).max()))
    residual = float(np.abs(deriv - fields).max()) / speed
    if residual > residual_tol:
        raise ResidualTooLarge(f"lifted orbit residual {residual:.3e} exceeds {residual_tol:.1e}")
    return LiftedOrbit(o.times.copy(), states, residual)


# ---------------------------------------------------------------- portraits

COLOR_KEY = {
    "green": "orbit around a stable equilibrium",
    "blue": "separatrix candidate near a saddle of the first kind",
    "black": "separatrix candidate near a saddle of the second kind",
    "red": "loop around a collision of the first kind",
    "purple": "loop around a collision of the second kind",
    "orange": "unclassified",
}

_NAME_COLORS = {
    "anti-prism": "green", "icosahedron": "green", "dodecahedron": "green",
    "prism": "blue", "truncated-tetrahedron": "blue",
    "polygon": "black", "cuboctahedron": "black",
    "polar-collision": "red", "tetrahedral": "red",
    "polygonal-collision": "purple", "octahedral": "purple",
}


def color_for(record: EquilibriumRecord) -> str:
    for prefix in sorted(_NAME_COLORS, key=len, reverse=True):
        if record.name.startswith(prefix):
            # stable polygon-with-poles points count as green centres
            if record.kind == "min":
                return "green"
            return _NAME_COLORS[prefix]
    return "orange"


@dataclass(frozen=True)
class PortraitSpec:
    scheme: SymmetryScheme
    grid: tuple[int, int] = (24, 24)
    t_span: float = 1e3
    stride: float | None = None
    tol: float = 1e-9
    samples: int = 200


@dataclass(frozen=True, eq=False)
class PortraitTrajectory:
    seed: np.ndarray
    points: np.ndarray
    closed: bool
    label: str
    color: str
    period: float | None = None

    def to_json(self) -> dict:
        return {
            "seed": [float(x) for x in self.seed],
            "closed": self.closed,
            "label": self.label,
            "color": self.color,
            "period": self.period,
            "n_points": int(len(self.points)),
        }


def portrait_seeds(s: SymmetryScheme, grid: tuple[int, int]) -> np.ndarray:
    """Cell-centred grid in cylindrical (dihedral) or latitude-longitude (tetrahedral) coordinates."""
    rows, cols = grid
    theta = (np.arange(cols) + 0.5) * 2.0 * math.pi / cols
    if s.group.kind == "D":
        z = -1.0 + (np.arange(rows) + 0.5) * 2.0 / rows
    else:
        lat = -math.pi / 2 + (np.arange(rows) + 0.5) * math.pi / rows
        z = np.sin(lat)
    Z, TH = np.meshgrid(z, theta, indexing="ij")
    r = np.sqrt(1.0 - Z**2)
    pts = np.stack([r * np.cos(TH), r * np.sin(TH), Z], axis=-1).reshape(-1, 3)
    keep = [p for p in pts if distance_to_fixed_set(p, s) >= 1e-6]
    return np.array(keep)


def winding_number(curve: np.ndarray, center: np.ndarray) -> float:
    """Turns of a closed curve around ``center``, measured in the tangent plane at ``center``."""
    e1, e2 = tangent_frame(center)
    x = curve @ e1
    y = curve @ e2
    ang = np.unwrap(np.arctan2(y, x))
    return float((ang[-1] - ang[0]) / (2.0 * math.pi))


def classify_trajectory(points: np.ndarray, closed: bool, records: list[EquilibriumRecord]) -> tuple[str, str]:
    """Label a trajectory by the catalogue points it encircles or brushes past."""
    saddles = [r for r in records if r.kind == "saddle"]
    for r in saddles:
        if np.min(np.linalg.norm(points - r.point, axis=1)) < 1e-3:
            return "separatrix", color_for(r)
    if not closed:
        return "unclassified", "orange"
    curve = np.vstack([points, points[:1]])
    enclosed = []
    for r in records:
        if r.kind == "saddle":
            continue
        # only meaningful when the curve stays in the open hemisphere around r
        if np.min(curve @ r.point) <= 0.0:
            continue
        if abs(round(winding_number(curve, r.point))) == 1:
            enclosed.append(r)
    kinds = {r.kind for r in enclosed}
    if len(enclosed) == 1 or (enclosed and len(kinds) == 1 and len({r.name for r in enclosed}) == 1):
        r = enclosed[0]
        return ("min-loop" if r.kind == "min" else "collision-loop"), color_for(r)
    return "unclassified", "orange"


def integrate_portrait_trajectory(u0, s: SymmetryScheme, scale: float, t_span: float, tol: float,
                                  samples: int, stop_on_closure: bool = True) -> tuple[np.ndarray, bool, float | None]:
    """Trajectory of the normalised regularised flow from ``u0``.

    Returns the sampled points, whether the trajectory closed and its
    period in regularised time.
    """
    u0 = normalize(u0)
    f = _field(s, True, scale)
    if np.linalg.norm(f(0.0, u0)) < 1e-14:
        return u0[None, :].copy(), False, None
    if stop_on_closure:
        ret, _ = _find_return(f, u0, t_span, tol, CROSSING_GATE)
        if ret is not None:
            sol = solve(f, u0, ret.time, tol=tol, project=_unit, stride=ret.time / samples)
            return sol.states, True, ret.time
    sol = solve(f, u0, t_span, tol=tol, project=_unit, stride=t_span / samples)
    return sol.states, False, None


def _portrait_worker(args):
    u0, s, scale, t_span, tol, samples, stop = args
    return integrate_portrait_trajectory(u0, s, scale, t_span, tol, samples, stop)


def sample_portrait(spec: PortraitSpec, seeds: np.ndarray | None = None, *, jobs: int = 1,
                    stop_on_closure: bool = True) -> list[PortraitTrajectory]:
    """Integrate the normalised regularised field from every seed and label the results."""
    s = spec.scheme
    seeds = portrait_seeds(s, spec.grid) if seeds is None else np.asarray(seeds, dtype=float)
    scale = natural_scale(s)
    tasks = [(u, s, scale, spec.t_span, spec.tol, spec.samples, stop_on_closure) for u in seeds]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_portrait_worker, tasks))
    else:
        results = [_portrait_worker(t) for t in tasks]
    records = catalog_for(s)
    out = []
    for u, (pts, closed, period) in zip(seeds, results):
        label, color = classify_trajectory(pts, closed, records)
        out.append(PortraitTrajectory(np.asarray(u), pts, closed, label, color, period))
    return out


def matched_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two sampled curves."""
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True)
class SymmetryDefect:
    group: str
    trajectories: int
    worst_hausdorff: float
    worst_pointwise: float


def portrait_symmetry_defect(s: SymmetryScheme, base_seeds, supergroup=None, *, t_span: float = 10.0,
                             tol: float = 1e-10, samples: int = 100, jobs: int = 1) -> SymmetryDefect:
    """How far the sampled portrait is from being invariant under the supergroup.

    The seeds are the full supergroup orbit of ``base_seeds``, so every
    image of a trajectory should be another trajectory of the set. Each
    trajectory is compared with its partner both pointwise in time and by
    Hausdorff distance.
    """
    K = symmetry_supergroup(s) if supergroup is None else supergroup
    seeds = []
    for b in np.atleast_2d(np.asarray(base_seeds, dtype=float)):
        for p in K.apply(normalize(b)):
            if not any(np.linalg.norm(p - q) < 1e-9 for q in seeds):
                seeds.append(p)
    seeds = np.array(seeds)
    spec = PortraitSpec(s, t_span=t_span, tol=tol, samples=samples)
    trajs = sample_portrait(spec, seeds, jobs=jobs, stop_on_closure=False)
    worst_h = worst_p = 0.0
    for i, tr in enumerate(trajs):
        for g in K.elements:
            image_seed = g @ seeds[i]
            j = int(np.argmin(np.linalg.norm(seeds - image_seed, axis=1)))
            image = tr.points @ g.T
            worst_h = max(worst_h, matched_hausdorff(image, trajs[j].points))
            worst_p = max(worst_p, float(np.max(np.linalg.norm(image - trajs[j].points, axis=1))))
    return SymmetryDefect(K.name, len(trajs), worst_h, worst_p)


def portrait_manifest(spec: PortraitSpec, trajectories: list[PortraitTrajectory]) -> dict:
    return {
        "scheme": spec.scheme.to_json(),
        "grid": list(spec.grid),
        "t_span": spec.t_span,
        "tol": spec.tol,
        "color_key": COLOR_KEY,
        "trajectories": [
            dict(t.to_json(), file=f"trajectory_{i:04d}.csv") for i, t in enumerate(trajectories)
        ],
    }


def polyline_csv(points: np.ndarray) -> str:
    lines = ["x,y,z"]
    lines += [",".join(format(float(c), ".17g") for c in p) for p in points]
    return "\n".join(lines) + "\n"


__all__ = [
    "LiftedOrbit", "OrbitFamily", "PortraitSpec", "PortraitTrajectory", "ReducedOrbit",
    "default_family_energies", "family_from_center", "lift_orbit", "portrait_symmetry_defect", "sample_portrait",
    "trace_periodic",
]
