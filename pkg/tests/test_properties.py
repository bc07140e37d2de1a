"""Property-based checks of the structural invariants."""
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from vortexsym import catalog, groups, svg
from vortexsym.dynamics import hamiltonian, integrate, momentum, min_pairwise_distance, vector_field
from vortexsym.groups import is_twisted_fixed, isotropy_order, orbit, twist_morphism
from vortexsym.reduction import (
    STANDARD_SCHEMES,
    distance_to_fixed_set,
    embed,
    make_scheme,
    reduced_field,
    reduced_gradient,
    reduced_hamiltonian,
    regularized_reduced_hamiltonian,
    symmetry_supergroup,
)
from vortexsym.sphere import (
    from_cylindrical,
    from_gnomonic,
    spherical_gradient,
    to_cylindrical,
    to_gnomonic,
)

SCHEMES = [make_scheme(g, n, f) for g, n, f in STANDARD_SCHEMES]
SUPERGROUPS = [symmetry_supergroup(s) for s in SCHEMES]
GROUPS = [groups.build_group("D", n) for n in range(2, 7)] + [groups.build_group(k) for k in "TOI"]

finite = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def unit_vectors(draw):
    v = np.array([draw(finite), draw(finite), draw(finite)])
    assume(np.linalg.norm(v) > 1e-3)
    return v / np.linalg.norm(v)


@st.composite
def rotations(draw):
    q = np.array([draw(finite) for _ in range(4)])
    assume(np.linalg.norm(q) > 1e-3)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@st.composite
def configurations(draw, min_size=2, max_size=7):
    n = draw(st.integers(min_size, max_size))
    v = np.array([draw(unit_vectors()) for _ in range(n)])
    assume(min_pairwise_distance(v) > 0.05)
    return v


scheme_index = st.integers(0, len(SCHEMES) - 1)


def _regular(u, s, margin=1e-3):
    assume(distance_to_fixed_set(u, s) > margin)
    return u


# ---------------------------------------------------------------- sphere

@given(unit_vectors())
def test_cylindrical_round_trip(u):
    assume(abs(u[2]) < 1 - 1e-6)
    assert np.abs(from_cylindrical(to_cylindrical(u)) - u).max() <= 1e-12


@given(unit_vectors())
def test_gnomonic_round_trip(u):
    assume(u[2] > 0.05)
    assert np.abs(from_gnomonic(to_gnomonic(u)) - u).max() <= 1e-12


@given(unit_vectors(), unit_vectors())
def test_spherical_gradient_is_tangent(u, a):
    g = spherical_gradient(lambda p: math.sin(3 * p @ a) + (p @ a) ** 2, u)
    assert abs(g @ u) <= 1e-10


# ---------------------------------------------------------------- groups

@given(st.sampled_from(GROUPS), unit_vectors())
def test_orbit_stabiliser(G, u):
    assert len(orbit(G, u)) * isotropy_order(G, u) == G.order


@given(st.sampled_from(GROUPS), st.data())
def test_orbit_stabiliser_on_fixed_points(G, data):
    p = data.draw(st.sampled_from(list(groups.fixed_point_set(G).points)))
    k = isotropy_order(G, p)
    assert k > 1
    assert len(orbit(G, p)) * k == G.order


@given(scheme_index)
def test_twist_is_injective_homomorphism(i):
    s = SCHEMES[i]
    tm = twist_morphism(s.group, s.fixed_points)
    assert tm.is_homomorphism(s.group)
    assert tm.is_injective()


# ---------------------------------------------------------------- full system

@given(configurations())
def test_field_is_tangent(v):
    f = vector_field(v)
    assert np.abs(np.sum(f * v, axis=1)).max() <= 1e-12 * max(1.0, np.abs(f).max())


@given(configurations(), rotations())
def test_field_rotation_equivariance(v, R):
    assert np.abs(vector_field(v @ R.T) - vector_field(v) @ R.T).max() <= 1e-10 * max(1.0, np.abs(vector_field(v)).max())


@given(configurations(), st.randoms(use_true_random=False))
def test_field_permutation_equivariance(v, random):
    perm = list(range(len(v)))
    random.shuffle(perm)
    assert np.abs(vector_field(v[perm]) - vector_field(v)[perm]).max() <= 1e-12 * max(1.0, np.abs(vector_field(v)).max())


@settings(max_examples=10)
@given(configurations(2, 5))
def test_integration_conserves(v):
    assume(np.abs(vector_field(v)).max() < 50)
    tol = 1e-10
    traj = integrate(v, 1.0, tol, stride=0.25)
    assume(not traj.near_collision)
    assert np.abs(np.linalg.norm(traj.states, axis=2) - 1).max() <= 1e-12
    H = np.array([hamiltonian(x) for x in traj.states])
    assert np.abs(H - H[0]).max() / abs(H[0]) <= 100 * tol or abs(H[0]) < 1e-3
    J = np.array([momentum(x) for x in traj.states])
    assert np.abs(J - J[0]).max() <= 100 * tol


@settings(max_examples=10)
@given(scheme_index, unit_vectors())
def test_symmetric_sets_are_flow_invariant(i, u):
    s = SCHEMES[i]
    _regular(u, s, 0.1)
    tm = twist_morphism(s.group, s.fixed_points)
    traj = integrate(embed(u, s), 1.0, 1e-10, stride=0.25)
    for x in traj.states:
        assert is_twisted_fixed(x, tm, s.group, tol=1e-8)


# ---------------------------------------------------------------- reduced system

@given(scheme_index, unit_vectors(), st.data())
def test_reduced_field_supergroup_equivariance(i, u, data):
    s, K1 = SCHEMES[i], SUPERGROUPS[i]
    _regular(u, s)
    g = K1.elements[data.draw(st.integers(0, K1.order - 1))]
    f = reduced_field(u, s)
    assert np.abs(reduced_field(g @ u, s) - g @ f).max() <= 1e-10 * max(1.0, np.abs(f).max())
    assert abs(reduced_hamiltonian(g @ u, s) - reduced_hamiltonian(u, s)) <= 1e-10 * max(1.0, abs(reduced_hamiltonian(u, s)))


@given(scheme_index, unit_vectors())
def test_reduced_gradient_matches_differences(i, u):
    s = SCHEMES[i]
    _regular(u, s, 0.05)
    fd = spherical_gradient(lambda p: reduced_hamiltonian(p, s), u, 1e-5)
    assert np.abs(fd - reduced_gradient(u, s)).max() <= 1e-6 * max(1.0, np.abs(fd).max())


@given(scheme_index, unit_vectors())
def test_regularized_energy_product(i, u):
    s = SCHEMES[i]
    _regular(u, s, 1e-6)
    exact = math.exp(-2 * reduced_hamiltonian(u, s))
    assert abs(regularized_reduced_hamiltonian(u, s) - exact) <= 1e-10 * exact


@given(scheme_index, unit_vectors())
def test_embedded_momentum_vanishes(i, u):
    assert np.abs(momentum(embed(u, SCHEMES[i]))).max() <= 1e-12


@given(scheme_index, unit_vectors())
def test_reduced_field_lifts(i, u):
    s = SCHEMES[i]
    _regular(u, s, 0.05)
    full = vector_field(embed(u, s))
    red = reduced_field(u, s)
    assert np.abs(full[0] - red).max() <= 1e-10 * max(1.0, np.abs(red).max())
    assert np.abs(full[: s.m] - red @ s.group.elements.transpose(0, 2, 1)).max() <= 1e-9 * max(1.0, np.abs(red).max())


# ---------------------------------------------------------------- catalogue

@given(st.integers(0, 12), st.floats(0, math.pi))
def test_chebyshev_trigonometric_form(k, t):
    x = math.cos(t)
    assert abs(catalog.chebyshev("T", k, x) - math.cos(k * t)) <= 1e-11


@given(st.integers(2, catalog.MAX_DIHEDRAL_N), st.sampled_from(["Pa", "Pp", "Pa_hat", "Pp_hat"]))
def test_polynomial_roots_are_roots(n, label):
    assume(not (label == "Pa_hat" and n == 2))
    p = catalog.build_polynomial(label, n)
    r = catalog.root_in_interval(p, *catalog.DIHEDRAL_BRACKET)
    assert catalog.DIHEDRAL_BRACKET[0] < r < catalog.DIHEDRAL_BRACKET[1]
    scale = sum(abs(c) * r**k for k, c in enumerate(p.coefficients))
    assert abs(p(r)) <= 1e-12 * scale


# ---------------------------------------------------------------- rendering

@given(unit_vectors(), unit_vectors())
def test_projection_stays_in_disc(u, view):
    xy, _ = svg.project(u[None], view)
    centre = svg.VIEWBOX / 2
    assert math.hypot(xy[0, 0] - centre, xy[0, 1] - centre) <= svg.RADIUS + 1e-9
