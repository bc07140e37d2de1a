import math
from fractions import Fraction

import numpy as np
import pytest

from vortexsym.dynamics import (
    PLATONIC_SOLIDS,
    hamiltonian,
    integrate,
    min_pairwise_distance,
    momentum,
    platonic_solid,
    read_configuration_csv,
    regularized_hamiltonian,
    regularized_vector_field,
    trajectory_csv,
    vector_field,
)
from vortexsym.errors import CollisionError
from vortexsym.reduction import TETRA_1, embed, make_scheme
from vortexsym.sphere import random_points, spherical_gradient

EZ = np.array([0.0, 0.0, 1.0])


def test_antipodal_pair():
    v = np.array([EZ, -EZ])
    assert hamiltonian(v) == pytest.approx(-0.5 * math.log(4.0), abs=1e-15)
    assert np.all(vector_field(v) == 0.0)
    assert min_pairwise_distance(v) == 2.0


def test_tetrahedron_values():
    assert hamiltonian(TETRA_1) == pytest.approx(-3.0 * math.log(8.0 / 3.0), abs=1e-14)
    assert np.abs(momentum(TETRA_1)).max() < 1e-15
    assert min_pairwise_distance(TETRA_1) == pytest.approx(math.sqrt(8.0 / 3.0), abs=1e-15)


def test_momentum_of_coincident_pair():
    assert np.array_equal(momentum([EZ, EZ]), [0.0, 0.0, 2.0])


def test_hamiltonian_against_exact_summation(rng):
    v = random_points(rng, 3)
    exact = Fraction(0)
    for i in range(3):
        for j in range(i + 1, 3):
            d2 = sum((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(v[i], v[j]))
            exact += Fraction(math.log(float(d2)))
    assert hamiltonian(v) == pytest.approx(-0.5 * float(exact), abs=1e-14)


def test_collision_is_an_error():
    with pytest.raises(CollisionError):
        hamiltonian([EZ, EZ, -EZ])
    with pytest.raises(CollisionError):
        vector_field([EZ, EZ])


@pytest.mark.parametrize("name", PLATONIC_SOLIDS)
def test_platonic_solids_are_equilibria(name):
    v = platonic_solid(name)
    assert np.abs(vector_field(v)).max() <= 1e-10


@pytest.mark.parametrize("name", PLATONIC_SOLIDS)
def test_regularized_field_at_platonic_solids(name):
    # the product of squared distances grows like 4^P, so the check is relative to it
    v = platonic_solid(name)
    assert np.abs(regularized_vector_field(v)).max() <= 1e-10 * max(1.0, regularized_hamiltonian(v))


def test_field_is_hamiltonian_gradient(rng):
    v = random_points(rng, 4)
    for j in range(4):
        def H_j(x, j=j):
            w = v.copy()
            w[j] = x
            return hamiltonian(w)

        grad = spherical_gradient(H_j, v[j])
        assert np.allclose(vector_field(v)[j], -np.cross(v[j], grad), atol=1e-6)


def test_regularized_ratio(rng):
    v = random_points(rng, 5)
    ratio = -2.0 * math.exp(-2.0 * hamiltonian(v))
    assert np.allclose(regularized_vector_field(v), ratio * vector_field(v), rtol=1e-10, atol=0)


def test_regularized_field_finite_at_collision(rng):
    v = random_points(rng, 4)
    v[1] = v[0]
    out = regularized_vector_field(v)
    assert np.all(np.isfinite(out))


def test_tetrahedron_stays_put():
    traj = integrate(TETRA_1, 10.0, 1e-10, stride=0.5)
    assert np.abs(traj.states - TETRA_1).max() <= 1e-9


def test_generic_three_vortices_conserve(rng):
    v0 = random_points(rng, 3)
    traj = integrate(v0, 10.0, 1e-10, stride=0.1)
    assert traj.relative_energy_drift <= 1e-8
    assert traj.momentum_drift <= 1e-8
    assert np.abs(np.linalg.norm(traj.states, axis=2) - 1.0).max() <= 1e-12
    P = 3
    bound = regularized_hamiltonian(v0) / 4 ** (P - 1)
    assert traj.min_distance ** 2 >= bound


def test_symmetric_start_stays_symmetric(rng):
    from vortexsym.groups import is_twisted_fixed

    s = make_scheme("Dn", 2, "poles")
    # close to a pole, where round-off asymmetry is amplified fastest
    u0 = np.array([0.19, -0.2, 0.96])
    traj = integrate(embed(u0, s), 5.0, 1e-10, stride=0.25)
    for state in traj.states:
        assert is_twisted_fixed(state, s.twist, s.group, tol=1e-8)


def test_csv_round_trip():
    text = "x,y,z\n1,0,0\n0,1,0\n0,0,1\n"
    v = read_configuration_csv(text)
    assert v.shape == (3, 3)
    csv = trajectory_csv([0.0], [v])
    header = csv.splitlines()[0].split(",")
    assert header[:4] == ["t", "v1x", "v1y", "v1z"] and header[-4:] == ["H", "Jx", "Jy", "Jz"]


@pytest.mark.parametrize("text", ["1,2\n3,4\n", "x,y,z\n1,0,0\n", "1,0,0\nfoo,1,2\n", "0,0,0\n1,0,0\n"])
def test_csv_rejects_malformed(text):
    with pytest.raises(ValueError):
        read_configuration_csv(text)
