import math

import numpy as np
import pytest

from vortexsym.errors import UnsupportedGroup
from vortexsym.groups import (
    build_group,
    fixed_point_set,
    group_sum,
    is_subgroup,
    is_twisted_fixed,
    isotropy_order,
    orbit,
    twist_morphism,
)
from vortexsym.reduction import TETRA_1, embed, make_scheme

ALL_GROUPS = [("D", n) for n in range(2, 11)] + [("T", None), ("O", None), ("I", None)]


@pytest.mark.parametrize("kind, n, order", [("D", 3, 6), ("T", None, 12), ("O", None, 24), ("I", None, 60)])
def test_orders(kind, n, order):
    assert build_group(kind, n).order == order


def test_dihedral_two_is_diagonal():
    G = build_group("D", 2)
    for g in G.elements:
        assert np.all(g == np.diag(np.diag(g)))
        assert set(np.abs(np.diag(g))) == {1.0}
        assert np.linalg.det(g) == pytest.approx(1.0)


def test_identity_first():
    for kind, n in ALL_GROUPS:
        assert np.array_equal(build_group(kind, n).elements[0], np.eye(3))


@pytest.mark.parametrize("kind, n", ALL_GROUPS)
def test_table_closure_and_associativity(kind, n):
    G = build_group(kind, n)
    T = G.table
    m = G.order
    assert T.min() >= 0 and T.max() < m
    for row in T:
        assert sorted(row) == list(range(m))
    a, b, c = np.meshgrid(range(m), range(m), range(m), indexing="ij")
    assert np.array_equal(T[T[a, b], c], T[a, T[b, c]])
    for i in range(m):
        for j in range(m):
            assert np.allclose(G.elements[i] @ G.elements[j], G.elements[T[i, j]], atol=1e-12)


@pytest.mark.parametrize("kind, n", ALL_GROUPS)
def test_group_sum_vanishes(kind, n):
    assert np.abs(group_sum(build_group(kind, n))).max() <= 1e-12


def test_unknown_group():
    with pytest.raises(UnsupportedGroup):
        build_group("X")
    with pytest.raises(UnsupportedGroup):
        build_group("D", 1)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_dihedral_fixed_points(n):
    G = build_group("D", n)
    fs = fixed_point_set(G)
    assert len(fs) == 2 * n + 2
    zeta = 2 * math.pi / n
    for j in range(2 * n):
        p = np.array([math.cos(j * zeta / 2), math.sin(j * zeta / 2), 0.0])
        assert np.min(np.linalg.norm(fs.points - p, axis=1)) < 1e-12
    assert isotropy_order(G, [0, 0, 1]) == n
    assert isotropy_order(G, [1, 0, 0]) == 2


def test_tetrahedral_fixed_points():
    fs = fixed_point_set(build_group("T"))
    assert len(fs) == 14
    assert sorted(fs.isotropy_orders.tolist()) == [2] * 6 + [3] * 8


def test_orbits():
    G = build_group("D", 3)
    o = orbit(G, [0, 0, 1])
    assert len(o) == 2 and np.allclose(sorted(o[:, 2]), [-1, 1])
    o = orbit(build_group("T"), np.ones(3) / math.sqrt(3))
    assert len(o) == 4
    for p in TETRA_1:
        assert np.min(np.linalg.norm(o - p, axis=1)) < 1e-12


@pytest.mark.parametrize("kind, n", ALL_GROUPS)
def test_orbit_stabiliser(kind, n, rng):
    G = build_group(kind, n)
    pts = np.vstack([rng.standard_normal((5, 3)), fixed_point_set(G).points])
    for u in pts:
        u = u / np.linalg.norm(u)
        assert len(orbit(G, u)) * isotropy_order(G, u) == G.order
        assert np.abs(orbit(G, u).sum(axis=0)).max() <= 1e-12


def test_twist_identity_and_homomorphism():
    for spec in [("Dn", 2, "none"), ("Dn", 3, "poles"), ("T", None, "cube")]:
        s = make_scheme(*spec)
        tm = s.twist
        assert np.array_equal(tm(0), np.arange(s.n_vortices))
        assert tm.is_homomorphism(s.group)
        assert tm.is_injective()


def test_twist_dihedral_two_by_brute_force():
    G = build_group("D", 2)
    tm = twist_morphism(G, np.zeros((0, 3)))
    # tau(g) sends vortex j (at g_j u) to the slot of g g_j
    for i in range(4):
        for j in range(4):
            assert tm(i)[j] == G.table[i, j]
    sq = G.table[1, 1]
    assert np.array_equal(tm(1)[tm(1)], tm(sq))


def test_embedding_is_twisted_fixed(rng):
    for spec in [("Dn", 2, "none"), ("Dn", 5, "poles"), ("T", None, "cube")]:
        s = make_scheme(*spec)
        for _ in range(5):
            u = rng.standard_normal(3)
            assert is_twisted_fixed(embed(u, s), s.twist, s.group)
        v = rng.standard_normal((s.n_vortices, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        assert not is_twisted_fixed(v, s.twist, s.group)


def test_tetrahedron_is_dihedral_two_fixed():
    s = make_scheme("Dn", 2, "none")
    u = np.ones(3) / math.sqrt(3)
    v = embed(u, s)
    assert is_twisted_fixed(v, s.twist, s.group)
    d = np.linalg.norm(v[:, None] - v[None], axis=-1)
    assert np.allclose(d[np.triu_indices(4, 1)], math.sqrt(8 / 3))


def test_normalisers():
    O = build_group("O")
    assert is_subgroup(build_group("D", 2), O)
    assert is_subgroup(build_group("T"), O)
    for n in (3, 4, 5):
        assert is_subgroup(build_group("D", n), build_group("D", 2 * n))
