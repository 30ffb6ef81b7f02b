import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arveson_kit.errors import InvalidConfig
from arveson_kit.models import (FockVector, LatticeFieldModel, LatticeSpaceAction, LatticeSpacetimeAction,
                                LatticeTimeAction)
from oracles import dispersion, fock_matrix_element

SMALL = LatticeFieldModel(1.3, 8, min_nodes=4)

OBSERVABLES = [("field", 0), ("momentum", 2), ("wick", ("field", 0), ("momentum", 1)),
               ("wick", ("field", 1), ("field", -2)), ("energy_density", 0),
               ("number", ("vonmises", 0.4, 2.0), ("vonmises", -1.0, 1.0))]


def random_vector(rng, n, sectors=(0, 1, 2)):
    c0 = complex(*rng.standard_normal(2)) if 0 in sectors else 0.0
    c1 = rng.standard_normal(n) + 1j * rng.standard_normal(n) if 1 in sectors else np.zeros(n, complex)
    c2 = None
    if 2 in sectors:
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c2 = 0.5 * (X + X.T)
    v = FockVector(c0, c1, c2)
    return v.scaled(1.0 / v.norm())


@pytest.mark.parametrize("spec", OBSERVABLES, ids=lambda s: s[0])
def test_matrix_elements_match_pairing_oracle(spec):
    rng = np.random.default_rng(5)
    A = SMALL.observable(spec)
    bra, ket = random_vector(rng, SMALL.N), random_vector(rng, SMALL.N)
    phi = SMALL.vector_functional(bra, ket)
    act = LatticeSpacetimeAction(SMALL)
    pts = np.array([[0.0, 0.0], [0.7, 3.0], [-2.1, -5.0]])
    got = act.pair(phi, A, pts)
    want = [fock_matrix_element(SMALL, bra, A.data, ket, t, n) for t, n in pts]
    assert np.allclose(got, want, atol=1e-10, rtol=0)


@given(seed=st.integers(0, 2 ** 31), t=st.floats(-20, 20), n=st.integers(-40, 40))
def test_orbit_grid_matches_pairing_oracle_random(seed, t, n):
    rng = np.random.default_rng(seed)
    A = SMALL.observable(OBSERVABLES[int(rng.integers(len(OBSERVABLES)))])
    bra = random_vector(rng, SMALL.N, sectors=(0, 1))
    ket = random_vector(rng, SMALL.N, sectors=(1, 2))
    phi = SMALL.vector_functional(bra, ket)
    got = SMALL.orbit_grid(phi, A, [t], [n])[0, 0]
    assert abs(got - fock_matrix_element(SMALL, bra, A.data, ket, t, n)) <= 1e-10


def test_apply_agrees_with_matrix_elements():
    rng = np.random.default_rng(2)
    A = SMALL.observable(("wick", ("field", 0), ("momentum", 0)))
    bra, ket = random_vector(rng, SMALL.N), random_vector(rng, SMALL.N)
    direct = bra.inner(SMALL.apply(A, ket))
    assert abs(direct - fock_matrix_element(SMALL, bra, A.data, ket)) < 1e-12


def test_vacuum_expectations_are_normal_ordered(chain):
    vac = chain.vacuum()
    act = LatticeSpaceAction(chain)
    for spec in OBSERVABLES:
        A = chain.observable(spec)
        assert A.data.centered
        assert abs(act.pair(vac, A, np.array([[0.0], [7.0]])).max()) == 0.0


def test_dispersion_and_band(chain):
    # [DERIVED] omega(pi/2) = sqrt(1 + 4 sin^2(pi/4)) = sqrt(3)
    j = chain.mode_index(math.pi / 2)
    assert chain.omega[j] == pytest.approx(math.sqrt(3.0), abs=1e-14)
    assert chain.band == pytest.approx((1.0, math.sqrt(5.0)))
    theta = np.linspace(-math.pi, math.pi, 9)
    assert np.allclose([dispersion(t) for t in theta],
                       np.sqrt(1 + 4 * np.sin(theta / 2) ** 2))


def test_energies_of_plane_waves(chain):
    one = chain.state(("one", ("mode", math.pi / 2)))
    two = chain.state(("two", ("mode", math.pi / 2), ("mode", -math.pi / 2)))
    assert chain.mean_energy(one).real == pytest.approx(math.sqrt(3.0), abs=1e-12)
    assert chain.mean_energy(two).real == pytest.approx(2 * math.sqrt(3.0), abs=1e-12)
    assert chain.mean_energy(chain.vacuum()) == 0


def test_energy_density_sums_to_hamiltonian(chain):
    # sum_n e_n = H on the quadratic-form level: compare with the mean energy
    rng = np.random.default_rng(0)
    E = chain.observable(("energy_density", 0))
    for _ in range(3):
        v = random_vector(rng, chain.N, sectors=(0, 1))
        phi = chain.vector_functional(v, v)
        total = LatticeSpaceAction(chain).pair(phi, E, np.arange(chain.N)[:, None].astype(float)).sum()
        assert abs(total - chain.energy(v)) < 1e-10


def test_time_and_space_actions_are_slices(chain):
    phi = chain.state(("one", ("vonmises", 0.3, 5.0)))
    A = chain.observable(("wick", ("field", 0), ("momentum", 0)))
    st_ = LatticeSpacetimeAction(chain).pair(phi, A, np.array([[1.5, 4.0]]))[0]
    t = LatticeTimeAction(chain).translate(A, 1.5)
    both = LatticeSpaceAction(chain).pair(phi, t, np.array([[4.0]]))[0]
    assert abs(st_ - both) < 1e-12


@pytest.mark.parametrize("kwargs,field", [({"mass": -1.0}, "mass"), ({"nodes": 100}, "nodes"),
                                          ({"mass": float("nan")}, "mass")])
def test_invalid_models(kwargs, field):
    with pytest.raises(InvalidConfig) as exc:
        LatticeFieldModel(**kwargs)
    assert field in exc.value.fields


def test_star_is_involutive(chain):
    A = chain.observable(("wick", ("field", 0), ("momentum", 3)))
    AA = chain.star(chain.star(A))
    for name in ("u", "v", "M", "P", "Q"):
        a, b = getattr(A.data, name), getattr(AA.data, name)
        assert (a is None) == (b is None)
        if a is not None:
            assert np.allclose(a, b)
