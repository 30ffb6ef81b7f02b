import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from arveson_kit.core import AnalysisConfig, CuboidWindow, OrbitSamples
from arveson_kit.errors import SignatureMismatch
from arveson_kit.fourier import (SupportSet, arveson_spectrum, detect_support, energy_momentum_transfer,
                                 inverse_fourier, meets_forward_cone, orbit_fourier, spectral_subspace_test)
from arveson_kit.models import LatticeSpacetimeAction
from oracles import difference_set


def samples_of(f, L=20.0, h=0.05):
    x = np.arange(-round(L / h), round(L / h) + 1) * h
    return OrbitSamples(CuboidWindow.cube(L, h), (x,), f(x).astype(complex), (1,), (False,), (False,))


def test_gaussian_transform_closed_form():
    # [DERIVED] (2 pi)^{-1/2} int e^{-ipx} e^{2ix - x^2/2} dx = e^{-(p-2)^2/2}
    dens = orbit_fourier(samples_of(lambda x: np.exp(2j * x - x * x / 2)))
    p = dens.axes[0]
    near = np.abs(p - 2) < 3
    assert np.allclose(dens.values[near], np.exp(-(p[near] - 2) ** 2 / 2), atol=1e-10)


def test_sign_convention_matrix_unit(m3):
    model, act, _ = m3
    # [DERIVED] E12 has orbit e^{-it}: its transform peaks at p = -1
    from arveson_kit.core import sample_orbit
    s = sample_orbit(act, model.vector_functional(0, 1), model.matrix_unit(0, 1), CuboidWindow.cube(64, 0.125))
    d = orbit_fourier(s, taper="auto")
    assert d.axes[0][np.argmax(np.abs(d.values))] == pytest.approx(-1.0, abs=d.bins[0])
    supp = detect_support(d)
    assert supp.contains_point([-1.0]) and not supp.contains_point([1.0])


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=8, max_size=64), st.sampled_from([None, "kaiser"]))
def test_parseval_and_inverse(vals, taper):
    n = len(vals)
    x = (np.arange(n) - n // 2) * 0.5
    s = OrbitSamples(CuboidWindow.cube(max(abs(x[0]), 0.5), 0.5), (x,), np.array(vals), (1,), (False,), (False,))
    d = orbit_fourier(s, taper=taper)
    assert np.allclose(inverse_fourier(d), s.values, atol=1e-9)
    if taper is None:
        assert d.mass() == pytest.approx(0.5 * np.sum(np.abs(s.values) ** 2), rel=1e-10, abs=1e-12)


boxes_1d = st.lists(st.tuples(st.floats(-10, 10), st.floats(0, 3)), min_size=1, max_size=6).map(
    lambda items: SupportSet(np.array([[[a, a + w]] for a, w in items]), (0.1,)))


@given(boxes_1d, boxes_1d)
def test_support_set_algebra(a, b):
    u = a.union(b)
    assert u.covers(a, 0.0) and u.covers(b, 0.0)
    assert a.dilated().covers(a, 0.0)
    assert np.allclose(a.negated().negated().boxes, a.boxes)
    assert SupportSet.from_dict(a.to_dict()).equals_within(a, 0.0)
    # sums of box midpoints lie in the sumset
    s = a.sumset(b)
    mids_a = a.boxes[:, 0].mean(axis=1)
    mids_b = b.boxes[:, 0].mean(axis=1)
    for p in mids_a:
        for q in mids_b:
            assert s.contains_point([p + q], 1e-9)
    # merged boxes are disjoint and sorted
    lo, hi = u.boxes[:, 0, 0], u.boxes[:, 0, 1]
    assert np.all(lo[1:] > hi[:-1])


@given(boxes_1d, st.floats(-15, 15))
def test_uncovered_consistent_with_points(a, p):
    single = SupportSet.from_points([p], 0.01)
    assume(not np.any(np.isclose(a.boxes.ravel(), p, atol=0.02)))
    assert a.covers(single, 0.0) == a.contains_point([p])


def test_matrix_arveson_spectrum(m3, m3_config):
    model, act, _ = m3
    res = arveson_spectrum(act, model.matrix_units(), model.vector_functionals(), m3_config)
    oracle = difference_set([0, 1, 3])
    assert len(res.total) == len(oracle)
    for q in oracle:
        assert res.total.contains_point([q], res.total.cell)
    assert len(res.per_element["E12"]) == 1 and res.per_element["E12"].contains_point([-1.0])


def test_spectral_subspace_test(m3, m3_config):
    model, act, _ = m3
    E12 = model.matrix_unit(0, 1)
    fam = model.vector_functionals()
    assert spectral_subspace_test(act, E12, SupportSet.from_points([-1.0], 0.2), fam, m3_config).passed
    rep = spectral_subspace_test(act, E12, SupportSet.from_points([1.0], 0.2), fam, m3_config)
    assert not rep.passed and rep.violations


def test_forward_cone_geometry():
    assert meets_forward_cone([[1.0, 2.0], [-0.5, 0.5]])
    assert not meets_forward_cone([[-2.0, -1.0], [-0.5, 0.5]])
    assert not meets_forward_cone([[0.1, 0.2], [1.0, 2.0]])


def test_energy_momentum_transfer(chain):
    cfg = AnalysisConfig((CuboidWindow.spacetime(64, 0.9, 0.25),))
    act = LatticeSpacetimeAction(chain)
    pk = ("vonmises", 0.5, 20.0)
    fam = [chain.vector_functional(("vacuum",), ("one", pk)), chain.vector_functional(("one", pk), ("vacuum",))]
    lower = energy_momentum_transfer(act, chain.observable(("a", pk)), fam, cfg)
    raise_ = energy_momentum_transfer(act, chain.observable(("adag", pk)), fam, cfg)
    assert lower.energy_decreasing and not lower.support.is_empty()
    assert not raise_.energy_decreasing


def test_transfer_needs_spacetime(m3, m3_config):
    model, act, _ = m3
    with pytest.raises(SignatureMismatch):
        energy_momentum_transfer(act, model.unit(), [model.vector_state(0)], m3_config)
