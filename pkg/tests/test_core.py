import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arveson_kit.core import (AnalysisConfig, CuboidWindow, GroupParameter, OrbitSamples, adjoint_functional,
                              evaluate_pairing, grid_axes, parallel_map, sample_orbit, thread_count,
                              window_ladder)
from arveson_kit.errors import GridTooCoarse, ModelMismatch, NoAdjoint
from arveson_kit.models import LatticeSpaceAction, build_density_flow, build_matrix_model


def test_group_parameter_arithmetic():
    x = GroupParameter((1.0, 2.0))
    assert (x + (-x)).coordinates == (0.0, 0.0)
    with pytest.raises(ValueError):
        GroupParameter((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        GroupParameter((float("inf"),))


def test_window_validation_and_ladder():
    w = CuboidWindow.cube(10, 0.5)
    assert w.volume == 20
    assert [v.half_lengths[0] for v in window_ladder(w, 3)] == [10, 20, 40]
    with pytest.raises(ValueError):
        CuboidWindow((1.0,), (-1.0,))
    st_ = CuboidWindow.spacetime(64, 0.5, 0.25)
    assert st_.half_lengths == (8.0, 64.0)
    with pytest.raises(ValueError):
        CuboidWindow((3.0, 64.0), (0.1, 1.0), 0.5)


def test_evaluate_pairing_matches_entry(m3):
    model, act, _ = m3
    E13 = model.matrix_unit(0, 2)
    phi = model.vector_functional(0, 2)
    # [DERIVED] orbit of E13 is e^{it(0 - 3)}
    assert evaluate_pairing(act, phi, E13, 0.4) == pytest.approx(np.exp(-1.2j))


def test_model_mismatch(m3):
    model, act, _ = m3
    other, _, _ = build_matrix_model([0, 2, 5])
    with pytest.raises(ModelMismatch):
        evaluate_pairing(act, other.vector_state(0), model.unit(), 0.0)


def test_adjoint_functional(m3):
    model, _, _ = m3
    rng = np.random.default_rng(1)
    rho = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    phi, a = model.functional(rho), model.element(A)
    bar = adjoint_functional(model, phi)
    assert model.evaluate(bar, a) == pytest.approx(np.conj(model.evaluate(phi, model.star(a))))
    flow, _ = build_density_flow()
    with pytest.raises(NoAdjoint):
        adjoint_functional(flow, flow.state())


def test_nyquist_guard(m3):
    _, act, _ = m3
    with pytest.raises(GridTooCoarse):
        grid_axes(act, CuboidWindow.cube(32, 2.0))


def test_lattice_axis_uses_full_period(chain):
    axes, periodic = grid_axes(LatticeSpaceAction(chain), CuboidWindow.cube(200, 1.0))
    assert periodic == (True,)
    assert axes[0].size == chain.N


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                min_size=33, max_size=33))
def test_orbit_csv_round_trip(vals):
    w = CuboidWindow.cube(4, 0.25)
    axes = (np.arange(-16, 17) * 0.25,)
    s = OrbitSamples(w, axes, np.array(vals, dtype=complex), (1,), (False,), (False,))
    pts, back = OrbitSamples.values_from_csv(s.to_csv())
    assert np.array_equal(back, s.values)
    assert np.array_equal(pts[:, 0], axes[0])


def test_sample_orbit_shape(m3):
    model, act, state = m3
    s = sample_orbit(act, state, model.unit(), CuboidWindow.cube(4, 0.125))
    assert s.values.shape == (65,)
    assert np.allclose(s.values, 1.0)


def test_parallel_map_is_ordered(monkeypatch):
    monkeypatch.setenv("ARVESON_KIT_THREADS", "4")
    assert thread_count() == 4
    assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    assert thread_count(2) == 2
    monkeypatch.delenv("ARVESON_KIT_THREADS")
    assert thread_count() == 1


def test_config_rejects_mixed_ladders():
    with pytest.raises(ValueError):
        AnalysisConfig((CuboidWindow.cube(4, 1.0), CuboidWindow.cube(4, 1.0, dim=2)))
    with pytest.raises(ValueError):
        AnalysisConfig((CuboidWindow.cube(4, 1.0),), tau_rel=2.0)
