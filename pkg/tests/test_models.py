import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arveson_kit.errors import InvalidConfig
from arveson_kit.models import (MatrixModel, MatrixTimeAction, build_density_flow, build_matrix_model,
                                build_riesz_product)
from oracles import (atom_characteristic, cantor_atoms, difference_set, gaussian_characteristic_quad,
                     heisenberg_orbit)


def test_matrix_frequencies_are_the_difference_set(m3):
    model, _, _ = m3
    assert list(model.frequencies()) == difference_set([0, 1, 3])
    assert difference_set([0, 1, 3]) == [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]


@given(seed=st.integers(0, 2 ** 31), t=st.floats(-50, 50))
def test_matrix_orbit_matches_expm(seed, t):
    rng = np.random.default_rng(seed)
    lam = rng.uniform(-2, 2, size=3)
    model = MatrixModel(lam)
    act = MatrixTimeAction(model)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    rho = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    got = act.pair(model.functional(rho), model.element(A), np.array([[t]]))[0]
    want = heisenberg_orbit(np.diag(lam), rho, A, [t])[0]
    assert abs(got - want) <= 1e-9 * (1 + abs(want))


def test_block_structure_is_enforced():
    model = MatrixModel([0, 1, 2, 3], blocks=[2, 2])
    assert len(model.matrix_units()) == 8
    M = np.zeros((4, 4))
    M[0, 3] = 1
    with pytest.raises(InvalidConfig):
        model.element(M)
    with pytest.raises(InvalidConfig) as exc:
        MatrixModel([0, 1], blocks=[3])
    assert "blocks" in exc.value.fields


@pytest.mark.parametrize("spec,ok", [("pure:1", True), ("trace", True), ("pure:9", False), ("mixed", False)])
def test_state_specs(spec, ok):
    if ok:
        _, _, state = build_matrix_model([0, 1, 3], spec)
        assert state.is_state
    else:
        with pytest.raises(InvalidConfig):
            build_matrix_model([0, 1, 3], spec)


def test_vector_functional_reads_an_entry(m3):
    model, _, _ = m3
    A = model.element(np.arange(9).reshape(3, 3))
    assert model.evaluate(model.vector_functional(1, 2), A) == 5


def test_riesz_normalisation_and_oracle():
    model, act = build_riesz_product(1 / 3)
    F, w = model.generator(), model.state()
    assert act.pair(w, F, np.zeros((1, 1)))[0] == pytest.approx(1.0)   # [TRIVIAL] orbit(0) = 1
    # [DERIVED] atom sum of the depth-16 approximation; its error is below sum (x r^k)^2 / 2 for k > 16
    pos, wt = cantor_atoms(1 / 3, 16)
    x = np.array([0.5, 3.0, 17.0, 250.0])
    assert np.allclose(act.pair(w, F, x[:, None]), atom_characteristic(pos, wt, x), atol=1e-9)


def test_gaussian_flow_matches_quadrature():
    model, act = build_density_flow(2.0, 1.0)
    x = np.array([0.0, 0.4, 1.7, 3.2])
    want = [gaussian_characteristic_quad(2.0, 1.0, v) for v in x]
    assert np.allclose(act.pair(model.state(), model.generator(), x[:, None]), want, atol=1e-10)


@pytest.mark.parametrize("builder,kwargs,field", [(build_density_flow, {"sigma": 0.0}, "sigma"),
                                                  (build_riesz_product, {"ratio": 0.7}, "ratio")])
def test_flow_validation(builder, kwargs, field):
    with pytest.raises(InvalidConfig) as exc:
        builder(**kwargs)
    assert field in exc.value.fields


def test_flow_translation_is_a_shift():
    model, act = build_density_flow(2.0, 1.0)
    F, w = model.generator(), model.state()
    moved = act.translate(F, 1.25)
    x = np.array([[0.0], [0.5]])
    assert np.allclose(act.pair(w, moved, x), act.pair(w, F, x + 1.25))
