import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arveson_kit.classify import (AC, SC, UNDETERMINED, QuotientClass, class_equal, classify_element,
                                  component_spectra, decay_exponent, ergodic_average, ergodic_series,
                                  extract_point_masses, quotient_act)
from arveson_kit.core import CuboidWindow
from arveson_kit.errors import GridTooCoarse, NotContinuous
from arveson_kit.models import MatrixModel, MatrixTimeAction, build_density_flow, build_riesz_product
from conftest import ladder
from oracles import cantor_atoms, wiener_average


def exact_coefficients(lam, rho, A):
    """c_q = sum over (j, k) with lam_j - lam_k = q of rho_kj A_jk."""
    out = {}
    for j in range(len(lam)):
        for k in range(len(lam)):
            q = round(lam[j] - lam[k], 9)
            out[q] = out.get(q, 0) + rho[k, j] * A[j, k]
    return out


def test_eigen_element_average_is_one(m3):
    model, act, _ = m3
    # [TRIVIAL] the orbit of E12 is e^{-it}; averaging against e^{-iqt} at q = -1 gives 1
    M = ergodic_average(act, model.matrix_unit(0, 1), model.vector_functional(0, 1), -1.0,
                        CuboidWindow.cube(40, 0.125))
    assert M == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(GridTooCoarse):
        ergodic_average(act, model.unit(), model.vector_state(0), 40.0, CuboidWindow.cube(40, 0.125))


def test_decay_exponent_power_law():
    L = np.array([10.0, 100.0, 1000.0])
    assert decay_exponent(L, 3 * L ** -0.7) == pytest.approx(0.7)
    assert decay_exponent(L, np.zeros(3), floor=1e-12) == math.inf


@settings(max_examples=10)
@given(seed=st.integers(0, 2 ** 31))
def test_point_masses_match_exact_coefficients(seed, m3_config):
    rng = np.random.default_rng(seed)
    lam = np.array([0.0, 1.0, 3.0])
    model = MatrixModel(lam)
    act = MatrixTimeAction(model)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    rho = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    pm = extract_point_masses(act, model.element(A), model.functional(rho), m3_config)
    want = exact_coefficients(lam, rho, A)
    assert sorted(round(q[0], 6) for q in pm.masses) == sorted(want)
    for q, c in want.items():
        assert abs(pm.coefficient((q,)) - c) <= 1e-8


def test_ergodic_series_csv(m3, m3_config):
    model, act, _ = m3
    s = ergodic_series(act, model.matrix_unit(0, 2), model.vector_functional(0, 2), (0.5,), m3_config)
    assert s.exponent > 0.4
    text = s.to_csv()
    assert text.startswith("# columns: L, |M_L|") and "fitted decay exponent" in text.splitlines()[0]


def test_gaussian_is_ac():
    model, act = build_density_flow(2.0, 1.0)
    cl = classify_element(act, model.generator(), [model.state()], ladder((50, 100, 200), 0.25))
    assert cl.in_continuous and cl.ac_status == AC
    # [DERIVED] int |e^{-x^2/2}|^2 dx = sqrt(pi)
    for L, v in cl.plancherel_curve["omega"]:
        assert v == pytest.approx(math.sqrt(math.pi), rel=1e-9)


def test_cantor_is_sc_and_matches_atom_oracle():
    model, act = build_riesz_product(1 / 3)
    cfg = ladder((1e2, 1e3, 1e4), 1.0)
    cl = classify_element(act, model.generator(), [model.state()], cfg)
    assert cl.in_continuous and cl.ac_status == SC
    # oracle: Wiener averages of the atom approximation shrink, so there are no atoms
    pos, w = cantor_atoms(1 / 3, 11)
    assert wiener_average(pos, w, 1e4) < wiener_average(pos, w, 1e2) / 4


def test_matrix_unit_is_pure_point(m3, m3_config):
    model, act, _ = m3
    cl = classify_element(act, model.matrix_unit(0, 1), model.vector_functionals(), m3_config)
    assert cl.pure_point and not cl.in_continuous
    assert cl.ac_status == UNDETERMINED and "pure point" in cl.reason
    assert cl.retained_frequencies() == [(-1.0,)]


def test_component_spectra_gaussian():
    model, act = build_density_flow(2.0, 1.0)
    comp = component_spectra(act, [model.generator()], [model.state()], ladder((50, 100, 200), 0.25))
    assert comp.pp.is_empty() and comp.sc.is_empty()
    assert comp.ac.contains_point([2.0]) and not comp.ac.contains_point([12.0])


def test_quotient_classes():
    model, act = build_density_flow(2.0, 1.0)
    cfg = ladder((50, 100, 200), 0.25)
    c = QuotientClass.of(act, model.generator(), [model.state()], cfg)
    assert c.sc_mass == 0.0
    moved = quotient_act(c, 3.0)
    # AC classes are all zero in the quotient
    assert class_equal(c, moved)
    assert class_equal(c, QuotientClass.zero(act, [model.state()], cfg))


def test_quotient_needs_continuous(m3, m3_config):
    model, act, _ = m3
    with pytest.raises(NotContinuous):
        QuotientClass.of(act, model.matrix_unit(0, 1), model.vector_functionals(), m3_config)
