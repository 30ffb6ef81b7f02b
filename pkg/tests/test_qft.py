import math

import numpy as np
import pytest

from arveson_kit.errors import BadSmearing, EpsilonTooLarge, NotCentered, TailNotSummable
from arveson_kit.models import qft
from arveson_kit.models.qft import Smearing, gaussian_smearing
from oracles import dispersion

SQRT3 = math.sqrt(3.0)


@pytest.fixture(scope="module")
def states(chain):
    m = chain
    return {"vacuum": m.vacuum(),
            "one": m.state(("one", ("mode", math.pi / 2))),
            "two": m.state(("two", ("mode", math.pi / 2), ("mode", -math.pi / 2))),
            "packet": m.state(("one", ("vonmises", 0.0, 8.0)))}


@pytest.fixture(scope="module")
def T(chain):
    return qft.energy_density_smeared(chain, gaussian_smearing(16.0))


def test_smearing_normalisation():
    g = gaussian_smearing(16.0)
    assert g.multiplier(np.zeros(1))[0] == 1.0
    # [DERIVED] G(nu) = exp(-(tau nu)^2 / 2)
    assert g.multiplier(np.array([0.1]))[0] == pytest.approx(math.exp(-1.28), rel=1e-14)
    with pytest.raises(BadSmearing):
        Smearing("boxcar", (1.0, 0.5)).multiplier(np.zeros(1))


def test_partition_of_unity():
    E, mu = 5.0, 0.5
    nu = np.linspace(-E, E, 2001)
    total = sum(Smearing(k, (E, mu)).multiplier(nu) for k in ("zero", "plus", "minus"))
    np.testing.assert_allclose(total, Smearing("flat", (E, mu)).multiplier(nu), atol=1e-14)
    np.testing.assert_allclose(total, 1.0, atol=1e-14)


def test_seminorm_values(chain, states, T):
    assert qft.seminorm_E1(chain, T, [states["vacuum"]]).value == pytest.approx(0.0, abs=1e-12)
    # plane wave: each site carries omega(H)/N
    res = qft.seminorm_E1(chain, T, [states["one"]])
    assert res.value == pytest.approx(SQRT3, rel=1e-10)
    with pytest.raises(TailNotSummable):
        qft.seminorm_E1(chain, chain.unit(), [states["vacuum"]])


def test_asymptotic_functional(chain, states, T):
    for t in (0.0, 1.7):
        s = qft.asymptotic_functional(chain, states["packet"], T, t)
        assert s == pytest.approx(chain.mean_energy(states["packet"]), abs=1e-9)


def test_condition_T(chain, states):
    rep = qft.check_condition_T(chain, gaussian_smearing(16.0), list(states.values()))
    assert rep.passed
    got = {r["state"]: r["omega_H"] for r in rep.rows}
    assert got[states["one"].label] == pytest.approx(dispersion(math.pi / 2), abs=1e-12)
    assert got[states["two"].label] == pytest.approx(2 * SQRT3, abs=1e-12)
    with pytest.raises(BadSmearing):
        qft.check_condition_T(chain, gaussian_smearing(16.0, scale=2.0), [states["vacuum"]])
    with pytest.raises(BadSmearing):
        # a narrow time smearing is broad in frequency
        qft.check_condition_T(chain, gaussian_smearing(1.0), [states["vacuum"]])


def test_condition_L1(chain, states):
    g = gaussian_smearing(16.0)
    fam = [states["vacuum"], states["packet"]]
    field = chain.observable(("field", 0))
    rep = qft.check_condition_L1(chain, g, fam, [field])
    assert rep.passed
    with pytest.raises(NotCentered):
        qft.check_condition_L1(chain, g, fam, [chain.unit()])


def test_split(chain, states):
    A = chain.observable(("field", 0))
    split = qft.sc_triviality_split(chain, A, [states["packet"]])
    assert max(split.support_leak.values()) < 1e-10
    v = chain.vector(("super", ((1.0, ("vacuum",)), (0.7, ("one", ("vonmises", 0.3, 8.0))))))
    assert qft.partition_identity_residual(chain, A, split, v) <= 1e-8
    with pytest.raises(NotCentered):
        qft.sc_triviality_split(chain, chain.unit(), [states["packet"]])


def test_particle_bound(chain, states, T):
    w = states["packet"]
    energy = chain.mean_energy(w).real
    rep = qft.check_particle_bound(chain, w, T, energy / 2)
    assert rep.passed
    # C = T00(g) exactly: sigma(C) = omega(H) at every time
    assert rep.summary["min_abs_sigma"] == pytest.approx(energy, abs=1e-8)
    assert rep.summary["max_abs_sigma"] == pytest.approx(energy, abs=1e-8)
    with pytest.raises(EpsilonTooLarge):
        qft.check_particle_bound(chain, w, T, energy)
    with pytest.raises(EpsilonTooLarge):
        qft.check_particle_bound(chain, states["vacuum"], T, 0.0)
    far = chain.combine([1.0, 10.0], [T, chain.observable(("wick", ("field", 0), ("field", 0)))])
    with pytest.raises(EpsilonTooLarge):
        qft.check_particle_bound(chain, w, far, energy / 2)


def test_regularity_and_coverage(chain, states, space_config, lattice_ex):
    fam = [states["vacuum"], states["packet"]]
    field = chain.observable(("field", 0))
    # number-diagonal states see no odd fields; the Wick square has a smooth profile
    wick = chain.observable(("wick", ("field", 0), ("field", 0)))
    rep = qft.buchholz_regularity_scan(chain, [field, wick], fam)
    assert rep.passed and rep.rows[0]["value"] == 0.0 and rep.rows[1]["value"] > 0
    ex = lattice_ex
    cov = qft.support_coverage(ex.model, field, ex.functionals, ex.config)
    assert cov.passed and cov.summary["cells"] == qft.torus_cells(ex.config).size
    with pytest.raises(NotCentered):
        qft.support_coverage(ex.model, ex.model.unit(), ex.functionals, ex.config)


def test_torus_cells(space_config):
    c = qft.torus_cells(space_config)
    # [TRIVIAL] 2L/step = 256 cells of width 2 pi / 256
    assert c.size == 256 and c[0] == pytest.approx(-math.pi + math.pi / 256)


def test_space_spectra(lattice_ex):
    ex = lattice_ex
    cent = [A for A in ex.observables if A.data.centered]
    rep = qft.space_spectra_check(ex.model, cent, ex.functionals, ex.config)
    assert rep.passed
    assert len(rep.summary["missed_cells"]) <= 1 and not rep.summary["sc_boxes_off_zero"]
