"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from arveson_kit.classify import (AC, SC, classify_element, decay_exponent, ergodic_average,
                                  extract_point_masses)
from arveson_kit.cli import Experiment, bundled_config, dumps_report, load_config, run_suite
from arveson_kit.core import CuboidWindow
from arveson_kit.duality import (CONSISTENT, build_decomposition, check_necessary_conditions,
                                 check_orthogonality, family_supports, two_vacua_toy)
from arveson_kit.errors import HypothesisFailed
from arveson_kit.fourier import SupportSet, arveson_spectrum
from arveson_kit.gns import check_spectrum_relations, check_transfer, gns_construct, implementing_group
from arveson_kit.models import build_density_flow, build_matrix_model, build_riesz_product, qft
from conftest import ladder
from oracles import (atom_characteristic, cantor_atoms, difference_set, dispersion, heisenberg_orbit,
                     wiener_average)

BUNDLED = ("matrix_m3.json", "gaussian_flow.json", "cantor_flow.json", "lattice_m1.json")


@pytest.fixture
def verdict(capsys):
    """``verdict(k, ok, detail)`` prints the criterion line, then asserts."""
    def report(k, ok, detail=""):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {k}: {detail}"
    return report


def test_crit01_matrix_spectrum_oracle(verdict):
    t0 = time.perf_counter()
    model, act, _ = build_matrix_model([0.0, 1.0, 3.0], "pure:1")
    cfg = ladder((32, 64, 128), 1 / 8)
    res = arveson_spectrum(act, model.matrix_units(), model.vector_functionals(), cfg)
    want = difference_set([0.0, 1.0, 3.0])
    cell = res.total.cell
    found = all(res.total.contains_point([q], cell) for q in want)
    spurious = [b for b in res.total.boxes
                if not any(b[0, 0] - cell[0] <= q <= b[0, 1] + cell[0] for q in want)]
    worst = 0.0
    for j in range(3):
        for k in range(3):
            A = model.matrix_unit(j, k)
            phi = model.vector_functional(j, k)
            pm = extract_point_masses(act, A, phi, cfg)
            # oracle: phi(alpha_t(E_jk)) = e^{it(l_j - l_k)}, coefficient 1 at l_j - l_k
            orbit = heisenberg_orbit(np.diag([0.0, 1.0, 3.0]), phi.data, A.data, [0.7])[0]
            assert abs(orbit - np.exp(0.7j * model.differences[j, k])) < 1e-12
            worst = max(worst, abs(pm.coefficient((model.differences[j, k],)) - 1.0))
    elapsed = time.perf_counter() - t0
    ok = found and not spurious and worst <= 1e-8 and elapsed < 5.0
    verdict(1, ok, f"Sp={sorted(want)} found={found} spurious={len(spurious)} "
                   f"coef_err={worst:.2e} runtime={elapsed:.2f}s")


def test_crit02_classification_triad(verdict):
    t0 = time.perf_counter()
    gm, gact = build_density_flow(2.0, 1.0)
    g = classify_element(gact, gm.generator(), [gm.state()], ladder((1e2, 1e3, 1e4), 0.25))
    rm, ract = build_riesz_product(1 / 3)
    r = classify_element(ract, rm.generator(), [rm.state()], ladder((1e2, 1e3, 1e4), 1.0))
    mm, mact, _ = build_matrix_model([0.0, 1.0, 3.0], "pure:1")
    m = classify_element(mact, mm.matrix_unit(0, 1), mm.vector_functionals(), ladder((32, 64, 128), 1 / 8))
    elapsed = time.perf_counter() - t0

    # independent oracles
    pos, w = cantor_atoms(1 / 3, 11)
    wiener = [wiener_average(pos, w, L) for L in (1e2, 1e3, 1e4)]
    gauss_I = math.sqrt(math.pi)                      # int |e^{-x^2/2}|^2 dx
    # E12 orbit by dense expm; its Cesaro average against e^{-iqt} is 1 at q = -1 and O(1/L) elsewhere
    ts = np.linspace(-50, 50, 2001)
    orbit = heisenberg_orbit(np.diag([0.0, 1.0, 3.0]), mm.vector_functional(0, 1).data,
                             mm.matrix_unit(0, 1).data, ts)
    eig = abs(np.mean(orbit * np.exp(1j * ts)) - 1.0) + abs(np.mean(orbit * np.exp(-1j * ts)))
    chi = atom_characteristic(pos, w, np.array([0.0]))[0]
    oracle_ok = (wiener[2] < wiener[0] / 4 and abs(chi - 1) < 1e-12 and eig < 0.02
                 and all(abs(v - gauss_I) < 1e-6 for _, v in g.plancherel_curve["omega"]))

    series = r.point_masses["omega"].series if r.point_masses else {}
    exps = [s.exponent for s in series.values()]
    probe_exps = [f[3] for f in r.probe_failures]
    l1 = [v for _, v in r.l1_growth_curve["omega"]]
    pl = [v for _, v in r.plancherel_curve["omega"]]
    l1_growth = [b / a for a, b in zip(l1, l1[1:])]
    pl_growth = [b / a for a, b in zip(pl, pl[1:])]
    M0 = [abs(ergodic_average(ract, rm.generator(), rm.state(), 0.0, CuboidWindow.cube(L, 1.0)))
          for L in (1e2, 1e3, 1e4)]
    decay = decay_exponent([1e2, 1e3, 1e4], M0)
    verdicts = g.ac_status == AC and r.ac_status == SC and m.pure_point
    ok = (verdicts and oracle_ok and decay >= 0.4 and min(l1_growth) >= 1.3 and elapsed < 60.0)
    verdict(2, ok, f"gaussian={g.ac_status} riesz={r.ac_status} matrix_pp={m.pure_point} "
                   f"oracles={oracle_ok} decay_exponent={decay:.2f} "
                   f"L1_mass={[round(v, 3) for v in l1]} L1_growth={[round(v, 2) for v in l1_growth]} "
                   f"(Plancherel surrogate growth={[round(v, 2) for v in pl_growth]}) "
                   f"rejected_exponents={exps + probe_exps} runtime={elapsed:.1f}s")


def test_crit03_orthogonality(verdict):
    model, act, _ = build_matrix_model([0.0, 1.0, 3.0], "pure:1")
    cfg = ladder((32, 64, 128), 1 / 8)
    els, fns = model.matrix_units(), model.vector_functionals()
    supports = family_supports(act, els, fns, cfg)
    cell = supports[0][0].cell[0]
    worst, pairs, rows = 0.0, 0, 0
    pts = model.frequencies()
    for p in pts:
        for q in pts:
            if p == q:
                continue
            rep = check_orthogonality(SupportSet.from_points([p], cell), SupportSet.from_points([q], cell),
                                      act, els, fns, cfg, supports)
            worst = max(worst, rep.max_violation)
            pairs += 1
            rows += len(rep.rows)
    verdict(3, worst <= 1e-10 and rows > 0,
            f"max |phi(A)| = {worst:.2e} over {pairs} frequency pairs, {rows} pairings")


def test_crit04_decomposition(verdict):
    lat = Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)
    res = build_decomposition(lat.state, lat.model.unit(), lat.action, lat.elements, lat.functionals,
                              lat.config)
    lattice_ok = (res.identity_residual == 0.0 and res.spectra_equal
                  and all(h["in_continuous"] for h in res.hypothesis))
    mat = Experiment(load_config(bundled_config("matrix_m3.json")), 3, None)
    try:
        build_decomposition(mat.state, mat.model.unit(), mat.action, mat.elements, mat.functionals, mat.config)
        negative = False
    except HypothesisFailed:
        negative = True
    verdict(4, lattice_ok and negative,
            f"lattice: identity_residual={res.identity_residual} Sp_c={res.sp_c.boxes.tolist()} "
            f"Sp_c*={res.sp_c_dual.boxes.tolist()} equal={res.spectra_equal}; "
            f"matrix HypothesisFailed={negative}")


def test_crit05_two_vacua(verdict):
    toy = two_vacua_toy()
    rep = check_necessary_conditions(toy.action, toy.elements, toy.functionals, ladder((50, 100, 200), 0.25))
    at0 = [d for d in rep.dimensions if abs(d["q"][0]) < 1e-9][0]
    ok = rep.verdict == "VIOLATED(a)" and at0["dim_elements"] == 1 and at0["dim_functionals"] == 2
    verdict(5, ok, f"verdict={rep.verdict} dim A~({{0}})={at0['dim_elements']} "
                   f"dim A~_*({{0}})={at0['dim_functionals']}")


def test_crit06_transfer_and_relations(verdict):
    model, act, state = build_matrix_model([0.0, 1.0, 3.0], "pure:1")
    gns = gns_construct(model, state)
    group = implementing_group(gns, act)
    vecs = [v for v in (gns.vector_of(A) for A in gns.generators) if np.linalg.norm(v) > 1e-12]
    rng = np.random.default_rng(3)
    vecs += [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(2)]
    tr = check_transfer(group, gns.generators, vecs, ladder((32, 64, 128), 1 / 8))

    ex = Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)
    m = ex.model
    rel_vecs = [m.vector(tuple_spec) for tuple_spec in _relation_specs(ex)]
    fam = [m.vacuum()] + [m.state(v) for v in _relation_specs(ex)]
    broad = ("vonmises", math.pi / 2, 1.0)
    els = [m.unit(), m.observable(("number", broad, broad)), m.observable(("field", 1))]
    rel = check_spectrum_relations(m, ex.time_config, els, fam, rel_vecs)
    b = rel.parts["b"]
    sp_c = SupportSet.from_dict(b["Sp_c_alpha"])
    sp_u = SupportSet.from_dict(b["Sp_c_U"])
    edge = math.sqrt(5.0) - 1.0                   # band [1, sqrt 5] minus itself
    exact = SupportSet(np.array([[[-edge, edge]]]), sp_c.cell)
    band = SupportSet(np.array([[[1.0, math.sqrt(5.0)]]]), sp_u.cell)
    covered = sp_c.covers(exact, sp_c.cell)
    band_ok = sp_u.equals_within(band, sp_u.cell)
    pp_ok = rel.parts["a"]["Sp_pp_U"] == [0.0] and rel.parts["a"]["Sp_pp_alpha"] == [0.0]
    ok = tr.passed and not tr.violations and rel.passed and covered and band_ok and pp_ok
    verdict(6, ok, f"matrix transfer violations={len(tr.violations)}; Sp_c U={sp_u.boxes.tolist()} "
                   f"Sp_c alpha={sp_c.boxes.tolist()} covers [-{edge:.4f}, {edge:.4f}]={covered}; "
                   f"Sp_pp U={rel.parts['a']['Sp_pp_U']} Sp_pp alpha={rel.parts['a']['Sp_pp_alpha']}")


def _relation_specs(ex):
    from arveson_kit.cli import _tuples
    return [_tuples(v) for v in ex.lat["relation_vectors"]]


def test_crit07_condition_T(verdict):
    ex = Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)
    m = ex.model
    g = qft.gaussian_smearing(ex.lat["smearing_tau"])
    rep = qft.check_condition_T(m, g, ex.states)
    plane = m.state(("one", ("mode", math.pi / 2)))
    one = qft.check_condition_T(m, g, [plane]).rows[0]
    oracle = dispersion(math.pi / 2, 1.0)
    sqrt3 = abs(oracle - math.sqrt(3.0)) < 1e-15 and abs(one["sum"][0] - oracle) <= 1e-8 * (1 + oracle)
    worst = max(r["residual"] / (1 + abs(r["omega_H"])) for r in rep.rows)
    verdict(7, rep.passed and sqrt3,
            f"{len(rep.rows)} states, max relative residual={worst:.2e}; "
            f"theta=pi/2 sum={one['sum'][0]:.10f} vs sqrt3={oracle:.10f}")


def test_crit08_particle_bound(verdict):
    ex = Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)
    m = ex.model
    g = qft.gaussian_smearing(ex.lat["smearing_tau"])
    T = qft.energy_density_smeared(m, g)
    omega = next(w for w in ex.states if m.mean_energy(w).real > 0)
    energy = m.mean_energy(omega).real
    exact = qft.check_particle_bound(m, omega, T, energy / 2, g)
    const = max(abs(r["abs_sigma"] - energy) for r in exact.rows)
    P = m.observable(("wick", ("field", 0), ("field", 0)))
    delta = 0.4 * energy / qft.seminorm_E1(m, P, [omega]).value
    C = m.combine([1.0, delta], [T, P])
    pert = qft.check_particle_bound(m, omega, C, energy / 2, g)
    ok = exact.passed and const <= 1e-8 and pert.passed and len(pert.rows) == 64
    verdict(8, ok, f"omega(H)={energy:.6f}; exact C: max |sigma - omega(H)|={const:.2e}; perturbed: "
                   f"distance={pert.summary['distance']:.4f} <= eps={energy / 2:.4f}, "
                   f"min|sigma|={pert.summary['min_abs_sigma']:.4f}")


def test_crit09_space_spectra(verdict):
    ex = Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)
    m = ex.model
    cent = [A for A in ex.observables if A.data.centered]
    rep = qft.space_spectra_check(m, ex.observables, ex.functionals, ex.config)
    covs = {A.label: qft.support_coverage(m, A, ex.functionals, ex.config).summary["coverage"] for A in cent}
    ok = rep.passed and all(v >= 0.95 for v in covs.values()) and len(cent) >= 1
    verdict(9, ok, f"missed cells={rep.summary['missed_cells']} sc boxes off 0="
                   f"{rep.summary['sc_boxes_off_zero']}; coverage={ {k: round(v, 4) for k, v in covs.items()} }")


def test_crit10_determinism(verdict):
    same = {}
    for name in BUNDLED:
        doc = load_config(bundled_config(name))
        same[name] = dumps_report(run_suite(doc)) == dumps_report(run_suite(doc))
    verdict(10, all(same.values()), f"byte-identical: {same}")
