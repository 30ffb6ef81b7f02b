"""Command line entry point: ``arveson-kit run | plot | validate``.

A run reads an experiment document (see ``schema/experiment.schema.json``),
builds the model and its generating families, executes the selected suites
and writes a JSON report plus CSV plot data.  Exit codes: 0 when every check
passes, 1 when some check fails, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import math
import re
import sys
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from .classify import (AC, classify_element, component_spectra, ergodic_series, extract_point_masses,
                       orbit_ladder)
from .core import AnalysisConfig, CuboidWindow, thread_count
from .duality import (annihilator, build_decomposition, check_necessary_conditions, check_orthogonality,
                      family_supports, transpose_action)
from .errors import CheckFailure, ConfigError, HypothesisFailed, InvalidConfig, MissingCurve
from .fourier import SupportSet, arveson_spectrum
from .gns import (check_spectrum_relations, check_transfer, gns_construct, hilbert_parts,
                  implementation_error, implementing_group)
from .models import (LatticeSpaceAction, LatticeTimeAction, build_density_flow, build_lattice_model,
                     build_matrix_model, build_riesz_product)
from .models import qft

log = logging.getLogger("arveson_kit")

SUITES = ("spectra", "classify", "duality", "gns", "qft")
PLOT_KINDS = ("ergodic", "l1", "spectrum")
BUNDLED = ("matrix_m3.json", "lattice_m1.json", "gaussian_flow.json", "cantor_flow.json")

DEFAULT_LATTICE = {
    "states": [["vacuum"], ["one", ["mode", 1.5707963267948966]],
               ["two", ["mode", 1.5707963267948966], ["mode", -1.5707963267948966]],
               ["one", ["vonmises", 0.0, 8.0]], ["one", ["vonmises", 2.0, 8.0]],
               ["two", ["vonmises", 0.5, 8.0], ["vonmises", -1.0, 8.0]]],
    "spectral_vectors": [["vacuum"], ["one", ["site", 0]], ["two", ["site", 0], ["site", 1]]],
    "relation_vectors": [["super", [[1.0, ["one", ["vonmises", 1.5707963267948966, 1.0]]],
                                    [-1.0, ["one", ["vonmises", -1.5707963267948966, 1.0]]]]],
                         ["super", [[1.0, ["one", ["vonmises", 1.5707963267948966, 4.0]]],
                                    [-1.0, ["one", ["vonmises", -1.5707963267948966, 4.0]]]]]],
    "observables": [["field", 0], ["momentum", 0], ["wick", ["field", 0], ["momentum", 1]],
                    ["energy_density", 0]],
    "smearing_tau": 16.0,
    "regularity_eps": 0.5,
    "random_vectors": 8,
}


# configuration

def schema() -> dict:
    text = resources.files("arveson_kit").joinpath("schema/experiment.schema.json").read_text()
    return json.loads(text)


def bundled_config(name: str) -> Path:
    return Path(str(resources.files("arveson_kit").joinpath("configs", name)))


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def _schema_pointers(err) -> list:
    """JSON pointers of a validation error; a missing property points at itself."""
    leaves = []
    stack = [err]
    while stack:
        e = stack.pop()
        if e.context:
            stack.extend(e.context)
        else:
            leaves.append(e)
    out = []
    for e in leaves:
        base = _pointer(e.absolute_path)
        if e.validator == "required":
            m = re.match(r"'([^']+)' is a required property", e.message)
            if m:
                base += "/" + m.group(1)
        elif e.validator == "additionalProperties":
            extra = re.findall(r"'([^']+)'", e.message)
            base += "/" + extra[0] if extra else ""
        out.append(base or "/")
    return sorted(set(out))


def load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found", ["/"])
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", ["/"])
    return validate_config(doc)


def validate_config(doc) -> dict:
    """Schema validation plus semantic checks; returns the document unchanged."""
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        pointers = sorted({p for e in errors for p in _schema_pointers(e)})
        raise ConfigError("; ".join(f"{_pointer(e.absolute_path) or '/'}: {e.message}" for e in errors),
                          pointers)
    for key in ("windows", "time_windows"):
        if key in doc:
            h = doc[key]["half_lengths"]
            if any(b <= a for a, b in zip(h, h[1:])):
                raise ConfigError("window ladder must increase", [f"/{key}/half_lengths"])
    try:
        build_model(doc)
    except InvalidConfig as exc:
        raise ConfigError(str(exc), [f"/model/{k}" for k in sorted(exc.fields)] or ["/model"])
    return doc


def manifest_hash(doc: dict) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _tuples(x):
    if isinstance(x, list):
        return tuple(_tuples(v) for v in x)
    return x


def build_model(doc: dict):
    spec = doc["model"]
    kind = spec["kind"]
    if kind == "matrix":
        return build_matrix_model(spec["eigenvalues"], spec.get("state", "pure:1"), spec.get("blocks"))
    if kind == "lattice":
        return build_lattice_model(spec["mass"], spec["nodes"], spec.get("energy_bound"), spec.get("mu"))
    if kind == "gaussian_flow":
        return build_density_flow(spec.get("mean", 2.0), spec.get("sigma", 1.0))
    return build_riesz_product(spec.get("ratio", 1.0 / 3.0))


def analysis_config(doc: dict, key: str = "windows", threads: Optional[int] = None) -> AnalysisConfig:
    lad = doc[key]
    windows = tuple(CuboidWindow.cube(L, lad["step"]) for L in lad["half_lengths"])
    th = doc.get("thresholds", {})
    return AnalysisConfig(windows, **th, threads=threads)


# reports

def _clean(x):
    """JSON-ready copy: numpy scalars to Python, tuples to lists, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isfinite(v):
            return 0.0 if v == 0 else v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    return x


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=1, allow_nan=False) + "\n"


class _Suite:
    """Collects checks and curves of one suite."""

    def __init__(self, name: str, curves: dict):
        self.name = name
        self.checks = {}
        self.curves = curves

    def check(self, cid: str, ok: bool, **data):
        self.checks[f"{self.name}.{cid}"] = dict(data, passed=bool(ok))

    def skip(self, reason: str):
        self.checks[f"{self.name}.skipped"] = {"passed": True, "status": "NOT APPLICABLE", "reason": reason}

    def spectrum_curve(self, name: str, s: SupportSet):
        self.curves["spectrum"].append({"name": f"{self.name}:{name}", **s.to_dict()})

    def ergodic_curve(self, name: str, series):
        self.curves["ergodic"].append({"name": f"{self.name}:{name}", **series.to_dict()})

    def l1_curve(self, name: str, plancherel, l1):
        self.curves["l1"].append({"name": f"{self.name}:{name}",
                                  "L": [p[0] for p in plancherel],
                                  "I_L": [p[1] for p in plancherel],
                                  "L1": [p[1] for p in l1]})

    def to_dict(self) -> dict:
        return {"passed": all(c["passed"] for c in self.checks.values()), "checks": self.checks}


class Experiment:
    """Model, actions and generating families built from a validated document."""

    def __init__(self, doc: dict, seed: int, threads: Optional[int]):
        self.doc = doc
        self.kind = doc["model"]["kind"]
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.config = analysis_config(doc, threads=threads)
        built = build_model(doc)
        if self.kind == "matrix":
            self.model, self.action, self.state = built
            self.elements = self.model.matrix_units()
            self.functionals = self.model.vector_functionals()
        elif self.kind == "lattice":
            self.model = built
            self.action = LatticeSpaceAction(built)
            self.state = built.vacuum()
            self.lat = dict(DEFAULT_LATTICE, **doc.get("lattice", {}))
            m = built
            self.observables = [m.observable(_tuples(s)) for s in self.lat["observables"]]
            self.elements = [m.unit()] + self.observables
            vecs = [_tuples(v) for v in self.lat["spectral_vectors"]]
            self.functionals = [m.vector_functional(a, b, f"<v{i}|.|v{j}>")
                                for i, a in enumerate(vecs) for j, b in enumerate(vecs)]
            self.functionals = [m.state(vecs[0], "omega0")] + \
                [f for f in self.functionals if f.label != "<v0|.|v0>"]
            self.states = [m.state(_tuples(v)) for v in self.lat["states"]]
            self.time_config = analysis_config(doc, "time_windows", threads) \
                if "time_windows" in doc else replace(
                    self.config, windows=tuple(CuboidWindow.cube(L, 0.5) for L in (50.0, 100.0, 200.0)))
        else:
            self.model, self.action = built
            self.state = self.model.state()
            self.elements = [self.model.generator()]
            self.functionals = [self.state]

    def manifest(self) -> dict:
        out = {"model": self.model.name, "action": self.action.describe(),
               "elements": [A.label for A in self.elements],
               "functionals": [f.label for f in self.functionals],
               "analysis": self.config.to_dict(), "seed": self.seed}
        if self.kind == "lattice":
            out["states"] = [w.label for w in self.states]
            out["time_analysis"] = self.time_config.to_dict()
            out["notes"] = ["space is the lattice Z: cuboid averages are Cesaro sums over sites",
                            "bounded-energy states are an explicit finite family; suprema are maxima"]
        return out


# suites

def suite_spectra(ex: Experiment, s: _Suite):
    res = arveson_spectrum(ex.action, ex.elements, ex.functionals, ex.config)
    s.spectrum_curve("total", res.total)
    data = {"Sp": res.total.to_dict(),
            "per_element": {k: v.to_dict() for k, v in sorted(res.per_element.items())}}
    if ex.kind == "matrix":
        oracle = ex.model.frequencies()
        tol = res.total.cell
        found = all(res.total.contains_point([q], tol) for q in oracle)
        extra = [b.tolist() for b in res.total.boxes
                 if not any(b[0, 0] - tol[0] <= q <= b[0, 1] + tol[0] for q in oracle)]
        s.check("arveson_spectrum", found and not extra, oracle=oracle, spurious_boxes=extra, **data)
        worst, rows = 0.0, []
        for A in ex.elements:
            for phi in ex.functionals:
                exact = ex.model.evaluate(phi, A)
                if exact == 0:
                    continue
                pm = extract_point_masses(ex.action, A, phi, ex.config)
                q = float(ex.model.differences[np.nonzero(A.data)][0])
                err = abs(pm.coefficient((q,)) - exact)
                worst = max(worst, err)
                rows.append({"element": A.label, "functional": phi.label, "q": q, "error": err})
        s.check("point_mass_coefficients", worst <= 1e-8, max_error=worst, rows=rows)
    elif ex.kind == "lattice":
        cells = qft.torus_cells(ex.config)
        frac = res.total.cover_fraction([cells])
        s.check("space_spectrum", not res.total.is_empty(), torus_coverage=frac, **data)
    else:
        expect = ex.doc.get("expect", {}).get("spectrum")
        ok = not res.total.is_empty()
        if expect is not None:
            ok = ok and all(res.total.contains_point([q], res.total.cell) for q in expect)
        s.check("arveson_spectrum", ok, expected_points=expect, **data)


def suite_classify(ex: Experiment, s: _Suite):
    if ex.kind == "lattice":
        rep = qft.space_spectra_check(ex.model, ex.observables, ex.functionals, ex.config)
        s.check("space_spectra", rep.passed, **rep.to_dict())
        s.spectrum_curve("Sp_ac", SupportSet.from_dict(rep.summary["Sp_ac"]))
        return
    verdicts = {}
    for A in ex.elements:
        cl = classify_element(ex.action, A, ex.functionals, ex.config)
        verdicts[A.label] = cl.ac_status
        for f, curve in sorted(cl.plancherel_curve.items()):
            s.l1_curve(f"{A.label}|{f}", curve, cl.l1_growth_curve[f])
        for phi in ex.functionals:
            for q in cl.retained_frequencies() or [(0.0,)]:
                s.ergodic_curve(f"{A.label}|{phi.label}|q={q[0]:.6g}",
                                ergodic_series(ex.action, A, phi, q, ex.config))
        if ex.kind == "matrix":
            ok = cl.pure_point
        else:
            want = ex.doc.get("expect", {}).get("ac_status")
            ok = cl.in_continuous and (want is None or cl.ac_status == want)
        s.check(f"classification[{A.label}]", ok, **cl.to_dict())
    if ex.kind != "matrix":
        comp = component_spectra(ex.action, ex.elements, ex.functionals, ex.config)
        for name in ("pp", "ac", "sc"):
            s.spectrum_curve(f"Sp_{name}", getattr(comp, name))
        s.check("component_spectra", True, **{k: v for k, v in comp.to_dict().items()
                                               if k != "classifications"})


def suite_duality(ex: Experiment, s: _Suite):
    if ex.kind == "matrix":
        supports = family_supports(ex.action, ex.elements, ex.functionals, ex.config)
        cell = max(supports[0][0].cell[0], 1e-12)
        pts = ex.model.frequencies()
        worst, pairs = 0.0, 0
        for p in pts:
            for q in pts:
                if abs(p - q) < 4 * cell:
                    continue
                rep = check_orthogonality(SupportSet.from_points([p], cell), SupportSet.from_points([q], cell),
                                          ex.action, ex.elements, ex.functionals, ex.config, supports)
                worst = max(worst, rep.max_violation)
                pairs += 1
        s.check("orthogonality", worst <= 1e-10, max_violation=worst, point_pairs=pairs)
        ann = annihilator([ex.model.unit()], [ex.model.vector_state(a) for a in range(ex.model.n)],
                          ex.action)
        s.check("annihilator_of_unit", ann.dimension == ex.model.n - 1, dimension=ann.dimension)
        nec = check_necessary_conditions(ex.action, ex.elements, ex.functionals, ex.config)
        s.check("necessary_conditions", nec.verdict == "CONSISTENT", **nec.to_dict())
        try:
            build_decomposition(ex.state, ex.model.unit(), ex.action, ex.elements, ex.functionals, ex.config)
            s.check("decomposition_negative", False, outcome="decomposition unexpectedly succeeded")
        except HypothesisFailed as exc:
            s.check("decomposition_negative", True, outcome="HypothesisFailed", message=str(exc),
                    failures=exc.failures)
        return
    if ex.kind == "lattice":
        res = build_decomposition(ex.state, ex.model.unit(), ex.action, ex.elements, ex.functionals,
                                  ex.config)
        s.spectrum_curve("Sp_c", res.sp_c)
        s.spectrum_curve("Sp_c_dual", res.sp_c_dual)
        ok = res.identity_residual == 0.0 and res.spectra_equal
        s.check("decomposition", ok, **res.to_dict())
        nec = check_necessary_conditions(ex.action, ex.elements, ex.functionals, ex.config)
        s.check("necessary_conditions", nec.verdict == "CONSISTENT", **nec.to_dict())
        return
    dual = transpose_action(ex.action)
    pts = np.linspace(-ex.config.largest.half_lengths[0], ex.config.largest.half_lengths[0], 257)[:, None]
    A, phi = ex.elements[0], ex.functionals[0]
    gap = float(np.abs(dual.pair(A, phi, pts) - ex.action.pair(phi, A, pts)).max())
    s.check("dual_pairing", gap <= 1e-12, max_difference=gap)
    primal = classify_element(ex.action, A, [phi], ex.config).ac_status
    swapped = classify_element(dual, phi, [A], ex.config).ac_status
    s.check("dual_classification", primal == swapped, primal=primal, dual=swapped)


def suite_gns(ex: Experiment, s: _Suite):
    if ex.kind in ("gaussian_flow", "riesz_product"):
        s.skip("scalar flows carry no *-operation")
        return
    if ex.kind == "matrix":
        gns = gns_construct(ex.model, ex.state)
        group = implementing_group(gns, ex.action)
        err = implementation_error(group)
        s.check("implementation", max(err.values()) <= 1e-8, dimension=gns.dimension, **err,
                group=group.to_dict(), parts_flag=hilbert_parts(group)["flag"])
        vecs = [gns.vector_of(A) for A in gns.generators]
        vecs = [v for v in vecs if np.linalg.norm(v) > 1e-12]
        n = len(vecs[0])
        for _ in range(2):
            v = ex.rng.standard_normal(n) + 1j * ex.rng.standard_normal(n)
            vecs.append(v / np.linalg.norm(v))
        rep = check_transfer(group, gns.generators, vecs, ex.config)
        s.check("transfer", rep.passed and not rep.violations, **rep.to_dict())
        return
    m = ex.model
    tact = LatticeTimeAction(m)
    gns = gns_construct(m, ex.state)
    group = implementing_group(gns, tact)
    err = implementation_error(group)
    s.check("implementation", max(err.values()) <= 1e-8, **err, group=group.to_dict(),
            parts=hilbert_parts(group))
    vecs = [_tuples(v) for v in ex.lat["relation_vectors"]]
    fvecs = [m.vector(v) for v in vecs]
    fam = [m.vacuum()] + [m.state(v) for v in vecs]
    fam += [m.vector_functional(a, b, f"<r{i}|.|r{j}>") for i, a in enumerate(vecs)
            for j, b in enumerate(vecs) if i != j]
    broad = ("vonmises", math.pi / 2, 1.0)
    # the relation vectors are odd in theta, so the field sits off the origin
    els = [m.unit(), m.observable(("number", broad, broad)), m.observable(("field", 1))]
    rel = check_spectrum_relations(m, ex.time_config, els, fam, fvecs)
    s.check("spectrum_relations", rel.passed, **rel.to_dict())
    # vacuum uniqueness: random low-particle superpositions carry no extra invariant vector
    worst = 0.0
    for k in range(int(ex.lat["random_vectors"])):
        theta = float(ex.rng.uniform(-math.pi, math.pi))
        kappa = float(ex.rng.uniform(2.0, 20.0))
        c = complex(ex.rng.standard_normal(), ex.rng.standard_normal())
        v = m.vector(("super", ((1.0, ("vacuum",)), (c, ("one", ("vonmises", theta, kappa))))))
        h = group.hilbert
        pm = extract_point_masses(group.orbit_action(), h.ket(v), h.bra(v),
                                  ex.time_config.with_windows([CuboidWindow.cube(w.half_lengths[0], 0.5)
                                                               for w in ex.time_config.windows]))
        off = [abs(c) for q, c in pm.masses.items() if abs(q[0]) > 1e-6]
        exact = abs(v.c0) ** 2
        worst = max([worst] + off + [abs(pm.coefficient((0.0,)) - exact)])
    s.check("vacuum_unique", worst <= 1e-6, max_deviation=worst, samples=int(ex.lat["random_vectors"]))


def suite_qft(ex: Experiment, s: _Suite):
    if ex.kind != "lattice":
        s.skip("particle-content checks need the lattice field model")
        return
    m = ex.model
    g = qft.gaussian_smearing(ex.lat["smearing_tau"])
    rep = qft.check_condition_T(m, g, ex.states)
    s.check("condition_T", rep.passed, **rep.to_dict())
    T = qft.energy_density_smeared(m, g)
    sn = qft.seminorm_E1(m, T, ex.states)
    s.check("seminorm_T00", sn.finite, value=sn.value, achieving=sn.achieving, per_state=sn.per_state)
    cent = [A for A in ex.observables if A.data.centered]
    rep = qft.check_condition_L1(m, g, ex.states, cent[:2])
    s.check("condition_L1", rep.passed, **rep.to_dict())
    A = cent[0]
    split = qft.sc_triviality_split(m, A, ex.states)
    probe = m.vector(("super", ((1.0, ("vacuum",)), (0.7, ("one", ("vonmises", 0.3, 8.0))))))
    resid = qft.partition_identity_residual(m, A, split, probe)
    leak = max(split.support_leak.values())
    s.check("split", leak < 1e-10 and resid <= 1e-8, partition_residual=resid, **split.to_dict())
    omega = next(w for w in ex.states if m.mean_energy(w).real > 0)
    energy = m.mean_energy(omega).real
    exact = qft.check_particle_bound(m, omega, T, energy / 2, g)
    spread = exact.summary["max_abs_sigma"] - exact.summary["min_abs_sigma"]
    const = abs(exact.summary["min_abs_sigma"] - energy)
    s.check("particle_bound_exact", exact.passed and const <= 1e-8 and spread <= 1e-8,
            deviation=const, **exact.to_dict())
    P = m.observable(("wick", ("field", 0), ("field", 0)))
    pn = qft.seminorm_E1(m, P, [omega]).value
    delta = 0.4 * energy / pn
    C = m.combine([1.0, delta], [T, P], label="T00(g)+perturbation")
    pert = qft.check_particle_bound(m, omega, C, energy / 2, g)
    s.check("particle_bound_perturbed", pert.passed, coefficient=delta, **pert.to_dict())
    rows = []
    for Ai in cent:
        cov = qft.support_coverage(m, Ai, ex.functionals, ex.config)
        rows.append(cov.rows[0])
    s.check("support_coverage", all(r["coverage"] >= 0.95 for r in rows), rows=rows)
    reg = qft.buchholz_regularity_scan(m, cent[:2], ex.states[:4], ex.lat["regularity_eps"])
    s.check("regularity_scan", reg.passed, **reg.to_dict())


RUNNERS = {"spectra": suite_spectra, "classify": suite_classify, "duality": suite_duality,
           "gns": suite_gns, "qft": suite_qft}


def run_suite(doc: dict, suite: Optional[str] = None, seed: Optional[int] = None,
              threads: Optional[int] = None) -> dict:
    """Execute the selected suites and assemble the report (no wall-clock inside)."""
    doc = copy.deepcopy(doc)
    validate_config(doc)
    suite = suite or doc.get("suite", "all")
    if suite not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {suite!r}", ["/suite"])
    seed = int(doc.get("seed", 0) if seed is None else seed)
    threads = thread_count(threads if threads is not None else doc.get("threads"))
    ex = Experiment(doc, seed, threads)
    curves = {k: [] for k in PLOT_KINDS}
    results = {}
    for name in (SUITES if suite == "all" else (suite,)):
        t0 = time.perf_counter()
        s = _Suite(name, curves)
        RUNNERS[name](ex, s)
        results[name] = s.to_dict()
        log.info("suite %s: %s in %.2f s", name, "pass" if results[name]["passed"] else "FAIL",
                 time.perf_counter() - t0)
    failing = sorted(cid for r in results.values() for cid, c in r["checks"].items() if not c["passed"])
    return {"toolkit": {"name": "arveson_kit", "version": __version__},
            "manifest_sha256": manifest_hash(doc), "config": doc, "suite": suite, "seed": seed,
            "manifest": ex.manifest(), "suites": results, "curves": curves,
            "passed": not failing, "failing_checks": failing}


# plots

def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (int, float)) else str(v)


def emit_plots(report: dict, kind: str, out_dir) -> list:
    """Write one CSV per curve of the requested kind; returns the paths."""
    if kind not in PLOT_KINDS:
        raise MissingCurve(f"unknown curve kind {kind!r}")
    curves = report.get("curves", {}).get(kind) or []
    if not curves:
        raise MissingCurve(f"report has no {kind!r} curves")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, c in enumerate(curves):
        if kind == "ergodic":
            head = (f"# columns: L, |M_L|; curve={c['name']}; q={c['q']}; "
                    f"fitted decay exponent={_fmt(c['exponent'])}\n")
            rows = "L,abs_M\n" + "".join(f"{_fmt(L)},{_fmt(a)}\n" for L, a in zip(c["L"], c["abs_M"]))
        elif kind == "l1":
            head = (f"# columns: L, I_L (windowed Plancherel mass), L1 (windowed L^1 Fourier mass); "
                    f"curve={c['name']}\n")
            rows = "L,I_L,L1\n" + "".join(f"{_fmt(L)},{_fmt(a)},{_fmt(b)}\n"
                                          for L, a, b in zip(c["L"], c["I_L"], c["L1"]))
        else:
            dim = len(c["cell"])
            cols = [f"{e}{d}" for d in range(dim) for e in ("lo", "hi")]
            head = f"# columns: {', '.join(cols)} (one box per row); curve={c['name']}; cell={c['cell']}\n"
            rows = ",".join(cols) + "\n" + "".join(
                ",".join(_fmt(v) for axis in box for v in axis) + "\n" for box in c["boxes"])
        safe = re.sub(r"[^A-Za-z0-9_.=+-]+", "_", c["name"]).strip("_")
        path = out / f"{kind}_{k:03d}_{safe}.csv"
        path.write_text(head + rows)
        paths.append(path)
    return paths


# entry point

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arveson-kit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run suites of an experiment")
    run.add_argument("--config", required=True, help="experiment JSON (or the name of a bundled config)")
    run.add_argument("--suite", choices=SUITES + ("all",))
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    plot = sub.add_parser("plot", help="write CSV plot data from a report")
    plot.add_argument("--report", required=True)
    plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot.add_argument("--out", default=".")
    val = sub.add_parser("validate", help="validate an experiment document")
    val.add_argument("--config", required=True)
    return p


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and p.name in BUNDLED and p.parent == Path("."):
        return bundled_config(p.name)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            load_config(_resolve(args.config))
            print("valid")
            return 0
        if args.command == "plot":
            report = json.loads(Path(args.report).read_text())
            for path in emit_plots(report, args.kind, args.out):
                print(path)
            return 0
        doc = load_config(_resolve(args.config))
        report = run_suite(doc, args.suite, args.seed, args.threads)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = doc.get("output", {}).get("report", f"{doc['name']}.report.json")
        (out / name).write_text(dumps_report(report))
        if doc.get("output", {}).get("csv", True):
            for kind in PLOT_KINDS:
                if report["curves"][kind]:
                    emit_plots(report, kind, out / "csv" / doc["name"])
        if not report["passed"]:
            raise CheckFailure("checks failed", report["failing_checks"])
        print(f"pass: {out / name}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        for p in exc.pointers:
            print(f"  at {p}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print("fail: " + ", ".join(exc.check_ids), file=sys.stderr)
        return 1
    except MissingCurve as exc:
        print(f"missing curve: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
