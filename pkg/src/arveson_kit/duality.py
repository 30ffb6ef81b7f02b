"""Transposed actions, annihilators and the pp / continuous splitting on both sides of the pairing.

Everything on the functional side is relative to a declared finite family:
subspaces are coefficient subspaces over the family, dimensions are
numerical ranks, and reports record the family labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg, special

from .classify import classify_element, extract_point_masses
from .core import (AnalysisConfig, Element, Functional, GroupAction, Model, OrbitSamples,
                   as_parameter, grid_axes, parallel_map, sample_orbit)
from .errors import HypothesisFailed, NotAState, OverlapError, RankDeficientFamily
from .fourier import SupportSet, detect_support, orbit_fourier

RANK_TOL = 1e-10
CONSISTENT = "CONSISTENT"


class _DualModel(Model):
    """A model seen from the functional side: elements and functionals swap roles."""

    def __init__(self, model: Model):
        self.primal = model
        self.name = model.name

    def unit(self):
        raise NotImplementedError("the functional side has no distinguished unit")

    def star(self, phi):
        return self.primal.adjoint(phi)

    def adjoint(self, A):
        return self.primal.star(A)

    def element_norm(self, phi) -> float:
        return self.primal.functional_norm(phi)

    def functional_norm(self, A) -> float:
        return self.primal.element_norm(A)

    def combine(self, coeffs, handles, label=None):
        return self.primal.combine_functionals(coeffs, handles, label)

    def combine_functionals(self, coeffs, handles, label=None):
        return self.primal.combine(coeffs, handles, label)


class DualAction(GroupAction):
    """The transposed action ``(alpha*_x phi)(A) = phi(alpha_x(A))``.

    Orbit routines take handles in the order (functional-side, element-side);
    for the dual those are an element of the original model and a
    functional, so every spectral and classification routine applies with
    the roles exchanged.
    """

    def __init__(self, action: GroupAction):
        self.primal = action
        self.model = _DualModel(action.model)
        self.dim = action.dim
        self.signature = tuple(action.signature)
        self.max_frequency = tuple(action.max_frequency)
        self.lattice_axes = tuple(action.lattice_axes)
        self.periods = tuple(action.periods)
        self.name = action.name + "*"

    def pair(self, A, phi, points) -> np.ndarray:
        return self.primal.pair(phi, A, points)

    def pair_grid(self, A, phi, axes) -> np.ndarray:
        return self.primal.pair_grid(phi, A, axes)

    def translate(self, phi, y):
        move = getattr(self.primal, "translate_functional", None)
        if move is None:
            raise NotImplementedError(f"action {self.primal.name!r} cannot move functionals")
        return move(phi, as_parameter(y))

    def translate_functional(self, A, y):
        return self.primal.translate(A, as_parameter(y))

    def check_handles(self, A, phi) -> None:
        self.primal.check_handles(phi, A)


def transpose_action(action: GroupAction) -> GroupAction:
    """alpha*; transposing twice gives back the original action."""
    if isinstance(action, DualAction):
        return action.primal
    return DualAction(action)


# finite-family linear algebra

def _origin(action) -> np.ndarray:
    return np.zeros((1, action.dim))


def pairing_matrix(action, elements, functionals) -> np.ndarray:
    """``P[j, i] = phi_j(A_i)``."""
    P = np.zeros((len(functionals), len(elements)), dtype=complex)
    for j, phi in enumerate(functionals):
        for i, A in enumerate(elements):
            P[j, i] = action.pair(phi, A, _origin(action))[0]
    return P


def numerical_rank(M: np.ndarray, tol: float = RANK_TOL, scale: Optional[float] = None) -> int:
    if M.size == 0:
        return 0
    s = linalg.svdvals(M)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > tol * ref))


def null_basis(M: np.ndarray, tol: float = RANK_TOL, scale: Optional[float] = None) -> np.ndarray:
    """Orthonormal columns spanning the numerical null space of M."""
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n, dtype=complex)
    r = numerical_rank(M, tol, scale)
    _, _, vh = linalg.svd(M)
    return vh[r:].conj().T


def _family_vectors(model, handles, kind: str):
    getter = getattr(model, "element_vector" if kind == "element" else "functional_vector", None)
    if getter is None:
        return None
    return np.array([getter(h) for h in handles], dtype=complex)


def _check_independent(model, handles, kind: str, fallback: np.ndarray) -> None:
    if not handles:
        return
    V = _family_vectors(model, handles, kind)
    if V is None:
        V = fallback
    G = V.conj() @ V.T
    if numerical_rank(G, RANK_TOL) < len(handles):
        raise RankDeficientFamily(f"the {kind} family of size {len(handles)} is linearly dependent")


@dataclass
class AnnihilatorResult:
    """Annihilator of a span inside the opposing family: coefficient basis and combined handles."""

    coefficients: np.ndarray
    basis: list
    dimension: int
    max_residual: float

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "max_residual": self.max_residual,
                "basis": [h.label for h in self.basis]}


def annihilator(span, family, action) -> AnnihilatorResult:
    """Elements (or functionals) of ``span(family)`` pairing to zero with every member of ``span``.

    ``span`` and ``family`` must be on opposite sides of the pairing.  The
    dimension is ``len(family) - rank`` of the pairing matrix.
    """
    model = action.model
    span, family = list(span), list(family)
    if not family:
        raise ValueError("the opposing family must be nonempty")
    family_side = "functional" if isinstance(family[0], Functional) else "element"
    span_side = "element" if family_side == "functional" else "functional"
    if any(isinstance(h, Functional) != (family_side == "functional") for h in family):
        raise ValueError("family mixes elements and functionals")
    if any(isinstance(h, Functional) == (family_side == "functional") for h in span):
        raise ValueError("span and family must lie on opposite sides of the pairing")
    if family_side == "functional":
        P = pairing_matrix(action, span, family).T          # rows: span members
    else:
        P = pairing_matrix(action, family, span)           # rows: span members
    _check_independent(model, span, span_side, P)
    _check_independent(model, family, family_side, P.T)
    N = null_basis(P) if span else np.eye(len(family), dtype=complex)
    combine = model.combine_functionals if family_side == "functional" else model.combine
    basis = [combine(list(N[:, k]), family, label=f"ann{k}") for k in range(N.shape[1])]
    resid = float(np.abs(P @ N).max()) if span and N.size else 0.0
    return AnnihilatorResult(N, basis, N.shape[1], resid)


# orbit tensors

def _pairs(m, n):
    return [(j, i) for j in range(m) for i in range(n)]


def orbit_tensor(action, elements, functionals, window) -> tuple:
    """Samples of every orbit ``x -> phi_j(alpha_x(A_i))`` on one window: ``(values[j, i, ...], template)``."""
    pairs = _pairs(len(functionals), len(elements))
    samples = parallel_map(lambda ji: sample_orbit(action, functionals[ji[0]], elements[ji[1]], window),
                           pairs)
    shape = (len(functionals), len(elements)) + samples[0].values.shape
    vals = np.array([s.values for s in samples]).reshape(shape)
    return vals, samples[0]


def _with_values(template: OrbitSamples, values: np.ndarray, label: str = "") -> OrbitSamples:
    return OrbitSamples(template.window, template.axes, values, template.signature,
                        template.periodic, template.lattice, label)


def _cluster(freqs, tol: float = 1e-6) -> list:
    out = []
    for q in sorted(freqs):
        q = tuple(float(v) for v in q)
        if not any(max(abs(a - b) for a, b in zip(q, r)) <= tol for r in out):
            out.append(q)
    return out


def _match(q, qs, tol: float = 1e-6):
    for r in qs:
        if max(abs(a - b) for a, b in zip(q, r)) <= tol:
            return r
    return None


def point_mass_table(action, elements, functionals, config: AnalysisConfig) -> tuple:
    """Frequencies carrying point masses somewhere on the family and ``C[q][j, i] = c_q(phi_j, A_i)``."""
    pairs = _pairs(len(functionals), len(elements))
    maps = parallel_map(lambda ji: extract_point_masses(action, elements[ji[1]], functionals[ji[0]],
                                                        config), pairs, config.threads)
    qs = _cluster([q for pm in maps for q in pm.masses])
    table = {q: np.zeros((len(functionals), len(elements)), dtype=complex) for q in qs}
    for (j, i), pm in zip(pairs, maps):
        for q, c in pm.masses.items():
            table[_match(q, qs)][j, i] += c
    return qs, table


def _supports_of(tensor, template, coeffs, axis: str, config: AnalysisConfig) -> SupportSet:
    """Union of detected supports of the orbits of combined handles (columns of ``coeffs``)."""
    d = template.dim
    out = SupportSet.empty(d)
    if coeffs.size == 0:
        return out
    for k in range(coeffs.shape[1]):
        c = coeffs[:, k]
        if axis == "element":
            combined = np.tensordot(tensor, c, axes=([1], [0]))      # (m, grid)
        else:
            combined = np.tensordot(c, tensor, axes=([0], [0]))      # (n, grid)
        for row in combined:
            if np.abs(row).max() < config.abs_floor:
                continue
            dens = orbit_fourier(_with_values(template, row), taper=config.taper, tau_rel=config.tau_rel)
            out = out.union(detect_support(dens, config.tau_rel))
    return out


# orthogonality of disjoint spectral supports

@dataclass
class OrthogonalityReport:
    passed: bool
    max_violation: float
    rows: list
    tolerance: float
    family: dict

    def to_dict(self) -> dict:
        return {"passed": self.passed, "max_violation": self.max_violation, "tolerance": self.tolerance,
                "rows": self.rows, "family": self.family}


def family_supports(action, elements, functionals, config: AnalysisConfig) -> tuple:
    """Detected spectral support of each element and dual support of each functional."""
    tensor, template = orbit_tensor(action, elements, functionals, config.largest)
    el, fn = [], []
    per = {}
    for j in range(len(functionals)):
        for i in range(len(elements)):
            row = tensor[j, i]
            if np.abs(row).max() < config.abs_floor:
                per[j, i] = SupportSet.empty(template.dim)
                continue
            dens = orbit_fourier(_with_values(template, row), taper=config.taper, tau_rel=config.tau_rel)
            per[j, i] = detect_support(dens, config.tau_rel)
    for i in range(len(elements)):
        el.append(SupportSet.empty(template.dim).union(*[per[j, i] for j in range(len(functionals))]))
    for j in range(len(functionals)):
        fn.append(SupportSet.empty(template.dim).union(*[per[j, i] for i in range(len(elements))]))
    return el, fn


def _disjoint(a: SupportSet, b: SupportSet) -> bool:
    cell = np.maximum(np.asarray(a.cell, dtype=float), np.asarray(b.cell, dtype=float))
    grown = a.dilated(cell)
    return not any(grown.intersects_box(box) for box in b.boxes)


def check_orthogonality(delta: SupportSet, delta2: SupportSet, action, elements, functionals,
                        config: AnalysisConfig, supports=None, eigen_functionals=(),
                        continuous_elements=()) -> OrthogonalityReport:
    """``|phi(A)|`` for phi with dual support in ``delta`` and A with support in ``delta2``.

    Optionally also pairs eigen-functionals with elements classified continuous.
    """
    if not _disjoint(delta, delta2):
        raise OverlapError("the two frequency sets overlap after one-cell dilation")
    el_supp, fn_supp = supports if supports is not None else \
        family_supports(action, elements, functionals, config)
    model = action.model
    rows, worst, ok = [], 0.0, True
    for j, phi in enumerate(functionals):
        s = fn_supp[j]
        if s.is_empty() or not delta.covers(s):
            continue
        for i, A in enumerate(elements):
            t = el_supp[i]
            if t.is_empty() or not delta2.covers(t):
                continue
            val = abs(action.pair(phi, A, _origin(action))[0])
            bound = config.tol_pair * model.functional_norm(phi) * model.element_norm(A)
            ok = ok and val <= bound
            worst = max(worst, val)
            rows.append({"functional": phi.label, "element": A.label, "abs_pairing": float(val)})
    for phi in eigen_functionals:
        for A in continuous_elements:
            val = abs(action.pair(phi, A, _origin(action))[0])
            bound = config.tol_pair * model.functional_norm(phi) * model.element_norm(A)
            ok = ok and val <= bound
            worst = max(worst, val)
            rows.append({"functional": phi.label, "element": A.label, "abs_pairing": float(val),
                         "kind": "pp-vs-continuous"})
    family = {"elements": [A.label for A in elements], "functionals": [f.label for f in functionals]}
    return OrthogonalityReport(ok, float(worst), rows, config.tol_pair, family)


# necessary conditions

@dataclass
class NecessaryReport:
    verdict: str
    violated: list
    dimensions: list
    part_b: dict
    part_c: dict
    family: dict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "violated": list(self.violated), "dimensions": self.dimensions,
                "part_b": self.part_b, "part_c": self.part_c, "family": self.family}


def _sample_points(template: OrbitSamples, count: int = 64) -> tuple:
    idx = np.unique(np.linspace(0, template.values.size - 1, count).round().astype(int))
    pts = template.points()[idx]
    return idx, pts


def _phase(points: np.ndarray, q, signature) -> np.ndarray:
    return np.exp(1j * points @ (np.asarray(q, dtype=float) * np.asarray(signature, dtype=float)))


def _subspace_gap(A: np.ndarray, B: np.ndarray) -> float:
    """Spectral norm distance of the orthogonal projectors onto span(A), span(B)."""
    def proj(X):
        if X.size == 0:
            return np.zeros((X.shape[0], X.shape[0]), dtype=complex)
        Q = linalg.orth(X, rcond=1e-8)
        return Q @ Q.conj().T
    return float(np.linalg.norm(proj(A) - proj(B), 2))


def check_necessary_conditions(action, elements, functionals, config: AnalysisConfig,
                               extra_q=((0.0,),)) -> NecessaryReport:
    """Family-relative checks of the consequences of a splitting ``A = A_pp (+) A_c``.

    (a) ``dim A~({q}) >= dim A~_*({q})`` at every detected point frequency;
    (b) the annihilator of the eigen-elements equals the dual continuous part;
    (c) ``Sp_pp alpha`` contains ``Sp_pp alpha*`` and ``Sp_c alpha`` contains ``Sp_c alpha*``.
    """
    m, n = len(functionals), len(elements)
    qs, table = point_mass_table(action, elements, functionals, config)
    for q in extra_q:
        q = tuple(float(v) for v in np.atleast_1d(q))
        if _match(q, qs) is None:
            qs.append(q)
            table[q] = np.zeros((m, n), dtype=complex)
    qs = sorted(qs)
    small, small_t = orbit_tensor(action, elements, functionals, config.windows[0])
    idx, pts = _sample_points(small_t)
    F = small.reshape(m, n, -1)[:, :, idx]                     # (m, n, x)
    F0 = pairing_matrix(action, elements, functionals)           # (m, n)
    O = np.concatenate([F.transpose(0, 2, 1).reshape(-1, n), F0], axis=0)
    Os = np.concatenate([F.transpose(1, 2, 0).reshape(-1, m), F0.T], axis=0)
    scale = max(float(np.abs(O).max()), 1e-300)
    null_O = n - numerical_rank(O, scale=scale * math.sqrt(O.shape[0]))
    null_Os = m - numerical_rank(Os, scale=scale * math.sqrt(Os.shape[0]))
    dims, violated, eigen_cols = [], [], []
    sp_pp, sp_pp_dual = [], []
    for q in qs:
        ph = _phase(pts, q, action.signature)
        R = F - ph[None, None, :] * F0[:, :, None]
        Re = R.transpose(0, 2, 1).reshape(-1, n)
        Rf = R.transpose(1, 2, 0).reshape(-1, m)
        ne = null_basis(Re, scale=scale * math.sqrt(Re.shape[0]))
        de = ne.shape[1] - null_O
        df = null_basis(Rf, scale=scale * math.sqrt(Rf.shape[0])).shape[1] - null_Os
        if de > 0:
            eigen_cols.append(ne)
            sp_pp.append(q)
        if df > 0:
            sp_pp_dual.append(q)
        dims.append({"q": list(q), "dim_elements": int(de), "dim_functionals": int(df),
                     "ok": bool(de >= df)})
    if not all(d["ok"] for d in dims):
        violated.append("a")
    # (b)
    E = np.concatenate(eigen_cols, axis=1) if eigen_cols else np.zeros((n, 0), dtype=complex)
    ann = null_basis((F0 @ E).T) if E.shape[1] else np.eye(m, dtype=complex)
    C = np.concatenate([table[q].T for q in qs], axis=0) if qs else np.zeros((0, m))
    cscale = max(float(np.abs(C).max()) if C.size else 0.0, 1e-300)
    dual_c = null_basis(C, tol=1e-8, scale=cscale) if np.any(C) else np.eye(m, dtype=complex)
    gap = _subspace_gap(ann, dual_c)
    part_b = {"annihilator_dim": int(ann.shape[1]), "dual_continuous_dim": int(dual_c.shape[1]),
              "projector_gap": gap, "ok": bool(gap <= 1e-6)}
    if not part_b["ok"]:
        violated.append("b")
    # (c)
    Ce = np.concatenate([table[q] for q in qs], axis=0) if qs else np.zeros((0, n))
    el_c = null_basis(Ce, tol=1e-8, scale=cscale) if np.any(Ce) else np.eye(n, dtype=complex)
    big, big_t = orbit_tensor(action, elements, functionals, config.largest)
    sp_c = _supports_of(big, big_t, el_c, "element", config)
    sp_c_dual = _supports_of(big, big_t, dual_c, "functional", config)
    pp_ok = all(_match(q, sp_pp) is not None for q in sp_pp_dual)
    tol = tuple(np.maximum(np.asarray(sp_c.cell, float), np.asarray(sp_c_dual.cell, float))) \
        if not (sp_c.is_empty() or sp_c_dual.is_empty()) else None
    c_ok = sp_c_dual.is_empty() or (not sp_c.is_empty() and sp_c.covers(sp_c_dual, tol))
    part_c = {"Sp_pp": [list(q) for q in sp_pp], "Sp_pp_dual": [list(q) for q in sp_pp_dual],
              "Sp_c": sp_c.to_dict(), "Sp_c_dual": sp_c_dual.to_dict(),
              "pp_ok": bool(pp_ok), "c_ok": bool(c_ok)}
    if not (pp_ok and c_ok):
        violated.append("c")
    verdict = CONSISTENT if not violated else f"VIOLATED({violated[0]})"
    family = {"elements": [A.label for A in elements], "functionals": [f.label for f in functionals]}
    return NecessaryReport(verdict, violated, dims, part_b, part_c, family)


# sufficient condition

@dataclass
class DecompositionResult:
    """Splitting ``A = Span{I} (+) ker omega0`` and ``A_* = Span{omega0} (+) ker I``."""

    state: object
    unit: object
    model: object
    hypothesis: list
    identity_residual: float
    idempotence_residual: float
    sp_c: SupportSet
    sp_c_dual: SupportSet
    spectra_equal: bool

    def P_pp(self, A):
        return self.model.combine([self.model_value(A)], [self.unit], label=f"Ppp({A.label})")

    def P_c(self, A):
        return _centered(self.model, A, self.model_value(A), self.unit)

    def Q_pp(self, phi):
        return self.model.combine_functionals([self.unit_value(phi)], [self.state],
                                              label=f"Qpp({phi.label})")

    def Q_c(self, phi):
        return self.model.combine_functionals([1.0, -self.unit_value(phi)], [phi, self.state],
                                              label=f"Qc({phi.label})")

    def model_value(self, A) -> complex:
        return _value(self._action, self.state, A)

    def unit_value(self, phi) -> complex:
        return _value(self._action, phi, self.unit)

    _action: object = None

    def to_dict(self) -> dict:
        return {"hypothesis": self.hypothesis, "identity_residual": self.identity_residual,
                "idempotence_residual": self.idempotence_residual, "Sp_c": self.sp_c.to_dict(),
                "Sp_c_dual": self.sp_c_dual.to_dict(), "spectra_equal": self.spectra_equal}


def _value(action, phi, A) -> complex:
    return complex(action.pair(phi, A, _origin(action))[0])


def _centered(model, A, value, unit):
    out = model.combine([1.0, -value], [A, unit], label=f"Pc({A.label})")
    data = getattr(out, "data", None)
    if hasattr(data, "c") and hasattr(A.data, "c") and value == A.data.c:
        # exact cancellation of the constant term for normal-ordered forms
        from dataclasses import replace
        out = Element(out.model_id, replace(data, c=0.0), out.label, out.locality_radius)
    return out


def _difference_norm(model, A, B) -> float:
    return model.element_norm(model.combine([1.0, -1.0], [A, B]))


def build_decomposition(omega0: Functional, unit: Element, action, elements, functionals,
                        config: AnalysisConfig) -> DecompositionResult:
    """Verify ``ker omega0 in A_c`` on the generators and return the two splittings.

    Raises :class:`HypothesisFailed` listing every generator ``A - omega0(A) I``
    whose ergodic averages do not vanish, with the offending frequencies.
    """
    model = action.model
    if not omega0.is_state:
        raise NotAState(f"functional {omega0.label!r} is not a state")
    centered = [_centered(model, A, _value(action, omega0, A), unit) for A in elements]
    report, failures = [], []
    for A, B in zip(elements, centered):
        cl = classify_element(action, B, functionals, config)
        qs = [list(q) for q in cl.retained_frequencies()] + \
             [list(f[1]) for f in cl.probe_failures]
        report.append({"generator": A.label, "in_continuous": cl.in_continuous,
                       "ac_status": cl.ac_status, "frequencies": qs})
        if not cl.in_continuous:
            failures.append({"generator": A.label, "frequencies": qs})
    if failures:
        first = failures[0]
        where = ", ".join(f"q={q[0]:g}" if len(q) == 1 else f"q={tuple(q)}" for q in first["frequencies"][:3])
        raise HypothesisFailed(f"ker omega0 is not continuous: generator {first['generator']} "
                               f"has non-vanishing ergodic averages at {where}", failures)
    res = DecompositionResult(omega0, unit, model, report, 0.0, 0.0, SupportSet.empty(action.dim),
                              SupportSet.empty(action.dim), True, action)
    id_res, idem = 0.0, 0.0
    for A in elements:
        pp, pc = res.P_pp(A), res.P_c(A)
        total = model.combine([1.0, 1.0], [pp, pc])
        id_res = max(id_res, _difference_norm(model, total, A))
        idem = max(idem, _difference_norm(model, res.P_pp(pp), pp))
    tensor, template = orbit_tensor(action, centered, functionals, config.largest)
    eye_n = np.eye(len(centered), dtype=complex)
    sp_c = _supports_of(tensor, template, eye_n, "element", config)
    dual = [res.Q_c(phi) for phi in functionals]
    dtensor, _ = orbit_tensor(action, elements, dual, config.largest)
    sp_c_dual = _supports_of(dtensor, template, np.eye(len(dual), dtype=complex), "functional", config)
    equal = sp_c.equals_within(sp_c_dual) if not (sp_c.is_empty() and sp_c_dual.is_empty()) else True
    res.identity_residual, res.idempotence_residual = float(id_res), float(idem)
    res.sp_c, res.sp_c_dual, res.spectra_equal = sp_c, sp_c_dual, bool(equal)
    return res


# the two-vacua toy

class TwoVacuaModel(Model):
    """Functions on ``[-inf, inf] x T`` spanned by ``I, erf(x), e^{-x^2} z, e^{-x^2} zbar``.

    The flow is ``(x, z) -> (x + t, z e^{i gamma t})``.  Functionals are
    combinations of the point masses at ``x = +-inf`` (times Haar measure on
    the circle), ``nu = N(0, s^2) x Haar`` and ``eta = N(0, s^2) x zbar Haar``
    with its conjugate.  The two boundary states are invariant; the only
    invariant elements are constants.
    """

    element_names = ("I", "erf", "gz", "gzbar")
    functional_names = ("omega+", "omega-", "nu", "eta", "etabar")

    def __init__(self, gamma: float = math.sqrt(2.0), s: float = 1.0):
        self.gamma, self.s = float(gamma), float(s)
        self.c2 = 1.0 + 2.0 * self.s ** 2
        self.name = f"two_vacua[gamma={self.gamma:.12g},s={self.s:g}]"

    def element(self, coeffs, label=None) -> Element:
        return Element(self.name, np.asarray(coeffs, dtype=complex).reshape(4), label)

    def functional(self, coeffs, label=None) -> Functional:
        c = np.asarray(coeffs, dtype=complex).reshape(5)
        is_state = bool(np.all(c.real >= 0) and np.all(c.imag == 0) and np.all(c[3:] == 0)
                        and abs(c.sum() - 1) < 1e-12)
        return Functional(self.name, c, is_state, None, label)

    def elements(self) -> list:
        return [self.element(np.eye(4)[k], nm) for k, nm in enumerate(self.element_names)]

    def functionals(self) -> list:
        return [self.functional(np.eye(5)[k], nm) for k, nm in enumerate(self.functional_names)]

    def unit(self) -> Element:
        return self.elements()[0]

    def kernel(self, t: np.ndarray) -> np.ndarray:
        """``K[x, j, i] = phi_j(alpha_t(A_i))`` for the named generators."""
        t = np.asarray(t, dtype=float)
        K = np.zeros(t.shape + (5, 4), dtype=complex)
        K[..., 0, 0] = K[..., 1, 0] = K[..., 2, 0] = 1.0
        K[..., 0, 1], K[..., 1, 1] = 1.0, -1.0
        K[..., 2, 1] = special.erf(t / math.sqrt(self.c2))
        g = np.exp(-t * t / self.c2) / math.sqrt(self.c2)
        K[..., 3, 2] = g * np.exp(1j * self.gamma * t)
        K[..., 4, 3] = g * np.exp(-1j * self.gamma * t)
        return K

    def star(self, A: Element) -> Element:
        c = np.conj(A.data)
        return self.element([c[0], c[1], c[3], c[2]], None if A.label is None else A.label + "*")

    def adjoint(self, phi: Functional) -> Functional:
        c = np.conj(phi.data)
        return self.functional([c[0], c[1], c[2], c[4], c[3]],
                               None if phi.label is None else "bar(" + phi.label + ")")

    def element_norm(self, A: Element) -> float:
        return float(np.abs(A.data).sum())

    def functional_norm(self, phi: Functional) -> float:
        return float(np.abs(phi.data).sum())

    def combine(self, coeffs, elements, label=None) -> Element:
        v = sum((complex(a) * A.data for a, A in zip(coeffs, elements)), np.zeros(4, dtype=complex))
        return self.element(v, label)

    def combine_functionals(self, coeffs, functionals, label=None) -> Functional:
        v = sum((complex(a) * f.data for a, f in zip(coeffs, functionals)), np.zeros(5, dtype=complex))
        return self.functional(v, label)

    def element_vector(self, A: Element) -> np.ndarray:
        return A.data

    def functional_vector(self, phi: Functional) -> np.ndarray:
        return phi.data


class TwoVacuaFlow(GroupAction):
    dim = 1
    signature = (1,)
    lattice_axes = (False,)
    periods = (None,)
    name = "flow"

    def __init__(self, model: TwoVacuaModel):
        self.model = model
        # orbit transforms carry the factor exp(-c2 p^2 / 4) about 0 or +-gamma
        self.max_frequency = (model.gamma + 16.0 / math.sqrt(model.c2),)

    def pair(self, phi, A, points) -> np.ndarray:
        t = np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]
        K = self.model.kernel(t)
        return np.einsum("j,xji,i->x", phi.data, K, A.data)

    def translate(self, A, y):
        raise NotImplementedError("translated generators leave the four-dimensional span")


@dataclass
class ToySystem:
    model: TwoVacuaModel
    action: TwoVacuaFlow
    elements: list
    functionals: list
    notes: list = field(default_factory=list)


def two_vacua_toy(gamma: float = math.sqrt(2.0), s: float = 1.0) -> ToySystem:
    """Commutative system with two invariant states but only constant invariant elements."""
    model = TwoVacuaModel(gamma, s)
    return ToySystem(model, TwoVacuaFlow(model), model.elements(), model.functionals(),
                     ["two ergodic boundary components at x = -inf and x = +inf",
                      "invariant functionals omega+, omega-; invariant elements: multiples of I"])
