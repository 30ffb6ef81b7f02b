"""GNS representations, implementing unitary groups and the Hilbert-space side of the spectral theory.

Matrix models get a genuine GNS construction from the Gram matrix
``omega0(E_a^* E_b)`` of the matrix units.  For the lattice chain the Fock
representation built into the model is wrapped with the same interface.
Spectral questions about U are answered with the ordinary orbit machinery
applied to ``t -> <Phi, U(t) Psi>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .classify import AC, analyse_pair, classify_element, component_spectra, extract_point_masses
from .core import AnalysisConfig, CuboidWindow, Element, Functional, GroupAction, Model
from .duality import transpose_action
from .errors import NotAState, NotInvariant
from .fourier import SupportSet, orbit_support
from .models.lattice import FockVector, LatticeFieldModel, LatticeTimeAction
from .models.matrix import MatrixModel

GRAM_TOL = 1e-10


@dataclass
class GnsData:
    """``(pi, H, Omega)`` for a state; ``kind`` is ``"matrix"`` or ``"fock"``."""

    kind: str
    model: Model
    state: Functional
    dimension: Optional[int]
    omega: object
    coords: Optional[np.ndarray] = None          # W: matrix-unit coordinates of the orthonormal basis
    generators: list = field(default_factory=list)

    def represent(self, A: Element):
        """``pi(A)``: a matrix (matrix case) or a callable on Fock vectors."""
        if self.kind == "fock":
            return lambda vec: self.model.apply(A, vec)
        m = self.model
        W = self.coords
        rho = self.state.data
        # <e_k, pi(A) e_l> = sum conj(W[a,k]) W[b,l] omega0(E_a^* A E_b)
        units = _units(m)
        X = np.array([[np.sum(rho.T * (Ea.conj().T @ A.data @ Eb)) for Eb in units] for Ea in units])
        return W.conj().T @ X @ W

    def vector_of(self, A: Element):
        """``pi(A) Omega``."""
        if self.kind == "fock":
            return self.model.apply(A, self.omega)
        return self.represent(A) @ self.omega

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dimension": self.dimension, "state": self.state.label,
                "generators": [g.label for g in self.generators]}


def _units(m: MatrixModel) -> list:
    out = []
    for a in range(m.n):
        for b in range(m.n):
            if m.block_mask[a, b]:
                E = np.zeros((m.n, m.n), dtype=complex)
                E[a, b] = 1.0
                out.append(E)
    return out


def gns_construct(model, omega0: Functional) -> GnsData:
    """GNS data of a state; the Gram matrix of the matrix units fixes the dimension."""
    if isinstance(model, LatticeFieldModel):
        vac = model.vector(("vacuum",))
        return GnsData("fock", model, omega0, None, vac,
                       generators=[model.observable(("field", 0)), model.observable(("momentum", 0))])
    if not isinstance(model, MatrixModel):
        raise TypeError("GNS construction is available for matrix and lattice models")
    units = _units(model)
    rho = omega0.data
    G = np.array([[np.sum(rho.T * (Ea.conj().T @ Eb)) for Eb in units] for Ea in units])
    if not np.allclose(G, G.conj().T, atol=GRAM_TOL):
        raise NotAState(f"{omega0.label!r}: Gram matrix is not Hermitian")
    lam, V = linalg.eigh(G)
    scale = max(1.0, float(np.abs(lam).max()))
    if lam.min() < -GRAM_TOL * scale:
        raise NotAState(f"{omega0.label!r}: Gram matrix has eigenvalue {lam.min():.3g} < 0")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise NotAState(f"{omega0.label!r}: not normalised")
    keep = lam > GRAM_TOL * scale
    # deterministic ordering and phases of the basis
    V = V[:, keep]
    lam = lam[keep]
    for k in range(V.shape[1]):
        j = int(np.argmax(np.abs(V[:, k]) > 1e-8))
        V[:, k] *= np.conj(V[j, k]) / abs(V[j, k])
    W = V / np.sqrt(lam)
    # [I] is the sum of the diagonal matrix units
    diag = np.array([1.0 if np.nonzero(E)[0][0] == np.nonzero(E)[1][0] else 0.0 for E in units])
    omega = W.conj().T @ (G @ diag)
    gens = [model.element(E, lbl) for E, lbl in zip(units, [u.label for u in model.matrix_units()])]
    return GnsData("matrix", model, omega0, int(keep.sum()), omega, W, gens)


# Hilbert-side handles

class HilbertModel(Model):
    """Vectors of a GNS space as handles: elements are kets, functionals are bras."""

    def __init__(self, gns: GnsData):
        self.gns = gns
        self.name = f"hilbert[{gns.model.name}]"

    def ket(self, vec, label: Optional[str] = None) -> Element:
        return Element(self.name, vec, label)

    def bra(self, vec, label: Optional[str] = None) -> Functional:
        return Functional(self.name, vec, False, None, label)

    def inner(self, a, b) -> complex:
        if isinstance(a, FockVector):
            return a.inner(b)
        return complex(np.vdot(a, b))

    def element_norm(self, A) -> float:
        return math.sqrt(max(self.inner(A.data, A.data).real, 0.0))

    def functional_norm(self, phi) -> float:
        return math.sqrt(max(self.inner(phi.data, phi.data).real, 0.0))

    def combine(self, coeffs, elements, label=None):
        return self.ket(_lincomb(coeffs, [e.data for e in elements]), label)

    def combine_functionals(self, coeffs, functionals, label=None):
        return self.bra(_lincomb([np.conj(c) for c in coeffs], [f.data for f in functionals]), label)


def _lincomb(coeffs, vecs):
    out = None
    for c, v in zip(coeffs, vecs):
        term = v.scaled(complex(c)) if isinstance(v, FockVector) else complex(c) * v
        out = term if out is None else (out.plus(term) if isinstance(out, FockVector) else out + term)
    return out


class UnitaryOrbitAction(GroupAction):
    """``t -> <Phi, U(t) Psi>`` with ``U(t) = e^{itK}``: spectrum of K at +E."""

    dim = 1
    signature = (1,)
    lattice_axes = (False,)
    periods = (None,)
    name = "unitary"

    def __init__(self, group: "UnitaryGroup"):
        self.group = group
        self.model = group.hilbert
        self.max_frequency = (group.max_energy,)

    def pair(self, phi, A, points) -> np.ndarray:
        t = np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]
        return self.group.correlation(phi.data, A.data, t)

    def translate(self, A, y):
        t = float(np.atleast_1d(getattr(y, "coordinates", y))[0])
        return self.model.ket(self.group.apply(t, A.data), A.label)


@dataclass
class UnitaryGroup:
    """Implementing unitaries ``U(t) = e^{itK}`` with ``U(t) Omega = Omega``."""

    gns: GnsData
    action: GroupAction
    eigenvalues: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None
    bands: dict = field(default_factory=dict)
    hilbert: Optional[HilbertModel] = None
    max_energy: float = 0.0

    def apply(self, t: float, vec):
        if self.gns.kind == "fock":
            return self.gns.model.evolve_vector(vec, t)
        V, lam = self.eigenvectors, self.eigenvalues
        return V @ (np.exp(1j * t * lam) * (V.conj().T @ vec))

    def matrix(self, t: float) -> np.ndarray:
        V, lam = self.eigenvectors, self.eigenvalues
        return (V * np.exp(1j * t * lam)) @ V.conj().T

    def correlation(self, bra, ket, t: np.ndarray) -> np.ndarray:
        if self.gns.kind == "fock":
            m = self.gns.model
            out = np.full(t.shape, np.conj(bra.c0) * ket.c0, dtype=complex)
            w1 = np.conj(bra.c1) * ket.c1
            nz = np.abs(w1) > 0
            if nz.any():
                out += np.exp(1j * np.outer(t, m.omega[nz])) @ w1[nz]
            if bra.c2 is not None and ket.c2 is not None:
                iu = np.triu_indices(m.N)
                mult = np.where(iu[0] == iu[1], 1.0, 2.0)
                w2 = (np.conj(bra.c2) * ket.c2)[iu] * mult
                nz = np.abs(w2) > 1e-300
                if nz.any():
                    e2 = (m.omega[:, None] + m.omega[None, :])[iu][nz]
                    w2 = w2[nz]
                    for s in range(0, t.size, 64):
                        out[s:s + 64] += np.exp(1j * np.outer(t[s:s + 64], e2)) @ w2
            return out
        V, lam = self.eigenvectors, self.eigenvalues
        a = V.conj().T @ bra
        b = V.conj().T @ ket
        return np.exp(1j * np.outer(t, lam)) @ (np.conj(a) * b)

    def orbit_action(self) -> UnitaryOrbitAction:
        return UnitaryOrbitAction(self)

    def to_dict(self) -> dict:
        out = {"kind": self.gns.kind, "max_energy": self.max_energy}
        if self.eigenvalues is not None:
            out["eigenvalues"] = [float(v) for v in np.round(self.eigenvalues, 12)]
        if self.bands:
            out["bands"] = {k: list(v) for k, v in self.bands.items()}
        return out


def implementing_group(gns: GnsData, action, t_grid=None) -> UnitaryGroup:
    """The unitary group implementing the action in the GNS space.

    Raises :class:`NotInvariant` if the state is not invariant on the
    generators at some grid time.
    """
    t_grid = np.linspace(-3.0, 3.0, 10) if t_grid is None else np.asarray(t_grid, dtype=float)
    state = gns.state
    for A in gns.generators:
        vals = action.pair(state, A, t_grid[:, None])
        ref = action.pair(state, A, np.zeros((1, 1)))[0]
        bad = np.abs(vals - ref) > 1e-8 * max(1.0, abs(ref))
        if bad.any():
            k = int(np.argmax(bad))
            raise NotInvariant(f"state {state.label!r} is not invariant: {A.label} at t={t_grid[k]:.6g}")
    if gns.kind == "fock":
        m = gns.model
        group = UnitaryGroup(gns, action, bands={"one_particle": (m.band[0], m.band[1]),
                                                 "two_particle": (2 * m.band[0], 2 * m.band[1])},
                             max_energy=2 * m.band[1])
        group.hilbert = HilbertModel(gns)
        return group
    m = gns.model
    units = _units(m)
    rho = state.data
    W = gns.coords
    # generator: [alpha_t(E_b)] = e^{it d_b} [E_b]
    d = np.array([m.differences[np.nonzero(E)][0] for E in units])
    Gd = np.array([[np.sum(rho.T * (Ea.conj().T @ Eb)) * d[b] for b, Eb in enumerate(units)]
                   for Ea in units])
    K = W.conj().T @ Gd @ W
    K = 0.5 * (K + K.conj().T)
    lam, V = linalg.eigh(K)
    lam = np.where(np.abs(lam) < 1e-12, 0.0, lam)
    group = UnitaryGroup(gns, action, lam, V, max_energy=float(max(np.abs(lam).max(), 1.0)))
    group.hilbert = HilbertModel(gns)
    return group


def implementation_error(group: UnitaryGroup, t_grid=None) -> dict:
    """Max errors of ``U pi(A) U^-1 = pi(alpha_t A)`` and ``U Omega = Omega`` on a 10-point grid."""
    t_grid = np.linspace(-3.0, 3.0, 10) if t_grid is None else np.asarray(t_grid, dtype=float)
    gns = group.gns
    conj_err, vac_err = 0.0, 0.0
    if gns.kind == "fock":
        m = gns.model
        probe = m.vector(("super", ((1.0, ("vacuum",)), (0.5, ("one", ("vonmises", 0.7, 10.0))))))
        for t in t_grid:
            vac_err = max(vac_err, group.apply(t, gns.omega).plus(gns.omega.scaled(-1)).norm())
            for A in gns.generators:
                moved = group.action.translate(A, t)
                lhs = group.apply(t, m.apply(A, group.apply(-t, probe)))
                rhs = m.apply(moved, probe)
                conj_err = max(conj_err, lhs.plus(rhs.scaled(-1)).norm())
        return {"conjugation": conj_err, "vacuum": vac_err}
    for t in t_grid:
        U = group.matrix(t)
        vac_err = max(vac_err, float(np.linalg.norm(U @ gns.omega - gns.omega)))
        for A in gns.generators:
            lhs = U @ gns.represent(A) @ U.conj().T
            rhs = gns.represent(group.action.translate(A, t))
            conj_err = max(conj_err, float(np.abs(lhs - rhs).max()))
    return {"conjugation": conj_err, "vacuum": vac_err}


def hilbert_parts(group: UnitaryGroup) -> dict:
    """Spectral subspaces of U: bases in the matrix case, sector descriptors for the Fock space."""
    if group.gns.kind == "matrix":
        return {"H_pp": group.eigenvectors, "H_c": np.zeros((group.eigenvectors.shape[0], 0)),
                "H_ac": np.zeros((group.eigenvectors.shape[0], 0)),
                "H_sc": np.zeros((group.eigenvectors.shape[0], 0)),
                "eigenvalues": group.eigenvalues,
                "flag": "finite-dimensional: purely point"}
    return {"H_pp": "Span{Omega}", "H_c": "orthogonal complement of Omega",
            "H_ac": ["one-particle sector", "two-particle sector"], "H_sc": [],
            "measure_types": {"one_particle": "absolutely continuous on [m, sqrt(m^2+4)]",
                              "two_particle": "absolutely continuous on [2m, 2 sqrt(m^2+4)]"},
            "flag": "particle-number cutoff 2"}


# transfer and spectrum relations

def spectral_content(group: UnitaryGroup, vec, window: CuboidWindow, tau_rel: float = 1e-6,
                     taper: str = "auto") -> SupportSet:
    """Detected support of the spectral measure of a vector (transform of ``<v, U(t) v>``)."""
    act = group.orbit_action()
    h = group.hilbert
    return orbit_support(act, h.bra(vec), h.ket(vec), window, tau_rel, taper)


@dataclass
class TransferCheck:
    passed: bool
    rows: list
    violations: list

    def to_dict(self) -> dict:
        return {"passed": self.passed, "rows": self.rows, "violations": self.violations}


def _norm(v) -> float:
    return v.norm() if isinstance(v, FockVector) else float(np.linalg.norm(v))


def check_transfer(group: UnitaryGroup, elements, vectors, config: AnalysisConfig,
                   functionals=None) -> TransferCheck:
    """``pi(A) H~(D2) in H~(D1 + D2)`` for detected D1 of A and D2 of each vector.

    For matrix models the containment is also checked exactly with the
    eigenprojections of U.  With ``functionals`` given, continuous elements
    are checked for point-mass-free ``pi(A) Omega`` and AC ones for an AC
    spectral measure of ``pi(A) Omega``.
    """
    gns = group.gns
    model, action = gns.model, group.action
    fam = functionals if functionals is not None else _default_functionals(gns)
    window = config.largest
    uwin = _unitary_window(group, config)
    rows, violations = [], []
    d1s = {}
    for A in elements:
        d1 = SupportSet.empty(1)
        for phi in fam:
            d1 = d1.union(orbit_support(action, phi, A, window, config.tau_rel, config.taper))
        d1s[A.label] = d1
    for A in elements:
        d1 = d1s[A.label]
        for k, v in enumerate(vectors):
            if _norm(v) == 0:
                continue
            out = gns.represent(A)(v) if gns.kind == "fock" else gns.represent(A) @ v
            if _norm(out) < 1e-12:
                rows.append({"element": A.label, "vector": k, "image": "zero"})
                continue
            d2 = spectral_content(group, v, uwin, config.tau_rel, config.taper)
            got = spectral_content(group, out, uwin, config.tau_rel, config.taper)
            allowed = d1.sumset(d2).dilated()
            ok = allowed.covers(got)
            exact = None
            if gns.kind == "matrix":
                exact = _exact_leak(group, A, v, out)
                ok = ok and exact <= 1e-12
            row = {"element": A.label, "vector": k, "ok": bool(ok)}
            if exact is not None:
                row["exact_leak"] = exact
            rows.append(row)
            if not ok:
                violations.append({"element": A.label, "vector": k})
    if functionals is not None and gns.kind == "fock":
        for A in elements:
            cl = classify_element(action, A, fam, config)
            if not cl.in_continuous:
                continue
            img = gns.vector_of(A)
            if _norm(img) < 1e-12:
                continue
            h = group.hilbert
            uact = group.orbit_action()
            ucfg = config.with_windows(_unitary_ladder(group, config))
            pa = analyse_pair(uact, h.ket(img), h.bra(img), ucfg, A.label)
            nonzero = [q for q in pa.point_masses.masses if abs(q[0]) > 1e-8]
            row = {"element": A.label, "check": "continuity", "ok": not nonzero}
            if cl.ac_status == AC:
                row["ac_verdict"] = pa.verdict
                row["ok"] = row["ok"] and pa.verdict == AC
            rows.append(row)
            if not row["ok"]:
                violations.append({"element": A.label, "check": "continuity/ac"})
    return TransferCheck(not violations, rows, violations)


def _exact_leak(group: UnitaryGroup, A, v, out) -> float:
    """Norm of the part of ``pi(A) v`` at energies outside ``{e_A + e : e in spec(v)}``."""
    lam, V = group.eigenvalues, group.eigenvectors
    m = group.gns.model
    freqs = np.unique(np.round(m.differences[np.abs(A.data) > 0], 12))
    cv = V.conj().T @ v
    ev = np.unique(np.round(lam[np.abs(cv) > 1e-12], 12))
    allowed = {round(a + b, 9) for a in freqs for b in ev}
    co = V.conj().T @ out
    bad = [abs(c) ** 2 for c, e in zip(co, lam) if round(float(e), 9) not in allowed]
    return math.sqrt(sum(bad))


def _default_functionals(gns: GnsData) -> list:
    if gns.kind == "matrix":
        return gns.model.vector_functionals()
    return [gns.state]


def _unitary_window(group: UnitaryGroup, config: AnalysisConfig) -> CuboidWindow:
    return _unitary_ladder(group, config)[-1]


def _unitary_ladder(group: UnitaryGroup, config: AnalysisConfig) -> list:
    if group.action.dim == 1 and np.isfinite(group.action.max_frequency[0]):
        step = min(config.largest.step[0], 0.45 * math.pi / group.max_energy)
    else:
        step = 0.45 * math.pi / group.max_energy
    return [CuboidWindow.cube(w.half_lengths[-1], step) for w in config.windows]


@dataclass
class RelationsReport:
    parts: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"parts": self.parts, "passed": self.passed}


def check_spectrum_relations(model: LatticeFieldModel, config: AnalysisConfig, elements, functionals,
                             vectors, dual_functionals=None) -> RelationsReport:
    """Relations between the spectra of U and of the time translations alpha on the lattice.

    (a) ``Sp_pp U = Sp_pp alpha = {0}``; (b) ``Sp_c U - Sp_c U in Sp_c alpha``;
    (c) ``+-Sp_ac U in Sp_ac alpha*`` with the functionals ``<Psi| pi(.) Omega>``;
    (d) recorded as not testable (the model has no singular continuous Hilbert spectrum).
    """
    action = LatticeTimeAction(model)
    gns = gns_construct(model, model.vacuum())
    group = implementing_group(gns, action)
    ucfg = config.with_windows(_unitary_ladder(group, config))
    uact = group.orbit_action()
    h = group.hilbert
    parts = {}
    # (a)
    pp_u = []
    for k, v in enumerate(vectors):
        mixed = v.plus(gns.omega.scaled(0.5)) if isinstance(v, FockVector) else v
        pm = extract_point_masses(uact, h.ket(mixed), h.bra(mixed), ucfg)
        pp_u.extend(pm.masses)
    spec = component_spectra(action, elements, functionals, config)
    pp_alpha = [q for cl in spec.classifications for q in cl.retained_frequencies()]
    only_zero = lambda qs: all(abs(q[0]) <= 1e-8 for q in qs)
    parts["a"] = {"Sp_pp_U": sorted({round(q[0], 10) for q in pp_u}),
                  "Sp_pp_alpha": sorted({round(q[0], 10) for q in pp_alpha}),
                  "ok": bool(pp_u and pp_alpha and only_zero(pp_u) and only_zero(pp_alpha))}
    # (b)
    sp_c_u = SupportSet.empty(1)
    for v in vectors:
        sp_c_u = sp_c_u.union(spectral_content(group, v, ucfg.largest, config.tau_rel, config.taper))
    diff = sp_c_u.sumset(sp_c_u.negated())
    tol = tuple(np.maximum(np.asarray(spec.c.cell, float), np.asarray(diff.cell, float))) \
        if not spec.c.is_empty() else None
    parts["b"] = {"Sp_c_U": sp_c_u.to_dict(), "difference_set": diff.to_dict(),
                  "Sp_c_alpha": spec.c.to_dict(),
                  "ok": bool(not spec.c.is_empty() and spec.c.covers(diff, tol))}
    # (c)
    if dual_functionals is None:
        dual_functionals = [model.vector_functional(v, ("vacuum",), f"<psi{k}|.|0>")
                            for k, v in enumerate(vectors)]
        dual_functionals += [model.vector_functional(("vacuum",), v, f"<0|.|psi{k}>")
                             for k, v in enumerate(vectors)]
    dual = transpose_action(action)
    dspec = component_spectra(dual, dual_functionals, elements, config)
    sp_ac_u = sp_c_u
    sym = sp_ac_u.union(sp_ac_u.negated())
    tol_c = tuple(np.maximum(np.asarray(dspec.ac.cell, float), np.asarray(sym.cell, float))) \
        if not dspec.ac.is_empty() else None
    parts["c"] = {"Sp_ac_U_symmetrised": sym.to_dict(), "Sp_ac_alpha_dual": dspec.ac.to_dict(),
                  "ok": bool(not dspec.ac.is_empty() and dspec.ac.covers(sym, tol_c))}
    parts["d"] = {"status": "NOT TESTABLE", "reason": "no singular continuous spectrum of U in the model"}
    passed = all(parts[p]["ok"] for p in "abc")
    return RelationsReport(parts, passed)
