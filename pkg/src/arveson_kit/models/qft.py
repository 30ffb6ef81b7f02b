"""Particle-content machinery on the harmonic chain.

Time smearings, the seminorm ``||C||_{E,1} = sup_omega sum_n |omega(beta_n(C))|``,
asymptotic functionals ``sigma_omega^(t)(C) = sum_n omega(alpha_(t,n)(C))``,
the energy-density identity, the low-frequency regularity bound, the
three-piece frequency splitting and the lower bound on asymptotic
functionals.  Suprema over bounded-energy states are maxima over an explicit
finite family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special
from scipy.sparse.linalg import LinearOperator, svds

from ..errors import BadPartition, BadSmearing, EpsilonTooLarge, NotCentered, TailNotSummable
from .lattice import FockVector, LatticeFieldModel, LatticeSpacetimeAction

TAIL_TOL = 1e-8


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    y = 1.0 - x
    b = np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Smearing:
    """Time smearing g with multiplier ``G(nu) = int g(t) e^{i nu t} dt``.

    ``G(nu) = sqrt(2 pi) g~(nu)`` for the transform ``g~(p) = (2pi)^{-1/2} int e^{ipt} g(t) dt``,
    so the normalisation ``g~(0) = (2pi)^{-1/2}`` reads ``G(0) = 1``.

    Kinds: ``gaussian`` (params ``(tau,)``, g a centred normal density of
    width tau) and the compactly supported frequency pieces ``flat``,
    ``zero``, ``plus``, ``minus`` (params ``(E, mu)``) of the partition
    ``chi_E = chi_0 + chi_+ + chi_-``.
    """

    kind: str
    params: tuple
    scale: float = 1.0

    def multiplier(self, nu) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        if self.kind == "gaussian":
            (tau,) = self.params
            return self.scale * np.exp(-0.5 * (tau * nu) ** 2)
        E, mu = self.params
        flat = 1.0 - smooth_step((np.abs(nu) - E) / E)
        low = 1.0 - smooth_step((np.abs(nu) - mu / 2) / (mu / 2))
        if self.kind == "flat":
            out = flat
        elif self.kind == "zero":
            out = low
        elif self.kind == "plus":
            out = np.where(nu > 0, (1.0 - low) * flat, 0.0)
        elif self.kind == "minus":
            out = np.where(nu < 0, (1.0 - low) * flat, 0.0)
        else:
            raise BadSmearing(f"unknown smearing kind {self.kind!r}")
        return self.scale * out

    def frequency_range(self) -> tuple:
        """Interval outside of which G vanishes (or is negligible) by construction."""
        if self.kind == "gaussian":
            return (-math.inf, math.inf)
        E, mu = self.params
        return {"flat": (-2 * E, 2 * E), "zero": (-mu, mu), "plus": (mu / 2, 2 * E),
                "minus": (-2 * E, -mu / 2)}[self.kind]

    def mass_outside(self, lo: float, hi: float) -> float:
        """Relative L^1 mass of G outside ``(lo, hi)``."""
        if self.kind == "gaussian":
            (tau,) = self.params
            s = 1.0 / tau
            return float(0.5 * special.erfc(hi / (s * math.sqrt(2))) + 0.5 * special.erfc(-lo / (s * math.sqrt(2))))
        a, b = self.frequency_range()
        f = lambda v: abs(float(self.multiplier(v)))
        total = integrate.quad(f, a, b, limit=400)[0]
        inside = integrate.quad(f, max(a, lo), min(b, hi), limit=400)[0] if min(b, hi) > max(a, lo) else 0.0
        return max(total - inside, 0.0) / total if total > 0 else 0.0

    def time_profile(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            (tau,) = self.params
            return self.scale * np.exp(-0.5 * (t / tau) ** 2) / (tau * math.sqrt(2 * math.pi))
        a, b = self.frequency_range()
        nu = np.linspace(a, b, 8193)
        G = self.multiplier(nu)
        ph = np.exp(-1j * np.outer(t.ravel(), nu))
        return (integrate.trapezoid(ph * G, nu, axis=1) / (2 * math.pi)).reshape(t.shape)

    def l1_norm(self) -> float:
        if self.kind == "gaussian":
            return abs(self.scale)
        a, b = self.frequency_range()
        width = 2 * math.pi / (b - a)
        t = np.linspace(-400 * width, 400 * width, 16001)
        return float(integrate.trapezoid(np.abs(self.time_profile(t)), t))

    def scaled(self, s: float) -> "Smearing":
        return Smearing(self.kind, self.params, self.scale * s)

    def to_spec(self) -> tuple:
        return ("smearing", self.kind, tuple(self.params), self.scale)


def as_smearing(spec) -> Smearing:
    if isinstance(spec, Smearing):
        return spec
    if spec[0] == "smearing":
        return Smearing(spec[1], tuple(spec[2]), spec[3])
    if spec[0] == "gaussian":
        return Smearing("gaussian", (float(spec[1]),), float(spec[2]) if len(spec) > 2 else 1.0)
    return Smearing(spec[0], tuple(spec[1:3]), float(spec[3]) if len(spec) > 3 else 1.0)


def gaussian_smearing(tau: float = 16.0, scale: float = 1.0) -> Smearing:
    return Smearing("gaussian", (float(tau),), scale)


def energy_density_smeared(model: LatticeFieldModel, g, site: int = 0, label: Optional[str] = None):
    """The time-smeared energy density ``T00(g)`` at a site."""
    g = as_smearing(g)
    return model.observable(("smear", ("energy_density", site), g.to_spec()), label or "T00(g)")


def site_values(model: LatticeFieldModel, phi, C, t: float = 0.0) -> np.ndarray:
    """``phi(alpha_(t,n)(C))`` for every site n of the ring, ordered n = -N/2 .. N/2 - 1."""
    ns = np.arange(-(model.N // 2), model.N - model.N // 2)
    return model.orbit_grid(phi, C, [t], ns)[0]


def _tail(values: np.ndarray) -> float:
    n = values.size
    ns = np.arange(-(n // 2), n - n // 2)
    return float(np.abs(values[np.abs(ns) > 3 * n // 8]).sum())


@dataclass
class SeminormResult:
    value: float
    finite: bool
    achieving: str
    per_state: dict
    refined: bool = False

    def to_dict(self) -> dict:
        return {"value": self.value, "finite": self.finite, "achieving": self.achieving,
                "per_state": dict(sorted(self.per_state.items())), "refined": self.refined}


def _site_sum(model, phi, C, t, power=1, tol=TAIL_TOL, refine=True):
    vals = np.abs(site_values(model, phi, C, t)) ** power
    total = float(vals.sum())
    if _tail(vals) <= tol:
        return total, False
    if not refine:
        raise TailNotSummable("per-site values do not decay within the ring")
    big = model.refined(2)
    vals2 = np.abs(site_values(big, big.rebuild(phi), big.rebuild(C), t)) ** power
    total2 = float(vals2.sum())
    if abs(total2 - total) <= 1e-6 * max(1.0, total):
        return total, True
    raise TailNotSummable(f"site sum changes from {total:.6g} to {total2:.6g} on refinement: "
                          "||C||_E,1 = inf (empirical)")


def seminorm_E1(model: LatticeFieldModel, C, family, t: float = 0.0) -> SeminormResult:
    """Family maximum of ``sum_n |omega(beta_n(C))|``.

    Values that do not decay within the ring are accepted only when the sum is
    unchanged on a ring twice as large (delocalised but summable data such as
    plane-wave states); otherwise :class:`TailNotSummable` is raised.
    """
    if not family:
        raise ValueError("the state family must be nonempty")
    per, refined = {}, False
    for j, w in enumerate(family):
        if w.energy_bound is not None and w.energy_bound > model.energy_bound + 1e-12:
            raise ValueError(f"state {w.label!r} exceeds the energy bound {model.energy_bound:g}")
        s, r = _site_sum(model, w, C, t)
        per[w.label or f"omega{j}"] = s
        refined = refined or r
    best = max(per, key=lambda k: per[k])
    return SeminormResult(per[best], True, best, per, refined)


def asymptotic_functional(model: LatticeFieldModel, omega, C, t: float) -> complex:
    """``sigma_omega^(t)(C) = sum_n omega(alpha_(t,n)(C))``."""
    seminorm_E1(model, C, [omega])
    return complex(site_values(model, omega, C, t).sum())


@dataclass
class CheckReport:
    name: str
    passed: bool
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "rows": self.rows, "summary": self.summary}


def _validate_smearing(model, g: Smearing) -> None:
    G0 = float(g.multiplier(np.zeros(1))[0])
    if abs(G0 - 1.0) > 1e-10:
        raise BadSmearing(f"int g dt = {G0:.12g}, expected 1")
    leak = g.mass_outside(-model.mu, model.mu)
    if leak >= 1e-10:
        raise BadSmearing(f"smearing has relative frequency mass {leak:.3g} outside (-mu, mu)")


def check_condition_T(model: LatticeFieldModel, g, family) -> CheckReport:
    """``sum_n omega(beta_n(T00(g))) = omega(H)`` for every family state."""
    g = as_smearing(g)
    _validate_smearing(model, g)
    T = energy_density_smeared(model, g)
    rows, ok = [], True
    for w in family:
        lhs = complex(site_values(model, w, T).sum())
        rhs = model.mean_energy(w)
        res = abs(lhs - rhs)
        good = res <= 1e-8 * (1 + abs(rhs))
        ok = ok and good
        rows.append({"state": w.label, "sum": [lhs.real, lhs.imag], "omega_H": rhs.real,
                     "residual": res, "pass": bool(good)})
    return CheckReport("condition_T", ok, rows,
                       {"max_residual": max(r["residual"] for r in rows) if rows else 0.0})


def resolvent_norm(model: LatticeFieldModel, A, l: int = 2) -> float:
    """``||R^l A R^l||`` with ``R = (1 + H)^{-1}`` on the sectors of at most two particles."""
    N = model.N
    r1 = (1.0 + model.omega) ** (-l)
    r2 = (1.0 + model.omega[:, None] + model.omega[None, :]) ** (-l)
    dim = 1 + N + N * N
    Astar = model.star(A)

    def weight(v: FockVector) -> FockVector:
        return FockVector(v.c0, v.c1 * r1, v.c2 * r2)

    def mv(x, op):
        v = weight(FockVector.from_flat(np.asarray(x).ravel(), N))
        return weight(model.apply(op, v)).as_flat()

    lin = LinearOperator((dim, dim), matvec=lambda x: mv(x, A), rmatvec=lambda x: mv(x, Astar),
                         dtype=complex)
    rng = np.random.default_rng(0)
    s = svds(lin, k=1, return_singular_vectors=False, tol=1e-10, v0=rng.standard_normal(dim))
    return float(s[0])


def check_condition_L1(model: LatticeFieldModel, g, family, elements, l: int = 2) -> CheckReport:
    """Finiteness of ``||A(g)||_{E,1}`` and the fitted constant of the bound by ``||R^l A R^l|| ||g||_1``."""
    g = as_smearing(g)
    lo, hi = -model.mu, model.mu
    if g.mass_outside(lo, hi) >= 1e-10:
        raise BadSmearing("smearing frequency mass leaks outside (-mu, mu)")
    rows, worst = [], 0.0
    for A in elements:
        if not A.data.centered:
            raise NotCentered(f"element {A.label!r} has nonzero vacuum expectation")
        Ag = model.observable(("smear", A.data.recipe, g.to_spec()), f"{A.label}(g)") \
            if A.data.recipe is not None else None
        if Ag is None:
            raise ValueError("elements need a recipe to be smeared")
        sn = seminorm_E1(model, Ag, family)
        bound = resolvent_norm(model, A, l) * g.l1_norm()
        ratio = sn.value / bound if bound > 0 else math.inf
        worst = max(worst, ratio)
        rows.append({"element": A.label, "seminorm": sn.value, "resolvent_norm_times_g1": bound,
                     "ratio": ratio, "finite": sn.finite})
    return CheckReport("condition_L1", all(r["finite"] for r in rows), rows,
                       {"fitted_constant": worst, "l": l})


@dataclass
class SplitResult:
    minus: object
    plus: object
    zero: object
    support_leak: dict
    l2_sums: dict
    energy_decreasing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"support_leak": self.support_leak, "l2_sums": self.l2_sums,
                "energy_decreasing": self.energy_decreasing}


def sc_triviality_split(model: LatticeFieldModel, A, family, E: Optional[float] = None,
                        mu: Optional[float] = None, transfer=None) -> SplitResult:
    """Split ``A(f) = A(f_-) + A(f_+) + A(f_0)`` with a smooth partition of unity in frequency.

    ``f~ = (2 pi)^{-1/2}`` on ``[-E, E]``; the pieces have frequency supports
    ``[-2E, -mu/2]``, ``[mu/2, 2E]`` and ``(-mu, mu)``.  When ``transfer`` is
    an analysis configuration, the energy-decreasing property of ``A(f_-)``
    and ``A(f_+)^*`` is checked on the spacetime action.
    """
    E = model.energy_bound if E is None else float(E)
    mu = model.mu if mu is None else float(mu)
    if not A.data.centered:
        raise NotCentered(f"element {A.label!r} has nonzero vacuum expectation")
    if E < mu:
        raise BadPartition("need E >= mu")
    pieces, leaks, sums = {}, {}, {}
    intervals = {"minus": (-2 * E, -mu / 2), "plus": (mu / 2, 2 * E), "zero": (-mu, mu)}
    for kind, (lo, hi) in intervals.items():
        s = Smearing(kind, (E, mu))
        leak = _numeric_leak(s, lo, hi, E)
        leaks[kind] = leak
        if leak >= 1e-10:
            raise BadPartition(f"piece {kind} leaks mass {leak:.3g} outside [{lo:g}, {hi:g}]")
        pieces[kind] = model.observable(("smear", A.data.recipe, s.to_spec()), f"{A.label}(f_{kind})")
        sums[kind] = {w.label: _site_sum(model, w, pieces[kind], 0.0, power=2)[0] for w in family}
    flags = {}
    if transfer is not None:
        from ..fourier import energy_momentum_transfer
        act = LatticeSpacetimeAction(model)
        flags["minus"] = energy_momentum_transfer(act, pieces["minus"], family, transfer).energy_decreasing
        flags["plus_star"] = energy_momentum_transfer(act, model.star(pieces["plus"]), family,
                                                      transfer).energy_decreasing
    return SplitResult(pieces["minus"], pieces["plus"], pieces["zero"], leaks, sums, flags)


def _numeric_leak(s: Smearing, lo: float, hi: float, E: float) -> float:
    nu = np.linspace(-3 * E, 3 * E, 60001)
    G = np.abs(s.multiplier(nu))
    total = G.sum()
    out = G[(nu < lo) | (nu > hi)].sum()
    return float(out / total) if total > 0 else 0.0


def partition_identity_residual(model: LatticeFieldModel, A, split: SplitResult, vec: FockVector,
                                E: Optional[float] = None) -> float:
    """``|| P_E (A(f_-) + A(f_+) + A(f_0)) v - P_E A v ||`` for a vector with energies <= E."""
    E = model.energy_bound if E is None else float(E)
    total = model.combine([1, 1, 1], [split.minus, split.plus, split.zero])
    lhs = model.project_energy(model.apply(total, vec), E)
    rhs = model.project_energy(model.apply(A, vec), E)
    return lhs.plus(rhs.scaled(-1.0)).norm()


def check_particle_bound(model: LatticeFieldModel, omega, C, eps: float, g=None,
                         t_grid=None) -> CheckReport:
    """``|sigma_omega^(t)(C)| >= omega(H) / 2`` when C is eps-close to ``T00(g)`` in ``||.||_{E,1}``."""
    g = gaussian_smearing() if g is None else as_smearing(g)
    energy = model.mean_energy(omega).real
    if not energy > 0:
        raise EpsilonTooLarge("omega(H) must be positive")
    if eps > energy / 2 + 1e-15:
        raise EpsilonTooLarge(f"eps = {eps:g} exceeds omega(H)/2 = {energy / 2:g}")
    T = energy_density_smeared(model, g)
    diff = model.combine([1.0, -1.0], [T, C])
    dist = seminorm_E1(model, diff, [omega]).value
    if dist > eps + 1e-12:
        raise EpsilonTooLarge(f"||T00(g) - C||_E,1 = {dist:.6g} exceeds eps = {eps:g}")
    if t_grid is None:
        t_grid = np.linspace(0.0, 2 * math.pi / model.mass, 64, endpoint=False)
    sig = [complex(site_values(model, omega, C, t).sum()) for t in t_grid]
    mags = np.abs(sig)
    ok = bool(mags.min() >= energy / 2)
    rows = [{"t": float(t), "abs_sigma": float(m)} for t, m in zip(t_grid, mags)]
    return CheckReport("particle_bound", ok, rows,
                       {"omega_H": energy, "distance": dist, "eps": eps, "min_abs_sigma": float(mags.min()),
                        "max_abs_sigma": float(mags.max())})


def regularity_value(model: LatticeFieldModel, A, family, eps: float = 0.5) -> float:
    """Family maximum of ``sum_theta |theta|^{2+eps} |omega(A~(theta))|^2 dtheta`` on the torus."""
    best = 0.0
    for w in family:
        vals = site_values(model, w, A)
        ns = np.arange(-(model.N // 2), model.N - model.N // 2)
        F = np.exp(1j * np.outer(model.theta, ns)) @ vals / math.sqrt(2 * math.pi)
        val = float(np.sum(np.abs(model.theta) ** (2 + eps) * np.abs(F) ** 2) * 2 * math.pi / model.N)
        best = max(best, val)
    return best


def buchholz_regularity_scan(model: LatticeFieldModel, elements, family, eps: float = 0.5) -> CheckReport:
    """Regularity surrogate per element plus its stability when the ring is doubled."""
    rows = []
    big = model.refined(2)
    big_family = [big.rebuild(w) for w in family]
    for A in elements:
        if not A.data.centered:
            raise NotCentered(f"element {A.label!r} has nonzero vacuum expectation")
        v1 = regularity_value(model, A, family, eps)
        v2 = regularity_value(big, big.rebuild(A), big_family, eps)
        change = abs(v2 - v1) / max(abs(v1), 1e-300)
        rows.append({"element": A.label, "value": v1, "refined_value": v2,
                     "relative_change": change, "stable": bool(change < 0.05)})
    return CheckReport("regularity_scan", all(r["stable"] for r in rows), rows, {"eps": eps})


def torus_cells(config) -> np.ndarray:
    """Cell centres of the momentum torus at the resolution of the largest window."""
    L = config.largest.half_lengths[0]
    n = int(2 * L / config.largest.step[0])
    return -math.pi + (np.arange(n) + 0.5) * 2 * math.pi / n


def support_coverage(model: LatticeFieldModel, A, family, config) -> CheckReport:
    """Fraction of torus cells met by the union over the family of the detected supports of
    ``n -> omega(beta_n(A))``; the surrogate statement asks for at least 95%."""
    from ..fourier import arveson_spectrum
    from .lattice import LatticeSpaceAction

    if not A.data.centered:
        raise NotCentered(f"element {A.label!r} has nonzero vacuum expectation")
    spec = arveson_spectrum(LatticeSpaceAction(model), [A], list(family), config)
    cells = torus_cells(config)
    frac = spec.total.cover_fraction([cells])
    return CheckReport("support_coverage", bool(frac >= 0.95),
                       [{"element": A.label, "coverage": frac}],
                       {"coverage": frac, "cells": int(cells.size), "support": spec.total.to_dict()})


def space_spectra_check(model: LatticeFieldModel, elements, family, config) -> CheckReport:
    """Absolutely continuous space-translation spectrum covers the torus up to the cell at 0 and
    no singular continuous mass sits away from 0."""
    from ..classify import component_spectra
    from .lattice import LatticeSpaceAction

    comp = component_spectra(LatticeSpaceAction(model), list(elements), list(family), config)
    cells = torus_cells(config)
    width = cells[1] - cells[0]
    missed = cells[~comp.ac.contains_points(cells[:, None])]
    off_zero = [c for c in missed if abs(c) > width]
    sc_off = [box.tolist() for box in comp.sc.boxes if np.any(np.abs(box) > width)]
    ok = len(missed) <= 1 and not off_zero and not sc_off
    summary = {"ac_coverage": 1.0 - len(missed) / cells.size, "missed_cells": [float(c) for c in missed],
               "sc_boxes_off_zero": sc_off, "Sp_ac": comp.ac.to_dict(), "Sp_sc": comp.sc.to_dict(),
               "Sp_pp": comp.pp.to_dict()}
    rows = [{"element": c.label, "ac_status": c.ac_status, "in_continuous": c.in_continuous}
            for c in comp.classifications]
    return CheckReport("space_spectra", bool(ok), rows, summary)
