"""Ergodic averages, point-mass extraction and the pp / ac / sc verdicts.

All limits over growing windows are replaced by the configured ladder of
windows: an average is called vanishing when its magnitude decays along the
ladder with a fitted exponent of at least ``gamma_min`` (or is below an
absolute floor).  The ac / sc verdict uses the windowed Plancherel mass
``I_L = int_{K_L} |f(x)|^2 dx``: it stays bounded for absolutely continuous
Fourier data with square-integrable density and grows without bound for
singular continuous data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage, optimize

from .core import AnalysisConfig, GroupParameter, as_parameter, grid_axes, parallel_map, sample_orbit
from .errors import GridTooCoarse, NotContinuous
from .fourier import SupportSet, detect_support, orbit_fourier

AC, SC, MIXED, UNDETERMINED = "AC", "SC", "MIXED", "UNDETERMINED"

LATTICE_NOTE = ("lattice translations: Cesaro sums over integer sites, "
                "frequencies on the torus [-pi, pi)")


def ladder_parameter(window) -> float:
    """The growing length of a ladder window (space half-length for spacetime cuboids)."""
    return float(window.half_lengths[-1])


def _phase_factors(samples, q) -> list:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    return [np.exp(-1j * samples.signature[k] * q[k] * samples.axes[k]) for k in range(samples.dim)]


def average(samples, q, weights: Optional[np.ndarray] = None) -> complex:
    """Weighted mean of ``e^{-iq.x} f(x)`` over the window (trapezoid / Cesaro weights)."""
    w = samples.mean_weights() if weights is None else weights
    g = w * samples.values
    for k, e in enumerate(_phase_factors(samples, q)):
        g = np.tensordot(e, g, axes=([0], [0])) if k == 0 else np.tensordot(g, e, axes=([0], [0]))
    return complex(g)


def averages_at(samples, qs: np.ndarray) -> np.ndarray:
    """Averages at a list of frequencies ``qs`` of shape (m, d)."""
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    if qs.size == 0:
        return np.zeros(0, dtype=complex)
    g = samples.mean_weights() * samples.values
    E0 = np.exp(-1j * samples.signature[0] * np.outer(qs[:, 0], samples.axes[0]))
    if samples.dim == 1:
        return E0 @ g
    E1 = np.exp(-1j * samples.signature[1] * np.outer(qs[:, 1], samples.axes[1]))
    return np.einsum("qb,qb->q", E0 @ g, E1)


def averages_on_grid(samples, q_axes) -> np.ndarray:
    """Averages on the product grid of ``q_axes`` (separable evaluation)."""
    g = samples.mean_weights() * samples.values
    E0 = np.exp(-1j * samples.signature[0] * np.outer(q_axes[0], samples.axes[0]))
    if samples.dim == 1:
        return E0 @ g
    E1 = np.exp(-1j * samples.signature[1] * np.outer(q_axes[1], samples.axes[1]))
    return E0 @ g @ E1.T


def _check_nyquist(samples, q) -> None:
    for k, qk in enumerate(np.atleast_1d(q)):
        if abs(qk) > math.pi / samples.steps[k] * (1 + 1e-12):
            raise GridTooCoarse(f"frequency {qk:g} beyond the Nyquist limit on axis {k}")


def ergodic_average(action, A, phi, q, window) -> complex:
    """``(1/|K|) int_K e^{-iqx} phi(alpha_x(A)) dx`` by trapezoid (Cesaro on lattice axes)."""
    for k, qk in enumerate(np.atleast_1d(np.asarray(q, dtype=float))):
        if abs(qk) > math.pi / window.step[k] * (1 + 1e-12):
            raise GridTooCoarse(f"frequency {qk:g} beyond the Nyquist limit on axis {k}")
    return average(sample_orbit(action, phi, A, window), q)


def decay_exponent(lengths, magnitudes, floor: float = 0.0) -> float:
    """Least-squares slope of ``-log|M|`` against ``log L``; ``inf`` when everything is below floor."""
    mags = np.asarray(magnitudes, dtype=float)
    if np.all(mags <= floor):
        return math.inf
    mags = np.maximum(mags, 1e-300)
    slope = np.polyfit(np.log(np.asarray(lengths, dtype=float)), np.log(mags), 1)[0]
    return float(-slope)


@dataclass
class ErgodicSeries:
    """Averages ``M_L`` at one frequency along the window ladder."""

    q: tuple
    lengths: list
    averages: list
    exponent: float
    limit: complex

    def to_dict(self) -> dict:
        return {"q": list(self.q), "L": list(self.lengths),
                "abs_M": [abs(m) for m in self.averages],
                "M": [[m.real, m.imag] for m in self.averages],
                "exponent": _finite(self.exponent),
                "limit": [self.limit.real, self.limit.imag]}

    def to_csv(self) -> str:
        head = f"# columns: L, |M_L|; q={list(self.q)}; fitted decay exponent={self.exponent:.6g}\n"
        rows = "".join(f"{L!r},{abs(m)!r}\n" for L, m in zip(self.lengths, self.averages))
        return head + "L,abs_M\n" + rows


def _finite(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


@dataclass
class PointMassMap:
    """Retained point masses ``q -> c_q`` of one (A, phi) pair, with the supporting series."""

    functional: str
    masses: dict
    series: dict = field(default_factory=dict)
    rejected: list = field(default_factory=list)

    def frequencies(self) -> list:
        return sorted(self.masses)

    def total(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.masses.values()))

    def coefficient(self, q, tol: float = 1e-6) -> complex:
        for key, c in self.masses.items():
            if np.allclose(key, np.atleast_1d(q), atol=tol):
                return c
        return 0.0

    def to_dict(self) -> dict:
        return {"functional": self.functional,
                "masses": [{"q": list(q), "c": [c.real, c.imag]} for q, c in sorted(self.masses.items())],
                "series": [self.series[q].to_dict() for q in sorted(self.series)],
                "rejected": [{"q": list(q), "reason": r} for q, r in self.rejected]}


def _bump_weights(samples) -> np.ndarray:
    """Smooth compactly supported weights (super-algebraic convergence of averages)."""
    w = None
    for k in range(samples.dim):
        x = samples.axes[k]
        if samples.periodic[k]:
            wk = np.ones_like(x)
        else:
            u = x / (np.abs(x).max() * (1 + 1e-12))
            wk = np.zeros_like(u)
            inside = np.abs(u) < 1
            wk[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        w = wk if w is None else np.multiply.outer(w, wk)
    return w / w.sum()


def _candidates(samples, config: AnalysisConfig) -> list:
    """Local maxima of the bump-weighted transform |M_L(p)|, largest first.

    The smooth weights keep sidelobes of strong atoms below weak ones.
    """
    g = _bump_weights(samples) * samples.values
    pads, d = [], samples.dim
    for k in range(d):
        n = samples.values.shape[k]
        pads.append(n if samples.periodic[k] else 4 * n)
    F = np.abs(np.fft.fftn(g, s=pads, axes=tuple(range(d))))
    top = F.max()
    if top < config.abs_floor:
        return []
    modes = tuple("wrap" if samples.periodic[k] else "nearest" for k in range(d))
    local = F == ndimage.maximum_filter(F, size=3, mode=modes)
    keep = local & (F >= max(config.pp_floor, 1e-3 * top))
    idx = np.argwhere(keep)
    order = np.argsort(-F[keep], kind="stable")[: config.max_candidates]
    out = []
    for row in idx[order]:
        q = []
        for k in range(d):
            nu = 2 * math.pi * np.fft.fftfreq(pads[k], samples.steps[k])[row[k]]
            q.append(samples.signature[k] * nu)
        out.append(np.array(q))
    return out


def _bump_average(samples, q, weights) -> complex:
    g = weights * samples.values
    for k, e in enumerate(_phase_factors(samples, q)):
        g = np.tensordot(e, g, axes=([0], [0])) if k == 0 else np.tensordot(g, e, axes=([0], [0]))
    return complex(g)


def _refine(samples, q0: np.ndarray) -> np.ndarray:
    """Locate a spectral peak near q0 on the non-periodic axes.

    A bounded search for the maximum of |M_L(q)| is followed by Newton steps
    on the phase drift ``Im(sum b x e^{-iqx} f / sum b e^{-iqx} f)``, which
    vanishes exactly at the frequency of an exponential (b a bump weight).
    """
    q = np.array(q0, dtype=float)
    for k in range(samples.dim):
        if samples.periodic[k]:
            continue
        n = samples.values.shape[k]
        width = 2 * math.pi / (4 * n * samples.steps[k])

        def neg(v, k=k):
            qq = q.copy()
            qq[k] = v
            return -abs(averages_at(samples, qq[None, :])[0])

        res = optimize.minimize_scalar(neg, bounds=(q[k] - width, q[k] + width), method="bounded",
                                       options={"xatol": 1e-12})
        q[k] = res.x
    b = _bump_weights(samples)
    mesh = np.meshgrid(*samples.axes, indexing="ij")
    start = q.copy()
    for _ in range(4):
        base = _bump_average(samples, q, b)
        if abs(base) == 0:
            break
        for k in range(samples.dim):
            if samples.periodic[k]:
                continue
            moment = _bump_average(samples, q, b * mesh[k]) / base
            second = float(np.sum(b * mesh[k] ** 2))
            q[k] += moment.imag / (samples.signature[k] * second)
    width = np.array([2 * math.pi / (len(a) * h) for a, h in zip(samples.axes, samples.steps)])
    if np.any(np.abs(q - start) > width):
        return start
    return q


def _series(ladder, q) -> ErgodicSeries:
    lengths = [ladder_parameter(s.window) for s in ladder]
    avgs = [complex(averages_at(s, np.atleast_1d(q)[None, :])[0]) for s in ladder]
    return ErgodicSeries(tuple(float(v) for v in np.atleast_1d(q)), lengths, avgs,
                         decay_exponent(lengths, np.abs(avgs)), avgs[-1])


def _drift(ladder, q) -> float:
    """Largest shift of the refined peak on the smaller windows, in units of their bins.

    An atom stays put while the ladder grows; peaks of continuous data
    (edges, sidelobes) move like 1/L.
    """
    worst = 0.0
    for s in ladder[:-1]:
        qs = _refine(s, q)
        for k in range(s.dim):
            if s.periodic[k]:
                continue
            bin_k = 2 * math.pi / (len(s.axes[k]) * s.steps[k])
            worst = max(worst, abs(qs[k] - q[k]) / bin_k)
    return worst


def _point_masses_from_ladder(ladder, config: AnalysisConfig, label: str = "") -> PointMassMap:
    big = ladder[-1]
    found = PointMassMap(label, {})
    bins = [2 * math.pi / (len(big.axes[k]) * big.steps[k]) for k in range(big.dim)]
    for q0 in _candidates(big, config):
        q = _refine(big, q0)
        q[np.abs(q) < 1e-12] = 0.0
        key = tuple(float(v) for v in q)
        if any(np.all(np.abs(np.array(key) - np.array(old)) < 0.5 * np.array(bins))
               for old in list(found.masses) + [r[0] for r in found.rejected]):
            continue
        # judge each candidate on the residual left by the atoms already accepted
        rungs = [_subtract(s, found.masses) for s in ladder]
        series = _series(rungs, q)
        c = _bump_average(rungs[-1], q, _bump_weights(big))
        series.limit = c
        dev = [abs(m - c) for m in series.averages]
        dev_exp = decay_exponent(series.lengths, dev, floor=config.abs_floor)
        if abs(c) < config.pp_floor:
            found.rejected.append((key, "coefficient below floor"))
        elif series.exponent >= config.gamma_min:
            found.rejected.append((key, f"averages decay with exponent {series.exponent:.3g}"))
        elif series.exponent <= -config.gamma_min:
            found.rejected.append((key, f"averages grow with exponent {-series.exponent:.3g}"))
        elif dev[-1] > 0.1 * abs(c) or (max(dev) > 0.1 * abs(c) and dev_exp < config.gamma_min):
            found.rejected.append((key, "averages do not converge to the limit"))
        elif _drift(rungs, q) > 0.1:
            found.rejected.append((key, "peak position moves with the window"))
        else:
            found.masses[key] = c
            found.series[key] = series
    if len(found.masses) > 1:
        found = _polish(ladder, found)
    return found


def _polish(ladder, found: PointMassMap, sweeps: int = 3) -> PointMassMap:
    """Re-estimate each point mass after removing all the others (removes cross-talk)."""
    big = ladder[-1]
    b = _bump_weights(big)
    qs = [np.array(q) for q in found.masses]
    cs = list(found.masses.values())
    for _ in range(sweeps):
        for i in range(len(qs)):
            others = {tuple(q): c for j, (q, c) in enumerate(zip(qs, cs)) if j != i}
            clean = _subtract(big, others)
            qs[i] = _refine(clean, qs[i])
            qs[i][np.abs(qs[i]) < 1e-12] = 0.0
            cs[i] = _bump_average(clean, qs[i], b)
    out = PointMassMap(found.functional, {}, {}, found.rejected)
    for i, (q, c) in enumerate(zip(qs, cs)):
        key = tuple(float(v) for v in q)
        others = {tuple(qq): cc for j, (qq, cc) in enumerate(zip(qs, cs)) if j != i}
        series = _series([_subtract(s, others) for s in ladder], q)
        series.limit = c
        out.masses[key] = c
        out.series[key] = series
    return out


def orbit_ladder(action, A, phi, config: AnalysisConfig) -> list:
    return [sample_orbit(action, phi, A, w) for w in config.windows]


def extract_point_masses(action, A, phi, config: AnalysisConfig) -> PointMassMap:
    if len(config.windows) < 3:
        raise ValueError("point-mass extraction needs a ladder of at least three windows")
    return _point_masses_from_ladder(orbit_ladder(action, A, phi, config), config,
                                     getattr(phi, "label", "") or "")


def ergodic_series(action, A, phi, q, config: AnalysisConfig) -> ErgodicSeries:
    """Averages ``M_L(q)`` along the configured ladder with the fitted decay exponent."""
    return _series(orbit_ladder(action, A, phi, config), np.atleast_1d(np.asarray(q, dtype=float)))


def probe_frequencies(action, window, n: int) -> tuple:
    """Uniform probe grid per axis: the declared frequency range, or the torus on periodic axes."""
    axes, periodic = grid_axes(action, window)
    out = []
    for k in range(window.dim):
        nyq = math.pi / window.step[k]
        if action.lattice_axes[k]:
            out.append(np.linspace(-math.pi, math.pi, n))
        else:
            Q = min(float(action.max_frequency[k]), nyq)
            out.append(np.linspace(-Q, Q, n))
    return tuple(out)


def _subtract(samples, masses: dict):
    if not masses:
        return samples
    vals = samples.values.copy()
    for q, c in masses.items():
        ph = None
        for k, e in enumerate(_phase_factors(samples, q)):
            e = np.conj(e)
            ph = e if ph is None else np.multiply.outer(ph, e)
        vals = vals - c * ph
    return type(samples)(samples.window, samples.axes, vals, samples.signature,
                         samples.periodic, samples.lattice, samples.label)


def plancherel_mass(samples) -> float:
    """``int_K |f|^2 dx`` (trapezoid, or plain sums on lattice axes)."""
    extent = 1.0
    for k in range(samples.dim):
        n, h = len(samples.axes[k]), samples.steps[k]
        extent *= n * h if (samples.lattice[k] or samples.periodic[k]) else (n - 1) * h
    return float(np.sum(samples.mean_weights() * np.abs(samples.values) ** 2) * extent)


def l1_fourier_mass(samples) -> float:
    """Literal windowed L^1 mass ``int |F_L(p)| dp`` of the plain transform."""
    return orbit_fourier(samples).l1_mass()


@dataclass
class PairAnalysis:
    functional: str
    zero: bool
    point_masses: PointMassMap
    probe_failures: list
    residual_zero: bool
    plancherel_curve: list
    l1_curve: list
    verdict: str
    residual: object = None


def _pair_verdict(curve, config) -> str:
    vals = [v for _, v in curve]
    if vals[-1] <= config.abs_floor ** 2:
        return AC
    if abs(vals[-1] - vals[-2]) / vals[-1] < config.delta_ac:
        return AC
    ratios = [b / a for a, b in zip(vals[:-1], vals[1:]) if a > 0]
    if ratios and min(ratios) >= config.g_min:
        return SC
    return UNDETERMINED


def analyse_pair(action, A, phi, config: AnalysisConfig, label: str = "") -> PairAnalysis:
    ladder = orbit_ladder(action, A, phi, config)
    top = max(float(np.abs(s.values).max()) for s in ladder)
    empty = PointMassMap(label, {})
    if top < config.abs_floor:
        return PairAnalysis(label, True, empty, [], True, [], [], AC)
    pm = _point_masses_from_ladder(ladder, config, label)
    failures = []
    big = ladder[-1]
    residual = [_subtract(s, pm.masses) for s in ladder]
    res_top = float(np.abs(residual[-1].values).max())
    residual_zero = bool(pm.masses) and res_top <= 1e-8 * top + config.abs_floor
    lengths = [ladder_parameter(s.window) for s in ladder]
    if not residual_zero:
        # probe what is left after removing the retained atoms
        q_axes = probe_frequencies(action, big.window, config.probe_per_axis)
        grid_avgs = [np.abs(averages_on_grid(s, q_axes)).ravel() for s in residual]
        mesh = np.meshgrid(*q_axes, indexing="ij")
        grid_q = np.stack([m.ravel() for m in mesh], axis=-1)
        extra = np.array([r[0] for r in pm.rejected], dtype=float).reshape(-1, big.dim)
        extra_avgs = [np.abs(averages_at(s, extra)) for s in residual]
        allq = np.concatenate([grid_q, extra], axis=0)
        allm = np.stack([np.concatenate([a, b]) for a, b in zip(grid_avgs, extra_avgs)], axis=1)
        retained = [np.array(q) for q in pm.masses]
        for q, mags in zip(allq, allm):
            if mags[-1] < config.abs_floor:
                continue
            if any(np.allclose(q, r) for r in retained):
                continue
            gamma = decay_exponent(lengths, mags, config.abs_floor)
            if gamma < config.gamma_min:
                failures.append((tuple(float(v) for v in q), float(mags[-1]), gamma))
    curve = [(L, plancherel_mass(s)) for L, s in zip(lengths, residual)]
    l1 = [(L, l1_fourier_mass(s)) for L, s in zip(lengths, ladder)]
    verdict = "PP" if residual_zero else _pair_verdict(curve, config)
    return PairAnalysis(label, False, pm, failures, residual_zero, curve, l1, verdict, residual[-1])


@dataclass
class Classification:
    """Verdict for one element over a functional family."""

    label: str
    point_masses: dict
    in_continuous: bool
    ac_status: str
    pure_point: bool
    l1_growth_curve: dict
    plancherel_curve: dict
    probe_failures: list
    reason: str = ""
    notes: list = field(default_factory=list)
    pairs: list = field(default_factory=list, repr=False)

    def retained_frequencies(self) -> list:
        qs = []
        for pm in self.point_masses.values():
            for q in pm.masses:
                if not any(np.allclose(q, r, atol=1e-6) for r in qs):
                    qs.append(q)
        return sorted(qs)

    def to_dict(self) -> dict:
        return {"label": self.label,
                "point_masses": {k: v.to_dict() for k, v in sorted(self.point_masses.items())},
                "in_continuous": self.in_continuous, "ac_status": self.ac_status,
                "pure_point": self.pure_point, "reason": self.reason,
                "l1_growth_curve": {k: [list(p) for p in v] for k, v in sorted(self.l1_growth_curve.items())},
                "plancherel_curve": {k: [list(p) for p in v] for k, v in sorted(self.plancherel_curve.items())},
                "probe_failures": [{"functional": f, "q": list(q), "abs_M": m, "exponent": _finite(g)}
                                   for f, q, m, g in self.probe_failures],
                "notes": list(self.notes)}


def classify_element(action, A, functionals, config: AnalysisConfig) -> Classification:
    if not functionals:
        raise ValueError("functional family must be nonempty")
    labels = [getattr(f, "label", None) or f"phi{j}" for j, f in enumerate(functionals)]
    pairs = parallel_map(lambda j: analyse_pair(action, A, functionals[j], config, labels[j]),
                         range(len(functionals)), config.threads)
    live = [p for p in pairs if not p.zero]
    notes = ["ac/sc verdict from the windowed Plancherel mass (numerical surrogate)"]
    if any(action.lattice_axes):
        notes.append(LATTICE_NOTE)
    label = getattr(A, "label", None) or "A"
    pm = {p.functional: p.point_masses for p in live if p.point_masses.masses}
    failures = [(p.functional,) + f for p in live for f in p.probe_failures]
    l1 = {p.functional: p.l1_curve for p in live}
    pl = {p.functional: p.plancherel_curve for p in live}
    if not live:
        return Classification(label, {}, True, AC, False, {}, {}, [],
                              "zero on the functional family", notes, pairs)
    in_cont = not pm and not failures
    pure = bool(pm) and all(p.residual_zero for p in live if p.point_masses.masses) \
        and all(p.point_masses.masses for p in live)
    verdicts = {p.verdict for p in live}
    reason = ""
    if pure:
        status, reason = UNDETERMINED, "pure point: element carries point masses only"
    elif not in_cont:
        status = MIXED if pm else UNDETERMINED
        reason = ("point masses with a continuous remainder" if pm else
                  "ergodic averages do not vanish on the probe grid")
    elif verdicts == {AC}:
        status = AC
    elif verdicts == {SC}:
        status = SC
    elif verdicts <= {AC, SC}:
        status, reason = MIXED, "absolutely and singular continuous parts"
    else:
        status, reason = UNDETERMINED, "Plancherel mass neither stabilises nor grows geometrically"
    return Classification(label, pm, in_cont, status, pure, l1, pl, failures, reason, notes, pairs)


@dataclass
class ComponentSpectra:
    pp: SupportSet
    c: SupportSet
    ac: SupportSet
    sc: SupportSet
    classifications: list
    unresolved: SupportSet

    def to_dict(self) -> dict:
        return {"Sp_pp": self.pp.to_dict(), "Sp_c": self.c.to_dict(), "Sp_ac": self.ac.to_dict(),
                "Sp_sc": self.sc.to_dict(), "unresolved": self.unresolved.to_dict(),
                "classifications": [c.to_dict() for c in self.classifications]}


def component_spectra(action, elements, functionals, config: AnalysisConfig) -> ComponentSpectra:
    d = config.largest.dim
    pp = c = ac = sc = unresolved = SupportSet.empty(d)
    results = [classify_element(action, A, functionals, config) for A in elements]
    for cl in results:
        for p in cl.pairs:
            if p.zero:
                continue
            big = p.residual
            bins = [2 * math.pi / (len(big.axes[k]) * big.steps[k]) for k in range(big.dim)]
            if p.point_masses.masses:
                pp = pp.union(SupportSet.from_points(list(p.point_masses.masses), bins))
            if p.residual_zero:
                continue
            s = detect_support(orbit_fourier(big, taper=config.taper, tau_rel=config.tau_rel),
                               config.tau_rel)
            if s.is_empty():
                continue
            if p.verdict == AC:
                ac, c = ac.union(s), c.union(s)
            elif p.verdict == SC:
                sc, c = sc.union(s), c.union(s)
            else:
                unresolved, c = unresolved.union(s), c.union(s)
    return ComponentSpectra(pp, c, ac, sc, results, unresolved)


@dataclass(eq=False)
class QuotientClass:
    """Class [A] of a continuous element modulo absolutely continuous ones.

    ``sc_mass`` is a surrogate: the largest fitted growth exponent of the
    windowed Plancherel mass over the family (0 for AC representatives).
    """

    representative: object
    action: object
    functionals: list
    config: AnalysisConfig
    sc_mass: float = 0.0
    label: str = ""

    @classmethod
    def of(cls, action, A, functionals, config) -> "QuotientClass":
        cl = classify_element(action, A, functionals, config)
        if not cl.in_continuous:
            raise NotContinuous(f"element {cl.label!r} is not in the continuous subspace")
        growth = 0.0
        if cl.ac_status != AC:
            for curve in cl.plancherel_curve.values():
                L = [p[0] for p in curve]
                v = [max(p[1], 1e-300) for p in curve]
                growth = max(growth, float(np.polyfit(np.log(L), np.log(v), 1)[0]))
        return cls(A, action, list(functionals), config, growth, f"[{cl.label}]")

    @classmethod
    def zero(cls, action, functionals, config) -> "QuotientClass":
        A = action.model.combine([], [], label="0")
        return cls(A, action, list(functionals), config, 0.0, "[0]")


def quotient_act(cls: QuotientClass, x) -> QuotientClass:
    """The class of alpha_x of the representative."""
    x = as_parameter(x)
    moved = cls.action.translate(cls.representative, x)
    return QuotientClass.of(cls.action, moved, cls.functionals, cls.config)


def class_equal(a: QuotientClass, b: QuotientClass) -> bool:
    """Two classes agree when the difference of representatives classifies AC."""
    model = a.action.model
    diff = model.combine([1.0, -1.0], [a.representative, b.representative], label="diff")
    return classify_element(a.action, diff, a.functionals, a.config).ac_status == AC
