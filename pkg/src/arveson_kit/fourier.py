"""Windowed Fourier analysis of orbit functions, support detection and Arveson spectra.

Convention: the transform of an orbit f(x) = phi(alpha_x(A)) is

    F(p) = (2 pi)^{-d/2} sum_x h^d e^{-i p.x} f(x),

with ``p.x = sum_k s_k p_k x_k`` for the action's signature s (Minkowski
``p0 x0 - p1 x1`` for spacetime actions).  A pure exponential ``e^{iqx}``
gives a peak of height ``|K| (2 pi)^{-d/2}`` at ``p = q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .core import AnalysisConfig, OrbitSamples, parallel_map, sample_orbit
from .errors import SignatureMismatch

ABS_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Gridded transform of an orbit; ``axes`` are ascending frequency nodes."""

    axes: tuple
    values: np.ndarray
    bins: tuple
    cell: tuple
    signature: tuple
    periodic: tuple
    taper: tuple
    window: object = None
    label: str = ""
    _perm: tuple = field(default=(), repr=False)
    _origin: tuple = field(default=(), repr=False)
    _steps: tuple = field(default=(), repr=False)
    _taper_arrays: tuple = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return len(self.axes)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def mass(self) -> float:
        """Plancherel mass ``sum |F|^2 dp``."""
        return float(np.sum(np.abs(self.values) ** 2) * np.prod(self.bins))

    def l1_mass(self) -> float:
        return float(np.sum(np.abs(self.values)) * np.prod(self.bins))

    def to_csv(self) -> str:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        cols = [m.ravel() for m in mesh] + [np.abs(self.values).ravel()]
        head = ",".join([f"p{k}" for k in range(self.dim)] + ["abs"])
        lines = [head] + [",".join(repr(float(v)) for v in row) for row in zip(*cols)]
        return "\n".join(lines) + "\n"


def kaiser_beta(tau_rel: float) -> float:
    """Kaiser shape parameter whose sidelobes stay below ``tau_rel / 10``."""
    A = -20.0 * math.log10(tau_rel / 10.0)
    if A > 50:
        return 0.1102 * (A - 8.7)
    if A >= 21:
        return 0.5842 * (A - 21) ** 0.4 + 0.07886 * (A - 21)
    return 0.0


@lru_cache(maxsize=64)
def _taper_profile(n: int, tau_rel: float) -> tuple:
    """Mean-one Kaiser window of length n and its main-lobe half-width (in bins) at level tau_rel."""
    beta = kaiser_beta(tau_rel)
    for _ in range(40):
        w = np.kaiser(n, beta)
        pad = 16
        W = np.abs(np.fft.rfft(w, pad * n))
        W /= W[0]
        below = np.nonzero(W < tau_rel)[0]
        first = below[0] if below.size else W.size
        if first >= W.size or W[first:].max() < tau_rel:
            break
        beta += 0.5
    w = w / w.mean()
    w.setflags(write=False)
    return w, first / pad


def orbit_fourier(samples: OrbitSamples, taper: Optional[str] = None,
                  tau_rel: float = 1e-6) -> SpectralDensity:
    """Windowed Fourier transform of an orbit.

    Parameters
    ----------
    taper : {None, "auto", "kaiser"}
        ``None`` is the plain transform (exact inverse and Parseval identity).
        ``"auto"`` applies a mean-one Kaiser taper on non-periodic axes whose
        edge values are not negligible, which keeps leakage below ``tau_rel``
        at the price of a wider resolution cell.
    """
    f = np.asarray(samples.values, dtype=complex)
    d = samples.dim
    peak = np.abs(f).max() if f.size else 0.0
    tapers, bins, cells, used = [], [], [], []
    for k in range(d):
        n = f.shape[k]
        h = samples.steps[k]
        b = 2 * math.pi / (n * h)
        bins.append(b)
        use = False
        if taper is not None and not samples.periodic[k] and peak > 0:
            if taper == "kaiser":
                use = True
            else:
                edge = np.abs(np.take(f, [0, 1, n - 2, n - 1], axis=k)).max()
                use = edge > 1e-2 * tau_rel * peak
        if use:
            w, half = _taper_profile(n, tau_rel)
            tapers.append(w)
            cells.append((half + 1.0) * b)
        else:
            tapers.append(None)
            cells.append(b)
        used.append(bool(use))
    g = f.copy()
    for k, w in enumerate(tapers):
        if w is not None:
            shape = [1] * d
            shape[k] = -1
            g = g * w.reshape(shape)
    F = np.fft.fftn(g)
    axes, perms = [], []
    for k in range(d):
        n = f.shape[k]
        h = samples.steps[k]
        nu = 2 * math.pi * np.fft.fftfreq(n, h)
        phase = np.exp(-1j * nu * samples.axes[k][0]) * h / math.sqrt(2 * math.pi)
        shape = [1] * d
        shape[k] = -1
        F = F * phase.reshape(shape)
        p = samples.signature[k] * nu
        perm = np.argsort(p, kind="stable")
        F = np.take(F, perm, axis=k)
        axes.append(p[perm])
        perms.append(perm)
    return SpectralDensity(tuple(axes), F, tuple(bins), tuple(cells), tuple(samples.signature),
                           tuple(samples.periodic), tuple(used), samples.window, samples.label,
                           tuple(perms), tuple(a[0] for a in samples.axes), samples.steps,
                           tuple(tapers))


def inverse_fourier(density: SpectralDensity) -> np.ndarray:
    """Undo :func:`orbit_fourier` and return the sample values."""
    F = np.array(density.values, dtype=complex)
    d = density.dim
    for k in range(d):
        inv = np.empty_like(density._perm[k])
        inv[density._perm[k]] = np.arange(inv.size)
        F = np.take(F, inv, axis=k)
        n = F.shape[k]
        h = density._steps[k]
        nu = 2 * math.pi * np.fft.fftfreq(n, h)
        phase = np.exp(-1j * nu * density._origin[k]) * h / math.sqrt(2 * math.pi)
        shape = [1] * d
        shape[k] = -1
        F = F / phase.reshape(shape)
    g = np.fft.ifftn(F)
    for k, w in enumerate(density._taper_arrays):
        if w is not None:
            shape = [1] * d
            shape[k] = -1
            g = g / w.reshape(shape)
    return g


@dataclass(frozen=True, eq=False)
class SupportSet:
    """Finite union of closed, pairwise disjoint axis-aligned boxes.

    ``boxes`` has shape ``(n, d, 2)``; ``cell`` is the per-axis resolution
    used as tolerance for "within one cell" comparisons.
    """

    boxes: np.ndarray
    cell: tuple
    threshold: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.boxes, dtype=float).reshape(-1, len(self.cell), 2)
        object.__setattr__(self, "boxes", _merge(b))
        object.__setattr__(self, "cell", tuple(float(c) for c in self.cell))

    @classmethod
    def empty(cls, dim: int = 1, cell=None) -> "SupportSet":
        return cls(np.zeros((0, dim, 2)), tuple(cell) if cell is not None else (0.0,) * dim)

    @classmethod
    def from_points(cls, points, halfwidth) -> "SupportSet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        hw = np.broadcast_to(np.asarray(halfwidth, dtype=float), (pts.shape[1],))
        boxes = np.stack([pts - hw, pts + hw], axis=-1)
        return cls(boxes, tuple(hw))

    @property
    def dim(self) -> int:
        return len(self.cell)

    def is_empty(self) -> bool:
        return len(self.boxes) == 0

    def __len__(self) -> int:
        return len(self.boxes)

    def union(self, *others: "SupportSet") -> "SupportSet":
        sets = (self,) + others
        boxes = np.concatenate([s.boxes for s in sets], axis=0)
        cell = tuple(np.max([s.cell for s in sets], axis=0))
        return SupportSet(boxes, cell, max(s.threshold for s in sets))

    def dilated(self, amount=None) -> "SupportSet":
        amt = np.broadcast_to(np.asarray(self.cell if amount is None else amount, dtype=float),
                              (self.dim,))
        b = self.boxes.copy()
        b[:, :, 0] -= amt
        b[:, :, 1] += amt
        return SupportSet(b, self.cell, self.threshold)

    def negated(self) -> "SupportSet":
        return SupportSet(-self.boxes[:, :, ::-1], self.cell, self.threshold)

    def reflected(self, signature) -> "SupportSet":
        """Flip the axes with negative signature (used to compare with cone conditions)."""
        b = self.boxes.copy()
        for k, s in enumerate(signature):
            if s < 0:
                b[:, k, :] = -b[:, k, ::-1]
        return SupportSet(b, self.cell, self.threshold)

    def sumset(self, other: "SupportSet") -> "SupportSet":
        if self.is_empty() or other.is_empty():
            return SupportSet.empty(self.dim, self.cell)
        b = self.boxes[:, None] + other.boxes[None, :]
        # each summand is known up to its own cell, so the resolutions add
        return SupportSet(b.reshape(-1, self.dim, 2), tuple(np.add(self.cell, other.cell)))

    def contains_point(self, p, tol=0.0) -> bool:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        tol = np.broadcast_to(np.asarray(tol, dtype=float), p.shape)
        inside = (self.boxes[:, :, 0] - tol <= p) & (p <= self.boxes[:, :, 1] + tol)
        return bool(np.any(np.all(inside, axis=1)))

    def contains_points(self, pts, tol=0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.is_empty():
            return np.zeros(len(pts), dtype=bool)
        tol = np.broadcast_to(np.asarray(tol, dtype=float), (self.dim,))
        lo = self.boxes[None, :, :, 0] - tol
        hi = self.boxes[None, :, :, 1] + tol
        inside = (lo <= pts[:, None, :]) & (pts[:, None, :] <= hi)
        return np.any(np.all(inside, axis=2), axis=1)

    def uncovered(self, other: "SupportSet", tol=None) -> "SupportSet":
        """Boxes of ``other`` not contained in this set dilated by ``tol`` (default one cell)."""
        big = self.dilated(tol)
        bad = []
        for box in other.boxes:
            ok = np.any(np.all((big.boxes[:, :, 0] <= box[:, 0] + 1e-12)
                               & (box[:, 1] - 1e-12 <= big.boxes[:, :, 1]), axis=1)) \
                if not big.is_empty() else False
            if not ok:
                bad.append(box)
        return SupportSet(np.array(bad).reshape(-1, self.dim, 2), other.cell, other.threshold)

    def covers(self, other: "SupportSet", tol=None) -> bool:
        return self.uncovered(other, tol).is_empty()

    def equals_within(self, other: "SupportSet", tol=None) -> bool:
        if tol is None:
            tol = tuple(np.maximum(self.cell, other.cell))
        return self.covers(other, tol) and other.covers(self, tol)

    def intersects_box(self, box) -> bool:
        box = np.asarray(box, dtype=float)
        if self.is_empty():
            return False
        ok = (self.boxes[:, :, 0] <= box[:, 1]) & (box[:, 0] <= self.boxes[:, :, 1])
        return bool(np.any(np.all(ok, axis=1)))

    def cover_fraction(self, axes: Sequence[np.ndarray], tol=0.0) -> float:
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return float(np.mean(self.contains_points(pts, tol)))

    def to_dict(self) -> dict:
        return {"boxes": [[[float(lo), float(hi)] for lo, hi in box] for box in self.boxes],
                "cell": list(self.cell), "threshold": self.threshold}

    @classmethod
    def from_dict(cls, data: dict) -> "SupportSet":
        cell = tuple(data["cell"])
        return cls(np.array(data["boxes"], dtype=float).reshape(-1, len(cell), 2), cell,
                   data.get("threshold", 0.0))

    def to_csv(self) -> str:
        cols = []
        for k in range(self.dim):
            cols += [f"lo{k}", f"hi{k}"]
        lines = [",".join(cols)]
        for box in self.boxes:
            lines.append(",".join(repr(float(v)) for v in box.ravel()))
        return "\n".join(lines) + "\n"


def _merge(boxes: np.ndarray) -> np.ndarray:
    """Replace overlapping boxes by their bounding boxes until all are disjoint; sorted output."""
    items = [b for b in boxes]
    changed = True
    while changed and len(items) > 1:
        changed = False
        items.sort(key=lambda b: tuple(b[:, 0]))
        out = []
        for b in items:
            for i, c in enumerate(out):
                if np.all(c[:, 0] <= b[:, 1]) and np.all(b[:, 0] <= c[:, 1]):
                    out[i] = np.stack([np.minimum(c[:, 0], b[:, 0]),
                                       np.maximum(c[:, 1], b[:, 1])], axis=-1)
                    changed = True
                    break
            else:
                out.append(b)
        items = out
    items.sort(key=lambda b: tuple(b[:, 0]))
    d = boxes.shape[1] if boxes.ndim == 3 else 1
    return np.array(items, dtype=float).reshape(-1, d, 2)


def detect_support(density: SpectralDensity, tau_rel: float = 1e-6,
                   floor: float = ABS_FLOOR) -> SupportSet:
    """Grid nodes with ``|F| >= tau_rel * max|F|``, dilated by one bin and merged into boxes."""
    if not 0.0 < tau_rel < 1.0:
        raise ValueError("tau_rel must lie in (0, 1)")
    mag = np.abs(density.values)
    top = float(mag.max()) if mag.size else 0.0
    if top < floor:
        return SupportSet.empty(density.dim, density.cell)
    mask = mag >= tau_rel * top
    labels, count = ndimage.label(mask, structure=np.ones((3,) * density.dim))
    boxes = []
    for sl in ndimage.find_objects(labels):
        box = []
        for k, s in enumerate(sl):
            ax = density.axes[k]
            box.append([ax[s.start] - density.bins[k], ax[s.stop - 1] + density.bins[k]])
        boxes.append(box)
    return SupportSet(np.array(boxes).reshape(-1, density.dim, 2), density.cell,
                      tau_rel * top)


def orbit_support(action, phi, A, window, tau_rel: float = 1e-6, taper: str = "auto") -> SupportSet:
    samples = sample_orbit(action, phi, A, window)
    return detect_support(orbit_fourier(samples, taper=taper, tau_rel=tau_rel), tau_rel)


@dataclass
class SpectrumResult:
    """Arveson spectrum of a generating family together with the per-element spectra."""

    total: SupportSet
    per_element: dict
    per_pair: dict

    def to_dict(self) -> dict:
        return {"total": self.total.to_dict(),
                "per_element": {k: v.to_dict() for k, v in sorted(self.per_element.items())}}


def _label(h, i, prefix) -> str:
    return h.label if getattr(h, "label", None) else f"{prefix}{i}"


def arveson_spectrum(action, elements, functionals, config: AnalysisConfig) -> SpectrumResult:
    """Union over all (A, phi) pairs of the detected supports on the largest window."""
    if not elements or not functionals:
        raise ValueError("generator lists must be nonempty")
    pairs = [(i, j) for i in range(len(elements)) for j in range(len(functionals))]

    def job(ij):
        i, j = ij
        return orbit_support(action, functionals[j], elements[i], config.largest,
                             config.tau_rel, config.taper)

    supports = parallel_map(job, pairs, config.threads)
    d = config.largest.dim
    per_element, per_pair = {}, {}
    for (i, j), s in zip(pairs, supports):
        la, lf = _label(elements[i], i, "A"), _label(functionals[j], j, "phi")
        per_pair[(la, lf)] = s
        per_element[la] = per_element[la].union(s) if la in per_element else s
    total = SupportSet.empty(d)
    for s in per_element.values():
        total = total.union(s)
    return SpectrumResult(total, per_element, per_pair)


@dataclass
class SubspaceReport:
    passed: bool
    violations: list

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "violations": [{"functional": f, "leaks": s.to_dict()} for f, s in self.violations]}


def spectral_subspace_test(action, A, delta: SupportSet, functionals, config: AnalysisConfig) -> SubspaceReport:
    """Whether every detected orbit support of A lies in ``delta`` (one-cell tolerance)."""
    violations = []
    for j, phi in enumerate(functionals):
        s = orbit_support(action, phi, A, config.largest, config.tau_rel, config.taper)
        if s.is_empty():
            continue
        if delta.is_empty():
            leak = s
        else:
            tol = tuple(np.maximum(delta.cell, s.cell))
            leak = delta.uncovered(s, tol)
        if not leak.is_empty():
            violations.append((_label(phi, j, "phi"), leak))
    return SubspaceReport(not violations, violations)


@dataclass
class TransferReport:
    support: SupportSet
    energy_decreasing: bool
    note: str = ("frequency boxes in (p0, p1) with p.x = p0 x0 - p1 x1; "
                 "energy-decreasing means no box meets the closed cone p0 >= |p1|")

    def to_dict(self) -> dict:
        return {"support": self.support.to_dict(), "energy_decreasing": self.energy_decreasing,
                "note": self.note}


def meets_forward_cone(box) -> bool:
    """Whether the box ``[[a0, b0], [a1, b1]]`` meets ``{p0 >= |p1|}``."""
    (a0, b0), (a1, b1) = box
    nearest = 0.0 if a1 <= 0.0 <= b1 else min(abs(a1), abs(b1))
    return b0 >= nearest


def energy_momentum_transfer(action, A, functionals, config: AnalysisConfig) -> TransferReport:
    if tuple(action.signature) != (1, -1):
        raise SignatureMismatch("energy-momentum transfer needs a 1+1 spacetime action")
    s = SupportSet.empty(2)
    for phi in functionals:
        s = s.union(orbit_support(action, phi, A, config.largest, config.tau_rel, config.taper))
    flag = not any(meets_forward_cone(b) for b in s.boxes)
    return TransferReport(s, flag)
