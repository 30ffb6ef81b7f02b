"""Quasi-free harmonic chain: one-dimensional lattice scalar field in its Fock vacuum.

The infinite chain is computed on a ring of N sites, used as a spectrally
accurate quadrature of the momentum torus.  Modes ``b_j`` carry momentum
``theta_j = 2 pi j / N`` (wrapped to [-pi, pi)) and energy
``omega_j = sqrt(m^2 + 4 sin^2(theta_j / 2))``; spacetime translations act by

    alpha_(t, n)(b_j) = exp(-i omega_j t + i theta_j n) b_j .

Observables are normal-ordered quadratic polynomials in the modes

    A = c + sum u_j b_j^* + sum v_j b_j + sum M_jk b_j^* b_k
          + sum P_jk b_j^* b_k^* + sum Q_jk b_j b_k

(P, Q symmetric) so that ``omega_0(A) = c``.  Vectors live in the sectors of
at most two particles, ``Psi = c0 Omega + sum c1_j b_j^* Omega
+ 2^{-1/2} sum c2_jk b_j^* b_k^* Omega`` with c2 symmetric; matrix elements
of quadratic observables between such vectors are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core import Element, Functional, GroupAction, Model
from ..errors import InvalidConfig


def _sym(X):
    return 0.5 * (X + X.T)


@dataclass(frozen=True, eq=False)
class QuadForm:
    """Coefficients of a normal-ordered quadratic observable (``None`` for absent terms)."""

    c: complex = 0.0
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    M: Optional[np.ndarray] = None
    P: Optional[np.ndarray] = None
    Q: Optional[np.ndarray] = None
    recipe: Optional[tuple] = None

    @property
    def centered(self) -> bool:
        return abs(self.c) == 0.0

    def terms(self):
        return (self.u, self.v, self.M, self.P, self.Q)


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _scale(a, s):
    return None if a is None else s * a


@dataclass(frozen=True, eq=False)
class FockVector:
    c0: complex
    c1: np.ndarray
    c2: Optional[np.ndarray] = None
    recipe: Optional[tuple] = None

    def inner(self, other: "FockVector") -> complex:
        s = np.conj(self.c0) * other.c0 + np.vdot(self.c1, other.c1)
        if self.c2 is not None and other.c2 is not None:
            s += np.vdot(self.c2, other.c2)
        return complex(s)

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def scaled(self, s) -> "FockVector":
        return FockVector(s * self.c0, s * self.c1, None if self.c2 is None else s * self.c2, None)

    def plus(self, other: "FockVector") -> "FockVector":
        return FockVector(self.c0 + other.c0, self.c1 + other.c1, _add(self.c2, other.c2), None)

    def as_flat(self) -> np.ndarray:
        n = self.c1.size
        c2 = np.zeros((n, n), dtype=complex) if self.c2 is None else self.c2
        return np.concatenate([[self.c0], self.c1, c2.ravel()])

    @staticmethod
    def from_flat(x: np.ndarray, n: int) -> "FockVector":
        c2 = _sym(np.asarray(x[1 + n:], dtype=complex).reshape(n, n))
        return FockVector(complex(x[0]), np.asarray(x[1:1 + n], dtype=complex), c2)


class LatticeFieldModel(Model):
    """Harmonic chain with mass m on a ring of ``nodes`` sites.

    Parameters
    ----------
    mass : float
        Positive mass; the one-particle band is ``[m, sqrt(m^2 + 4)]``.
    nodes : int
        Ring size (>= 256, divisible by 4 so that theta = +-pi/2 is a grid mode).
    energy_bound : float, optional
        The bound E of the bounded-energy state family (default 5).
    mu : float, optional
        Frequency bound of admissible time smearings (default m / 2).
    """

    def __init__(self, mass: float = 1.0, nodes: int = 512, energy_bound: Optional[float] = None,
                 mu: Optional[float] = None, min_nodes: int = 256):
        problems = {}
        if not (isinstance(mass, (int, float)) and math.isfinite(mass) and mass > 0):
            problems["mass"] = "must be a positive number"
        if not (isinstance(nodes, int) and nodes >= min_nodes and nodes % 4 == 0):
            problems["nodes"] = f"must be an integer >= {min_nodes} divisible by 4"
        if problems:
            raise InvalidConfig("invalid lattice model", problems)
        self.mass = float(mass)
        self.N = int(nodes)
        self.min_nodes = min_nodes
        self.energy_bound = 5.0 if energy_bound is None else float(energy_bound)
        self.mu = self.mass / 2 if mu is None else float(mu)
        if not 0 < self.mu <= self.energy_bound:
            raise InvalidConfig("invalid lattice model", {"mu": "need 0 < mu <= energy bound"})
        j = np.arange(self.N)
        self.index = j
        self.theta = 2 * np.pi * ((j + self.N // 2) % self.N - self.N // 2) / self.N
        self.omega = np.sqrt(self.mass ** 2 + 4 * np.sin(self.theta / 2) ** 2)
        self.alpha = 1.0 / np.sqrt(2 * self.N * self.omega)
        self.beta = -1j * np.sqrt(self.omega / (2 * self.N))
        self.name = f"lattice[m={self.mass:g},N={self.N}]"
        self.band = (self.mass, math.sqrt(self.mass ** 2 + 4))

    def refined(self, factor: int = 2) -> "LatticeFieldModel":
        return LatticeFieldModel(self.mass, self.N * factor, self.energy_bound, self.mu, self.min_nodes)

    def mode_index(self, theta: float) -> int:
        return int(round(theta * self.N / (2 * np.pi))) % self.N

    # packets and vectors

    def packet(self, spec) -> np.ndarray:
        """Normalised momentum profile: ``("vonmises", theta0, kappa)``, ``("mode", theta)``,
        ``("step", lo, hi)`` or ``("site", n)``."""
        kind = spec[0]
        if kind == "vonmises":
            f = np.exp(spec[2] * (np.cos(self.theta - spec[1]) - 1.0)).astype(complex)
        elif kind == "mode":
            f = np.zeros(self.N, dtype=complex)
            f[self.mode_index(spec[1])] = 1.0
        elif kind == "step":
            f = ((self.theta >= spec[1]) & (self.theta <= spec[2])).astype(complex)
        elif kind == "site":
            f = np.exp(-1j * self.theta * spec[1]) / math.sqrt(self.N)
        else:
            raise InvalidConfig("unknown packet", {"packet": repr(spec)})
        nrm = np.linalg.norm(f)
        if nrm == 0:
            raise InvalidConfig("empty packet", {"packet": repr(spec)})
        return f / nrm

    def vector(self, spec) -> FockVector:
        """Fock vector from ``("vacuum",)``, ``("one", packet)``, ``("two", p, q)`` or
        ``("super", ((coef, spec), ...))`` (normalised superposition)."""
        N = self.N
        kind = spec[0]
        if kind == "vacuum":
            out = FockVector(1.0, np.zeros(N, dtype=complex), None)
        elif kind == "one":
            out = FockVector(0.0, self.packet(spec[1]), None)
        elif kind == "two":
            f, g = self.packet(spec[1]), self.packet(spec[2])
            c2 = (np.outer(f, g) + np.outer(g, f)) / math.sqrt(2)
            nrm = math.sqrt(np.vdot(c2, c2).real)
            out = FockVector(0.0, np.zeros(N, dtype=complex), c2 / nrm)
        elif kind == "super":
            out = FockVector(0.0, np.zeros(N, dtype=complex), None)
            for coef, sub in spec[1]:
                out = out.plus(self.vector(sub).scaled(coef))
            out = out.scaled(1.0 / out.norm())
        else:
            raise InvalidConfig("unknown vector", {"vector": repr(spec)})
        return replace(out, recipe=tuple(spec))

    def energy(self, vec: FockVector) -> float:
        e = float(np.sum(self.omega * np.abs(vec.c1) ** 2))
        if vec.c2 is not None:
            e += float(np.sum((self.omega[:, None] + self.omega[None, :]) * np.abs(vec.c2) ** 2))
        return e

    def max_energy(self, vec: FockVector, rel: float = 1e-12) -> float:
        """Largest energy carried by a non-negligible component of the vector."""
        top = 0.0
        scale = max(abs(vec.c0), np.abs(vec.c1).max(initial=0.0),
                    0.0 if vec.c2 is None else np.abs(vec.c2).max())
        mask1 = np.abs(vec.c1) > rel * scale
        if mask1.any():
            top = max(top, float(self.omega[mask1].max()))
        if vec.c2 is not None:
            mask2 = np.abs(vec.c2) > rel * scale
            if mask2.any():
                top = max(top, float((self.omega[:, None] + self.omega[None, :])[mask2].max()))
        return top

    def project_energy(self, vec: FockVector, E: float) -> FockVector:
        c1 = np.where(self.omega <= E, vec.c1, 0.0)
        c2 = None
        if vec.c2 is not None:
            c2 = np.where(self.omega[:, None] + self.omega[None, :] <= E, vec.c2, 0.0)
        return FockVector(vec.c0, c1, c2)

    def number_sectors(self, vec: FockVector) -> tuple:
        return (abs(vec.c0) ** 2, float(np.sum(np.abs(vec.c1) ** 2)),
                0.0 if vec.c2 is None else float(np.sum(np.abs(vec.c2) ** 2)))

    # functionals

    def vector_functional(self, bra, ket, label: Optional[str] = None) -> Functional:
        """``A -> <bra, A ket>``; arguments are vector specs or :class:`FockVector`."""
        b = bra if isinstance(bra, FockVector) else self.vector(bra)
        k = ket if isinstance(ket, FockVector) else self.vector(ket)
        is_state = b is k or (b.recipe is not None and b.recipe == k.recipe)
        is_state = is_state and abs(b.norm() - 1.0) < 1e-12
        E = max(self.max_energy(b), self.max_energy(k))
        return Functional(self.name, ((1.0 + 0j, b, k),), is_state, E, label)

    def state(self, spec, label: Optional[str] = None) -> Functional:
        v = self.vector(spec)
        return Functional(self.name, ((1.0 + 0j, v, v),), True, self.max_energy(v),
                          label or _spec_label(spec))

    def vacuum(self) -> Functional:
        return self.state(("vacuum",), "omega0")

    def adjoint(self, phi: Functional) -> Functional:
        data = tuple((np.conj(c), k, b) for c, b, k in phi.data)
        label = None if phi.label is None else "bar(" + phi.label + ")"
        return Functional(self.name, data, phi.is_state, phi.energy_bound, label)

    def combine_functionals(self, coeffs, functionals, label=None) -> Functional:
        data = tuple((complex(a) * c, b, k) for a, f in zip(coeffs, functionals) for c, b, k in f.data)
        E = max([f.energy_bound or 0.0 for f in functionals] + [0.0])
        return Functional(self.name, data, False, E, label)

    def functional_norm(self, phi: Functional) -> float:
        return float(sum(abs(c) * b.norm() * k.norm() for c, b, k in phi.data))

    def mean_energy(self, phi: Functional) -> complex:
        """``phi(H)``."""
        total = 0.0
        for c, b, k in phi.data:
            total += c * self._h_element(b, k)
        return complex(total)

    def _h_element(self, b: FockVector, k: FockVector) -> complex:
        s = np.sum(self.omega * np.conj(b.c1) * k.c1)
        if b.c2 is not None and k.c2 is not None:
            s += np.sum((self.omega[:, None] + self.omega[None, :]) * np.conj(b.c2) * k.c2)
        return complex(s)

    # observables

    def element(self, form: QuadForm, label: Optional[str] = None,
                locality_radius: Optional[float] = None) -> Element:
        return Element(self.name, form, label, locality_radius)

    def unit(self) -> Element:
        return self.element(QuadForm(1.0, recipe=("unit",)), "I")

    def linear(self, spec) -> tuple:
        """``(u, v)`` of a linear form: ``("field", n)``, ``("momentum", n)``,
        ``("a", packet)`` (annihilator a(f) = sum conj(f_j) b_j), ``("adag", packet)``."""
        kind = spec[0]
        if kind == "field":
            n = spec[1]
            return self.alpha * np.exp(-1j * self.theta * n), self.alpha * np.exp(1j * self.theta * n)
        if kind == "momentum":
            n = spec[1]
            return np.conj(self.beta) * np.exp(-1j * self.theta * n), self.beta * np.exp(1j * self.theta * n)
        zero = np.zeros(self.N, dtype=complex)
        if kind == "a":
            return zero, np.conj(self.packet(spec[1]))
        if kind == "adag":
            return self.packet(spec[1]), zero
        raise InvalidConfig("unknown linear form", {"observable": repr(spec)})

    def observable(self, spec, label: Optional[str] = None) -> Element:
        """Build an observable from a nested spec.

        Specs: ``("unit",)``, linear forms (see :meth:`linear`),
        ``("wick", lin1, lin2)`` (normal-ordered product), ``("number", p, q)``
        (a^*(f) a(g)), ``("energy_density", n)``, ``("lin", ((coef, spec), ...))``,
        ``("smear", spec, smearing)`` and ``("translate", spec, (t, n))``.
        """
        form = self._form(tuple(spec))
        radius = _locality(spec)
        return self.element(form, label or _spec_label(spec), radius)

    def _form(self, spec) -> QuadForm:
        kind = spec[0]
        if kind == "unit":
            return QuadForm(1.0, recipe=spec)
        if kind in ("field", "momentum", "a", "adag"):
            u, v = self.linear(spec)
            return QuadForm(0.0, u, v, recipe=spec)
        if kind == "wick":
            u1, v1 = self.linear(spec[1])
            u2, v2 = self.linear(spec[2])
            return QuadForm(0.0, None, None, np.outer(u1, v2) + np.outer(u2, v1),
                            _sym(np.outer(u1, u2)), _sym(np.outer(v1, v2)), recipe=spec)
        if kind == "number":
            f, g = self.packet(spec[1]), self.packet(spec[2])
            return QuadForm(0.0, None, None, np.outer(f, np.conj(g)), recipe=spec)
        if kind == "energy_density":
            n = spec[1]
            parts = [(0.5, ("wick", ("momentum", n), ("momentum", n))),
                     (0.5 * self.mass ** 2, ("wick", ("field", n), ("field", n)))]
            form = self._lin(parts)
            for a, b in ((n + 1, n), (n, n - 1)):
                ua, va = self.linear(("field", a))
                ub, vb = self.linear(("field", b))
                du, dv = ua - ub, va - vb
                grad = QuadForm(0.0, None, None, 2 * np.outer(du, dv), _sym(np.outer(du, du)),
                                _sym(np.outer(dv, dv)))
                form = _combine_forms([(1.0, form), (0.25, grad)])
            return replace(form, recipe=spec)
        if kind == "lin":
            return replace(self._lin(spec[1]), recipe=spec)
        if kind == "smear":
            return replace(smear_form(self, self._form(spec[1]), spec[2]), recipe=spec)
        if kind == "translate":
            t, n = spec[2]
            return replace(translate_form(self, self._form(spec[1]), t, n), recipe=spec)
        raise InvalidConfig("unknown observable", {"observable": repr(spec)})

    def _lin(self, parts) -> QuadForm:
        return _combine_forms([(coef, self._form(tuple(s))) for coef, s in parts])

    def rebuild(self, handle):
        """The same recipe on this model (used after :meth:`refined`)."""
        if isinstance(handle, Element):
            if handle.data.recipe is None:
                raise InvalidConfig("observable without recipe cannot be rebuilt", {})
            return self.element(self._form(handle.data.recipe), handle.label, handle.locality_radius)
        data = []
        for c, b, k in handle.data:
            if b.recipe is None or k.recipe is None:
                raise InvalidConfig("vector without recipe cannot be rebuilt", {})
            data.append((c, self.vector(b.recipe), self.vector(k.recipe)))
        E = max(max(self.max_energy(b), self.max_energy(k)) for _, b, k in data)
        return Functional(self.name, tuple(data), handle.is_state, E, handle.label)

    def star(self, A: Element) -> Element:
        f = A.data
        form = QuadForm(np.conj(f.c),
                        None if f.v is None else np.conj(f.v),
                        None if f.u is None else np.conj(f.u),
                        None if f.M is None else f.M.conj().T,
                        None if f.Q is None else np.conj(f.Q),
                        None if f.P is None else np.conj(f.P))
        label = None if A.label is None else A.label + "*"
        return self.element(form, label, A.locality_radius)

    def combine(self, coeffs, elements, label=None) -> Element:
        form = _combine_forms([(a, A.data) for a, A in zip(coeffs, elements)])
        recipes = [A.data.recipe for A in elements]
        if all(r is not None for r in recipes):
            form = replace(form, recipe=("lin", tuple((complex(a), r) for a, r in zip(coeffs, recipes))))
        radii = [A.locality_radius for A in elements]
        radius = None if any(r is None for r in radii) or not radii else max(radii)
        return self.element(form, label, radius)

    def element_norm(self, A: Element) -> float:
        """Upper bound of the norm of A compressed to the sectors with at most two particles."""
        f = A.data
        b = abs(f.c)
        for vec in (f.u, f.v):
            if vec is not None:
                b += math.sqrt(2) * float(np.linalg.norm(vec))
        if f.M is not None:
            b += 2 * float(np.linalg.norm(f.M, 2))
        for K in (f.P, f.Q):
            if K is not None:
                b += math.sqrt(2) * float(np.linalg.norm(K))
        return b

    def vacuum_value(self, A: Element) -> complex:
        return complex(A.data.c)

    # dynamics on vectors

    def apply(self, A: Element, vec: FockVector) -> FockVector:
        """``A vec`` truncated to at most two particles."""
        f = A.data
        N = self.N
        c0 = f.c * vec.c0
        c1 = f.c * vec.c1
        c2 = None if vec.c2 is None else f.c * vec.c2
        if f.u is not None:
            c1 = c1 + f.u * vec.c0
            c2 = _add(c2, math.sqrt(2) * _sym(np.outer(f.u, vec.c1)))
        if f.v is not None:
            c0 = c0 + np.dot(f.v, vec.c1)
            if vec.c2 is not None:
                c1 = c1 + math.sqrt(2) * (f.v @ vec.c2)
        if f.M is not None:
            c1 = c1 + f.M @ vec.c1
            if vec.c2 is not None:
                c2 = _add(c2, f.M @ vec.c2 + vec.c2 @ f.M.T)
        if f.P is not None:
            c2 = _add(c2, math.sqrt(2) * vec.c0 * f.P)
        if f.Q is not None and vec.c2 is not None:
            c0 = c0 + math.sqrt(2) * np.sum(f.Q * vec.c2)
        return FockVector(complex(c0), np.asarray(c1, dtype=complex).reshape(N), c2)

    def evolve_vector(self, vec: FockVector, t: float) -> FockVector:
        """``U(t) vec = e^{itH} vec``."""
        e1 = np.exp(1j * self.omega * t)
        c2 = None if vec.c2 is None else vec.c2 * np.outer(e1, e1)
        return FockVector(vec.c0, vec.c1 * e1, c2)

    # pairing weights

    def pair_weights(self, phi: Functional, A: Element) -> tuple:
        """Per-term weights whose phase-weighted sums give ``phi(alpha_(t,n)(A))``."""
        f = A.data
        w0, wu, wv, WM, WP, WQ = 0.0, None, None, None, None, None
        for coef, b, k in phi.data:
            bc1 = np.conj(b.c1)
            bc2 = None if b.c2 is None else np.conj(b.c2)
            if f.c != 0:
                w0 += coef * f.c * b.inner(k)
            if f.u is not None:
                X = k.c0 * bc1
                if bc2 is not None:
                    X = X + math.sqrt(2) * (bc2 @ k.c1)
                wu = _add(wu, coef * f.u * X)
            if f.v is not None:
                X = np.conj(b.c0) * k.c1
                if k.c2 is not None:
                    X = X + math.sqrt(2) * (k.c2 @ bc1)
                wv = _add(wv, coef * f.v * X)
            if f.M is not None:
                Y = np.outer(bc1, k.c1)
                if bc2 is not None and k.c2 is not None:
                    Y = Y + 2 * (bc2 @ k.c2.T)
                WM = _add(WM, coef * f.M * Y)
            if f.P is not None and bc2 is not None:
                WP = _add(WP, coef * math.sqrt(2) * k.c0 * f.P * bc2)
            if f.Q is not None and k.c2 is not None:
                WQ = _add(WQ, coef * math.sqrt(2) * np.conj(b.c0) * f.Q * k.c2)
        return w0, wu, wv, WM, WP, WQ

    def orbit_grid(self, phi: Functional, A: Element, ts, ns) -> np.ndarray:
        """``phi(alpha_(t,n)(A))`` on the product grid ``ts x ns`` (ns integers)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        ns = np.atleast_1d(np.asarray(ns)).astype(np.int64)
        N = self.N
        w0, wu, wv, WM, WP, WQ = self.pair_weights(phi, A)
        out = np.full((ts.size, ns.size), w0, dtype=complex)
        cols = ns % N
        if wu is not None or wv is not None:
            E = np.exp(1j * np.outer(ts, self.omega))
            lin = np.zeros((ts.size, N), dtype=complex)
            if wu is not None:
                lin += np.fft.fft(E * wu, axis=1)
            if wv is not None:
                lin += N * np.fft.ifft(np.conj(E) * wv, axis=1)
            out += lin[:, cols]
        j = self.index
        for W, sign_k, conj_all in ((WM, -1, False), (WP, 1, False), (WQ, 1, True)):
            if W is None or not np.any(W):
                continue
            # rows of Wd: fixed wrapped index combination d = j - k (M) or j + k (P, Q)
            if sign_k == -1:
                kk = (j[None, :] - j[:, None]) % N        # k = j - d
            else:
                kk = (j[:, None] - j[None, :]) % N        # k = d - j
            Wd = W[j[None, :], kk]
            freq = self.omega[None, :] + sign_k * self.omega[kk]
            if conj_all:
                freq = -freq
            S = _phase_sums(Wd, freq, ts)
            if conj_all:
                spec = N * np.fft.ifft(S, axis=1)
            else:
                spec = np.fft.fft(S, axis=1)
            out += spec[:, cols]
        return out


def _phase_sums(Wd: np.ndarray, freq: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """``S[t, d] = sum_j Wd[d, j] exp(i freq[d, j] t)`` for all t."""
    rows = np.nonzero(np.any(Wd != 0, axis=1))[0]
    S = np.zeros((ts.size, Wd.shape[0]), dtype=complex)
    if rows.size == 0:
        return S
    W = Wd[rows]
    F = freq[rows]
    if ts.size == 1 or np.ptp(np.diff(ts)) > 1e-12 * max(1.0, abs(ts).max()):
        for i, t in enumerate(ts):
            S[i, rows] = np.sum(W * np.exp(1j * F * t), axis=1)
        return S
    h = ts[1] - ts[0]
    step = np.exp(1j * F * h)
    Z = None
    for i, t in enumerate(ts):
        if i % 64 == 0:
            Z = W * np.exp(1j * F * t)
        else:
            Z = Z * step
        S[i, rows] = Z.sum(axis=1)
    return S


def _combine_forms(parts) -> QuadForm:
    c, u, v, M, P, Q = 0.0, None, None, None, None, None
    for a, f in parts:
        a = complex(a)
        c += a * f.c
        u, v = _add(u, _scale(f.u, a)), _add(v, _scale(f.v, a))
        M, P, Q = _add(M, _scale(f.M, a)), _add(P, _scale(f.P, a)), _add(Q, _scale(f.Q, a))
    return QuadForm(c, u, v, M, P, Q)


def translate_form(model: LatticeFieldModel, f: QuadForm, t: float, n: int) -> QuadForm:
    ph = np.exp(-1j * model.omega * t + 1j * model.theta * n)
    cp = np.conj(ph)
    return QuadForm(f.c,
                    None if f.u is None else f.u * cp,
                    None if f.v is None else f.v * ph,
                    None if f.M is None else f.M * np.outer(cp, ph),
                    None if f.P is None else f.P * np.outer(cp, cp),
                    None if f.Q is None else f.Q * np.outer(ph, ph),
                    f.recipe)


def smear_form(model: LatticeFieldModel, f: QuadForm, smearing) -> QuadForm:
    """``A(g) = int g(t) alpha_t(A) dt``: each term is multiplied by ``G(nu)`` at its frequency."""
    from .qft import as_smearing
    G = as_smearing(smearing).multiplier
    w = model.omega
    return QuadForm(f.c * G(np.zeros(1))[0],
                    None if f.u is None else f.u * G(w),
                    None if f.v is None else f.v * G(-w),
                    None if f.M is None else f.M * G(w[:, None] - w[None, :]),
                    None if f.P is None else f.P * G(w[:, None] + w[None, :]),
                    None if f.Q is None else f.Q * G(-(w[:, None] + w[None, :])),
                    f.recipe)


def _locality(spec) -> Optional[float]:
    kind = spec[0]
    if kind in ("field", "momentum"):
        return 0.0
    if kind == "energy_density":
        return 1.0
    if kind == "wick":
        a, b = _locality(spec[1]), _locality(spec[2])
        if a is None or b is None:
            return None
        return max(a, b) + abs(_site(spec[1]) - _site(spec[2])) / 2
    if kind == "lin":
        radii = [_locality(s) for _, s in spec[1]]
        return None if any(r is None for r in radii) else max(radii)
    if kind == "unit":
        return 0.0
    return None


def _site(spec) -> float:
    return float(spec[1]) if spec[0] in ("field", "momentum") else 0.0


def _spec_label(spec) -> str:
    kind = spec[0]
    if kind in ("vacuum", "unit"):
        return {"vacuum": "Omega", "unit": "I"}[kind]
    inner = ",".join(_spec_label(s) if isinstance(s, tuple) else f"{s:g}" if isinstance(s, float)
                     else str(s) for s in spec[1:])
    return f"{kind}({inner})"


class _LatticeAction(GroupAction):
    periods: tuple

    def check_handles(self, phi, A) -> None:
        super().check_handles(phi, A)


class LatticeSpaceAction(_LatticeAction):
    """Space translations beta_n; frequency pairing ``-p n`` (spatial part of the Minkowski form)."""

    dim = 1
    signature = (-1,)
    lattice_axes = (True,)
    name = "space"

    def __init__(self, model: LatticeFieldModel):
        self.model = model
        self.max_frequency = (math.pi,)
        self.periods = (model.N,)

    def pair(self, phi, A, points) -> np.ndarray:
        n = np.rint(np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]).astype(np.int64)
        return self.model.orbit_grid(phi, A, [0.0], n)[0]

    def pair_grid(self, phi, A, axes) -> np.ndarray:
        return self.model.orbit_grid(phi, A, [0.0], np.rint(axes[0]).astype(np.int64))[0]

    def translate(self, A, y) -> Element:
        n = int(round(float(np.atleast_1d(getattr(y, "coordinates", y))[0])))
        return self.model.element(translate_form(self.model, A.data, 0.0, n), A.label, A.locality_radius)


class LatticeTimeAction(_LatticeAction):
    """Time translations alpha_t; declared frequency range covers the two-particle band."""

    dim = 1
    signature = (1,)
    lattice_axes = (False,)
    periods = (None,)
    name = "time"

    def __init__(self, model: LatticeFieldModel):
        self.model = model
        self.max_frequency = (2 * model.band[1],)

    def pair(self, phi, A, points) -> np.ndarray:
        t = np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]
        return self.model.orbit_grid(phi, A, t, [0])[:, 0]

    def translate(self, A, y) -> Element:
        t = float(np.atleast_1d(getattr(y, "coordinates", y))[0])
        return self.model.element(translate_form(self.model, A.data, t, 0), A.label, A.locality_radius)


class LatticeSpacetimeAction(_LatticeAction):
    """Spacetime translations alpha_(t, n) with Minkowski pairing ``p0 t - p1 n``."""

    dim = 2
    signature = (1, -1)
    lattice_axes = (False, True)
    name = "spacetime"

    def __init__(self, model: LatticeFieldModel):
        self.model = model
        self.max_frequency = (2 * model.band[1], math.pi)
        self.periods = (None, model.N)

    def pair(self, phi, A, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        out = np.empty(len(pts), dtype=complex)
        for t in np.unique(pts[:, 0]):
            sel = pts[:, 0] == t
            out[sel] = self.model.orbit_grid(phi, A, [t], np.rint(pts[sel, 1]).astype(np.int64))[0]
        return out

    def pair_grid(self, phi, A, axes) -> np.ndarray:
        return self.model.orbit_grid(phi, A, axes[0], np.rint(axes[1]).astype(np.int64))

    def translate(self, A, y) -> Element:
        t, n = (float(v) for v in np.atleast_1d(getattr(y, "coordinates", y)))
        return self.model.element(translate_form(self.model, A.data, t, int(round(n))),
                                  A.label, A.locality_radius)


def build_lattice_model(mass: float = 1.0, nodes: int = 512, energy_bound: Optional[float] = None,
                        mu: Optional[float] = None) -> LatticeFieldModel:
    return LatticeFieldModel(mass, nodes, energy_bound, mu)
