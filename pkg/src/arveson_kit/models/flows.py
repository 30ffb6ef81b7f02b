"""Scalar flows whose orbits are Fourier transforms of a prescribed probability measure.

The algebra is spanned by the unit and the translates ``alpha_s(F)`` of one
generator F; a functional is a scalar weight w with ``phi(I) = phi(F) = w``.
The orbit of F is the characteristic function ``chi(x) = int e^{ipx} dmu(p)``
of a measure mu, so the Fourier data of every orbit is mu itself (up to
normalisation).  There is no *-operation.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..core import Element, Functional, GroupAction, Model
from ..errors import InvalidConfig


class ScalarFlowModel(Model):
    """Common plumbing; subclasses supply :meth:`characteristic` and ``max_frequency``."""

    max_frequency = math.inf

    def characteristic(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def generator(self, label: str = "F") -> Element:
        return Element(self.name, (0.0, ((1.0, 0.0),)), label)

    def unit(self) -> Element:
        return Element(self.name, (1.0, ()), "I")

    def element(self, unit_coef=0.0, terms=(), label: Optional[str] = None) -> Element:
        """``unit_coef * I + sum_i c_i alpha_{s_i}(F)`` for ``terms = [(c_i, s_i), ...]``."""
        terms = tuple((complex(c), float(s)) for c, s in terms)
        return Element(self.name, (complex(unit_coef), terms), label)

    def functional(self, weight=1.0, label: Optional[str] = None) -> Functional:
        w = complex(weight)
        return Functional(self.name, w, is_state=abs(w - 1) < 1e-12, label=label or f"w={w:g}")

    def state(self) -> Functional:
        return self.functional(1.0, "omega")

    def element_norm(self, A: Element) -> float:
        unit, terms = A.data
        return abs(unit) + sum(abs(c) for c, _ in terms)

    def functional_norm(self, phi: Functional) -> float:
        return abs(phi.data)

    def combine(self, coeffs, elements, label=None) -> Element:
        unit, terms = 0.0, []
        for a, A in zip(coeffs, elements):
            unit += complex(a) * A.data[0]
            terms.extend((complex(a) * c, s) for c, s in A.data[1])
        return self.element(unit, terms, label)

    def combine_functionals(self, coeffs, functionals, label=None) -> Functional:
        return self.functional(sum(complex(a) * f.data for a, f in zip(coeffs, functionals)), label)

    def orbit(self, phi: Functional, A: Element, x: np.ndarray) -> np.ndarray:
        unit, terms = A.data
        out = np.full(x.shape, unit, dtype=complex)
        for c, s in terms:
            out += c * self.characteristic(x + s)
        return phi.data * out


class DensityFlowModel(ScalarFlowModel):
    """Flow for an absolutely continuous measure; only Gaussian densities have a closed form here.

    ``chi(x) = exp(i*mean*x - sigma**2 x**2 / 2)``; the reported maximum
    frequency is ``|mean| + 8 sigma`` (relative density mass beyond is
    below 1.3e-14).
    """

    def __init__(self, mean: float = 2.0, sigma: float = 1.0):
        problems = {}
        if not math.isfinite(mean):
            problems["mean"] = "must be finite"
        if not (math.isfinite(sigma) and sigma > 0):
            problems["sigma"] = "must be positive"
        if problems:
            raise InvalidConfig("invalid density flow", problems)
        self.mean, self.sigma = float(mean), float(sigma)
        self.name = f"gaussian_flow[{self.mean:g},{self.sigma:g}]"
        self.max_frequency = abs(self.mean) + 8.0 * self.sigma

    def density(self, p: np.ndarray) -> np.ndarray:
        z = (np.asarray(p, dtype=float) - self.mean) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def characteristic(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.mean * x - 0.5 * (self.sigma * x) ** 2)


class RieszProductModel(ScalarFlowModel):
    """Flow for the self-similar measure with ``chi(x) = prod_{k>=1} cos(r^k x)``.

    For ``r = 1/3`` this is the centred middle-thirds Cantor measure, supported
    in ``[-1/2, 1/2]``.  The product is truncated where the remaining factors
    differ from 1 by less than ``tol`` on the evaluated points.
    """

    def __init__(self, ratio: float = 1.0 / 3.0, tol: float = 1e-14):
        if not (0.0 < ratio < 0.5):
            raise InvalidConfig("invalid Riesz product", {"ratio": "must lie in (0, 1/2)"})
        self.ratio = float(ratio)
        self.tol = float(tol)
        self.name = f"riesz_flow[{self.ratio:.12g}]"
        self.max_frequency = self.ratio / (1.0 - self.ratio)

    def depth(self, xmax: float) -> int:
        """Number of factors so that ``1 - prod_{k>K} cos(r^k x)`` stays below ``tol``."""
        r, xmax = self.ratio, max(float(xmax), 1.0)
        k = 1
        # the tail product deviates from 1 by at most sum_{j>k} (r^j x)^2 / 2
        while 0.5 * (xmax * r ** (k + 1)) ** 2 / (1.0 - r * r) >= self.tol:
            k += 1
        return k

    def characteristic(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape)
        if x.size == 0:
            return out.astype(complex)
        K = self.depth(np.abs(x).max())
        for k in range(1, K + 1):
            out *= np.cos(x * self.ratio ** k)
        return out.astype(complex)


class FlowAction(GroupAction):
    """``alpha_t(alpha_s(F)) = alpha_{t+s}(F)`` on a scalar flow model."""

    dim = 1
    signature = (1,)
    lattice_axes = (False,)
    periods = (None,)
    name = "flow"

    def __init__(self, model: ScalarFlowModel):
        self.model = model
        self.max_frequency = (float(model.max_frequency),)

    def pair(self, phi, A, points) -> np.ndarray:
        x = np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]
        return self.model.orbit(phi, A, x)

    def translate(self, A, y) -> Element:
        t = float(np.atleast_1d(getattr(y, "coordinates", y))[0])
        unit, terms = A.data
        return self.model.element(unit, [(c, s + t) for c, s in terms], A.label)


def build_density_flow(mean: float = 2.0, sigma: float = 1.0) -> tuple:
    model = DensityFlowModel(mean, sigma)
    return model, FlowAction(model)


def build_riesz_product(ratio: float = 1.0 / 3.0) -> tuple:
    model = RieszProductModel(ratio)
    return model, FlowAction(model)
