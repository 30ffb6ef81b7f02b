"""Group actions, handles, sampling windows and the pairing <phi, alpha_x(A)>.

Every other module talks to a model only through :class:`GroupAction`: it asks
for orbit values ``phi(alpha_x(A))`` at batches of group parameters and never
looks inside the handles.  Handles (:class:`Element`, :class:`Functional`) are
opaque payloads owned by exactly one model.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EvaluationOverflow, GridTooCoarse, ModelMismatch, NoAdjoint

MIN_CELLS_PER_EDGE = 16


@dataclass(frozen=True)
class GroupParameter:
    """A point x of R^d (d = 1 or 2); for spacetime actions coordinate 0 is time."""

    coordinates: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in np.atleast_1d(self.coordinates))
        if len(coords) not in (1, 2):
            raise ValueError("group parameters have dimension 1 or 2")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError("group parameter coordinates must be finite")
        object.__setattr__(self, "coordinates", coords)

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coordinates, dtype=float)

    def __add__(self, other: "GroupParameter") -> "GroupParameter":
        return GroupParameter(tuple(a + b for a, b in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "GroupParameter":
        return GroupParameter(tuple(-a for a in self.coordinates))


def as_parameter(x) -> GroupParameter:
    return x if isinstance(x, GroupParameter) else GroupParameter(tuple(np.atleast_1d(x)))


@dataclass(frozen=True)
class CuboidWindow:
    """Centered cuboid ``K = prod_k [-half_lengths[k], half_lengths[k]]`` with a sampling step.

    With ``timelike_exponent`` set (spacetime windows only) the time half-length
    is tied to the space half-length by ``T = L**eps``.
    """

    half_lengths: tuple
    step: tuple
    timelike_exponent: Optional[float] = None

    def __post_init__(self):
        half = tuple(float(h) for h in np.atleast_1d(self.half_lengths))
        step = tuple(float(s) for s in np.atleast_1d(self.step))
        if len(step) == 1 and len(half) > 1:
            step = step * len(half)
        if len(half) not in (1, 2) or len(step) != len(half):
            raise ValueError("window dimension must be 1 or 2 with one step per axis")
        if min(half) <= 0 or min(step) <= 0:
            raise ValueError("half lengths and steps must be positive")
        eps = self.timelike_exponent
        if eps is not None:
            if len(half) != 2 or not 0.0 < eps < 1.0:
                raise ValueError("timelike exponent needs a 2d window and 0 < eps < 1")
            if abs(half[0] - half[1] ** eps) > 1e-9 * max(1.0, half[0]):
                raise ValueError("time half-length must equal (space half-length)**eps")
        object.__setattr__(self, "half_lengths", half)
        object.__setattr__(self, "step", step)

    @classmethod
    def cube(cls, half_length: float, step, dim: int = 1) -> "CuboidWindow":
        steps = tuple(np.broadcast_to(np.asarray(step, dtype=float), (dim,)))
        return cls((float(half_length),) * dim, steps)

    @classmethod
    def spacetime(cls, space_half_length: float, eps: float, step_t: float,
                  step_x: float = 1.0) -> "CuboidWindow":
        """The cuboid ``[-L^eps, L^eps] x [-L, L]``."""
        L = float(space_half_length)
        return cls((L ** eps, L), (step_t, step_x), eps)

    @property
    def dim(self) -> int:
        return len(self.half_lengths)

    @property
    def volume(self) -> float:
        return float(np.prod([2.0 * h for h in self.half_lengths]))

    def scaled(self, factor: float) -> "CuboidWindow":
        if self.timelike_exponent is not None:
            return CuboidWindow.spacetime(self.half_lengths[1] * factor, self.timelike_exponent,
                                          self.step[0], self.step[1])
        return CuboidWindow(tuple(h * factor for h in self.half_lengths), self.step)

    def to_dict(self) -> dict:
        return {"half_lengths": list(self.half_lengths), "step": list(self.step),
                "timelike_exponent": self.timelike_exponent}


def window_ladder(base: CuboidWindow, n: int, ratio: float = 2.0) -> list:
    """``L0 * ratio**k`` for k < n with a fixed step."""
    return [base.scaled(ratio ** k) for k in range(n)]


@dataclass(frozen=True, eq=False)
class Element:
    """Opaque element handle A; ``data`` is interpreted only by the owning model."""

    model_id: str
    data: Any
    label: Optional[str] = None
    locality_radius: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Functional:
    """Opaque functional handle phi; states carry ``is_state`` and an optional energy bound."""

    model_id: str
    data: Any
    is_state: bool = False
    energy_bound: Optional[float] = None
    label: Optional[str] = None


class Model:
    """Base class for models: owns handles and the algebraic operations on them."""

    name = "model"

    def unit(self) -> Element:
        raise NotImplementedError

    def star(self, A: Element) -> Element:
        raise NoAdjoint(f"model {self.name!r} has no *-operation")

    def adjoint(self, phi: Functional) -> Functional:
        raise NoAdjoint(f"model {self.name!r} has no *-operation")

    def element_norm(self, A: Element) -> float:
        raise NotImplementedError

    def functional_norm(self, phi: Functional) -> float:
        raise NotImplementedError

    def combine(self, coeffs: Sequence[complex], elements: Sequence[Element],
                label: Optional[str] = None) -> Element:
        raise NotImplementedError

    def combine_functionals(self, coeffs: Sequence[complex], functionals: Sequence[Functional],
                            label: Optional[str] = None) -> Functional:
        raise NotImplementedError

    def owns(self, handle) -> bool:
        return getattr(handle, "model_id", None) == self.name


class GroupAction:
    """A d-parameter group of isometries seen only through orbit evaluations.

    Subclasses implement :meth:`pair` for batches of points.  ``signature``
    gives the sign of each axis in the frequency pairing ``p.x``; spacetime
    actions use ``(+1, -1)``.  ``lattice_axes`` marks integer-valued axes
    (Cesaro sums instead of integrals) and ``periods`` the period of an axis
    on which orbits are exactly periodic (``None`` otherwise).
    """

    model: Model
    dim: int = 1
    signature: tuple = (1,)
    max_frequency: tuple = (math.inf,)
    lattice_axes: tuple = (False,)
    periods: tuple = (None,)
    name: str = "action"

    def pair(self, phi, A, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def pair_grid(self, phi, A, axes: Sequence[np.ndarray]) -> np.ndarray:
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return self.pair(phi, A, pts).reshape(mesh[0].shape)

    def translate(self, A, y: GroupParameter):
        """The element alpha_y(A)."""
        raise NotImplementedError

    def check_handles(self, phi, A) -> None:
        for handle, what in ((phi, "functional"), (A, "element")):
            if not self.model.owns(handle):
                raise ModelMismatch(
                    f"{what} {getattr(handle, 'label', None)!r} belongs to model "
                    f"{getattr(handle, 'model_id', None)!r}, not {self.model.name!r}")

    def describe(self) -> dict:
        return {"name": self.name, "model": self.model.name, "dim": self.dim,
                "signature": list(self.signature),
                "lattice_axes": list(self.lattice_axes),
                "periods": list(self.periods),
                "max_frequency": [float(f) for f in self.max_frequency]}


def evaluate_pairing(action: GroupAction, phi, A, x) -> complex:
    """phi(alpha_x(A)) for a single group parameter x."""
    action.check_handles(phi, A)
    x = as_parameter(x)
    if x.dim != action.dim:
        raise ValueError(f"group parameter of dimension {x.dim} for a {action.dim}-d action")
    value = complex(action.pair(phi, A, x.as_array()[None, :])[0])
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvaluationOverflow(f"pairing not finite at x={x.coordinates}")
    return value


def adjoint_functional(model: Model, phi: Functional) -> Functional:
    """The functional A -> conj(phi(A*))."""
    if not model.owns(phi):
        raise ModelMismatch("functional does not belong to this model")
    return model.adjoint(phi)


@dataclass(frozen=True, eq=False)
class OrbitSamples:
    """Values of x -> phi(alpha_x(A)) on the uniform grid of a window."""

    window: CuboidWindow
    axes: tuple
    values: np.ndarray
    signature: tuple
    periodic: tuple
    lattice: tuple
    label: str = ""

    def __post_init__(self):
        shape = tuple(len(a) for a in self.axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("orbit samples must be finite")

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def steps(self) -> tuple:
        return tuple(float(a[1] - a[0]) if len(a) > 1 else 1.0 for a in self.axes)

    def axis_weights(self, k: int) -> np.ndarray:
        """Quadrature weights of axis k normalised to sum to one."""
        n = len(self.axes[k])
        w = np.ones(n)
        if not (self.periodic[k] or self.lattice[k]):
            w[0] = w[-1] = 0.5
        return w / w.sum()

    def mean_weights(self) -> np.ndarray:
        w = self.axis_weights(0)
        for k in range(1, self.dim):
            w = np.multiply.outer(w, self.axis_weights(k))
        return w

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{k}" for k in range(self.dim)] + ["re", "im"])
        for pt, v in zip(self.points(), self.values.ravel()):
            writer.writerow([repr(float(c)) for c in pt] + [repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @staticmethod
    def values_from_csv(text: str) -> tuple:
        """Parse CSV written by :meth:`to_csv` into ``(points, values)``."""
        rows = list(csv.reader(io.StringIO(text)))
        body = np.array([[float(c) for c in r] for r in rows[1:]])
        d = body.shape[1] - 2
        return body[:, :d], body[:, d] + 1j * body[:, d + 1]


def grid_axes(action: GroupAction, window: CuboidWindow) -> tuple:
    """Axis node arrays plus per-axis periodic flags for sampling ``window``.

    Non-periodic axes get the symmetric grid ``-n*h .. n*h`` (node 0 included);
    an axis on which the action is exactly P-periodic and whose half-length
    reaches P/2 is sampled over one full period ``-P/2 .. P/2 - 1``.
    """
    if window.dim != action.dim:
        raise ValueError(f"{window.dim}-d window for a {action.dim}-d action")
    axes, periodic = [], []
    for k in range(window.dim):
        h = window.step[k]
        nyquist = math.pi / h
        if action.max_frequency[k] > nyquist * (1 + 1e-12):
            raise GridTooCoarse(
                f"axis {k}: declared frequency {action.max_frequency[k]:.6g} exceeds "
                f"Nyquist limit {nyquist:.6g} of step {h:g}")
        period = action.periods[k]
        if period is not None and window.half_lengths[k] >= period / 2.0:
            if abs(h - 1.0) > 1e-12:
                raise ValueError("periodic lattice axes are sampled with step 1")
            axes.append(np.arange(-(period // 2), period - period // 2, dtype=float))
            periodic.append(True)
            continue
        n = int(round(window.half_lengths[k] / h))
        if 2 * n < MIN_CELLS_PER_EDGE:
            raise GridTooCoarse(f"axis {k}: only {2 * n} cells across the window edge")
        axes.append(np.arange(-n, n + 1, dtype=float) * h)
        periodic.append(False)
    return tuple(axes), tuple(periodic)


def sample_orbit(action: GroupAction, phi, A, window: CuboidWindow, label: str = "") -> OrbitSamples:
    action.check_handles(phi, A)
    axes, periodic = grid_axes(action, window)
    values = np.asarray(action.pair_grid(phi, A, axes), dtype=complex)
    if not np.all(np.isfinite(values)):
        raise EvaluationOverflow("orbit not finite on the sampling grid")
    return OrbitSamples(window, axes, values, tuple(action.signature), periodic,
                        tuple(action.lattice_axes), label)


def thread_count(threads: Optional[int] = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("ARVESON_KIT_THREADS")
    return max(1, int(env)) if env and env.isdigit() else 1


def parallel_map(fn: Callable, items: Iterable, threads: Optional[int] = None) -> list:
    """Ordered map, threaded when more than one worker is configured."""
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class Family:
    """A finite generating family of elements and functionals for one action."""

    action: GroupAction
    elements: list = field(default_factory=list)
    functionals: list = field(default_factory=list)

    def manifest(self) -> dict:
        return {"action": self.action.describe(),
                "elements": [e.label for e in self.elements],
                "functionals": [f.label for f in self.functionals]}


@dataclass(frozen=True)
class AnalysisConfig:
    """Numerical settings shared by the spectral, classification and duality routines.

    Parameters
    ----------
    windows : list of CuboidWindow
        Ladder of growing windows with a fixed step; the last one is used for
        support detection.
    tau_rel : float
        Relative threshold for Fourier support detection.
    gamma_min : float
        Minimal fitted decay exponent of ergodic averages counted as vanishing.
    delta_ac, g_min : float
        Stabilisation tolerance and minimal per-step growth of the windowed
        Plancherel mass used for the AC / SC verdicts.
    """

    windows: tuple
    tau_rel: float = 1e-6
    gamma_min: float = 0.4
    delta_ac: float = 0.02
    g_min: float = 1.3
    tol_pair: float = 1e-6
    pp_floor: float = 1e-6
    abs_floor: float = 1e-10
    probe_per_axis: int = 65
    max_candidates: int = 64
    taper: str = "auto"
    threads: Optional[int] = None

    def __post_init__(self):
        windows = tuple(self.windows)
        if len(windows) < 1:
            raise ValueError("at least one window is required")
        dims = {w.dim for w in windows}
        if len(dims) != 1:
            raise ValueError("all windows of a ladder must share the dimension")
        if not 0.0 < self.tau_rel < 1.0:
            raise ValueError("tau_rel must lie in (0, 1)")
        object.__setattr__(self, "windows", windows)

    @property
    def largest(self) -> CuboidWindow:
        return self.windows[-1]

    def with_windows(self, windows) -> "AnalysisConfig":
        from dataclasses import replace
        return replace(self, windows=tuple(windows))

    def to_dict(self) -> dict:
        return {"windows": [w.to_dict() for w in self.windows], "tau_rel": self.tau_rel,
                "gamma_min": self.gamma_min, "delta_ac": self.delta_ac, "g_min": self.g_min,
                "tol_pair": self.tol_pair, "pp_floor": self.pp_floor,
                "abs_floor": self.abs_floor, "probe_per_axis": self.probe_per_axis,
                "taper": self.taper}
