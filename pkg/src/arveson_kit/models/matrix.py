"""Finite-dimensional C*-dynamics: block matrix algebras under alpha_t(A) = e^{itH} A e^{-itH}."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..core import Element, Functional, GroupAction, Model
from ..errors import InvalidConfig


def unit_label(j: int, k: int, n: int) -> str:
    return f"E{j + 1}{k + 1}" if n < 10 else f"E{j + 1},{k + 1}"


class MatrixModel(Model):
    """Block-diagonal matrix algebra with a diagonal Hamiltonian.

    Elements are ``n x n`` complex arrays that respect the block structure.
    A functional is a matrix ``rho`` acting as ``phi(A) = tr(rho A)``; the
    vector functional ``A -> <e_a, A e_b>`` is ``rho = |e_b><e_a|``.

    Parameters
    ----------
    eigenvalues : sequence of float
        Diagonal of H.
    blocks : sequence of int, optional
        Block sizes summing to ``n``; defaults to a single full block.
    """

    def __init__(self, eigenvalues: Sequence[float], blocks: Optional[Sequence[int]] = None):
        lam = np.asarray(eigenvalues, dtype=float)
        problems = {}
        if lam.ndim != 1 or lam.size == 0:
            problems["eigenvalues"] = "a nonempty list of reals is required"
        elif not np.all(np.isfinite(lam)):
            problems["eigenvalues"] = "eigenvalues must be finite"
        blocks = [lam.size] if blocks is None else [int(b) for b in blocks]
        if not problems and (min(blocks) <= 0 or sum(blocks) != lam.size):
            problems["blocks"] = f"block sizes {blocks} must be positive and sum to {lam.size}"
        if problems:
            raise InvalidConfig("invalid matrix model", problems)
        self.eigenvalues = lam
        self.n = lam.size
        self.blocks = tuple(blocks)
        self.name = "matrix[" + ",".join(f"{v:g}" for v in lam) + "|" + ",".join(map(str, blocks)) + "]"
        mask = np.zeros((self.n, self.n), dtype=bool)
        start = 0
        for b in self.blocks:
            mask[start:start + b, start:start + b] = True
            start += b
        self.block_mask = mask
        self.differences = lam[:, None] - lam[None, :]

    # handles

    def element(self, matrix, label: Optional[str] = None) -> Element:
        M = np.array(matrix, dtype=complex)
        if M.shape != (self.n, self.n):
            raise InvalidConfig("wrong element shape", {"element": f"expected {(self.n, self.n)}"})
        if np.any(np.abs(M[~self.block_mask]) > 0):
            raise InvalidConfig("element leaves the block algebra", {"element": "off-block entries"})
        M.setflags(write=False)
        return Element(self.name, M, label)

    def matrix_unit(self, j: int, k: int) -> Element:
        M = np.zeros((self.n, self.n), dtype=complex)
        M[j, k] = 1.0
        return self.element(M, unit_label(j, k, self.n))

    def matrix_units(self) -> list:
        return [self.matrix_unit(j, k) for j in range(self.n) for k in range(self.n)
                if self.block_mask[j, k]]

    def unit(self) -> Element:
        return self.element(np.eye(self.n), "I")

    def functional(self, rho, label: Optional[str] = None) -> Functional:
        R = np.array(rho, dtype=complex)
        if R.shape != (self.n, self.n):
            raise InvalidConfig("wrong functional shape", {"functional": f"expected {(self.n, self.n)}"})
        R = np.where(self.block_mask, R, 0.0)
        R.setflags(write=False)
        herm = np.allclose(R, R.conj().T, atol=1e-12)
        state = bool(herm and abs(np.trace(R) - 1) < 1e-12
                     and np.linalg.eigvalsh(R).min() > -1e-12)
        return Functional(self.name, R, is_state=state, label=label)

    def vector_functional(self, a: int, b: int) -> Functional:
        """``A -> A[a, b]``."""
        rho = np.zeros((self.n, self.n), dtype=complex)
        rho[b, a] = 1.0
        return self.functional(rho, f"<e{a + 1}|.e{b + 1}>")

    def vector_state(self, a: int) -> Functional:
        return self.vector_functional(a, a)

    def trace_state(self) -> Functional:
        return self.functional(np.eye(self.n) / self.n, "tr/n")

    def vector_functionals(self) -> list:
        return [self.vector_functional(a, b) for a in range(self.n) for b in range(self.n)
                if self.block_mask[b, a]]

    # algebra

    def evaluate(self, phi: Functional, A: Element) -> complex:
        return complex(np.sum(phi.data.T * A.data))

    def multiply(self, A: Element, B: Element) -> Element:
        return self.element(A.data @ B.data)

    def star(self, A: Element) -> Element:
        label = None if A.label is None else A.label + "*"
        return self.element(A.data.conj().T, label)

    def adjoint(self, phi: Functional) -> Functional:
        label = None if phi.label is None else "bar(" + phi.label + ")"
        return self.functional(phi.data.conj().T, label)

    def element_norm(self, A: Element) -> float:
        return float(np.linalg.norm(A.data, 2))

    def functional_norm(self, phi: Functional) -> float:
        return float(np.linalg.svd(phi.data, compute_uv=False).sum())

    def combine(self, coeffs, elements, label=None) -> Element:
        M = sum((complex(c) * A.data for c, A in zip(coeffs, elements)),
                np.zeros((self.n, self.n), dtype=complex))
        return self.element(M, label)

    def combine_functionals(self, coeffs, functionals, label=None) -> Functional:
        R = sum((complex(c) * f.data for c, f in zip(coeffs, functionals)),
                np.zeros((self.n, self.n), dtype=complex))
        return self.functional(R, label)

    def element_vector(self, A: Element) -> np.ndarray:
        return A.data[self.block_mask]

    def functional_vector(self, phi: Functional) -> np.ndarray:
        return phi.data.T[self.block_mask]

    def evolve(self, A: Element, t: float) -> np.ndarray:
        return A.data * np.exp(1j * t * self.differences)

    def frequencies(self) -> np.ndarray:
        """Distinct eigenvalue differences ``lambda_j - lambda_k`` inside the blocks."""
        d = self.differences[self.block_mask]
        return np.unique(np.round(d, 12))


class MatrixTimeAction(GroupAction):
    """Heisenberg dynamics ``alpha_t(A) = e^{itH} A e^{-itH}``; the orbit of E_jk is e^{it(l_j - l_k)}."""

    dim = 1
    signature = (1,)
    lattice_axes = (False,)
    periods = (None,)
    name = "time"

    def __init__(self, model: MatrixModel):
        self.model = model
        self.max_frequency = (float(np.abs(model.differences).max()),)

    def pair(self, phi, A, points) -> np.ndarray:
        t = np.asarray(points, dtype=float).reshape(-1, 1)[:, 0]
        weights = phi.data.T * A.data
        nz = np.nonzero(np.abs(weights) > 0)
        if nz[0].size == 0:
            return np.zeros(t.shape, dtype=complex)
        w = weights[nz]
        freq = self.model.differences[nz]
        return np.exp(1j * np.outer(t, freq)) @ w

    def translate(self, A, y) -> Element:
        t = float(np.atleast_1d(getattr(y, "coordinates", y))[0])
        return self.model.element(self.model.evolve(A, t), A.label)

    def translate_functional(self, phi, y) -> Functional:
        """``alpha*_t phi = phi o alpha_t``, i.e. ``rho -> e^{-itH} rho e^{itH}``."""
        t = float(np.atleast_1d(getattr(y, "coordinates", y))[0])
        return self.model.functional(phi.data * np.exp(-1j * t * self.model.differences), phi.label)


def build_matrix_model(eigenvalues, state_spec="pure:1", blocks=None) -> tuple:
    """Model, time action and reference state from a compact state description.

    ``state_spec`` is ``"pure:a"`` (1-based vector state), ``"trace"`` or
    ``"block:b"`` (normalised trace on block b, 1-based).
    """
    model = MatrixModel(eigenvalues, blocks)
    kind, _, arg = str(state_spec).partition(":")
    if kind == "pure":
        a = int(arg or 1) - 1
        if not 0 <= a < model.n:
            raise InvalidConfig("bad state", {"state": f"vector index {a + 1} out of range"})
        state = model.vector_state(a)
    elif kind == "trace":
        state = model.trace_state()
    elif kind == "block":
        b = int(arg or 1) - 1
        if not 0 <= b < len(model.blocks):
            raise InvalidConfig("bad state", {"state": f"block {b + 1} out of range"})
        start = sum(model.blocks[:b])
        rho = np.zeros((model.n, model.n))
        idx = np.arange(start, start + model.blocks[b])
        rho[idx, idx] = 1.0 / model.blocks[b]
        state = model.functional(rho, f"tr_block{b + 1}")
    else:
        raise InvalidConfig("bad state", {"state": f"unknown state spec {state_spec!r}"})
    return model, MatrixTimeAction(model), state
