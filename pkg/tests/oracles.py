"""Independent reference computations used to freeze expected values.

Nothing here calls into the FFT, ergodic-average or Wick-weight code of the
package; each oracle works from first principles (explicit pairings, matrix
exponentials, atom sums, quadrature).
"""

import itertools
import math

import numpy as np
from scipy import integrate, linalg


# bosonic Fock space by explicit pairing of creation/annihilation strings

def vacuum_expectation(ops):
    """<0| X_1 ... X_n |0> for ops ``("a", j)`` / ``("c", j)`` via complete pairings."""
    if not ops:
        return 1.0
    if len(ops) % 2:
        return 0.0
    first, rest = ops[0], ops[1:]
    total = 0.0
    for k, other in enumerate(rest):
        # <0| X Y |0> is nonzero only for an annihilator followed by a creator of the same mode
        if first[0] == "a" and other[0] == "c" and first[1] == other[1]:
            total += vacuum_expectation(rest[:k] + rest[k + 1:])
    return total


def vector_terms(vec, tol=0.0):
    """Creation strings of a truncated Fock vector: ``[(coef, [modes])]``."""
    out = [(complex(vec.c0), [])] if abs(vec.c0) > tol else []
    out += [(complex(c), [j]) for j, c in enumerate(vec.c1) if abs(c) > tol]
    if vec.c2 is not None:
        n = vec.c2.shape[0]
        for j, k in itertools.product(range(n), repeat=2):
            if abs(vec.c2[j, k]) > tol:
                out.append((complex(vec.c2[j, k]) / math.sqrt(2), [j, k]))
    return out


def form_terms(form, phases=None):
    """Operator strings of a normal-ordered quadratic form; ``phases[j]`` multiplies b_j."""
    n = None
    for t in form.terms():
        if t is not None:
            n = t.shape[0]
    ph = np.ones(n or 0, dtype=complex) if phases is None else phases
    out = [(complex(form.c), [])] if form.c != 0 else []
    if form.u is not None:
        out += [(form.u[j] * np.conj(ph[j]), [("c", j)]) for j in range(n)]
    if form.v is not None:
        out += [(form.v[j] * ph[j], [("a", j)]) for j in range(n)]
    for name, kinds, conj in (("M", ("c", "a"), (True, False)), ("P", ("c", "c"), (True, True)),
                              ("Q", ("a", "a"), (False, False))):
        X = getattr(form, name)
        if X is None:
            continue
        for j, k in itertools.product(range(n), repeat=2):
            if X[j, k] == 0:
                continue
            f = (np.conj(ph[j]) if conj[0] else ph[j]) * (np.conj(ph[k]) if conj[1] else ph[k])
            out.append((X[j, k] * f, [(kinds[0], j), (kinds[1], k)]))
    return [(c, ops) for c, ops in out if c != 0]


def fock_matrix_element(model, bra, form, ket, t=0.0, n=0):
    """<bra| alpha_(t,n)(A) |ket> by brute-force pairing; alpha(b_j) = e^{-i w t + i theta n} b_j."""
    phases = np.exp(-1j * model.omega * t + 1j * model.theta * n)
    total = 0.0
    ops_A = form_terms(form, phases)
    for cb, mb in vector_terms(bra):
        left = [("a", j) for j in reversed(mb)]
        for ck, mk in vector_terms(ket):
            right = [("c", j) for j in mk]
            for ca, oa in ops_A:
                total += np.conj(cb) * ca * ck * vacuum_expectation(left + oa + right)
    return complex(total)


# matrix dynamics

def heisenberg_orbit(H, rho, A, ts):
    """tr(rho e^{itH} A e^{-itH}) by dense matrix exponentials."""
    out = []
    for t in ts:
        U = linalg.expm(1j * t * H)
        out.append(np.trace(rho @ U @ A @ U.conj().T))
    return np.array(out)


def difference_set(eigenvalues):
    lam = np.asarray(eigenvalues, dtype=float)
    return sorted({round(float(a - b), 12) for a in lam for b in lam})


# scalar flows

def cantor_atoms(ratio, depth):
    """Atoms (positions, weights) of the depth-K approximation of the Riesz-product measure:
    the law of sum_k eps_k ratio^k, eps_k = +-1."""
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=depth)))
    pos = signs @ (ratio ** np.arange(1, depth + 1))
    return pos, np.full(pos.size, 0.5 ** depth)


def atom_characteristic(pos, weights, x):
    return np.exp(1j * np.outer(np.atleast_1d(x), pos)) @ weights


def gaussian_characteristic_quad(mean, sigma, x):
    """int e^{ipx} N(mean, sigma)(p) dp by adaptive quadrature."""
    dens = lambda p: math.exp(-0.5 * ((p - mean) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    lo, hi = mean - 12 * sigma, mean + 12 * sigma
    re = integrate.quad(lambda p: dens(p) * math.cos(p * x), lo, hi, limit=400)[0]
    im = integrate.quad(lambda p: dens(p) * math.sin(p * x), lo, hi, limit=400)[0]
    return complex(re, im)


def wiener_average(pos, weights, L):
    """(1/2L) int_{-L}^{L} |chi(x)|^2 dx for an atomic measure, in closed form."""
    d = pos[:, None] - pos[None, :]
    return float(weights @ np.sinc(d * L / math.pi) @ weights)


def dispersion(theta, m=1.0):
    return math.sqrt(m * m + 4 * math.sin(theta / 2) ** 2)
