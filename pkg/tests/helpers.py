"""Random trace-constrained polynomials used by the boundary and operator tests."""

import numpy as np
from numpy.polynomial import Polynomial

from qop.numerics import Grid


def trace_matrix(interval, k, degree):
    a, b = interval
    basis = [Polynomial.basis(i, domain=[a, b]) for i in range(degree + 1)]
    rows = [[p.deriv(j)(x) if j else p(x) for p in basis] for x in (a, b) for j in range(k)]
    return np.array(rows, dtype=complex), basis


def random_member(dom, k, rng, degree=None):
    """Random complex polynomial whose order-k boundary trace lies in ker M."""
    degree = 2 * k + 4 if degree is None else degree
    T, basis = trace_matrix(dom.interval, k, degree)
    M = dom.lifted(k)
    if len(M):
        _, s, vh = np.linalg.svd(M @ T)
        rank = int(np.sum(s > 1e-10 * s.max()))
        null = vh[rank:].conj().T
        c = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
    else:
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    p = sum(ci * b for ci, b in zip(c, basis))
    return p / max(1.0, np.max(np.abs(p(np.linspace(*dom.interval, 50)))))


def trace_of(p, interval, k):
    a, b = interval
    return np.array([p.deriv(j)(x) if j else p(x) for x in (a, b) for j in range(k)], dtype=complex)


def apply_poly(op, p, x):
    return sum(op.coefficient(j, x) * (p.deriv(j)(x) if j else p(x)) for j in range(op.order + 1))


def quad(interval, values_fn, n=4001):
    g = Grid.compact(*interval, n)
    return complex(np.sum(g.weights * values_fn(g.nodes)))
