import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import apply_poly, quad, random_member, trace_of
from qop.boundary import (
    HERMITIAN,
    NOT_HERMITIAN,
    SELF_ADJOINT,
    SubspaceBasis,
    adjoint_domain,
    boundary_form,
    classify,
    classify_pair,
    surface_term,
)
from qop.errors import InputError, UnsupportedCase
from qop.functions import catalog_get
from qop.operators import (
    angular_momentum,
    dirichlet,
    formal_adjoint,
    free,
    hamiltonian,
    hamiltonian_squared,
    line,
    momentum,
    periodic,
    position,
    pq3_symmetrized,
    twisted,
    well_squared,
)

PAIRS = [
    (momentum(), dirichlet(0, 1)),
    (momentum(), periodic(0, 1)),
    (momentum(), twisted(0.7, 0, 1)),
    (momentum(), free(0, 1, 1)),
    (angular_momentum(), periodic()),
    (hamiltonian(), dirichlet(-1, 1, 2)),
    (hamiltonian(), periodic(-1, 1, 2)),
    (hamiltonian(), free(-1, 1, 2)),
    (pq3_symmetrized(), dirichlet(0.5, 2.0)),
]
FORMS = [boundary_form(momentum(), (0, 1)), boundary_form(hamiltonian(), (-1, 1)),
         boundary_form(pq3_symmetrized(), (0.5, 2.0))]


@pytest.mark.parametrize("op,dom", PAIRS, ids=lambda v: getattr(v, "name", None))
def test_form_matches_quadrature(op, dom, rng):
    S = boundary_form(op, dom.interval)
    adj = formal_adjoint(op)
    k = op.order
    for _ in range(10):
        f, g = random_member(dom, k, rng), random_member(dom, k, rng)
        lhs = quad(dom.interval, lambda x: np.conj(g(x)) * apply_poly(op, f, x)) - quad(
            dom.interval, lambda x: np.conj(apply_poly(adj, g, x)) * f(x)
        )
        rhs = S(trace_of(g, dom.interval, k), trace_of(f, dom.interval, k))
        scale = max(1.0, abs(lhs))
        assert abs(lhs - rhs) <= 1e-4 * scale


@pytest.mark.parametrize(
    "op,dom,verdict",
    [
        (momentum(), dirichlet(0, 1), HERMITIAN),
        (momentum(), free(0, 1, 1), NOT_HERMITIAN),
        (momentum(), twisted(math.pi, 0, 1), SELF_ADJOINT),
        (angular_momentum(), periodic(), SELF_ADJOINT),
        (hamiltonian(), dirichlet(-1, 1, 2), SELF_ADJOINT),
        (hamiltonian(), free(-1, 1, 2), NOT_HERMITIAN),
        (hamiltonian_squared(), well_squared(1.0), SELF_ADJOINT),
        (hamiltonian_squared(), well_squared(1.0, "first"), SELF_ADJOINT),
        (position(), free(-1, 1, 0), SELF_ADJOINT),
    ],
)
def test_catalog_classification(op, dom, verdict):
    assert classify_pair(op, dom).verdict == verdict


@pytest.mark.parametrize("form", FORMS, ids=["P", "H", "A"])
def test_form_is_skew_hermitian_for_symmetric_operators(form):
    assert np.allclose(form.S.conj().T, -form.S)


def _random_subspace(n, dim, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))


@given(st.sampled_from(range(len(FORMS))), st.integers(0, 4), st.integers(0, 4), st.integers(0, 10_000))
def test_adjoint_domain_antitone(fi, d1, d2, seed):
    S = FORMS[fi]
    n = S.S.shape[0]
    d1, d2 = min(d1, n), min(d2, n)
    big = _random_subspace(n, max(d1, d2), seed)
    V1, V2 = SubspaceBasis.span(big[:, : min(d1, d2)]), SubspaceBasis.span(big)
    assert V2.contains(V1)
    assert adjoint_domain(S, V1).contains(adjoint_domain(S, V2))


@given(st.sampled_from(range(len(FORMS))), st.integers(0, 4), st.integers(0, 10_000))
def test_double_annihilator(fi, dim, seed):
    S = FORMS[fi]
    n = S.S.shape[0]
    V = SubspaceBasis.span(_random_subspace(n, min(dim, n), seed)) if dim else SubspaceBasis(n, np.zeros((n, 0)))
    Vdd = adjoint_domain(S, adjoint_domain(S, V))
    assert Vdd.equals(V)
    assert adjoint_domain(S, V).dim == n - V.dim


def test_subspace_basis_orthonormal():
    V = SubspaceBasis.of(twisted(0.3, 0, 1))
    assert np.allclose(V.vectors.conj().T @ V.vectors, np.eye(V.dim), atol=1e-10)


def test_mismatched_dimensions():
    with pytest.raises(InputError):
        adjoint_domain(FORMS[0], SubspaceBasis.span(np.ones(4)))
    with pytest.raises(InputError):
        classify(SubspaceBasis.span(np.ones(2)), SubspaceBasis.span(np.ones(4)))


def test_line_domains_bypass_boundary_level():
    with pytest.raises(UnsupportedCase):
        classify_pair(momentum(), line())


@pytest.mark.parametrize("op", [momentum(), hamiltonian(), pq3_symmetrized()], ids=lambda o: o.name)
def test_line_surface_term_vanishes(op):
    phi = catalog_get("gaussian", sigma=0.8, center=0.2)
    psi = catalog_get("gaussian", sigma=1.3, center=-0.4)
    vals = [abs(surface_term(op, phi, psi, R)) for R in (4.0, 6.0, 8.0)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-8
