import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import apply_poly, quad, random_member
from qop.boundary import NOT_HERMITIAN, classify_pair
from qop.errors import InputError, UnsupportedCase
from qop.functions import catalog_get
from qop.numerics import Grid
from qop.operators import (
    angle,
    angular_momentum,
    apply,
    commutator,
    compose,
    dirichlet,
    domain_check,
    domain_of_commutator,
    domain_of_sum,
    formal_adjoint,
    free,
    hamiltonian,
    hamiltonian_squared,
    line,
    momentum,
    operator_get,
    periodic,
    position,
    pq3_symmetrized,
    same_subspace,
    twisted,
    well_squared,
)

OPS = [position(), momentum(), hamiltonian(), pq3_symmetrized(), hamiltonian_squared()]
GRID = Grid.line(8.0, 1601)

UNIT_DOMAINS = [
    dirichlet(0, 1, 1),
    periodic(0, 1, 1),
    twisted(0.7, 0, 1),
    free(0, 1, 1),
    dirichlet(0, 1, 2),
    periodic(0, 1, 2),
    free(0, 1, 2),
]

CATALOG_PAIRS = [
    (momentum(), dirichlet(0, 1)),
    (momentum(), periodic(0, 1)),
    (momentum(), twisted(0.7, 0, 1)),
    (momentum(), free(0, 1, 1)),
    (angular_momentum(), periodic()),
    (hamiltonian(), dirichlet(-1, 1, 2)),
    (hamiltonian(), periodic(-1, 1, 2)),
    (hamiltonian(), free(-1, 1, 2)),
]


def _cplx():
    return st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@given(st.sampled_from(range(len(OPS))), _cplx(), _cplx(), st.floats(0.5, 2), st.floats(-1, 1))
def test_apply_is_linear(i, alpha, beta, sigma, center):
    op = OPS[i]
    f = catalog_get("gaussian", sigma=sigma, center=center).on_grid(GRID)
    g = catalog_get("gaussian", sigma=1.0, center=0.2).on_grid(GRID)
    lhs = apply(op, f.scale(alpha) + g.scale(beta)).values
    rhs = alpha * apply(op, f).values + beta * apply(op, g).values
    # rounding in a finite difference of order k is amplified by h^-k
    amplification = max(1.0, np.max(np.abs(rhs)), GRID.h ** -op.order)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * (1 + abs(alpha) + abs(beta)) * amplification


@given(st.sampled_from(range(len(UNIT_DOMAINS))), st.sampled_from(range(len(UNIT_DOMAINS))))
def test_domain_sum_commutes(i, j):
    a, b = UNIT_DOMAINS[i], UNIT_DOMAINS[j]
    assert same_subspace(domain_of_sum(a, b), domain_of_sum(b, a))


@given(*(st.sampled_from(range(len(UNIT_DOMAINS))),) * 3)
def test_domain_sum_associates(i, j, k):
    a, b, c = UNIT_DOMAINS[i], UNIT_DOMAINS[j], UNIT_DOMAINS[k]
    assert same_subspace(domain_of_sum(domain_of_sum(a, b), c), domain_of_sum(a, domain_of_sum(b, c)))


def test_domain_sum_intersects():
    both = domain_of_sum(dirichlet(0, 1), periodic(0, 1))
    assert same_subspace(both, dirichlet(0, 1))
    with pytest.raises(InputError):
        domain_of_sum(dirichlet(0, 1), dirichlet(0, 2))


@pytest.mark.parametrize("op,dom", CATALOG_PAIRS, ids=lambda v: getattr(v, "name", None))
def test_imaginary_expectation_vanishes_iff_hermitian(op, dom, rng):
    hermitian = classify_pair(op, dom).verdict != NOT_HERMITIAN
    worst = 0.0
    for _ in range(20):
        p = random_member(dom, op.order, rng)
        val = quad(dom.interval, lambda x: np.conj(p(x)) * apply_poly(op, p, x))
        worst = max(worst, abs(val.imag))
    if hermitian:
        assert worst <= 1e-6
    else:
        assert worst > 1e-3


def test_ccr_symbol():
    c = commutator(momentum(), position())
    assert c.order == 0
    assert c.coefficient(0, 0.3) == pytest.approx(-1j)
    assert commutator(angular_momentum(), angle()).coefficient(0, 1.0) == pytest.approx(-1j)


def test_compose_P_P_is_twice_H():
    PP = compose(momentum(), momentum())
    H = hamiltonian()
    for j in range(3):
        assert PP.coefficient(j, 0.4) == pytest.approx(2 * H.coefficient(j, 0.4))


@pytest.mark.parametrize("name", ["Q", "P", "H", "A", "H2"])
def test_formal_adjoint_of_symmetric_operators(name):
    op = operator_get(name)
    adj = formal_adjoint(op)
    x = np.linspace(-2, 2, 7)
    for j in range(op.order + 1):
        assert np.allclose(adj.coefficient(j, x), op.coefficient(j, x))


def test_A_expansion_matches_products():
    P, Q = momentum(), position()
    Q3 = compose(Q, compose(Q, Q))
    A = pq3_symmetrized()
    PQ3, Q3P = compose(P, Q3), compose(Q3, P)
    x = np.linspace(-1.5, 1.5, 5)
    for j in range(2):
        assert np.allclose(PQ3.coefficient(j, x) + Q3P.coefficient(j, x), A.coefficient(j, x))


def test_unsupported_order():
    with pytest.raises(UnsupportedCase):
        compose(momentum(), hamiltonian())


def test_domain_check_parabola():
    psi = catalog_get("parabola_well")
    rep = domain_check(psi, hamiltonian(), dirichlet(-1, 1, 2))
    assert rep.in_domain and not rep.violated_constraints
    rep2 = domain_check(psi, hamiltonian_squared(), well_squared(1.0))
    assert not rep2.in_domain
    assert set(rep2.violated_constraints) == {"ψ′′(-1) = 0", "ψ′′(1) = 0"}


def test_domain_check_report_consistency():
    for f, op, dom in [
        (catalog_get("gaussian"), momentum(), line("schwartz")),
        (catalog_get("A_eigenfunction_f"), pq3_symmetrized(), line("schwartz")),
        (catalog_get("well_eigenfunction", n=3), hamiltonian(), dirichlet(-1, 1, 2)),
    ]:
        rep = domain_check(f, op, dom)
        if rep.in_domain:
            assert not rep.violated_constraints and rep.image_norm_status.finite
    assert not domain_check(catalog_get("A_eigenfunction_f"), pq3_symmetrized(), line("schwartz")).in_domain


def test_commutator_domain_on_circle():
    d = domain_of_commutator(angular_momentum(), periodic(), angle(), free(0, 2 * math.pi, 0))
    assert same_subspace(d, dirichlet(0, 2 * math.pi))


def test_domain_constraint_count():
    with pytest.raises(InputError):
        well_squared(1.0, "third")
    assert len(dirichlet(0, 1, 2).M) == 2
    assert dirichlet(0, 1, 2).constraints == ["ψ(0) = 0", "ψ(1) = 0"]
