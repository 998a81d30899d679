import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qop.functions import catalog_get
from qop.operators import domain_of_commutator, line, momentum, position
from qop.uncertainty import (
    ANGLE_CAVEAT,
    Absent,
    bound_commutator,
    bound_form,
    bound_lz_phi,
    circle_report,
    random_circle_states,
    uncertainty_report,
    variance,
    with_phase,
)

P, Q, L = momentum(), position(), line("schwartz")


def _line_report(psi):
    return uncertainty_report(psi, P, L, Q, L, domain_of_commutator(P, L, Q, L))


@pytest.mark.parametrize("sigma,center", [(1.0, 0.0), (0.6, 0.4), (1.7, -1.0)])
def test_gaussian_saturates(sigma, center):
    rep = _line_report(catalog_get("gaussian", sigma=sigma, center=center))
    assert rep.product == pytest.approx(0.5, abs=1e-6)
    assert rep.bound_form == pytest.approx(0.5, abs=1e-6)
    assert rep.bound_commutator == pytest.approx(0.5, abs=1e-6)
    assert rep.inequality_holds


def test_two_mode_state():
    lam = 0.1
    rep = circle_report(catalog_get("two_mode", lam=lam))
    assert rep.product < 0.5
    assert rep.product >= rep.bound_form - 1e-9
    assert rep.bound_form == pytest.approx(lam / (1 + lam**2), abs=1e-8)
    assert rep.bound_lz_phi == pytest.approx(lam / (1 + lam**2), abs=1e-8)
    assert rep.delta_A == pytest.approx(lam / (1 + lam**2), abs=1e-8)
    assert rep.delta_B**2 == pytest.approx(math.pi**2 / 3 + 4 * lam / (1 + lam**2), abs=1e-6)
    assert rep.caveat == ANGLE_CAVEAT


@pytest.mark.parametrize("m", [-2, 0, 1, 3])
def test_circle_eigenstates(m):
    rep = circle_report(catalog_get("circle_mode", m=m))
    assert abs(rep.product) <= 1e-8 and abs(rep.bound_form) <= 1e-8
    assert abs(rep.bound_lz_phi) <= 1e-8
    assert rep.bound_commutator is None
    assert "ψ(2π) = 0" in rep.commutator_absent_reason


def test_absent_bound_object():
    from qop.operators import angle, angular_momentum, free, periodic

    Lz, phi = angular_momentum(), angle()
    dom = domain_of_commutator(Lz, periodic(), phi, free(0, 2 * math.pi, 0))
    out = bound_commutator(catalog_get("circle_mode", m=1), Lz, phi, dom)
    assert isinstance(out, Absent) and out.reason


def test_commutator_equals_form_inside_domain():
    rep = circle_report(catalog_get("half_sine"))
    assert rep.bound_commutator is not None
    assert abs(rep.bound_commutator - rep.bound_form) <= 1e-6


def test_random_states_obey_bounds():
    states = random_circle_states(50, seed=7)
    for s in states:
        rep = circle_report(s)
        assert rep.product >= rep.bound_lz_phi - 1e-9
        assert rep.product >= rep.bound_form - 1e-9
        if rep.bound_commutator is not None:
            assert abs(rep.bound_commutator - rep.bound_form) <= 1e-6


def test_random_states_reproducible():
    a = [s(np.array([0.3]))[0] for s in random_circle_states(3, seed=11)]
    b = [s(np.array([0.3]))[0] for s in random_circle_states(3, seed=11)]
    assert a == b


@given(st.floats(0, 2 * math.pi), st.integers(0, 3))
def test_phase_invariance(theta, i):
    psi = [catalog_get("two_mode", lam=0.1), catalog_get("half_sine"),
           catalog_get("circle_mode", m=2), random_circle_states(1, seed=3)[0]][i]
    r1 = circle_report(psi).as_dict()
    r2 = circle_report(with_phase(psi, theta)).as_dict()
    for k, v in r1.items():
        if isinstance(v, float):
            assert abs(v - r2[k]) <= 1e-10, k
        else:
            assert v == r2[k], k


def test_line_phase_invariance():
    psi = catalog_get("gaussian", sigma=0.9, center=0.3)
    r1 = _line_report(psi).as_dict()
    r2 = _line_report(with_phase(psi, 1.1)).as_dict()
    for k, v in r1.items():
        assert (abs(v - r2[k]) <= 1e-10) if isinstance(v, float) else v == r2[k]


def test_variance_and_bounds_are_floats():
    psi = catalog_get("gaussian")
    assert type(variance(psi, P, L)) is float
    assert type(bound_form(psi, P, L, Q, L)) is float
    assert type(bound_lz_phi(catalog_get("two_mode", lam=0.1))) is float
