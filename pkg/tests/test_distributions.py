import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qop.distributions import (
    L2_ONLY,
    SCHWARTZ_MEMBER,
    TEMPERED_ONLY,
    ClassificationError,
    apply_to_functional,
    classify_triple,
    default_test_set,
    delta,
    evaluate,
    fourier,
    inverse_fourier,
    plane_wave_functional,
    regular,
    weak_eigen_check,
)
from qop.errors import InputError, UnsupportedCase
from qop.functions import catalog_get, combine
from qop.numerics import Grid, inner_product
from qop.operators import hamiltonian, momentum, position

X = Grid.line(12.0, 2001)
PG = Grid.line(8.0, 801)
FUNCTIONALS = [delta(0.4), plane_wave_functional(1.5), regular(catalog_get("gaussian", sigma=1.5, center=0.3))]


def _g(s, c):
    return catalog_get("gaussian", sigma=s, center=c)


def test_gaussian_transform_is_gaussian():
    ft = fourier(_g(1.0, 0.0).on_grid(X), PG)
    assert ft.edges_decayed
    p = PG.nodes
    assert np.max(np.abs(ft.function.values - math.pi**-0.25 * np.exp(-p * p / 2))) <= 1e-10


@settings(max_examples=12)
@given(st.floats(0.5, 2.0), st.floats(-1.0, 1.0), st.floats(0.5, 2.0), st.floats(-1.0, 1.0))
def test_parseval(s1, c1, s2, c2):
    f, g = _g(s1, c1).on_grid(X), _g(s2, c2).on_grid(X)
    pg = Grid.line(12.0, 1201)
    Ff, Fg = fourier(f, pg).function, fourier(g, pg).function
    assert abs(inner_product(f, g) - inner_product(Ff, Fg)) <= 1e-6


@pytest.mark.parametrize("sigma,center", [(0.7, 0.0), (1.0, 0.5), (1.6, -0.8)])
def test_round_trip(sigma, center):
    f = _g(sigma, center).on_grid(X)
    back = inverse_fourier(fourier(f, Grid.line(14.0, 1601)).function, X)
    assert np.max(np.abs(back.values - f.values)) <= 1e-5


def test_transform_flags_undecayed_edges():
    f = catalog_get("gaussian", sigma=4.0).on_grid(Grid.line(6.0, 601))
    assert not fourier(f, PG).edges_decayed


@pytest.mark.parametrize("F", FUNCTIONALS, ids=["delta", "plane_wave", "regular"])
@given(a=st.complex_numbers(max_magnitude=5, allow_nan=False), b=st.complex_numbers(max_magnitude=5, allow_nan=False))
def test_evaluation_is_linear(F, a, b):
    phi, chi = _g(0.8, 0.2), _g(1.3, -0.5)
    both = combine([(a, phi), (b, chi)], "mix")
    assert abs(evaluate(F, both) - (a * evaluate(F, phi) + b * evaluate(F, chi))) <= 1e-9 * (1 + abs(a) + abs(b))


def test_delta_as_limit_of_narrow_gaussians():
    x0 = 0.3
    phi = _g(1.1, -0.2)
    target = complex(phi(np.array([x0]))[0])
    errs = []
    for s in (0.4, 0.2, 0.1):
        bump = catalog_get("gaussian", sigma=s, center=x0, normalized=False)
        errs.append(abs(evaluate(regular(bump), phi) / (s * math.sqrt(2 * math.pi)) - target))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-3


def test_weak_eigen_equations():
    assert weak_eigen_check(position(), delta(1.3), 1.3) <= 1e-6
    assert weak_eigen_check(momentum(), plane_wave_functional(2.0), 2.0) <= 1e-6
    assert weak_eigen_check(momentum(), delta(1.3), 1.3) > 1e-2


def test_test_set_shape():
    tests = default_test_set()
    assert len(tests) == 12
    assert len({f.name for f in tests}) == 12


def test_non_test_function_refused():
    with pytest.raises(InputError):
        evaluate(delta(0.0), catalog_get("A_eigenfunction_f"))
    with pytest.raises(UnsupportedCase):
        apply_to_functional(hamiltonian(), delta(0.0), _g(1.0, 0.0))


@pytest.mark.parametrize(
    "name,params,tier",
    [
        ("gaussian", {}, SCHWARTZ_MEMBER),
        ("A_eigenfunction_f", {}, L2_ONLY),
        ("A_deficiency_g_minus", {}, L2_ONLY),
        ("plane_wave", {"p": 1.0}, TEMPERED_ONLY),
    ],
)
def test_triple_tiers(name, params, tier):
    assert classify_triple(catalog_get(name, **params)).tier == tier


def test_essential_singularity_is_not_tempered():
    with pytest.raises(ClassificationError):
        classify_triple(catalog_get("A_deficiency_g_plus"))
