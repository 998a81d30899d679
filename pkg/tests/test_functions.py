import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qop.errors import InputError
from qop.functions import (
    CATALOG_NAMES,
    NON_DECAYING,
    POLYNOMIAL_DECAY,
    RAPID_DECAY,
    SQUARE_INTEGRABLE,
    UNBOUNDED,
    boundary_trace,
    catalog_get,
    schwartz_probe,
    triangle_partial_integral,
)
from qop.numerics import Grid, improper_norm_probe

PARAMS = {
    "well_eigenfunction": {"n": 2},
    "circle_mode": {"m": 1},
    "plane_wave": {"p": 1.0},
    "twisted_eigenfunction": {"n": 1, "alpha": 0.7, "length": 1.0},
    "two_mode": {"lam": 0.1},
}
SLOW = {"literal_unbounded_example"}


def _names():
    for n in CATALOG_NAMES:
        yield pytest.param(n, marks=pytest.mark.slow) if n in SLOW else n


@pytest.mark.parametrize("name", list(_names()))
def test_square_integrable_trait_matches_probe(name):
    f = catalog_get(name, **PARAMS.get(name, {}))
    r = improper_norm_probe(f, f.singular_points, f.domain)
    assert r.finite == (SQUARE_INTEGRABLE in f.traits), r


def test_unknown_catalog_name():
    with pytest.raises(InputError):
        catalog_get("no_such_function")


@pytest.mark.parametrize("name", ["gaussian", "A_eigenfunction_f", "parabola_well"])
def test_normalized_states(name):
    f = catalog_get(name)
    assert improper_norm_probe(f, f.singular_points, f.domain).value == pytest.approx(1.0, abs=1e-6)


def test_triangle_partial_integrals():
    Ts = [10.0, 100.0, 1e3, 1e4]
    vals = [triangle_partial_integral(T) for T in Ts]
    assert np.all(np.diff(vals) >= 0)
    assert abs(vals[-1] - math.pi**2 / 6) <= 1e-3


@given(st.floats(1.0, 500.0), st.floats(0.0, 50.0))
def test_triangle_partial_integral_nondecreasing(T, dT):
    assert triangle_partial_integral(T + dT) >= triangle_partial_integral(T)


def test_triangle_partial_integral_matches_quadrature():
    f = catalog_get("triangle_sum")
    g = Grid.compact(0.0, 6.0, 600001)
    quad = float(np.sum(g.weights * f(g.nodes).real))
    assert quad == pytest.approx(triangle_partial_integral(6.0), abs=1e-6)


def test_unbounded_but_square_integrable():
    f = catalog_get("unbounded_L2")
    assert improper_norm_probe(f).finite
    assert schwartz_probe(f).classification == UNBOUNDED


@pytest.mark.parametrize(
    "name,params,expected",
    [
        ("gaussian", {}, RAPID_DECAY),
        ("A_eigenfunction_f", {}, POLYNOMIAL_DECAY),
        ("plane_wave", {"p": 1.0}, NON_DECAYING),
        ("triangle_sum", {}, NON_DECAYING),
    ],
)
def test_decay_classification(name, params, expected):
    assert schwartz_probe(catalog_get(name, **params)).classification == expected


def test_A_eigenfunction_fails_cubic_moment():
    rep = schwartz_probe(catalog_get("A_eigenfunction_f"))
    assert (3, 0) in rep.failing


def test_boundary_trace_analytic_and_grid_agree():
    f = catalog_get("parabola_well")
    exact = boundary_trace(f, 2).vector
    assert np.allclose(exact, [0, 2 * math.sqrt(15) / 4, 0, -2 * math.sqrt(15) / 4])
    g = Grid.compact(-1, 1, 2001)
    approx = boundary_trace(f.on_grid(g), 2).vector
    assert np.allclose(approx, exact, atol=1e-5)
    assert len(approx) == 4


def test_derivative_fallback_and_exact():
    g = catalog_get("gaussian", sigma=0.8, center=0.3)
    x = np.linspace(-2, 2, 9)
    num = (g(x + 1e-5) - g(x - 1e-5)) / 2e-5
    assert np.allclose(g.derivative(x, 1), num, atol=1e-8)


def test_scaled_and_catalog_constants():
    from qop.constants import Constants

    c = Constants(hbar=2.0)
    pw = catalog_get("plane_wave", c, p=1.0)
    assert abs(pw(np.array([0.0]))[0]) == pytest.approx(1 / math.sqrt(2 * math.pi * 2.0))
    twice = catalog_get("gaussian").scaled(2.0)
    assert twice(np.array([0.0]))[0] == pytest.approx(2 * catalog_get("gaussian")(np.array([0.0]))[0])
