import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qop.boundary import SELF_ADJOINT, classify_pair
from qop.deficiency import (
    ALL_COMPLEX_PLANE,
    EIGENVALUE,
    EXTENSIONS_EXIST,
    IN_RESIDUAL,
    LOWER_HALF_PLANE,
    NO_EXTENSION,
    NOT_DETECTED,
    SELF_ADJOINT_V,
    SUBSET_OF_REALS,
    UPPER_HALF_PLANE,
    classify_von_neumann,
    deficiency_indices,
    extension_family,
    residual_spectrum_probe,
    verdict_agrees_with_boundary,
)
from qop.errors import PreconditionError, UnsupportedCase
from qop.numerics import Grid
from qop.operators import (
    COMPACT,
    DomainSpec,
    angular_momentum,
    apply_analytic,
    dirichlet,
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
from qop.functions import boundary_trace
from qop.spectral import twisted_residuals

H_MIN = DomainSpec("H_min", COMPACT, (-1.0, 1.0), 2, np.eye(4))

COMPACT_CATALOG = [
    (momentum(), dirichlet(0, 1), (1, 1)),
    (momentum(), periodic(0, 1), (0, 0)),
    (momentum(), twisted(0.7, 0, 1), (0, 0)),
    (angular_momentum(), periodic(), (0, 0)),
    (hamiltonian(), dirichlet(-1, 1, 2), (0, 0)),
    (hamiltonian(), periodic(-1, 1, 2), (0, 0)),
    (hamiltonian(), H_MIN, (2, 2)),
    (hamiltonian_squared(), well_squared(1.0), (0, 0)),
    (hamiltonian_squared(), well_squared(1.0, "first"), (0, 0)),
]
LINE_CATALOG = [
    (momentum(), line("maximal"), (0, 0)),
    (pq3_symmetrized(), line("schwartz"), (0, 1)),
]
ids = lambda v: getattr(v, "name", None)


@pytest.mark.parametrize(
    "n,verdict,spec",
    [
        ((0, 0), SELF_ADJOINT_V, SUBSET_OF_REALS),
        ((1, 1), EXTENSIONS_EXIST, ALL_COMPLEX_PLANE),
        ((3, 3), EXTENSIONS_EXIST, ALL_COMPLEX_PLANE),
        ((0, 1), NO_EXTENSION, UPPER_HALF_PLANE),
        ((2, 0), NO_EXTENSION, LOWER_HALF_PLANE),
    ],
)
def test_criterion_table(n, verdict, spec):
    assert classify_von_neumann(*n) == (verdict, spec)


@pytest.mark.parametrize("op,dom,indices", COMPACT_CATALOG + LINE_CATALOG, ids=ids)
def test_indices_and_witness_count(op, dom, indices):
    rep = deficiency_indices(op, dom)
    assert (rep.n_plus, rep.n_minus) == indices
    assert (rep.verdict, rep.spectrum_class) == classify_von_neumann(*indices)
    assert len(rep.witnesses) == sum(indices)
    assert all(w.norm.finite for w in rep.witnesses)


@pytest.mark.parametrize("op,dom,indices", COMPACT_CATALOG, ids=ids)
def test_boundary_and_indices_agree(op, dom, indices):
    sa_boundary = classify_pair(op, dom).verdict == SELF_ADJOINT
    assert sa_boundary == (indices == (0, 0))
    assert verdict_agrees_with_boundary(op, dom)


def test_A_witness_norms():
    rep = deficiency_indices(pq3_symmetrized(), line("schwartz"))
    status = {w.name: w.norm.status for w in rep.candidates}
    assert status == {"A_deficiency_g_plus": "Divergent", "A_deficiency_g_minus": "Finite"}


def test_uncatalogued_pair_refused():
    with pytest.raises(UnsupportedCase):
        deficiency_indices(position(), line())


def test_extension_family_preconditions():
    with pytest.raises(PreconditionError):
        extension_family(momentum(), periodic(0, 1))
    with pytest.raises(PreconditionError):
        extension_family(hamiltonian(), dirichlet(-1, 1, 2))


@pytest.mark.parametrize("alpha", np.linspace(0, 2 * math.pi, 8, endpoint=False))
def test_extension_family_members(alpha):
    P = momentum()
    fam = extension_family(P, dirichlet(0, 1))
    dom = fam.domain(alpha)
    assert classify_pair(P, dom).verdict == SELF_ADJOINT
    assert np.max(twisted_residuals(P, dom, Grid.compact(0, 1, 2049), 7)) <= 1e-3
    x = np.linspace(0, 1, 11)
    for n in range(-3, 4):
        u = fam.eigenfunction(n, alpha)
        assert np.allclose(apply_analytic(P, u)(x), fam.spectrum(n, alpha) * u(x))
        assert abs(dom.M @ boundary_trace(u, 1).vector)[0] < 1e-12
        assert fam.spectrum(n, alpha) == pytest.approx(2 * math.pi * n - alpha)


@given(st.floats(-4, 4), st.floats(-3, 3))
def test_residual_probe_outcomes(re, im):
    z = complex(re, im)
    dirichlet_result = residual_spectrum_probe(momentum(), dirichlet(0, 1), z)
    assert dirichlet_result in (IN_RESIDUAL, NOT_DETECTED)
    assert dirichlet_result == IN_RESIDUAL
    periodic_result = residual_spectrum_probe(angular_momentum(), periodic(), z)
    assert periodic_result != IN_RESIDUAL


def test_residual_probe_known_points():
    Lz, circle = angular_momentum(), periodic()
    assert residual_spectrum_probe(Lz, circle, 2.0) == EIGENVALUE
    assert residual_spectrum_probe(Lz, circle, 2.5) == NOT_DETECTED
    A = pq3_symmetrized()
    assert residual_spectrum_probe(A, line("schwartz"), 1j) == IN_RESIDUAL
    assert residual_spectrum_probe(A, line("schwartz"), -1j) == NOT_DETECTED
