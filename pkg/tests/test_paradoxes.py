import numpy as np
import pytest

from qop.constants import Constants
from qop.paradoxes import (
    DEFAULT_TOLERANCES,
    REPRODUCED,
    ccr_matrices,
    finite_dim_ccr_probe,
    run_paradox,
)


@pytest.mark.parametrize("pid", range(1, 8))
def test_paradox_reproduced(pid):
    rep = run_paradox(pid, seed=1234)
    assert rep.verdict == REPRODUCED, rep.failing
    assert rep.checks and rep.equations
    d = rep.as_dict()
    assert d["naive_result"] is not None and d["defect"] and d["resolution_result"]


@pytest.mark.parametrize("N", [2, 4, 17, 64, 256, 512])
def test_ccr_trace_vanishes(N):
    rep = finite_dim_ccr_probe(N)
    assert abs(rep.trace) <= 1e-12
    assert rep.mean_diagonal_deviation == pytest.approx(1.0)
    if N > 2:
        assert rep.interior_row_deviation <= 1e-6
        assert rep.boundary_row_deviation == pytest.approx(N / 2, rel=1e-9)


def test_ccr_matrices_hermitian():
    P, Q = ccr_matrices(32)
    assert np.allclose(P, P.conj().T) and np.allclose(Q, Q.conj().T)


def test_ccr_probe_range():
    with pytest.raises(ValueError):
        finite_dim_ccr_probe(1024)


def test_paradox_respects_constants():
    rep = run_paradox(7, Constants(hbar=1.0, mass=2.0, a=1.0))
    assert rep.verdict == REPRODUCED
    assert rep.resolution_result["exact"] == pytest.approx(15 / 32)


def test_unknown_paradox():
    with pytest.raises(ValueError):
        run_paradox(8)


def test_default_tolerance_keys():
    assert {"ccr_trace", "eigen_rel", "spectral_sum", "uncertainty"} <= set(DEFAULT_TOLERANCES)
