"""Test functions, tempered functionals and the Fourier transform by direct quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT, Constants
from .errors import InputError, QopError, UnsupportedCase
from .functions import RAPID_DECAY, AnalyticFunction, DecayReport, catalog_get, schwartz_probe
from .numerics import LINE, Grid, GridFunction, NormProbeResult, improper_norm_probe
from .operators import OperatorSpec, apply_analytic

EDGE_TOL = 1e-10

DELTA = "Delta"
PLANE_WAVE = "PlaneWave"
REGULAR = "Regular"

SCHWARTZ_MEMBER = "SchwartzMember"
L2_ONLY = "L2Only"
TEMPERED_ONLY = "TemperedOnly"


class ClassificationError(QopError):
    """A function fits none of the three tiers."""


@dataclass(frozen=True)
class FourierTransform:
    function: GridFunction
    edges_decayed: bool
    edge_value: float


def _kernel_transform(f: GridFunction, p_grid: Grid, hbar: float, sign: int) -> np.ndarray:
    x, w = f.grid.nodes, f.grid.weights
    p = p_grid.nodes
    K = np.exp(sign * 1j * np.outer(p, x) / hbar)
    return (K @ (w * f.values)) / math.sqrt(2 * math.pi * hbar)


def fourier(f: GridFunction, p_grid: Grid, hbar: float = 1.0) -> FourierTransform:
    """(F f)(p) = ∫ e^{-ipx/hbar} f(x) dx / sqrt(2 pi hbar), one quadrature per p node."""
    edge = float(max(abs(f.values[0]), abs(f.values[-1])))
    vals = _kernel_transform(f, p_grid, hbar, -1)
    return FourierTransform(GridFunction(p_grid, vals, f"F[{f.label}]"), edge <= EDGE_TOL, edge)


def inverse_fourier(F: GridFunction, x_grid: Grid, hbar: float = 1.0) -> GridFunction:
    return GridFunction(x_grid, _kernel_transform(F, x_grid, hbar, +1), f"F^-1[{F.label}]")


# ------------------------------------------------ functionals


@dataclass(frozen=True)
class Functional:
    kind: str
    x0: float = 0.0
    p: float = 0.0
    psi: AnalyticFunction | None = None
    constants: Constants = DEFAULT

    def __post_init__(self):
        if self.kind not in (DELTA, PLANE_WAVE, REGULAR):
            raise InputError(f"unknown functional kind {self.kind!r}")
        if self.kind == REGULAR and self.psi is None:
            raise InputError("regular functionals need a function")


def delta(x0: float, constants: Constants = DEFAULT) -> Functional:
    return Functional(DELTA, x0=float(x0), constants=constants)


def plane_wave_functional(p: float, constants: Constants = DEFAULT) -> Functional:
    return Functional(PLANE_WAVE, p=float(p), constants=constants)


def regular(psi: AnalyticFunction, constants: Constants = DEFAULT) -> Functional:
    return Functional(REGULAR, psi=psi, constants=constants)


def _support_radius(phi: AnalyticFunction) -> float:
    T = 8.0
    peak = float(np.max(np.abs(phi(np.linspace(-T, T, 4001)))))
    while T < 1e4:
        t = np.linspace(T, 2 * T, 2001)
        tail = float(np.max(np.abs(phi(np.concatenate([-t, t])))))
        if tail <= 1e-17 * max(peak, 1e-300):
            return T
        T *= 2
    raise InputError(f"{phi.name} does not decay enough for quadrature")


def _quad_line(phi: AnalyticFunction, kernel=None, n_points: int = 16001) -> complex:
    T = _support_radius(phi)
    g = Grid.line(T, n_points)
    v = phi(g.nodes)
    if kernel is not None:
        v = v * kernel(g.nodes)
    return complex(np.sum(g.weights * v))


_schwartz_cache: dict = {}


def require_schwartz(phi: AnalyticFunction) -> DecayReport:
    key = id(phi)
    hit = _schwartz_cache.get(key)
    if hit is not None and hit[0] is phi:
        rep = hit[1]
    else:
        rep = schwartz_probe(phi)
        _schwartz_cache[key] = (phi, rep)
    if rep.classification != RAPID_DECAY:
        raise InputError(f"{phi.name} is not a test function ({rep.classification})")
    return rep


def _eval_unchecked(F: Functional, phi: AnalyticFunction) -> complex:
    if F.kind == DELTA:
        return complex(phi(np.array([F.x0]))[0])
    if F.kind == PLANE_WAVE:
        hbar = F.constants.hbar
        return _quad_line(phi, lambda x: np.exp(-1j * F.p * x / hbar) / math.sqrt(2 * math.pi * hbar))
    psi = F.psi
    return _quad_line(phi, lambda x: np.conj(psi(x)))


def evaluate(F: Functional, phi: AnalyticFunction) -> complex:
    require_schwartz(phi)
    return _eval_unchecked(F, phi)


def apply_to_functional(op: OperatorSpec, F: Functional, phi: AnalyticFunction) -> complex:
    """(op F)(phi) = F(op phi): the transpose action for operators symmetric on test functions."""
    if op.name not in ("Q", "P"):
        raise UnsupportedCase(f"distributional action of {op.name} is not implemented")
    require_schwartz(phi)
    return _eval_unchecked(F, apply_analytic(op, phi))


def default_test_set(constants: Constants = DEFAULT) -> list:
    """Twelve normalized Gaussians: four centres, three widths."""
    return [
        catalog_get("gaussian", constants, sigma=s, center=c)
        for c in (-1.0, 0.0, 0.5, 1.3)
        for s in (0.5, 1.0, 2.0)
    ]


def weak_eigen_check(op: OperatorSpec, F: Functional, lam: complex, tests=None) -> float:
    tests = default_test_set(F.constants) if tests is None else list(tests)
    if not tests:
        raise InputError("test set is empty")
    worst = 0.0
    for phi in tests:
        r = abs(apply_to_functional(op, F, phi) - lam * _eval_unchecked(F, phi))
        worst = max(worst, r)
    return worst


# ------------------------------------------------ triple membership


@dataclass(frozen=True)
class TripleClassification:
    tier: str
    decay: DecayReport
    norm: NormProbeResult
    singular_growth: bool


def _explodes_near(f: AnalyticFunction, x0: float) -> bool:
    """|f| d^8 still growing as the distance d to x0 shrinks geometrically."""
    d = 2.0 ** -np.arange(3, 15)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.maximum(np.abs(f(x0 + d)), np.abs(f(x0 - d))) * d**8
    if not np.all(np.isfinite(v)):
        return True
    tail = v[-4:]
    return bool(tail[0] > 0 and np.all(np.diff(tail) >= 0) and tail[-1] >= 2 * tail[0])


def classify_triple(f: AnalyticFunction) -> TripleClassification:
    if not f.on_line:
        raise InputError("triple membership is decided for functions on the whole line")
    decay = schwartz_probe(f)
    norm = improper_norm_probe(f, f.singular_points)
    singular = any(_explodes_near(f, s) for s in f.singular_points)
    if decay.classification == RAPID_DECAY and not singular:
        tier = SCHWARTZ_MEMBER
    elif norm.finite:
        tier = L2_ONLY
    elif decay.polynomially_bounded and not singular:
        tier = TEMPERED_ONLY
    else:
        raise ClassificationError(f"{f.name} is not tempered at polynomial order ≤ 8")
    return TripleClassification(tier, decay, norm, singular)


def is_line_grid(g: Grid) -> bool:
    return g.kind == LINE
