"""Discretized eigenproblems, spectral weights and expectation values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import SELF_ADJOINT, classify_pair
from .constants import DEFAULT, Constants
from .errors import DomainViolation, InputError, NotSelfAdjointError, NumericalError, UnsupportedCase
from .functions import AnalyticFunction
from .numerics import (
    COMPACT,
    Grid,
    GridFunction,
    hermitian_eigenvalues,
    inner_product,
    sym_tridiag_eigen,
    tridiag_eigenvalues,
)
from .operators import DomainSpec, OperatorSpec, apply, apply_analytic, dirichlet, domain_check, same_subspace

DISCRETIZED = "discretized"
CLOSED_FORM = "closed-form"

CLEAN = "clean"
MEANINGLESS = "MeaninglessOutsideDomain"

RESIDUAL_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues (ascending) with eigenfunctions produced on demand by ``mode(i)``."""

    eigenvalues: np.ndarray
    grid: Grid
    mode: Callable[[int], np.ndarray] = field(repr=False)
    source: str = DISCRETIZED

    def __len__(self):
        return len(self.eigenvalues)

    def eigenfunction(self, i: int) -> GridFunction:
        return GridFunction(self.grid, self.mode(i), f"mode{i}")

    @property
    def eigenfunctions(self) -> list:
        return [self.eigenfunction(i) for i in range(len(self))]

    def block(self, start: int, stop: int) -> np.ndarray:
        """Rows are eigenfunction samples for indices start..stop-1."""
        return np.array([self.mode(i) for i in range(start, stop)])


@dataclass(frozen=True)
class WeightProfile:
    weights: np.ndarray
    N: int
    tail_estimate: float

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


def _require_self_adjoint(op: OperatorSpec, dom: DomainSpec):
    if dom.base != COMPACT:
        raise UnsupportedCase("discrete spectra are computed on compact intervals only")
    cls = classify_pair(op, dom)
    if cls.verdict != SELF_ADJOINT:
        raise NotSelfAdjointError(
            f"({op.name}, {dom.name}) is {cls.verdict}; it has no spectral decomposition to report", cls.verdict
        )


def _normalize_on(grid: Grid, v: np.ndarray) -> np.ndarray:
    g = GridFunction(grid, v)
    return v / g.norm()


def discrete_spectrum(op: OperatorSpec, dom: DomainSpec, grid: Grid, k: int) -> SpectralData:
    _require_self_adjoint(op, dom)
    if grid.kind != COMPACT or not np.allclose((grid.a, grid.b), dom.interval):
        raise InputError("grid must cover the domain interval")
    if op.order == 2:
        return _second_order_dirichlet(op, dom, grid, k)
    if op.order == 1:
        return _first_order_twisted(op, dom, grid, k)
    raise UnsupportedCase(f"no discretization for order {op.order}")


def _second_order_dirichlet(op, dom, grid, k):
    a, b = dom.interval
    if not same_subspace(dom, dirichlet(a, b, dom.order)):
        raise UnsupportedCase("second-order spectra implemented for Dirichlet conditions only")
    cs = [op.coefficients[j] for j in range(3)]
    if any(c.degree() > 0 and np.any(c.coef[1:] != 0) for c in cs) or cs[1].coef[0] != 0:
        raise UnsupportedCase("second-order spectra need constant coefficients and no first-order term")
    c0, c2 = complex(cs[0].coef[0]), complex(cs[2].coef[0])
    if abs(c0.imag) > 0 or abs(c2.imag) > 0:
        raise UnsupportedCase("coefficients must be real")
    h = grid.h
    m = grid.n_points - 2
    diag = np.full(m, -2 * c2.real / h**2 + c0.real)
    off = np.full(m - 1, c2.real / h**2)
    pairs = sym_tridiag_eigen(diag, off, k)
    vecs = np.zeros((grid.n_points, k))
    vecs[1:-1] = pairs.vectors
    # fix sign so each mode starts positive, then normalize with the quadrature rule
    for i in range(k):
        s = np.sign(vecs[1, i]) or 1.0
        vecs[:, i] = _normalize_on(grid, s * vecs[:, i]).real
    vecs.setflags(write=False)
    return SpectralData(pairs.values, grid, lambda i: vecs[:, i], DISCRETIZED)


def _twist_phase(dom: DomainSpec) -> complex:
    if dom.order != 1 or len(dom.M) != 1 or abs(dom.M[0, 0]) == 0:
        raise UnsupportedCase("first-order spectra need a single condition psi(a) = e^{i alpha} psi(b)")
    return -dom.M[0, 1] / dom.M[0, 0]


def _first_order_twisted(op, dom, grid, k):
    c1 = op.coefficients[1]
    if c1.degree() > 0 and np.any(c1.coef[1:] != 0) or np.any(op.coefficients[0].coef != 0):
        raise UnsupportedCase("first-order spectra need (const) d/dx")
    c = complex(c1.coef[0])
    hb = (1j * c).real  # c = hbar/i
    if abs((1j * c).imag) > 1e-14:
        raise UnsupportedCase("first-order coefficient must be imaginary")
    phase = _twist_phase(dom)
    alpha = float(np.angle(phase))
    a, b = dom.interval
    L = b - a
    # enough n on both sides, then keep the k smallest |p|
    ns = np.arange(-(k // 2) - 2, k // 2 + 3)
    ps = hb * (2 * np.pi * ns - alpha) / L
    order = np.argsort(np.abs(ps), kind="stable")[:k]
    ns, ps = ns[order], ps[order]
    srt = np.argsort(ps)
    ns, ps = ns[srt], ps[srt]
    x = grid.nodes
    amp = 1 / math.sqrt(L)
    # e^{ip(x-a)/hbar} satisfies psi(a) = e^{i alpha} psi(b) for these p
    modes = [amp * np.exp(1j * p * (x - a) / hb) for p in ps]
    worst = 0.0
    for p, v in zip(ps, modes):
        f = GridFunction(grid, v)
        r = (apply(op, f) - f.scale(p)).norm() / f.norm()
        worst = max(worst, r)
        tr = np.array([v[0], v[-1]])
        if abs(dom.M[0] @ tr) > 1e-9:
            raise NumericalError("closed-form eigenfunction violates its boundary condition", {"p": p})
    if worst > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(ps)))):
        raise NumericalError("closed-form eigenpair residual too large", {"residual": worst})
    return SpectralData(np.asarray(ps), grid, lambda i: modes[i], CLOSED_FORM)


def twisted_residuals(op: OperatorSpec, dom: DomainSpec, grid: Grid, k: int) -> np.ndarray:
    data = discrete_spectrum(op, dom, grid, k)
    out = []
    for i, p in enumerate(data.eigenvalues):
        f = data.eigenfunction(i)
        out.append((apply(op, f) - f.scale(p)).norm() / f.norm())
    return np.array(out)


def well_basis(constants: Constants = DEFAULT, grid: Grid | None = None, N: int = 2000) -> SpectralData:
    """Exact infinite-well eigenpairs on [-a, a] sampled on a fine grid."""
    a = constants.a
    grid = grid or Grid.compact(-a, a, 8001)
    x = grid.nodes
    n = np.arange(1, N + 1)
    E = np.pi**2 * constants.hbar**2 * n**2 / (8 * constants.mass * a * a)

    def mode(i):
        k = (i + 1) * np.pi / (2 * a)
        trig = np.cos if (i + 1) % 2 else np.sin
        return trig(k * x) / math.sqrt(a)

    return SpectralData(E, grid, mode, CLOSED_FORM)


def spectral_weights(psi: GridFunction, basis: SpectralData, N: int | None = None, batch: int = 256) -> WeightProfile:
    N = len(basis) if N is None else N
    if not 1 <= N <= len(basis):
        raise InputError(f"N={N} outside 1..{len(basis)}")
    if psi.grid != basis.grid:
        raise InputError("state and basis must share a grid")
    nrm = psi.norm()
    if abs(nrm - 1) > 1e-6:
        raise InputError(f"state is not normalized (‖ψ‖ = {nrm:.8g})")
    w = psi.grid.weights * psi.values
    out = np.empty(N)
    for s in range(0, N, batch):
        blk = basis.block(s, min(N, s + batch))
        out[s : s + len(blk)] = np.abs(np.conj(blk) @ w) ** 2
    return WeightProfile(out, N, max(0.0, 1.0 - float(np.sum(out))))


# ------------------------------------------------ expectations


@dataclass(frozen=True)
class SpectralExpectation:
    value: float
    tail_bound: float
    converged: bool
    N: int

    @property
    def flag(self) -> str:
        return CLEAN if self.converged else "Unconverged"


def _moment_coeffs(moment) -> np.ndarray:
    named = {"1": (1.0,), "E": (0.0, 1.0), "E2": (0.0, 0.0, 1.0)}
    if isinstance(moment, str):
        try:
            moment = named[moment]
        except KeyError:
            raise InputError(f"unknown moment {moment!r}") from None
    c = np.asarray(moment, dtype=float)
    if c.ndim != 1 or not 1 <= len(c) <= 3:
        raise InputError("moments are polynomials in E of degree at most 2")
    return c


def _tail_bound(terms: np.ndarray) -> float:
    """Sum beyond N from a power-law fit to the nonzero terms in the upper half."""
    N = len(terms)
    idx = np.arange(1, N + 1)
    top = np.max(np.abs(terms), initial=0.0)
    if top == 0:
        return 0.0
    live = (np.abs(terms) > 1e-300) & (np.abs(terms) > 1e-14 * top)
    sel = live & (idx > N // 2)
    if not sel.any():
        return 0.0  # the terms have died out
    if sel.sum() < 4:
        sel = live
    if sel.sum() < 4:
        return math.inf
    n, t = idx[sel], np.abs(terms[sel])
    s, logc = np.polyfit(np.log(n), np.log(t), 1)
    if s >= -1:
        return math.inf
    spacing = float(np.median(np.diff(n)))
    return float(math.exp(logc) * N ** (s + 1) / ((-s - 1) * spacing))


def expectation_spectral(psi: GridFunction, basis: SpectralData, moment="E2", N: int = 2000, tol: float = 1e-3):
    c = _moment_coeffs(moment)
    prof = spectral_weights(psi, basis, N)
    E = basis.eigenvalues[:N]
    terms = np.polynomial.polynomial.polyval(E, c) * prof.weights
    tail = _tail_bound(terms)
    return SpectralExpectation(float(np.sum(terms)), tail, bool(tail <= tol), N)


@dataclass(frozen=True)
class DirectExpectation:
    value: float
    domain_flag: str
    report: object = field(repr=False, default=None)


def _sample_pair(psi, op, dom, n_points):
    if isinstance(psi, AnalyticFunction):
        lo, hi = dom.interval if dom.base == COMPACT else psi.domain
        grid = Grid.compact(lo, hi, n_points) if math.isfinite(lo) and math.isfinite(hi) else Grid.line(12.0, n_points)
        f = psi.on_grid(grid)
        g = GridFunction(grid, apply_analytic(op, psi)(grid.nodes))
        return f, g
    return psi, apply(op, psi)


def expectation_direct(psi, op: OperatorSpec, dom: DomainSpec, n_points: int = 2001) -> DirectExpectation:
    """<psi, op psi> by quadrature, flagged when psi lies outside D(op)."""
    f, g = _sample_pair(psi, op, dom, n_points)
    value = inner_product(f, g)
    rep = domain_check(psi, op, dom)
    return DirectExpectation(float(value.real), CLEAN if rep.in_domain else MEANINGLESS, rep)


def image_norm_squared(psi, op: OperatorSpec, dom: DomainSpec, n_points: int = 2001) -> DirectExpectation:
    """<op psi, op psi>; requires psi in D(op)."""
    rep = domain_check(psi, op, dom)
    if not rep.in_domain:
        raise DomainViolation(f"state outside D({op.name}): {list(rep.violated_constraints)}", rep)
    _, g = _sample_pair(psi, op, dom, n_points)
    return DirectExpectation(float(inner_product(g, g).real), CLEAN, rep)


# ------------------------------------------------ unboundedness evidence


@dataclass(frozen=True)
class GrowthReport:
    h: tuple
    norms: tuple
    exponent: float


def _discretization(op: OperatorSpec, dom: DomainSpec, grid: Grid) -> tuple:
    """('diag', values) | ('tridiag', d, e) | ('dense', H)."""
    x = grid.nodes
    if op.order == 0:
        return ("diag", op.coefficient(0, x).real)
    if op.order == 1:
        phase = _twist_phase(dom)
        c = complex(op.coefficients[1].coef[0])
        n = grid.n_points - 1  # psi(b) is determined by psi(a)
        h = grid.h
        H = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        H[idx[:-1], idx[1:]] = c / (2 * h)
        H[idx[1:], idx[:-1]] = -c / (2 * h)
        # wrap-around rows: psi(b) = psi(a)/phase
        H[n - 1, 0] = c / (2 * h) / phase
        H[0, n - 1] = -c / (2 * h) * phase
        return ("dense", H)
    if op.order == 2:
        c2 = complex(op.coefficients[2].coef[0]).real
        h = grid.h
        m = grid.n_points - 2
        return ("tridiag", np.full(m, -2 * c2 / h**2), np.full(m - 1, c2 / h**2))
    raise UnsupportedCase(f"no discretization for order {op.order}")


def norm_growth_probe(op: OperatorSpec, dom: DomainSpec, grids: Sequence[Grid]) -> GrowthReport:
    if len(grids) < 3:
        raise InputError("need at least three grids")
    hs, norms = [], []
    for g in grids:
        kind, *data = _discretization(op, dom, g)
        if kind == "diag":
            lam = np.abs(data[0])
        elif kind == "tridiag":
            lam = np.abs(tridiag_eigenvalues(*data))
        else:
            lam = np.abs(hermitian_eigenvalues(data[0]))
        hs.append(g.h)
        norms.append(float(np.max(lam)))
    slope = np.polyfit(np.log(1 / np.array(hs)), np.log(norms), 1)[0]
    return GrowthReport(tuple(hs), tuple(norms), float(slope))
