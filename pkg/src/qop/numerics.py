"""Grids, quadrature, finite differences, symmetric eigensolvers and the
improper-integral probe that decides square-integrability."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .errors import InputError, NumericalError, StructuralError

COMPACT = "compact"
LINE = "line"


@dataclass(frozen=True)
class Grid:
    """Uniform grid on a compact interval or on a truncated line [-T, T]."""

    kind: str
    a: float
    b: float
    n_points: int

    def __post_init__(self):
        if self.kind not in (COMPACT, LINE):
            raise StructuralError(f"unknown grid kind {self.kind!r}")
        if self.n_points < 8:
            raise StructuralError("a grid needs at least 8 points")
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.b <= self.a:
            raise StructuralError(f"bad endpoints ({self.a}, {self.b})")

    @classmethod
    def compact(cls, a: float, b: float, n_points: int) -> "Grid":
        return cls(COMPACT, float(a), float(b), int(n_points))

    @classmethod
    def line(cls, truncation: float, n_points: int) -> "Grid":
        return cls(LINE, -float(truncation), float(truncation), int(n_points))

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n_points - 1)

    @property
    def truncation(self) -> float:
        return self.b if self.kind == LINE else math.nan

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.a, self.b, self.n_points)

    @property
    def weights(self) -> np.ndarray:
        return simpson_weights(self.n_points) * self.h


@lru_cache(maxsize=64)
def _nodes(a, b, n):
    x = np.linspace(a, b, n)
    x.flags.writeable = False
    return x


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise StructuralError(
                f"values have shape {v.shape}, grid has {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(v)):
            raise InputError(f"grid function {self.label!r} has non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, grid: Grid, func, label: str = "") -> "GridFunction":
        sampler = getattr(func, "sampler", func)
        label = label or getattr(func, "name", "")
        return cls(grid, sampler(grid.nodes), label)

    def __add__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values, self.label)

    def __sub__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values, self.label)

    def scale(self, c) -> "GridFunction":
        return GridFunction(self.grid, c * self.values, self.label)

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def _same_grid(f: GridFunction, g: GridFunction):
    if f.grid != g.grid:
        raise StructuralError(f"grid mismatch: {f.grid} vs {g.grid}")


@lru_cache(maxsize=64)
def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights for unit spacing; 3/8 rule closes an odd interval count."""
    if n < 4:
        raise StructuralError("Simpson needs at least 4 points")
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 3
    w[:m:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = 1.0
    w[m - 1] = 1.0
    w[:m] /= 3.0
    if m < n:
        w[m - 1 :] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    w.flags.writeable = False
    return w


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """Simpson approximation of the integral of conj(f) g."""
    _same_grid(f, g)
    return complex(np.sum(f.grid.weights * np.conj(f.values) * g.values))


def integrate(f: GridFunction) -> complex:
    return complex(np.sum(f.grid.weights * f.values))


# ---------------------------------------------------------------- derivatives


@lru_cache(maxsize=256)
def fd_weights(offsets: tuple, order: int) -> np.ndarray:
    """Weights w with sum_i w_i f(x + s_i h) ~ h^order f^(order)(x)."""
    s = np.asarray(offsets, dtype=float)
    m = len(s)
    V = np.vander(s, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    w = np.linalg.solve(V, rhs)
    w.flags.writeable = False
    return w


def _stencil_plan(n: int, order: int):
    r = (order + 1) // 2
    width = order + 2
    edge = []
    for i in list(range(r)) + list(range(n - r, n)):
        start = min(max(i - width // 2, 0), n - width)
        idx = np.arange(start, start + width)
        edge.append((i, idx, fd_weights(tuple(idx - i), order)))
    return r, fd_weights(tuple(range(-r, r + 1)), order), edge


def derivative(f: GridFunction, order: int) -> GridFunction:
    """Second-order accurate derivative, central inside, one-sided near the ends."""
    if order not in (0, 1, 2, 3, 4):
        raise StructuralError(f"derivative order {order} not supported")
    if order == 0:
        return f
    n = f.grid.n_points
    if n < 2 * order + 5:
        raise StructuralError(f"{n} points is too coarse for order {order}")
    v = f.values
    r, w, edge = _stencil_plan(n, order)
    out = np.zeros(n, dtype=complex)
    for j, wj in enumerate(w):
        out[r : n - r] += wj * v[j : n - 2 * r + j]
    for i, idx, wi in edge:
        out[i] = wi @ v[idx]
    return GridFunction(f.grid, out / f.grid.h**order, f.label)


def endpoint_derivative(values: np.ndarray, h: float, order: int, at_start: bool) -> complex:
    """One-sided order-h^2 derivative at the first or last node."""
    width = order + 2
    if at_start:
        w = fd_weights(tuple(range(width)), order)
        return complex(w @ values[:width]) / h**order
    w = fd_weights(tuple(range(-width + 1, 1)), order)
    return complex(w @ values[-width:]) / h**order


# ----------------------------------------------------------------- eigen


@njit(cache=True)
def _tql_eigenvalues(d, e, max_iter):
    # implicit-shift QL on a symmetric tridiagonal; e[i] couples i and i+1
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tridiag_eigenvalues(diag, offdiag, max_iter: int = 60) -> np.ndarray:
    d = np.array(diag, dtype=float)
    off = np.asarray(offdiag, dtype=float)
    if off.shape != (max(d.shape[0] - 1, 0),):
        raise StructuralError("offdiag must have length len(diag) - 1")
    e = np.zeros_like(d)
    e[: d.shape[0] - 1] = off
    failed = _tql_eigenvalues(d, e, max_iter)
    if failed >= 0:
        raise NumericalError(
            "QL iteration did not converge",
            {"index": int(failed), "max_iter": max_iter, "residual_offdiag": float(abs(e[failed]))},
        )
    return np.sort(d)


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray  # columns

    def __iter__(self):
        return iter(zip(self.values, self.vectors.T))

    def __len__(self):
        return len(self.values)


def sym_tridiag_eigen(diag, offdiag, k: int) -> EigenPairs:
    """k lowest eigenpairs: QL for the values, inverse iteration for the vectors."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = diag.shape[0]
    if not 1 <= k <= n:
        raise InputError(f"k={k} outside 1..{n}")
    lam = tridiag_eigenvalues(diag, offdiag)[:k]
    tnorm = float(np.max(np.abs(diag)) + 2 * (np.max(np.abs(offdiag)) if n > 1 else 0.0)) or 1.0
    vecs = np.empty((n, k))
    rng = np.random.default_rng(12345)
    ab = np.zeros((3, n))
    ab[0, 1:] = offdiag
    ab[2, :-1] = offdiag
    cluster_start = 0
    for j in range(k):
        if j > 0 and lam[j] - lam[j - 1] > 1e-8 * tnorm:
            cluster_start = j
        shift = lam[j] + 1e-13 * tnorm * (1 + j - cluster_start)
        ab[1] = diag - shift
        x = rng.standard_normal(n)
        for _ in range(3):
            try:
                x = solve_banded((1, 1), ab, x, check_finite=False)
            except np.linalg.LinAlgError:
                ab[1] = diag - shift * (1 + 1e-12)
                continue
            prev = vecs[:, cluster_start:j]
            if prev.size:
                x -= prev @ (prev.T @ x)
                x -= prev @ (prev.T @ x)
            x /= np.linalg.norm(x)
        vecs[:, j] = x
    resid = _tridiag_matvec(diag, offdiag, vecs) - vecs * lam
    worst = float(np.max(np.linalg.norm(resid, axis=0))) if k else 0.0
    if worst > 1e-10 * tnorm:
        raise NumericalError("inverse iteration residual too large", {"residual": worst, "norm": tnorm})
    return EigenPairs(lam, vecs)


def _tridiag_matvec(diag, offdiag, x):
    y = diag[:, None] * x
    y[:-1] += offdiag[:, None] * x[1:]
    y[1:] += offdiag[:, None] * x[:-1]
    return y


def householder_tridiagonal(A: np.ndarray):
    """Reduce a real symmetric matrix to tridiagonal form (values only)."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    for k in range(n - 2):
        x = A[k + 1 :, k]
        sigma = np.linalg.norm(x)
        if sigma == 0.0:
            continue
        alpha = -math.copysign(sigma, x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        S = A[k + 1 :, k + 1 :]
        p = S @ v
        q = p - (v @ p) * v
        S -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        A[k + 1 :, k] = 0.0
        A[k, k + 1 :] = 0.0
        A[k + 1, k] = A[k, k + 1] = alpha
    return np.diag(A).copy(), np.diag(A, 1).copy()


def hermitian_eigenvalues(H: np.ndarray, pair_rtol: float = 1e-9) -> np.ndarray:
    """Eigenvalues of a complex hermitian matrix via the real doubling embedding."""
    H = np.asarray(H, dtype=complex)
    A, B = H.real, H.imag
    R = np.block([[A, -B], [B, A]])
    d, e = householder_tridiagonal(R)
    lam = tridiag_eigenvalues(d, e)
    first, second = lam[0::2], lam[1::2]
    scale = max(float(np.max(np.abs(lam))), 1.0)
    if np.max(np.abs(first - second)) > pair_rtol * scale * 10:
        raise NumericalError("doubled eigenvalues failed to pair", {"gap": float(np.max(np.abs(first - second)))})
    return 0.5 * (first + second)


# ------------------------------------------------------ improper norm probe

FINITE = "Finite"
DIVERGENT = "Divergent"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class NormProbeResult:
    status: str
    value: float | None
    refinement_trace: tuple = field(default_factory=tuple)

    @property
    def finite(self) -> bool:
        return self.status == FINITE


@dataclass(frozen=True)
class SpikeTrain:
    """Narrow features whose shape a uniform sampler cannot resolve.

    ``locate(lo, hi)`` returns (ids, centers, halfwidths) of windows centred in
    [lo, hi); ``local(ids, offsets)`` evaluates the function at centre + offset
    without forming the (possibly ill-conditioned) absolute abscissa.
    """

    locate: Callable
    local: Callable
    panels_per_side: int = 4
    nodes_per_panel: int = 8


_GL_CACHE: dict = {}


def _gauss_legendre(m: int):
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _panels(s: float, t: float, anchors: np.ndarray, kinks, floor: float, ratio: float):
    # panel width grows with distance from the nearest anchor
    if t <= s:
        return np.empty(0)
    edges = [s, t]
    edges += [k for k in kinks if s < k < t]
    x = s
    while True:
        dist = float(np.min(np.abs(anchors - x)))
        step = max(ratio * dist, floor)
        x = x + step
        if x >= t:
            break
        edges.append(x)
    return np.unique(np.asarray(edges, dtype=float))


def _panel_integral(func, edges, m=16):
    if edges.size < 2:
        return 0.0
    xg, wg = _gauss_legendre(m)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wg
    vals = func(x.ravel()).reshape(x.shape)
    return float(np.sum(w * vals))


def improper_norm_probe(
    f,
    singular_points: Sequence[float] = (),
    domain: tuple = (-math.inf, math.inf),
    rtol: float = 1e-6,
    growth_factor: float = 10.0,
    max_refinements: int = 40,
    eps0: float = 0.5,
    T0: float = 8.0,
    max_spikes: int = 4_000_000,
) -> NormProbeResult:
    """Decide whether the integral of |f|^2 over ``domain`` is finite.

    Cutoffs shrink geometrically toward every singular point and the truncation
    radius grows geometrically toward infinity; the sequence of partial
    integrals is then judged converged, divergent, or neither.
    """
    sampler = getattr(f, "sampler", f)
    spikes = getattr(f, "spikes", None)
    kinks = tuple(getattr(f, "kinks", ()))
    lo, hi = float(domain[0]), float(domain[1])
    sing = np.array(sorted({float(p) for p in singular_points}), dtype=float)
    if sing.size and (np.any(sing < lo) or np.any(sing > hi)):
        raise InputError("singular points must lie in the closure of the domain")
    cuts = sorted(set([lo, hi] + [p for p in sing if lo < p < hi]))
    anchors = sing if sing.size else np.array([0.5 * (lo + hi) if math.isfinite(lo + hi) else 0.0])
    floor = 0.0 if sing.size else 0.125
    on_sing = set(sing.tolist())

    def density(x):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            v = np.asarray(sampler(x), dtype=complex)
        bad = ~np.isfinite(v)
        if np.any(bad):
            raise InputError(f"sampler returned non-finite value at x={x[bad][0]!r}")
        out = np.abs(v) ** 2
        if spikes is not None and x.size:
            ids, c, w = spikes.locate(float(np.min(x)) - 1.0, float(np.max(x)) + 1.0)
            if len(c):
                pos = np.searchsorted(c, x)
                for shift in (0, 1):
                    j = np.clip(pos - shift, 0, len(c) - 1)
                    out[np.abs(x - c[j]) < w[j]] = 0.0
        return out

    def spike_mass(s, t):
        if spikes is None or t <= s:
            return 0.0, 0
        ids, c, w = spikes.locate(s, t)
        if len(c) == 0:
            return 0.0, 0
        xg, wg = _gauss_legendre(spikes.nodes_per_panel)
        P = spikes.panels_per_side
        edges = np.linspace(-1.0, 1.0, 2 * P + 1)
        loc = (0.5 * (edges[1:, None] - edges[:-1, None]) * xg + 0.5 * (edges[1:, None] + edges[:-1, None])).ravel()
        wts = (0.5 * (edges[1:, None] - edges[:-1, None]) * wg).ravel()
        total = 0.0
        for k in range(0, len(c), 20000):
            idc, wc = ids[k : k + 20000], w[k : k + 20000]
            off = wc[:, None] * loc[None, :]
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                v = spikes.local(np.repeat(idc, loc.size).reshape(off.shape), off)
            total += float(np.sum(wc[:, None] * wts[None, :] * np.abs(v) ** 2))
        return total, len(c)

    def piece(s, t):
        if t <= s:
            return 0.0
        edges = _panels(s, t, anchors, kinks, floor=floor, ratio=2.0 ** 0.125 - 1.0)
        return _panel_integral(density, edges)

    regions = []
    for u, v in zip(cuts[:-1], cuts[1:]):
        regions.append({"u": u, "v": v, "ls": u in on_sing, "rs": v in on_sing, "cu": None, "cv": None})

    def target(reg, k):
        eps, T = eps0 * 2.0**-k, T0 * 2.0**k
        u, v = reg["u"], reg["v"]
        width = v - u if math.isfinite(v - u) else math.inf
        e = min(eps, 0.25 * width)
        tu = -T if u == -math.inf else (u + e if reg["ls"] else u)
        tv = T if v == math.inf else (v - e if reg["rs"] else v)
        if u == -math.inf and math.isfinite(v):
            tu = min(tu, v - T)
        if v == math.inf and math.isfinite(u):
            tv = max(tv, u + T)
        return tu, tv

    trace: list = []
    total = 0.0
    n_spikes = 0
    for k in range(max_refinements + 1):
        for reg in regions:
            tu, tv = target(reg, k)
            if reg["cu"] is None:
                total += piece(tu, tv)
                m, cnt = spike_mass(tu, tv)
                total += m
                n_spikes += cnt
            else:
                for s, t in ((tu, reg["cu"]), (reg["cv"], tv)):
                    total += piece(s, t)
                    m, cnt = spike_mass(s, t)
                    total += m
                    n_spikes += cnt
            reg["cu"], reg["cv"] = tu, tv
        trace.append(total)
        if len(trace) >= 2:
            prev = trace[-2]
            if abs(total - prev) <= rtol * abs(total):
                return NormProbeResult(FINITE, float(total), tuple(trace))
        if len(trace) >= 4:
            last = trace[-4:]
            if all(last[i] > 0 and last[i + 1] >= growth_factor * last[i] for i in range(3)):
                return NormProbeResult(DIVERGENT, None, tuple(trace))
        if n_spikes > max_spikes:
            break
    return NormProbeResult(INCONCLUSIVE, None, tuple(trace))
