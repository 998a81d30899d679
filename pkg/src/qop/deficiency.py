"""Deficiency indices from closed-form witnesses, extension families and residual-spectrum probes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary import SubspaceBasis, adjoint_domain, boundary_form, classify_pair
from .errors import PreconditionError, UnsupportedCase
from .functions import AnalyticFunction, _A_family
from .numerics import COMPACT, NormProbeResult, improper_norm_probe
from .operators import DomainSpec, OperatorSpec, apply_analytic, formal_adjoint, twisted

SELF_ADJOINT_V = "SelfAdjoint"
EXTENSIONS_EXIST = "ExtensionsExist"
NO_EXTENSION = "NoExtension"

SUBSET_OF_REALS = "SubsetOfReals"
ALL_COMPLEX_PLANE = "AllComplexPlane"
UPPER_HALF_PLANE = "ClosedUpperHalfPlane"
LOWER_HALF_PLANE = "ClosedLowerHalfPlane"

IN_RESIDUAL = "InResidualSpectrum"
EIGENVALUE = "Eigenvalue"
NOT_DETECTED = "NotDetected"

ROOT_TOL = 1e-8
WITNESS_RTOL = 1e-6


@dataclass(frozen=True)
class Witness:
    sign: int
    name: str
    norm: NormProbeResult
    function: AnalyticFunction = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class DeficiencyReport:
    n_plus: int
    n_minus: int
    verdict: str
    spectrum_class: str
    witnesses: tuple  # counted solutions
    candidates: tuple = ()  # every closed-form solution examined, counted or not


def classify_von_neumann(n_plus: int, n_minus: int) -> tuple:
    if n_plus < 0 or n_minus < 0:
        raise PreconditionError("deficiency indices are nonnegative")
    if n_plus == n_minus == 0:
        return SELF_ADJOINT_V, SUBSET_OF_REALS
    if n_plus == n_minus:
        return EXTENSIONS_EXIST, ALL_COMPLEX_PLANE
    if n_plus == 0:
        return NO_EXTENSION, UPPER_HALF_PLANE
    if n_minus == 0:
        return NO_EXTENSION, LOWER_HALF_PLANE
    # unequal and both nonzero: extensions exist only after enlarging the space
    return NO_EXTENSION, ALL_COMPLEX_PLANE


# ------------------------------------------------ exponential-polynomial solutions


def _constant_coefficients(op: OperatorSpec) -> np.ndarray:
    cs = []
    for c in op.coefficients:
        if c.degree() > 0 and np.any(c.coef[1:] != 0):
            raise UnsupportedCase(f"{op.name} has non-constant coefficients; no closed-form witness catalog")
        cs.append(complex(c.coef[0]))
    return np.array(cs)


def _solution_basis(op: OperatorSpec, lam: complex) -> list:
    """Basis (r, m) of x^m e^{r x} solving op u = lam u for constant coefficients."""
    cs = _constant_coefficients(op).copy()
    cs[0] -= lam
    roots = np.roots(cs[::-1])
    scale = max(1.0, float(np.max(np.abs(roots), initial=0.0)))
    groups: list = []
    for r in roots:
        for g in groups:
            if abs(g[0] - r) <= ROOT_TOL * scale:
                g[1] += 1
                break
        else:
            groups.append([complex(r), 1])
    return [(r, m) for r, mult in groups for m in range(mult)]


def _exp_poly_derivs(r: complex, m: int, x, j: int):
    x = np.asarray(x, dtype=float)
    out = np.zeros(np.shape(x), dtype=complex)
    for s in range(min(j, m) + 1):
        out = out + math.comb(j, s) * (math.factorial(m) // math.factorial(m - s)) * x ** (m - s) * r ** (j - s)
    return out * np.exp(r * x)


def _trace_matrix(basis: list, a: float, b: float, k: int) -> np.ndarray:
    T = np.zeros((2 * k, len(basis)), dtype=complex)
    for col, (r, m) in enumerate(basis):
        for j in range(k):
            T[j, col] = _exp_poly_derivs(r, m, a, j)
            T[k + j, col] = _exp_poly_derivs(r, m, b, j)
    return T


def _nullspace(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(A)
    scale = max(1.0, s.max(initial=0.0))
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T


def _combination(basis, beta, interval, name) -> AnalyticFunction:
    def sampler(x):
        return sum(bc * _exp_poly_derivs(r, m, x, 0) for (r, m), bc in zip(basis, beta))

    def deriv(x, j):
        return sum(bc * _exp_poly_derivs(r, m, x, j) for (r, m), bc in zip(basis, beta))

    return AnalyticFunction(name, sampler, tuple(interval), (), frozenset(), deriv)


def _fmt_c(z: complex) -> str:
    z = complex(z)
    re_, im_ = round(z.real, 4) + 0.0, round(z.imag, 4) + 0.0
    if im_ == 0:
        return f"{re_:g}"
    if re_ == 0:
        return f"{im_:g}i"
    return f"({re_:g}{im_:+g}i)"


def _describe(basis, beta) -> str:
    """Readable name such as 'exp(-1x)' or '0.5·exp((1-1i)x) + ...'."""
    parts = []
    big = max(abs(b) for b in beta) if len(beta) else 1.0
    for (r, m), bc in zip(basis, beta):
        if abs(bc) < 1e-12 * big:
            continue
        coef = "" if abs(bc / big - 1) < 1e-12 and len(beta) == 1 else f"{_fmt_c(bc)}·"
        mono = f"x^{m}·" if m else ""
        parts.append(f"{coef}{mono}exp({_fmt_c(r)}x)")
    return " + ".join(parts) or "0"


def _solutions_in(subspace: SubspaceBasis | None, op, lam, interval, k) -> list:
    """Closed-form solutions of op u = lam u whose traces lie in the given subspace."""
    basis = _solution_basis(op, lam)
    T = _trace_matrix(basis, *interval, k)
    if subspace is None or subspace.dim == subspace.ambient:
        N = np.eye(len(basis), dtype=complex)
    else:
        Pc = np.eye(subspace.ambient) - subspace.projector()
        N = _nullspace(Pc @ T)
    out = []
    for col in N.T:
        out.append(_combination(basis, col, interval, _describe(basis, col)))
    return out


# ------------------------------------------------ catalog pairs


def _pair_kind(op: OperatorSpec, dom: DomainSpec) -> str:
    if dom.base == COMPACT:
        if op.name in ("P", "Lz", "H", "H^2"):
            return "compact"
    elif op.name == "P":
        return "line-P"
    elif op.name == "A":
        return "line-A"
    raise UnsupportedCase(f"({op.name}, {dom.name}) is outside the analysed catalog")


def _verify_witness(op: OperatorSpec, g: AnalyticFunction, lam: complex, pts) -> float:
    """max |op‡ g - lam g| / max|g| over sample points."""
    adj = formal_adjoint(op)
    lhs = apply_analytic(adj, g)(pts)
    rhs = lam * g(pts)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def _line_witnesses(op: OperatorSpec, sign: int) -> AnalyticFunction:
    c = op.constants
    if op.name == "P":
        # (hbar/i) g' = ±i g  ->  g = e^{∓x/hbar}
        k = -sign / c.hbar
        return AnalyticFunction(
            f"exp({'-' if sign > 0 else '+'}x/ħ)", lambda x: np.exp(k * x), (-math.inf, math.inf), (), frozenset(),
            lambda x, j: k**j * np.exp(k * x),
        )
    coeff = sign / (4 * c.hbar)
    label = "A_deficiency_g_plus" if sign > 0 else "A_deficiency_g_minus"
    return _A_family(c, coeff, 1.0, label, ())


def deficiency_indices(op: OperatorSpec, dom: DomainSpec) -> DeficiencyReport:
    kind = _pair_kind(op, dom)
    counted = {+1: [], -1: []}
    candidates = []
    for sign in (+1, -1):
        lam = sign * 1j
        if kind == "compact":
            form = boundary_form(op, dom.interval)
            Vd = adjoint_domain(form, SubspaceBasis.of(dom, form.order))
            adj = formal_adjoint(op)
            all_sols = _solutions_in(None, adj, lam, dom.interval, form.order)
            sols = _solutions_in(Vd, adj, lam, dom.interval, form.order)
            for g in all_sols:
                candidates.append(Witness(sign, g.name, improper_norm_probe(g, (), dom.interval), g))
            for g in sols:
                res = improper_norm_probe(g, (), dom.interval)
                if res.finite:
                    counted[sign].append(Witness(sign, g.name, res, g))
        else:
            g = _line_witnesses(op, sign)
            pts = np.array([-2.0, -0.7, 0.4, 1.3, 2.5])
            if _verify_witness(op, g, lam, pts) > WITNESS_RTOL:
                raise UnsupportedCase(f"witness {g.name} failed its own eigen-equation")
            res = improper_norm_probe(g, g.singular_points)
            w = Witness(sign, g.name, res, g)
            candidates.append(w)
            if res.finite:
                counted[sign].append(w)
    n_plus, n_minus = len(counted[+1]), len(counted[-1])
    verdict, spec = classify_von_neumann(n_plus, n_minus)
    return DeficiencyReport(n_plus, n_minus, verdict, spec, tuple(counted[+1] + counted[-1]), tuple(candidates))


# ------------------------------------------------ extensions


@dataclass(frozen=True)
class ExtensionFamily:
    parameter: str
    domain: Callable  # alpha -> DomainSpec
    spectrum: Callable  # (n, alpha) -> real
    eigenfunction: Callable  # (n, alpha) -> AnalyticFunction


def extension_family(op: OperatorSpec, dom: DomainSpec) -> ExtensionFamily:
    if op.order != 1 or dom.base != COMPACT:
        raise PreconditionError("extension families are implemented for first-order operators on an interval")
    rep = deficiency_indices(op, dom)
    if (rep.n_plus, rep.n_minus) != (1, 1):
        raise PreconditionError(f"deficiency indices ({rep.n_plus},{rep.n_minus}) are not (1,1)")
    a, b = dom.interval
    L = b - a
    hbar = op.constants.hbar
    c1 = complex(op.coefficients[1].coef[0])
    if abs(c1 - (-1j * hbar)) > 1e-12 or op.coefficients[0].degree() > 0 or op.coefficients[0].coef[0] != 0:
        raise UnsupportedCase("extension spectrum formula only for (hbar/i) d/dx")

    def spectrum(n: int, alpha: float) -> float:
        return hbar * (2 * math.pi * n - alpha) / L

    def eigenfunction(n: int, alpha: float) -> AnalyticFunction:
        k = 1j * spectrum(n, alpha) / hbar
        amp = 1 / math.sqrt(L)
        return AnalyticFunction(
            f"exp(i p_{n} x/ħ)", lambda x: amp * np.exp(k * x), (a, b), (), frozenset(),
            lambda x, j: amp * k**j * np.exp(k * x),
        )

    return ExtensionFamily("alpha", lambda alpha: twisted(alpha, a, b), spectrum, eigenfunction)


# ------------------------------------------------ residual spectrum


def _line_A_eigen(op: OperatorSpec, lam: complex) -> AnalyticFunction:
    # -i hbar (3x^2 u + 2x^3 u') = lam u  ->  u = |x|^{-3/2} exp(-i lam / (4 hbar x^2))
    return _A_family(op.constants, -1j * lam / (4 * op.constants.hbar), 1.0, f"A-eigen({lam:.3g})", ())


def residual_spectrum_probe(op: OperatorSpec, dom: DomainSpec, z: complex) -> str:
    kind = _pair_kind(op, dom)
    z = complex(z)
    if kind == "compact":
        k = max(op.order, 1)
        V = SubspaceBasis.of(dom, k)
        eig = [g for g in _solutions_in(V, op, z, dom.interval, k)]
        if eig:
            return EIGENVALUE
        Vd = adjoint_domain(boundary_form(op, dom.interval), V)
        adj = [g for g in _solutions_in(Vd, formal_adjoint(op), z.conjugate(), dom.interval, k)]
        if any(improper_norm_probe(g, (), dom.interval).finite for g in adj):
            return IN_RESIDUAL
        return NOT_DETECTED
    if kind == "line-P":
        # e^{izx/hbar} is never square-integrable on the whole line
        return NOT_DETECTED
    u = _line_A_eigen(op, z)
    if improper_norm_probe(u, (0.0,)).finite and dom.decay == "maximal":
        return EIGENVALUE
    v = _line_A_eigen(op, z.conjugate())
    return IN_RESIDUAL if improper_norm_probe(v, (0.0,)).finite else NOT_DETECTED


def verdict_agrees_with_boundary(op: OperatorSpec, dom: DomainSpec) -> bool:
    """Self-adjoint by boundary traces iff indices are (0, 0)."""
    rep = deficiency_indices(op, dom)
    return (classify_pair(op, dom).verdict == "self-adjoint") == (rep.verdict == SELF_ADJOINT_V)
