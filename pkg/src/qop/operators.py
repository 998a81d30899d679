"""Differential operators with polynomial coefficients, their domains, and domain algebra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import Polynomial

from .constants import DEFAULT, Constants
from .errors import InputError, UnsupportedCase
from .functions import AnalyticFunction, boundary_trace, schwartz_probe, RAPID_DECAY
from .numerics import (
    COMPACT,
    FINITE,
    LINE,
    GridFunction,
    NormProbeResult,
    derivative,
    improper_norm_probe,
)

BC_TOL = 1e-6
RANK_TOL = 1e-9

MAXIMAL = "maximal"
SCHWARTZ_CLASS = "schwartz"


def _poly(coeffs) -> Polynomial:
    return Polynomial(np.asarray(coeffs, dtype=complex))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """L = sum_j c_j(x) d^j/dx^j with polynomial c_j."""

    name: str
    order: int
    coefficients: tuple
    constants: Constants = DEFAULT

    def __post_init__(self):
        if self.order not in (0, 1, 2, 4):
            raise InputError(f"operator order {self.order} not in {{0, 1, 2, 4}}")
        cs = tuple(c if isinstance(c, Polynomial) else _poly(c) for c in self.coefficients)
        cs = cs + (_poly([0]),) * (self.order + 1 - len(cs))
        if len(cs) != self.order + 1:
            raise InputError("one coefficient per derivative order is required")
        if np.all(cs[self.order].coef == 0):
            raise InputError("leading coefficient vanishes identically")
        object.__setattr__(self, "coefficients", cs)

    def coefficient(self, j: int, x, deriv: int = 0):
        c = self.coefficients[j]
        if deriv:
            c = c.deriv(deriv)
        return c(np.asarray(x, dtype=float))

    def __repr__(self):
        return f"OperatorSpec({self.name}, order={self.order})"


def position(c: Constants = DEFAULT, name: str = "Q") -> OperatorSpec:
    return OperatorSpec(name, 0, (_poly([0, 1]),), c)


def momentum(c: Constants = DEFAULT, name: str = "P") -> OperatorSpec:
    return OperatorSpec(name, 1, (_poly([0]), _poly([-1j * c.hbar])), c)


def angular_momentum(c: Constants = DEFAULT) -> OperatorSpec:
    return momentum(c, "Lz")


def angle(c: Constants = DEFAULT) -> OperatorSpec:
    return position(c, "phi")


def hamiltonian(c: Constants = DEFAULT) -> OperatorSpec:
    return OperatorSpec("H", 2, (_poly([0]), _poly([0]), _poly([-c.hbar**2 / (2 * c.mass)])), c)


def hamiltonian_squared(c: Constants = DEFAULT) -> OperatorSpec:
    k = c.hbar**4 / (4 * c.mass**2)
    return OperatorSpec("H^2", 4, (_poly([0]),) * 4 + (_poly([k]),), c)


def pq3_symmetrized(c: Constants = DEFAULT) -> OperatorSpec:
    """P Q^3 + Q^3 P expanded: (hbar/i)(3x^2 + 2x^3 d/dx)."""
    h = c.hbar
    return OperatorSpec("A", 1, (_poly([0, 0, -3j * h]), _poly([0, 0, 0, -2j * h])), c)


OPERATORS = {
    "Q": position,
    "phi": angle,
    "P": momentum,
    "Lz": angular_momentum,
    "H": hamiltonian,
    "H2": hamiltonian_squared,
    "A": pq3_symmetrized,
}


def operator_get(name: str, c: Constants = DEFAULT) -> OperatorSpec:
    try:
        return OPERATORS[name](c)
    except KeyError:
        raise InputError(f"unknown operator {name!r}; known: {', '.join(OPERATORS)}") from None


def formal_adjoint(op: OperatorSpec) -> OperatorSpec:
    """Integration-by-parts transpose: sum_j (-1)^j d^j (conj(c_j) .)."""
    k = op.order
    out = [_poly([0]) for _ in range(k + 1)]
    for j in range(k + 1):
        cj = _poly(np.conj(op.coefficients[j].coef))
        for s in range(j + 1):
            out[s] = out[s] + ((-1) ** j * math.comb(j, s)) * cj.deriv(j - s)
    return OperatorSpec(op.name + "^‡", k, tuple(out), op.constants)


def _trimmed(name, coeffs, constants) -> OperatorSpec:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and np.all(np.abs(coeffs[-1].coef) < 1e-14):
        coeffs.pop()
    order = len(coeffs) - 1
    if order not in (0, 1, 2, 4):
        raise UnsupportedCase(f"{name} has order {order}, outside the supported set")
    return OperatorSpec(name, order, tuple(coeffs), constants)


def compose(A: OperatorSpec, B: OperatorSpec) -> OperatorSpec:
    """A∘B via d^i (b u) = sum_s C(i,s) b^(i-s) u^(s)."""
    out = [_poly([0]) for _ in range(A.order + B.order + 1)]
    for i, ai in enumerate(A.coefficients):
        for j, bj in enumerate(B.coefficients):
            for s in range(i + 1):
                out[j + s] = out[j + s] + math.comb(i, s) * ai * bj.deriv(i - s)
    return _trimmed(f"{A.name}{B.name}", out, A.constants)


def commutator(A: OperatorSpec, B: OperatorSpec) -> OperatorSpec:
    AB, BA = compose(A, B), compose(B, A)
    n = max(AB.order, BA.order) + 1
    pad = lambda op: list(op.coefficients) + [_poly([0])] * (n - op.order - 1)
    return _trimmed(f"[{A.name},{B.name}]", [x - y for x, y in zip(pad(AB), pad(BA))], A.constants)


def apply(op: OperatorSpec, f: GridFunction) -> GridFunction:
    x = f.grid.nodes
    total = np.zeros(len(x), dtype=complex)
    for j in range(op.order + 1):
        c = op.coefficient(j, x)
        if np.any(c != 0):
            total += c * (f.values if j == 0 else derivative(f, j).values)
    return GridFunction(f.grid, total, f"{op.name}({f.label})")


def apply_analytic(op: OperatorSpec, f: AnalyticFunction) -> AnalyticFunction:
    """op f as a sampled function, using the exact derivatives f carries."""

    def sampler(x):
        total = np.zeros(np.shape(x), dtype=complex)
        for j in range(op.order + 1):
            c = op.coefficient(j, x)
            if np.any(c != 0):
                total = total + c * f.derivative(x, j)
        return total

    return AnalyticFunction(f"{op.name}({f.name})", sampler, f.domain, f.singular_points)


# --------------------------------------------------------------- domains


def _symbol(j: int) -> str:
    return "ψ" + "′" * j if j < 4 else "ψ⁗"


def _fmt_point(x: float) -> str:
    for val, s in ((0.0, "0"), (math.pi, "π"), (2 * math.pi, "2π"), (-math.pi, "-π")):
        if abs(x - val) < 1e-12:
            return s
    return f"{x:g}"


def _fmt_coef(c: complex) -> str:
    if abs(c.imag) < 1e-12:
        return f"{c.real:+.6g}"
    return f"+({c.real:.6g}{c.imag:+.6g}i)"


def describe_row(row: np.ndarray, k: int, a: float, b: float) -> str:
    terms = []
    for idx, c in enumerate(row):
        if abs(c) < 1e-12:
            continue
        j, at = (idx, a) if idx < k else (idx - k, b)
        coef = _fmt_coef(complex(c))
        coef = {"+1": "+", "-1": "-"}.get(coef, coef + "·")
        terms.append(f"{coef}{_symbol(j)}({_fmt_point(at)})")
    text = "".join(terms).lstrip("+") or "0"
    return text + " = 0"


def _normalize_rows(M: np.ndarray) -> np.ndarray:
    # scale each row so its largest entry is exactly 1
    out = np.array(M, dtype=complex)
    for i, r in enumerate(out):
        p = int(np.argmax(np.abs(r)))
        if abs(r[p]) > 0:
            out[i] = r / r[p]
    return out


def _independent_rows(M: np.ndarray) -> np.ndarray:
    """Greedy row selection, keeping the first row of each new direction."""
    kept: list = []
    for r in M:
        if np.linalg.norm(r) <= RANK_TOL:
            continue
        trial = np.array(kept + [r])
        if np.linalg.matrix_rank(trial, tol=RANK_TOL * max(1.0, np.abs(trial).max())) == len(trial):
            kept.append(r)
    width = M.shape[1]
    return np.array(kept, dtype=complex).reshape(len(kept), width)


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Either ker M on boundary traces of order k over [a, b], or a decay class on the line."""

    name: str
    base: str
    interval: tuple = (-math.inf, math.inf)
    order: int = 0
    M: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))
    decay: str | None = None

    def __post_init__(self):
        if self.base == COMPACT:
            a, b = self.interval
            if not (math.isfinite(a) and math.isfinite(b) and b > a):
                raise InputError("compact domains need finite endpoints a < b")
            M = np.asarray(self.M, dtype=complex)
            M = M.reshape(M.size // (2 * self.order) if self.order else 0, 2 * self.order)
            M = _independent_rows(_normalize_rows(M)) if len(M) else M
            if len(M) > 2 * self.order:
                raise InputError("more constraints than trace entries")
            M.setflags(write=False)
            object.__setattr__(self, "M", M)
        elif self.base == LINE:
            if self.decay not in (MAXIMAL, SCHWARTZ_CLASS):
                raise InputError(f"unknown decay class {self.decay!r}")
        else:
            raise InputError(f"unknown base {self.base!r}")

    @property
    def constraints(self) -> list:
        if self.base != COMPACT:
            return []
        a, b = self.interval
        return [describe_row(r, self.order, a, b) for r in self.M]

    def lifted(self, k: int) -> np.ndarray:
        """Constraint matrix re-expressed on traces of order k >= self.order."""
        if k < self.order:
            raise InputError("cannot lower the trace order")
        out = np.zeros((len(self.M), 2 * k), dtype=complex)
        out[:, : self.order] = self.M[:, : self.order]
        out[:, k : k + self.order] = self.M[:, self.order :]
        return out

    def basis(self, k: int | None = None) -> np.ndarray:
        """Orthonormal basis (columns) of the admissible trace subspace ker M."""
        k = self.order if k is None else k
        M = self.lifted(k)
        if len(M) == 0:
            return np.eye(2 * k, dtype=complex)
        _, s, vh = np.linalg.svd(M)
        rank = int(np.sum(s > RANK_TOL))
        return vh[rank:].conj().T

    def __repr__(self):
        if self.base == LINE:
            return f"DomainSpec({self.name}, line, {self.decay})"
        return f"DomainSpec({self.name}, {self.interval}, {self.constraints})"


def _compact(name, a, b, k, rows):
    return DomainSpec(name, COMPACT, (float(a), float(b)), k, np.asarray(rows, dtype=complex))


def dirichlet(a: float = 0.0, b: float = 1.0, k: int = 1) -> DomainSpec:
    rows = np.zeros((2, 2 * k))
    rows[0, 0] = rows[1, k] = 1
    return _compact("dirichlet", a, b, k, rows)


def periodic(a: float = 0.0, b: float = 2 * math.pi, k: int = 1) -> DomainSpec:
    rows = np.zeros((k, 2 * k))
    for j in range(k):
        rows[j, j], rows[j, k + j] = 1, -1
    return _compact("periodic", a, b, k, rows)


def twisted(alpha: float, a: float = 0.0, b: float = 1.0) -> DomainSpec:
    """psi(a) = e^{i alpha} psi(b)."""
    return _compact(f"twisted({alpha:g})", a, b, 1, [[1, -np.exp(1j * alpha)]])


def free(a: float, b: float, k: int = 0) -> DomainSpec:
    return _compact("free", a, b, k, np.zeros((0, 2 * k)))


def well_squared(a: float = 1.0, variant: str = "second") -> DomainSpec:
    """Domain for H^2 on [-a, a]: psi(±a) = 0 plus psi''(±a) = 0 (or psi'(±a) = 0)."""
    j = {"second": 2, "first": 1}.get(variant)
    if j is None:
        raise InputError("variant must be 'second' or 'first'")
    rows = np.zeros((4, 8))
    rows[0, 0] = rows[1, 4] = rows[2, j] = rows[3, 4 + j] = 1
    return _compact(f"well_squared({variant})", -a, a, 4, rows)


def line(decay: str = MAXIMAL) -> DomainSpec:
    return DomainSpec(f"line({decay})", LINE, decay=decay)


def _check_same_base(dA: DomainSpec, dB: DomainSpec):
    if dA.base != dB.base or (dA.base == COMPACT and not np.allclose(dA.interval, dB.interval)):
        raise InputError(f"incompatible domain bases: {dA!r} vs {dB!r}")


def domain_of_sum(dA: DomainSpec, dB: DomainSpec) -> DomainSpec:
    """D(A+B) = D(A) ∩ D(B)."""
    _check_same_base(dA, dB)
    name = dA.name if dA.name == dB.name else f"{dA.name}∩{dB.name}"
    if dA.base == LINE:
        decay = SCHWARTZ_CLASS if SCHWARTZ_CLASS in (dA.decay, dB.decay) else MAXIMAL
        return DomainSpec(name, LINE, decay=decay)
    k = max(dA.order, dB.order)
    rows = np.vstack([dA.lifted(k), dB.lifted(k)])
    return DomainSpec(name, COMPACT, dA.interval, k, rows)


def trace_action(op: OperatorSpec, x0: float, r_max: int) -> np.ndarray:
    """Matrix T with (op f)^(r)(x0) = sum_q T[r, q] f^(q)(x0), r < r_max."""
    T = np.zeros((r_max, r_max + op.order), dtype=complex)
    for r in range(r_max):
        for j in range(op.order + 1):
            for s in range(r + 1):
                T[r, j + s] += math.comb(r, s) * op.coefficient(j, x0, r - s)
    return T


def domain_of_product(dA: DomainSpec, opB: OperatorSpec, dB: DomainSpec) -> DomainSpec:
    """D(AB) = {f in D(B) : B f in D(A)}, with dA's constraints pulled back through B."""
    _check_same_base(dA, dB)
    name = f"D({dA.name}·{opB.name})"
    if dA.base == LINE:
        if dA.decay == SCHWARTZ_CLASS and opB.order > 0 and dB.decay != SCHWARTZ_CLASS:
            raise UnsupportedCase("Schwartz pull-back through a differential operator is not expressible")
        return DomainSpec(name, LINE, decay=SCHWARTZ_CLASS if SCHWARTZ_CLASS in (dA.decay, dB.decay) else MAXIMAL)
    if opB.order > 2:
        raise UnsupportedCase("pull-back only implemented for operators of order ≤ 2")
    kA = dA.order
    k = max(dB.order, kA + opB.order)
    if k > 4:
        raise UnsupportedCase(f"pull-back needs traces of order {k} > 4")
    a, b = dA.interval
    Ta, Tb = trace_action(opB, a, kA), trace_action(opB, b, kA)
    # block-diagonal map from order-k traces of f to order-kA traces of B f
    T = np.zeros((2 * kA, 2 * k), dtype=complex)
    w = kA + opB.order
    T[:kA, :w] = Ta
    T[kA:, k : k + w] = Tb
    rows = np.vstack([dB.lifted(k), dA.M @ T])
    return DomainSpec(name, COMPACT, dA.interval, k, rows)


def domain_of_commutator(opA: OperatorSpec, dA: DomainSpec, opB: OperatorSpec, dB: DomainSpec) -> DomainSpec:
    """D([A,B]) = D(AB) ∩ D(BA)."""
    out = domain_of_sum(domain_of_product(dA, opB, dB), domain_of_product(dB, opA, dA))
    return DomainSpec(f"D([{opA.name},{opB.name}])", out.base, out.interval, out.order, out.M, out.decay)


def same_subspace(dA: DomainSpec, dB: DomainSpec) -> bool:
    _check_same_base(dA, dB)
    if dA.base == LINE:
        return dA.decay == dB.decay
    k = max(dA.order, dB.order)
    U, V = dA.basis(k), dB.basis(k)
    if U.shape[1] != V.shape[1]:
        return False
    if U.shape[1] == 0:
        return True
    return bool(np.linalg.norm(U - V @ (V.conj().T @ U)) <= 1e-8)


# --------------------------------------------------------------- membership


@dataclass(frozen=True)
class DomainMembershipReport:
    in_domain: bool
    violated_constraints: tuple
    image_norm_status: NormProbeResult
    residuals: tuple = ()


def _grid_norm_result(g: GridFunction) -> NormProbeResult:
    v = g.norm() ** 2
    return NormProbeResult(FINITE if np.isfinite(v) else "Divergent", float(v), (float(v),))


FunctionLike = Union[GridFunction, AnalyticFunction]


def domain_check(f: FunctionLike, op: OperatorSpec, dom: DomainSpec) -> DomainMembershipReport:
    violations = []
    residuals = []
    if isinstance(f, AnalyticFunction):
        image = apply_analytic(op, f)
        lo, hi = (dom.interval if dom.base == COMPACT else f.domain)
        norm_f = improper_norm_probe(f, f.singular_points, (lo, hi))
        image_norm = improper_norm_probe(image, f.singular_points, (lo, hi))
        if not norm_f.finite:
            violations.append(f"‖ψ‖² not finite ({norm_f.status})")
        if dom.base == LINE and dom.decay == SCHWARTZ_CLASS:
            rep = schwartz_probe(f)
            if rep.classification != RAPID_DECAY:
                violations.append(f"not rapidly decreasing ({rep.classification}; fails at {list(rep.failing[:4])})")
    else:
        image = apply(op, f)
        image_norm = _grid_norm_result(image)
        if dom.base == LINE and dom.decay == SCHWARTZ_CLASS:
            raise InputError("Schwartz membership needs an analytic function")
    if not image_norm.finite:
        violations.append(f"‖{op.name}ψ‖² not finite ({image_norm.status})")
    if dom.base == COMPACT and dom.order > 0 and len(dom.M):
        if isinstance(f, AnalyticFunction):
            if not np.allclose(f.domain, dom.interval):
                raise InputError(f"{f.name} lives on {f.domain}, domain is on {dom.interval}")
            sup = float(np.max(np.abs(f(np.linspace(*dom.interval, 2001)))))
        else:
            if f.grid.kind != COMPACT or not np.allclose((f.grid.a, f.grid.b), dom.interval):
                raise InputError("grid does not match the domain interval")
            sup = f.sup()
        tr = boundary_trace(f, dom.order).vector
        res = dom.M @ tr
        tol = BC_TOL * (1 + sup)
        for label, r in zip(dom.constraints, res):
            residuals.append(float(abs(r)))
            if abs(r) > tol:
                violations.append(label)
    return DomainMembershipReport(not violations, tuple(violations), image_norm, tuple(residuals))
