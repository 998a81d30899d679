"""Variances, the commutator bound, the form bound and the boundary-corrected angle bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT, Constants
from .errors import DomainViolation, InputError
from .functions import AnalyticFunction
from .numerics import Grid, GridFunction, inner_product
from .operators import (
    DomainSpec,
    OperatorSpec,
    angle,
    angular_momentum,
    apply_analytic,
    commutator,
    domain_check,
    domain_of_commutator,
    free,
    periodic,
)

NORM_TOL = 1e-6
ANGLE_CAVEAT = "angle variance uses multiplication by φ on [0, 2π); it is not rotation covariant"


def _grid_for(psi: AnalyticFunction, n_points: int = 4001) -> Grid:
    lo, hi = psi.domain
    if math.isfinite(lo) and math.isfinite(hi):
        return Grid.compact(lo, hi, n_points)
    return Grid.line(16.0, 8001)


def _sample(psi: AnalyticFunction, grid: Grid) -> GridFunction:
    return GridFunction(grid, psi(grid.nodes), psi.name)


def _image(op: OperatorSpec, psi: AnalyticFunction, grid: Grid) -> GridFunction:
    return GridFunction(grid, apply_analytic(op, psi)(grid.nodes), f"{op.name}ψ")


def _require(psi, op, dom):
    rep = domain_check(psi, op, dom)
    if not rep.in_domain:
        raise DomainViolation(f"state outside D({op.name}): {list(rep.violated_constraints)}", rep)
    return rep


def _normalized(f: GridFunction):
    n = f.norm()
    if abs(n - 1) > NORM_TOL:
        raise InputError(f"state is not normalized (‖ψ‖ = {n:.8g})")


def _centered(psi: AnalyticFunction, op: OperatorSpec, grid: Grid):
    f = _sample(psi, grid)
    g = _image(op, psi, grid)
    mean = inner_product(f, g).real
    return g - f.scale(mean), mean


def variance(psi: AnalyticFunction, op: OperatorSpec, dom: DomainSpec) -> float:
    """Standard deviation ‖(op - <op>) psi‖."""
    _require(psi, op, dom)
    grid = _grid_for(psi)
    _normalized(_sample(psi, grid))
    d, _ = _centered(psi, op, grid)
    return d.norm()


def bound_form(psi: AnalyticFunction, A: OperatorSpec, dA: DomainSpec, B: OperatorSpec, dB: DomainSpec) -> float:
    """(1/2)|i<A psi, B psi> - i<B psi, A psi>| with centred operators."""
    _require(psi, A, dA)
    _require(psi, B, dB)
    grid = _grid_for(psi)
    a, _ = _centered(psi, A, grid)
    b, _ = _centered(psi, B, grid)
    z = inner_product(a, b)
    return float(0.5 * abs(1j * z - 1j * np.conj(z)))


@dataclass(frozen=True)
class Absent:
    reason: tuple

    def __bool__(self):
        return False


def bound_commutator(psi: AnalyticFunction, A: OperatorSpec, B: OperatorSpec, dom_commutator: DomainSpec):
    """(1/2)|<psi, [A,B] psi>| if psi lies in D([A,B]), otherwise Absent with the violations."""
    C = commutator(A, B)
    rep = domain_check(psi, C, dom_commutator)
    if not rep.in_domain:
        return Absent(rep.violated_constraints)
    grid = _grid_for(psi)
    val = inner_product(_sample(psi, grid), _image(C, psi, grid))
    return float(0.5 * abs(val))


def bound_lz_phi(psi: AnalyticFunction, constants: Constants = DEFAULT) -> float:
    """(hbar/2)|1 - 2 pi |psi(2 pi)|^2|, valid on the periodic domain of L_z."""
    _require(psi, angular_momentum(constants), periodic())
    end = abs(complex(psi(np.array([2 * math.pi]))[0])) ** 2
    return 0.5 * constants.hbar * abs(1 - 2 * math.pi * end)


@dataclass(frozen=True)
class UncertaintyReport:
    delta_A: float
    delta_B: float
    product: float
    bound_commutator: float | None
    commutator_absent_reason: tuple
    bound_form: float
    bound_lz_phi: float | None
    inequality_holds: bool
    caveat: str = ""

    def as_dict(self) -> dict:
        return {
            "delta_A": self.delta_A,
            "delta_B": self.delta_B,
            "product": self.product,
            "bound_commutator": self.bound_commutator,
            "commutator_absent_reason": list(self.commutator_absent_reason),
            "bound_form": self.bound_form,
            "bound_lz_phi": self.bound_lz_phi,
            "inequality_holds": self.inequality_holds,
            "caveat": self.caveat,
        }


def uncertainty_report(psi, A, dA, B, dB, dom_commutator=None, lz_phi=False, slack=1e-9) -> UncertaintyReport:
    dA_val = variance(psi, A, dA)
    dB_val = variance(psi, B, dB)
    prod = dA_val * dB_val
    form = bound_form(psi, A, dA, B, dB)
    comm, reason = None, ()
    if dom_commutator is not None:
        c = bound_commutator(psi, A, B, dom_commutator)
        if isinstance(c, Absent):
            reason = c.reason
        else:
            comm = c
    lz = bound_lz_phi(psi, A.constants) if lz_phi else None
    holds = prod >= form - slack and (lz is None or prod >= lz - slack)
    return UncertaintyReport(dA_val, dB_val, prod, comm, reason, form, lz, holds, ANGLE_CAVEAT if lz_phi else "")


def circle_report(psi: AnalyticFunction, constants: Constants = DEFAULT) -> UncertaintyReport:
    Lz, phi = angular_momentum(constants), angle(constants)
    dL, dphi = periodic(), free(0.0, 2 * math.pi, 0)
    return uncertainty_report(psi, Lz, dL, phi, dphi, domain_of_commutator(Lz, dL, phi, dphi), lz_phi=True)


def random_circle_states(count: int, seed: int, m_max: int = 6) -> list:
    """Normalized random mode expansions sum_{|m|<=m_max} c_m e^{imφ}/sqrt(2π); periodic by construction."""
    rng = np.random.default_rng(seed)
    ms = np.arange(-m_max, m_max + 1)
    out = []
    for i in range(count):
        c = rng.standard_normal(len(ms)) + 1j * rng.standard_normal(len(ms))
        c /= np.linalg.norm(c)
        out.append(_mode_sum(ms, c, f"random_circle_state({seed},{i})"))
    return out


def _mode_sum(ms, c, name) -> AnalyticFunction:
    amp = 1 / math.sqrt(2 * math.pi)
    ms = np.asarray(ms)
    c = np.asarray(c, dtype=complex)

    def sampler(x):
        return amp * (np.exp(1j * np.multiply.outer(x, ms)) @ c)

    def deriv(x, k):
        return amp * (np.exp(1j * np.multiply.outer(x, ms)) @ (c * (1j * ms) ** k))

    return AnalyticFunction(name, sampler, (0.0, 2 * math.pi), (), frozenset(), deriv)


def with_phase(psi: AnalyticFunction, theta: float) -> AnalyticFunction:
    return psi.scaled(np.exp(1j * theta), psi.name)
