"""Surface terms of integration by parts as a sesquilinear form on boundary traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnsupportedCase
from .numerics import COMPACT
from .operators import DomainSpec, OperatorSpec

RANK_TOL = 1e-9

SELF_ADJOINT = "self-adjoint"
HERMITIAN = "hermitian-not-self-adjoint"
NOT_HERMITIAN = "not-hermitian"


@dataclass(frozen=True)
class BoundaryFormMatrix:
    """<phi, A psi> - <A‡ phi, psi> = trace(phi)^H S trace(psi)."""

    order: int
    S: np.ndarray

    def __call__(self, trace_phi, trace_psi) -> complex:
        return complex(np.conj(trace_phi) @ self.S @ trace_psi)


@dataclass(frozen=True)
class SubspaceBasis:
    ambient: int
    vectors: np.ndarray  # orthonormal columns

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def of(cls, dom: DomainSpec, k: int | None = None) -> "SubspaceBasis":
        if dom.base != COMPACT:
            raise InputError("line domains carry no boundary traces")
        B = dom.basis(k)
        return cls(B.shape[0], B)

    @classmethod
    def span(cls, vectors) -> "SubspaceBasis":
        V = np.asarray(vectors, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        u, s, _ = np.linalg.svd(V, full_matrices=False)
        r = int(np.sum(s > RANK_TOL * max(1.0, s.max(initial=0.0))))
        return cls(V.shape[0], u[:, :r])

    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T

    def contains(self, other: "SubspaceBasis", tol: float = 1e-8) -> bool:
        if other.dim == 0:
            return True
        resid = other.vectors - self.projector() @ other.vectors
        return bool(np.linalg.norm(resid) <= tol)

    def equals(self, other: "SubspaceBasis", tol: float = 1e-8) -> bool:
        return self.dim == other.dim and self.contains(other, tol)


def _endpoint_block(op: OperatorSpec, x: float) -> np.ndarray:
    c = lambda j, d=0: complex(op.coefficient(j, x, d))
    if op.order == 1:
        return np.array([[c(1)]])
    if op.order == 2:
        # [c1 phi psi + c2 (phi psi' - phi' psi) - c2' phi psi]
        return np.array([[c(1) - c(2, 1), c(2)], [-c(2), 0.0]])
    if op.order == 4:
        lower = any(np.any(op.coefficients[j].coef != 0) for j in range(4))
        if lower or op.coefficients[4].degree() > 0:
            raise UnsupportedCase("order-4 surface form only for a constant multiple of d^4/dx^4")
        B = np.zeros((4, 4), dtype=complex)
        B[0, 3], B[1, 2], B[2, 1], B[3, 0] = 1, -1, 1, -1
        return c(4) * B
    raise UnsupportedCase(f"no surface-form template for order {op.order}")


def boundary_form(op: OperatorSpec, interval: tuple) -> BoundaryFormMatrix:
    a, b = map(float, interval)
    k = op.order
    if k == 0:
        return BoundaryFormMatrix(0, np.zeros((0, 0), dtype=complex))
    S = np.zeros((2 * k, 2 * k), dtype=complex)
    S[:k, :k] = -_endpoint_block(op, a)
    S[k:, k:] = _endpoint_block(op, b)
    return BoundaryFormMatrix(k, S)


def adjoint_domain(S: BoundaryFormMatrix, V: SubspaceBasis) -> SubspaceBasis:
    """V† = {u : u^H S v = 0 for all v in V}."""
    if V.ambient != S.S.shape[0]:
        raise InputError(f"subspace of C^{V.ambient} against a {S.S.shape[0]}-dimensional form")
    n = V.ambient
    if V.dim == 0:
        return SubspaceBasis(n, np.eye(n, dtype=complex))
    W = (S.S @ V.vectors).conj().T
    _, s, vh = np.linalg.svd(W)
    scale = max(1.0, s.max(initial=0.0))
    rank = int(np.sum(s > RANK_TOL * scale))
    return SubspaceBasis(n, vh[rank:].conj().T)


def classify(V: SubspaceBasis, V_dagger: SubspaceBasis) -> str:
    if V.ambient != V_dagger.ambient:
        raise InputError("subspaces live in different trace spaces")
    if not V_dagger.contains(V):
        return NOT_HERMITIAN
    return SELF_ADJOINT if V.equals(V_dagger) else HERMITIAN


@dataclass(frozen=True)
class Classification:
    verdict: str
    form: BoundaryFormMatrix
    V: SubspaceBasis
    V_dagger: SubspaceBasis


def classify_pair(op: OperatorSpec, dom: DomainSpec) -> Classification:
    """Boundary-level classification of a compact (operator, domain) pair."""
    if dom.base != COMPACT:
        raise UnsupportedCase("line domains are classified through deficiency indices")
    form = boundary_form(op, dom.interval)
    if form.order == 0:
        empty = SubspaceBasis(0, np.zeros((0, 0), dtype=complex))
        return Classification(SELF_ADJOINT, form, empty, empty)
    if dom.order > form.order:
        raise UnsupportedCase("domain constrains derivatives beyond the operator's surface form")
    V = SubspaceBasis.of(dom, form.order)
    Vd = adjoint_domain(form, V)
    return Classification(classify(V, Vd), form, V, Vd)


def surface_term(op: OperatorSpec, phi, psi, R: float) -> complex:
    """Surface term [..]_{-R}^{R} for analytic phi, psi on the line."""
    k = op.order
    if k == 0:
        return 0j
    form = boundary_form(op, (-R, R))
    pts = np.array([-R, R])

    def tr(f):
        d = [f.derivative(pts, j) for j in range(k)]
        return np.array([d[j][0] for j in range(k)] + [d[j][1] for j in range(k)])

    return form(tr(phi), tr(psi))
