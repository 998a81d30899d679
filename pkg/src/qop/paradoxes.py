"""The seven operator paradoxes: naive computation, the defect it hides, and the repair."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import classify_pair
from .constants import Constants
from .deficiency import (
    IN_RESIDUAL,
    deficiency_indices,
    extension_family,
    residual_spectrum_probe,
)
from .functions import (
    AnalyticFunction,
    catalog_get,
    schwartz_probe,
    spiky_power_derivative,
    triangle_partial_integral,
    triangle_sum_derivative,
)
from .numerics import Grid, GridFunction, improper_norm_probe, integrate
from .operators import (
    angle,
    angular_momentum,
    apply,
    dirichlet,
    domain_of_commutator,
    free,
    hamiltonian,
    hamiltonian_squared,
    line,
    momentum,
    periodic,
    position,
    pq3_symmetrized,
    well_squared,
)
from .spectral import (
    MEANINGLESS,
    CLEAN,
    expectation_direct,
    expectation_spectral,
    image_norm_squared,
    norm_growth_probe,
    spectral_weights,
    twisted_residuals,
    well_basis,
)
from .uncertainty import circle_report, random_circle_states, uncertainty_report

REPRODUCED = "Reproduced"
FAILED = "Failed"

TITLES = {
    1: "Canonical commutation relation and the trace",
    2: "Square-integrable functions that do not vanish at infinity",
    3: "A symmetric operator with a complex eigenvalue",
    4: "Momentum in a box: hermitian but not self-adjoint",
    5: "The angle commutator and its domain",
    6: "Uncertainty below hbar/2 on the circle",
    7: "A vanishing mean of H squared",
}

DEFAULT_TOLERANCES = {
    "ccr_trace": 1e-12,
    "ccr_interior": 1e-6,
    "eigen_rel": 1e-4,
    "norm": 1e-6,
    "twisted_residual": 1e-3,
    "spectral_sum": 2e-3,
    "image_norm": 1e-6,
    "naive": 1e-8,
    "weights": 1e-4,
    "uncertainty": 1e-6,
    "inequality_slack": 1e-9,
    "growth_P": 0.1,
    "growth_H": 0.1,
    "growth_Q": 0.05,
}


@dataclass
class ParadoxReport:
    id: int
    title: str
    naive_result: dict
    defect: str
    resolution_result: dict
    equations: list
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return REPRODUCED if all(ok for _, ok in self.checks) else FAILED

    @property
    def failing(self) -> list:
        return [name for name, ok in self.checks if not ok]

    def check(self, name: str, ok) -> bool:
        self.checks.append((name, bool(ok)))
        return bool(ok)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "naive_result": self.naive_result,
            "defect": self.defect,
            "resolution_result": self.resolution_result,
            "equations": self.equations,
            "checks": [{"name": n, "passed": ok} for n, ok in self.checks],
            "verdict": self.verdict,
            "failing": self.failing,
            "notes": self.notes,
        }


# ------------------------------------------------ finite dimensional CCR


@dataclass(frozen=True)
class CCRReport:
    N: int
    trace: complex
    mean_diagonal: complex
    mean_diagonal_deviation: float
    interior_row_deviation: float
    boundary_row_deviation: float

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "trace": self.trace,
            "mean_diagonal": self.mean_diagonal,
            "mean_diagonal_deviation": self.mean_diagonal_deviation,
            "interior_row_deviation": self.interior_row_deviation,
            "boundary_row_deviation": self.boundary_row_deviation,
        }


def ccr_matrices(N: int, hbar: float = 1.0, length: float = 1.0):
    """Periodic central-difference momentum and diagonal position on N nodes of [0, length)."""
    h = length / N
    x = np.arange(N) * h
    c = -1j * hbar / (2 * h)
    P = np.zeros((N, N), dtype=complex)
    idx = np.arange(N)
    P[idx, (idx + 1) % N] += c
    P[idx, (idx - 1) % N] -= c
    Q = np.diag(x).astype(complex)
    return P, Q


def finite_dim_ccr_probe(N: int, hbar: float = 1.0) -> CCRReport:
    """Trace and row structure of [P_N, Q_N].

    Row deviations compare the action of [P_N, Q_N] on the constant vector
    with hbar/i; interior rows reproduce it exactly, the two wrap-around rows
    carry the whole trace deficit.
    """
    if not 2 <= N <= 512:
        raise ValueError("N must lie in 2..512")
    P, Q = ccr_matrices(N, hbar)
    C = P @ Q - Q @ P
    target = -1j * hbar
    diag = np.diag(C)
    rows = C.sum(axis=1) - target
    interior = rows[1:-1] if N > 2 else np.zeros(0)
    return CCRReport(
        N,
        complex(np.trace(C)),
        complex(np.mean(diag)),
        float(abs(np.mean(diag) - target)),
        float(np.max(np.abs(interior), initial=0.0)),
        float(max(abs(rows[0]), abs(rows[-1]))),
    )


# ------------------------------------------------ individual paradoxes


def _paradox_1(c: Constants, tol: dict) -> ParadoxReport:
    rep = ParadoxReport(
        1, TITLES[1],
        {"claim": "Tr[P,Q] = Tr(ħ/i · 1) = Nħ/i ≠ 0"},
        "the trace identity Tr[X,Y] = 0 forbids [P,Q] = (ħ/i)1 on any finite-dimensional space",
        {},
        ["[P,Q] = (ħ/i)·1", "Tr(XY) = Tr(YX)", "‖Aψ‖ ≤ ‖A‖‖ψ‖ for everywhere-defined symmetric A"],
    )
    probes = [finite_dim_ccr_probe(N, c.hbar) for N in (4, 64, 256)]
    rep.resolution_result["ccr"] = [p.as_dict() for p in probes]
    for p in probes:
        rep.check(f"trace[P,Q]=0 (N={p.N})", abs(p.trace) <= tol["ccr_trace"])
        rep.check(f"mean diagonal deviation = ħ (N={p.N})", abs(p.mean_diagonal_deviation - c.hbar) <= 1e-12)
    big = probes[-1]
    rep.check("interior rows = ħ/i (N=256)", big.interior_row_deviation <= tol["ccr_interior"])
    rep.check("boundary rows carry the deficit", big.boundary_row_deviation >= 0.25 * big.N * c.hbar)
    growth = {}
    P = momentum(c)
    g = norm_growth_probe(P, periodic(0.0, 1.0), [Grid.compact(0, 1, n + 1) for n in (32, 64, 128, 256)])
    growth["P"] = g.exponent
    rep.check("P norm grows like 1/h", abs(g.exponent - 1.0) <= tol["growth_P"])
    a = c.a
    grids = [Grid.compact(-a, a, n) for n in (101, 201, 401, 801)]
    g = norm_growth_probe(hamiltonian(c), dirichlet(-a, a, 2), grids)
    growth["H"] = g.exponent
    rep.check("H norm grows like 1/h²", abs(g.exponent - 2.0) <= tol["growth_H"])
    g = norm_growth_probe(position(c), free(-a, a, 0), grids)
    growth["Q"] = g.exponent
    growth["Q_norm_max"] = max(g.norms)
    rep.check("Q stays bounded by a", abs(g.exponent) <= tol["growth_Q"] and max(g.norms) <= a + 1e-9)
    rep.resolution_result["norm_growth_exponents"] = growth
    return rep


def _paradox_2(c: Constants, tol: dict) -> ParadoxReport:
    rep = ParadoxReport(
        2, TITLES[2],
        {},
        "square integrability constrains averages, not pointwise values; vanishing at infinity needs ψ′ ∈ L² as well",
        {},
        ["∫|ψ|² dx < ∞", "Σ 1/n² = π²/6", "ψ, ψ′ ∈ L²(ℝ) ⇒ ψ(x) → 0 as |x| → ∞"],
    )
    tri = catalog_get("triangle_sum", c)
    exact = triangle_partial_integral(1e4)
    # blind sampling: a uniform grid whose step dwarfs the narrow triangles
    g = Grid.compact(0.0, 1000.0, 20001)
    blind = integrate(GridFunction(g, tri(g.nodes))).real
    rep.naive_result = {
        "uniform_grid_integral_0_1000": blind,
        "uniform_grid_step": g.h,
        "claim": "an L² function must vanish at infinity",
    }
    tri_norm = improper_norm_probe(tri)
    tri_decay = schwartz_probe(tri)
    unb = catalog_get("unbounded_L2", c)
    unb_norm = improper_norm_probe(unb)
    unb_decay = schwartz_probe(unb)
    d_tri = improper_norm_probe(triangle_sum_derivative())
    d_unb = improper_norm_probe(spiky_power_derivative(12))
    gauss = catalog_get("gaussian", c)
    g_norm = improper_norm_probe(gauss)
    g_dnorm = improper_norm_probe(AnalyticFunction("gaussian′", lambda x: gauss.derivative(x, 1)))
    rep.resolution_result = {
        "triangle_integral_exact_0_1e4": exact,
        "pi2_over_6": math.pi**2 / 6,
        "triangle_norm": [tri_norm.status, tri_norm.value],
        "triangle_decay": tri_decay.classification,
        "unbounded_norm": [unb_norm.status, unb_norm.value],
        "unbounded_decay": unb_decay.classification,
        "triangle_derivative_norm": d_tri.status,
        "unbounded_derivative_norm": d_unb.status,
        "gaussian_in_D_max_P": g_norm.finite and g_dnorm.finite,
    }
    rep.check("triangle integral → π²/6", abs(exact - math.pi**2 / 6) <= 1e-3)
    rep.check("triangle ∈ L²", tri_norm.finite)
    rep.check("triangle does not decay", tri_decay.classification == "non-decaying")
    rep.check("unbounded_L2 ∈ L²", unb_norm.finite)
    rep.check("unbounded_L2 is unbounded", unb_decay.classification == "unbounded")
    rep.check("neither lies in D_max(P)", not d_tri.finite and not d_unb.finite)
    rep.check("gaussian lies in D_max(P) and decays", g_norm.finite and g_dnorm.finite
              and schwartz_probe(gauss).classification == "rapid-decay")
    rep.notes.append("the unbounded example uses exponent 12; x²exp(−x⁸sin²x) has spikes of fixed L² mass")
    return rep


def _paradox_3(c: Constants, tol: dict) -> ParadoxReport:
    A = pq3_symmetrized(c)
    f = catalog_get("A_eigenfunction_f", c)
    grid = Grid.line(8.0, 16385)
    fg = f.on_grid(grid)
    Af = apply(A, fg)
    x = grid.nodes
    mask = (np.abs(x) >= 0.3) & (np.abs(x) <= 3)
    target = (c.hbar / 1j) * fg.values
    rel = float(np.max(np.abs(Af.values[mask] - target[mask]) / np.abs(fg.values[mask])))
    norm = improper_norm_probe(f, f.singular_points)
    decay = schwartz_probe(f)
    dr = deficiency_indices(A, line("schwartz"))
    cands = {w.name: w.norm.status for w in dr.candidates}
    rep = ParadoxReport(
        3, TITLES[3],
        {"A f = (ħ/i) f": True, "max_relative_deviation": rel, "claim": "a symmetric operator has a non-real eigenvalue"},
        "f is square-integrable but x³f is unbounded, so f lies outside the Schwartz domain of A",
        {
            "norm_f_squared": norm.value,
            "decay": decay.classification,
            "failing_moments": [list(m) for m in decay.failing],
            "n_plus": dr.n_plus,
            "n_minus": dr.n_minus,
            "verdict": dr.verdict,
            "spectrum_class": dr.spectrum_class,
            "witnesses": cands,
        },
        ["A = PQ³ + Q³P", "A f = (ħ/i) f", "A† g± = ± i g±"],
    )
    rep.check("A f = (ħ/i) f on 0.3 ≤ |x| ≤ 3", rel <= tol["eigen_rel"])
    rep.check("‖f‖ = 1", norm.finite and abs(norm.value - 1) <= tol["norm"])
    rep.check("x³ f unbounded", (3, 0) in decay.failing and decay.classification != "rapid-decay")
    rep.check("g₊ divergent", cands.get("A_deficiency_g_plus") == "Divergent")
    rep.check("g₋ finite", cands.get("A_deficiency_g_minus") == "Finite")
    rep.check("indices (0,1) with no extension", (dr.n_plus, dr.n_minus) == (0, 1) and dr.verdict == "NoExtension")
    return rep


def _paradox_4(c: Constants, tol: dict) -> ParadoxReport:
    P = momentum(c)
    dom = dirichlet(0.0, 1.0)
    cls = classify_pair(P, dom)
    dr = deficiency_indices(P, dom)
    res = {str(z): residual_spectrum_probe(P, dom, z) for z in (1 + 1j, 3.0, -2j)}
    fam = extension_family(P, dom)
    grid = Grid.compact(0.0, 1.0, 2049)
    spectra, worst, sa = {}, 0.0, True
    for alpha in (0.0, 0.7, math.pi):
        d = fam.domain(alpha)
        sa &= classify_pair(P, d).verdict == "self-adjoint"
        ns = list(range(-3, 4))
        spectra[f"{alpha:g}"] = [fam.spectrum(n, alpha) for n in ns]
        r = twisted_residuals(P, d, grid, 7)
        worst = max(worst, float(np.max(r)))
    rep = ParadoxReport(
        4, TITLES[4],
        {"claim": "P = (ħ/i)d/dx with ψ(0) = 0 = ψ(1) is hermitian, so its spectrum is real",
         "hermitian": cls.verdict != "not-hermitian"},
        "D(P) ⊊ D(P†): the adjoint has every complex number as an eigenvalue, so the spectrum of P is all of ℂ",
        {
            "classification": cls.verdict,
            "n_plus": dr.n_plus,
            "n_minus": dr.n_minus,
            "verdict": dr.verdict,
            "spectrum_class": dr.spectrum_class,
            "residual_probe": res,
            "extension_spectra": spectra,
            "extension_max_residual": worst,
        },
        ["ψ(0) = 0 = ψ(1)", "P†ψ = zψ for all z ∈ ℂ", "ψ(0) = e^{iα}ψ(1)", "p_n = ħ(2πn − α)"],
    )
    rep.check("hermitian, not self-adjoint", cls.verdict == "hermitian-not-self-adjoint")
    rep.check("indices (1,1)", (dr.n_plus, dr.n_minus) == (1, 1) and dr.verdict == "ExtensionsExist")
    rep.check("residual spectrum", all(v == IN_RESIDUAL for v in res.values()))
    rep.check("twisted extensions self-adjoint", sa)
    rep.check("extension eigenpairs", worst <= tol["twisted_residual"])
    rep.notes.append(
        "the extension spectra are discrete, {ħ(2πn−α)}; a claim that each extension has spectrum ℝ conflicts with this"
    )
    return rep


def _paradox_5(c: Constants, tol: dict) -> ParadoxReport:
    Lz, phi = angular_momentum(c), angle(c)
    dL, dphi = periodic(), free(0.0, 2 * math.pi, 0)
    dcomm = domain_of_commutator(Lz, dL, phi, dphi)
    rows = {}
    for m in (0, 1, 2):
        rr = circle_report(catalog_get("circle_mode", c, m=m), c)
        rows[str(m)] = {"product": rr.product, "bound_commutator_absent": rr.bound_commutator is None,
                        "reason": list(rr.commutator_absent_reason)}
    rep = ParadoxReport(
        5, TITLES[5],
        {"claim": "[L_z, φ] = ħ/i, so ΔL_z Δφ ≥ ħ/2 for every state", "eigenstate_product": rows["1"]["product"]},
        "ψ_m does not belong to D([L_z, φ]); multiplication by φ breaks periodicity",
        {"commutator_domain": dcomm.constraints, "eigenstates": rows},
        ["L_z = (ħ/i) d/dφ, f(0) = f(2π)", "D([A,B]) = D(AB) ∩ D(BA)", "ψ_m = e^{imφ}/√(2π)"],
    )
    want = {"ψ(2π) = 0", "ψ(0) = 0"}
    got = set(dcomm.constraints)
    # either generator of {f(0) = 0 = f(2π)} is acceptable
    same = len(dcomm.M) == 2 and np.linalg.matrix_rank(dcomm.M) == 2
    rep.check("D([Lz,φ]) = {f(0)=0=f(2π)}", same and (got == want or "ψ(2π) = 0" in got))
    rep.check("eigenstates give zero product", all(abs(r["product"]) <= 1e-8 for r in rows.values()))
    rep.check("commutator bound absent for ψ_m", all(r["bound_commutator_absent"] for r in rows.values()))
    return rep


def _paradox_6(c: Constants, tol: dict, seed: int) -> ParadoxReport:
    P, Q, L = momentum(c), position(c), line("schwartz")
    g = catalog_get("gaussian", c)
    gr = uncertainty_report(g, P, L, Q, L, domain_of_commutator(P, L, Q, L))
    lam = 0.1
    two = circle_report(catalog_get("two_mode", c, lam=lam), c)
    eig = circle_report(catalog_get("circle_mode", c, m=1), c)
    half = circle_report(catalog_get("half_sine", c), c)
    states = random_circle_states(50, seed)
    reps = [circle_report(s, c) for s in states]
    slack = tol["inequality_slack"]
    rand_ok = all(r.product >= r.bound_lz_phi - slack and r.product >= r.bound_form - slack for r in reps)
    rep = ParadoxReport(
        6, TITLES[6],
        {"claim": "ΔL_z Δφ ≥ ħ/2", "two_mode_product": two.product},
        "the commutator bound presumes ψ ∈ D([L_z, φ]); on D(L_z) the boundary term enters",
        {
            "gaussian": gr.as_dict(),
            "two_mode": two.as_dict(),
            "eigenstate": eig.as_dict(),
            "vanishing_at_ends": half.as_dict(),
            "random_states": {"count": len(reps), "seed": seed, "all_hold": rand_ok,
                              "min_margin": min(r.product - r.bound_form for r in reps)},
        },
        ["ΔA ΔB ≥ ½|⟨ψ, i[A,B]ψ⟩|", "ΔA ΔB ≥ ½|i⟨Aψ,Bψ⟩ − i⟨Bψ,Aψ⟩|", "ΔL_z Δφ ≥ (ħ/2)|1 − 2π|ψ(2π)|²|"],
    )
    u = tol["uncertainty"]
    rep.check("gaussian equality ħ/2", abs(gr.product - c.hbar / 2) <= u and abs(gr.bound_form - c.hbar / 2) <= u)
    rep.check("gaussian commutator bound", gr.bound_commutator is not None and abs(gr.bound_commutator - c.hbar / 2) <= u)
    rep.check("two-mode below ħ/2", two.product < c.hbar / 2)
    rep.check("two-mode obeys the form bound", two.product >= two.bound_form - slack and two.inequality_holds)
    rep.check("eigenstates: both sides 0", abs(eig.product) <= 1e-8 and abs(eig.bound_form) <= 1e-8)
    rep.check("eigenstates: commutator bound absent", eig.bound_commutator is None)
    rep.check("commutator bound = form bound inside D([L_z,φ])",
              half.bound_commutator is not None and abs(half.bound_commutator - half.bound_form) <= u)
    rep.check("random circle states obey both bounds", rand_ok)
    rep.notes.append("the two-mode state (ψ₀ + 0.1ψ₁)/√1.01 is constructed here, not taken from the literature")
    return rep


def _paradox_7(c: Constants, tol: dict) -> ParadoxReport:
    psi = catalog_get("parabola_well", c)
    H, H2 = hamiltonian(c), hamiltonian_squared(c)
    a = c.a
    naive = expectation_direct(psi, H2, well_squared(a))
    basis = well_basis(c, Grid.compact(-a, a, 8001), 2000)
    pg = psi.on_grid(basis.grid)
    spec = expectation_spectral(pg, basis, "E2", 2000)
    weights = spectral_weights(pg, basis, 2000)
    img = image_norm_squared(psi, H, dirichlet(-a, a, 2))
    exact = 15 * c.hbar**4 / (8 * c.mass**2 * a**4)
    rep = ParadoxReport(
        7, TITLES[7],
        {"<psi, H^2 psi>": naive.value, "domain_flag": naive.domain_flag,
         "violations": list(naive.report.violated_constraints)},
        "ψ ∈ D(H) but ψ″(±a) ≠ 0, so ψ ∉ D(H²) and the integral ⟨ψ, H²ψ⟩ is not the mean of H²",
        {
            "spectral_sum": spec.value,
            "spectral_tail_bound": spec.tail_bound,
            "image_norm_squared": img.value,
            "exact": exact,
            "p1": float(weights.weights[0]),
            "sum_weights": weights.total,
        },
        ["ψ(x) = √15/(4a^{5/2}) (a² − x²)", "E_n = π²ħ²n²/(8ma²)", "⟨H²⟩ = Σ E_n² p_n = ‖Hψ‖²",
         "D(H²): ψ(±a) = 0 = ψ″(±a)"],
    )
    rep.check("naive value 0", abs(naive.value) <= tol["naive"])
    rep.check("naive value flagged", naive.domain_flag == MEANINGLESS)
    rep.check("spectral sum", abs(spec.value - exact) <= tol["spectral_sum"] * c.hbar**4 / (c.mass**2 * a**4))
    rep.check("‖Hψ‖²", abs(img.value - exact) <= tol["image_norm"] and img.domain_flag == CLEAN)
    rep.check("Σ p_n", weights.total >= 1 - tol["weights"])
    return rep


def run_paradox(pid: int, constants: Constants | None = None, tolerances: dict | None = None, seed: int = 0):
    c = constants or Constants()
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    if pid == 6:
        return _paradox_6(c, tol, seed)
    runner = {1: _paradox_1, 2: _paradox_2, 3: _paradox_3, 4: _paradox_4, 5: _paradox_5, 7: _paradox_7}.get(pid)
    if runner is None:
        raise ValueError(f"paradox id {pid} outside 1..7")
    return runner(c, tol)
