"""Infinite-well eigenvalues under grid refinement, and the truncated <H^2> sum.

Prints the relative error of the lowest levels against π²n²/8 per grid,
the observed convergence order, and the spectral sum for <H^2> as the
truncation N grows, next to ‖Hψ‖² = 15/8.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from qop.constants import Constants
from qop.functions import catalog_get
from qop.numerics import Grid
from qop.operators import dirichlet, hamiltonian
from qop.spectral import discrete_spectrum, expectation_spectral, image_norm_squared, well_basis


@dataclass(frozen=True)
class ConvergenceConfig:
    grids: tuple = (251, 501, 1001, 2001, 4001)
    levels: int = 10
    truncations: tuple = (10, 100, 500, 1000, 2000)


def main(cfg: ConvergenceConfig) -> None:
    c = Constants()
    exact = math.pi**2 * np.arange(1, cfg.levels + 1) ** 2 / 8
    prev = None
    print("n_points   max rel err   order")
    for n in cfg.grids:
        sd = discrete_spectrum(hamiltonian(c), dirichlet(-1, 1, 2), Grid.compact(-1, 1, n), cfg.levels)
        err = float(np.max(np.abs(sd.eigenvalues - exact) / exact))
        order = "" if prev is None else f"{math.log2(prev / err):.3f}"
        print(f"{n:8d}   {err:11.3e}   {order}")
        prev = err

    psi = catalog_get("parabola_well", c)
    basis = well_basis(c, Grid.compact(-1, 1, 8001), max(cfg.truncations))
    pg = psi.on_grid(basis.grid)
    direct = image_norm_squared(psi, hamiltonian(c), dirichlet(-1, 1, 2)).value
    print(f"\n‖Hψ‖² = {direct:.10f}")
    print("     N   Σ E_n² p_n     tail bound")
    for N in cfg.truncations:
        s = expectation_spectral(pg, basis, "E2", N)
        print(f"{N:6d}   {s.value:.8f}   {s.tail_bound:.2e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=ConvergenceConfig.levels)
    main(ConvergenceConfig(levels=p.parse_args().levels))
