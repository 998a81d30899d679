"""Boundary classification and deficiency indices for the operator catalog."""

import numpy as np

from qop.boundary import classify_pair
from qop.deficiency import deficiency_indices
from qop.errors import UnsupportedCase
from qop.operators import (
    COMPACT,
    DomainSpec,
    angular_momentum,
    dirichlet,
    hamiltonian,
    hamiltonian_squared,
    line,
    momentum,
    periodic,
    pq3_symmetrized,
    twisted,
    well_squared,
)

PAIRS = [
    (momentum(), dirichlet(0, 1)),
    (momentum(), periodic(0, 1)),
    (momentum(), twisted(0.7, 0, 1)),
    (angular_momentum(), periodic()),
    (hamiltonian(), dirichlet(-1, 1, 2)),
    (hamiltonian(), DomainSpec("ψ=ψ′=0 at ±1", COMPACT, (-1.0, 1.0), 2, np.eye(4))),
    (hamiltonian_squared(), well_squared(1.0)),
    (momentum(), line("maximal")),
    (pq3_symmetrized(), line("schwartz")),
]


def main() -> None:
    print(f"{'operator':8} {'domain':24} {'boundary verdict':28} {'indices':8} {'verdict':16} spectrum")
    for op, dom in PAIRS:
        try:
            verdict = classify_pair(op, dom).verdict
        except UnsupportedCase:
            verdict = "(line: by indices)"
        r = deficiency_indices(op, dom)
        print(f"{op.name:8} {dom.name:24} {verdict:28} ({r.n_plus},{r.n_minus})    {r.verdict:16} {r.spectrum_class}")


if __name__ == "__main__":
    main()
