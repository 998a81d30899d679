"""Command line entry point: ``qop <command> ...``."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .constants import Constants
from .errors import ConfigError, QopError
from .reports import FORMATS, emit_report, load_scenario, resolve_seed, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _out(report, fmt):
    sys.stdout.buffer.write(emit_report(report, fmt))
    sys.stdout.flush()


def _cmd_paradox(args) -> int:
    from .paradoxes import REPRODUCED, run_paradox

    cfg = load_scenario(args.config) if args.config else None
    constants = cfg.constants if cfg else Constants()
    tolerances = cfg.tolerances if cfg else {}
    seed = resolve_seed(cfg.seed if cfg else 1234)
    ids = list(range(1, 8)) if args.which == "all" else [int(args.which)]
    reports = [run_paradox(i, constants, tolerances, seed) for i in ids]
    ok = all(r.verdict == REPRODUCED for r in reports)
    _out({"paradoxes": [r.as_dict() for r in reports], "seed": seed, "all_reproduced": ok}, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_spectrum(args) -> int:
    from .numerics import Grid
    from .operators import angular_momentum, dirichlet, hamiltonian, momentum, periodic, twisted
    from .spectral import discrete_spectrum

    c = Constants(alpha=args.alpha)
    if args.operator == "H":
        op, dom = hamiltonian(c), dirichlet(-c.a, c.a, 2)
    elif args.operator == "Lz":
        op, dom = angular_momentum(c), periodic(0.0, 2 * math.pi)
    else:
        op, dom = momentum(c), twisted(args.alpha, 0.0, 1.0)
    sd = discrete_spectrum(op, dom, Grid.compact(*dom.interval, args.n_points), args.k)
    _out({"operator": args.operator, "alpha": args.alpha, "n_points": args.n_points,
          "eigenvalues": sd.eigenvalues, "source": sd.source}, args.format)
    return EXIT_OK


def _cmd_deficiency(args) -> int:
    from .deficiency import deficiency_indices
    from .operators import dirichlet, line, momentum, pq3_symmetrized

    op, dom = {
        "P_box": (momentum(), dirichlet(0.0, 1.0)),
        "A_line": (pq3_symmetrized(), line("schwartz")),
        "P_line": (momentum(), line("maximal")),
    }[args.operator]
    rep = deficiency_indices(op, dom)
    _out({
        "operator": args.operator, "n_plus": rep.n_plus, "n_minus": rep.n_minus,
        "verdict": rep.verdict, "spectrum_class": rep.spectrum_class,
        "witnesses": [{"sign": w.sign, "name": w.name, "norm": w.norm.status} for w in rep.candidates],
    }, args.format)
    return EXIT_OK


def _cmd_uncertainty(args) -> int:
    from .functions import catalog_get
    from .operators import domain_of_commutator, line, momentum, position
    from .uncertainty import circle_report, uncertainty_report

    psi = catalog_get(args.state)
    if psi.on_line:
        P, Q, L = momentum(), position(), line("schwartz")
        rep = uncertainty_report(psi, P, L, Q, L, domain_of_commutator(P, L, Q, L))
    else:
        rep = circle_report(psi)
    _out({"state": args.state, **rep.as_dict()}, args.format)
    return EXIT_OK if rep.inequality_holds else EXIT_FAIL


def _cmd_fourier(args) -> int:
    from .distributions import fourier
    from .functions import catalog_get
    from .numerics import Grid

    psi = catalog_get(args.state)
    g = Grid.line(args.truncation, args.n_points)
    ft = fourier(psi.on_grid(g), Grid.line(args.p_max, args.p_points))
    _out({"state": args.state, "p": ft.function.grid.nodes, "re": ft.function.values.real,
          "im": ft.function.values.imag, "edges_decayed": ft.edges_decayed}, args.format)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    cfg = load_scenario(args.config)
    _out(run_scenario(cfg), args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qop", description="Domain-aware checks of unbounded quantum operators.")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp, default="json"):
        sp.add_argument("--format", choices=FORMATS, default=default)

    sp = sub.add_parser("paradox", help="run one paradox (1-7) or all")
    sp.add_argument("which", choices=[str(i) for i in range(1, 8)] + ["all"])
    sp.add_argument("--config", help="scenario JSON file")
    fmt(sp)
    sp.set_defaults(func=_cmd_paradox)

    sp = sub.add_parser("spectrum", help="lowest eigenvalues of a self-adjoint operator")
    sp.add_argument("--operator", choices=["H", "Lz", "P_alpha"], default="H")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--n-points", type=int, default=2000)
    sp.add_argument("--k", type=int, default=10)
    fmt(sp)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("deficiency", help="deficiency indices of a catalog operator")
    sp.add_argument("--operator", choices=["P_box", "A_line", "P_line"], required=True)
    fmt(sp)
    sp.set_defaults(func=_cmd_deficiency)

    sp = sub.add_parser("uncertainty", help="uncertainty report for a catalog state")
    sp.add_argument("--state", required=True)
    fmt(sp)
    sp.set_defaults(func=_cmd_uncertainty)

    sp = sub.add_parser("fourier", help="Fourier transform of a catalog state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--n-points", type=int, default=2001)
    sp.add_argument("--truncation", type=float, default=12.0)
    sp.add_argument("--p-max", type=float, default=6.0)
    sp.add_argument("--p-points", type=int, default=121)
    fmt(sp, "csv")
    sp.set_defaults(func=_cmd_fourier)

    sp = sub.add_parser("scenario", help="run the analyses listed in a scenario file")
    sp.add_argument("config")
    fmt(sp)
    sp.set_defaults(func=_cmd_scenario)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"qop: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except QopError as e:
        print(f"qop: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
