"""Run the seven paradoxes and write one JSON report per paradox."""

import argparse
import json
import time
from dataclasses import dataclass
from pathlib import Path

from qop.constants import Constants
from qop.paradoxes import run_paradox
from qop.reports import emit_report, resolve_seed


@dataclass(frozen=True)
class RunConfig:
    out_dir: Path = Path("results/paradoxes")
    seed: int = 1234
    hbar: float = 1.0
    mass: float = 1.0
    a: float = 1.0


def main(cfg: RunConfig) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    constants = Constants(hbar=cfg.hbar, mass=cfg.mass, a=cfg.a)
    seed = resolve_seed(cfg.seed)
    failed = 0
    for pid in range(1, 8):
        t0 = time.perf_counter()
        rep = run_paradox(pid, constants, seed=seed)
        dt = time.perf_counter() - t0
        (cfg.out_dir / f"paradox_{pid}.json").write_bytes(emit_report(rep.as_dict(), "json"))
        print(f"{pid}  {rep.verdict:<10} {dt:5.2f} s  {rep.title}")
        if rep.failing:
            print("     failing:", ", ".join(rep.failing))
            failed += 1
    (cfg.out_dir / "summary.json").write_text(json.dumps({"seed": seed, "failed": failed}, indent=2))
    return 1 if failed else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", type=Path, default=RunConfig.out_dir)
    p.add_argument("--seed", type=int, default=RunConfig.seed)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    raise SystemExit(main(RunConfig(**vars(p.parse_args()))))
