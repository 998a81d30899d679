"""Strict scenario files, analysis dispatch and deterministic report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import Constants
from .errors import ConfigError, InputError

DEFAULT_SEED = 1234
FORMATS = ("json", "csv", "text")

ANALYSES = ("spectrum", "extension_family", "deficiency", "uncertainty", "fourier", "domain_check", "expectation")
OPERATOR_NAMES = ("H", "Lz", "P", "P_alpha", "A", "Q", "H2")
DOMAIN_NAMES = ("dirichlet", "periodic", "twisted", "well_squared", "line_maximal", "line_schwartz")

_SCHEMA = {
    "constants": {"hbar": float, "mass": float, "a": float, "alpha": float},
    "grid": {"n_points": int, "truncation": float},
    "tolerances": dict,
    "operator": str,
    "domain": str,
    "state": str,
    "analyses": list,
    "seed": int,
}


@dataclass(frozen=True)
class GridConfig:
    n_points: int = 2001
    truncation: float = 10.0


@dataclass(frozen=True)
class ScenarioConfig:
    constants: Constants = field(default_factory=Constants)
    grid: GridConfig = field(default_factory=GridConfig)
    tolerances: dict = field(default_factory=dict)
    operator: str = "H"
    domain: str = "dirichlet"
    state: str = "parabola_well"
    analyses: tuple = ()
    seed: int = DEFAULT_SEED


def resolve_seed(seed: int) -> int:
    env = os.environ.get("QOP_SEED")
    if env is None or env == "":
        return seed
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"QOP_SEED must be an integer, got {env!r}") from None


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _typed(text, key, value, want):
    if want is float:
        ok = _is_number(value) and math.isfinite(value)
    elif want is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, want)
    if not ok:
        raise ConfigError(f"key {key!r} must be of type {want.__name__}, got {type(value).__name__}", _line_of(text, key))
    return float(value) if want is float else value


def parse_scenario(text: str) -> ScenarioConfig:
    from .paradoxes import DEFAULT_TOLERANCES

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, e.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", 1)
    for key in raw:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", _line_of(text, key))
    kw: dict = {}
    for section, cls in (("constants", Constants), ("grid", GridConfig)):
        if section in raw:
            body = raw[section]
            if not isinstance(body, dict):
                raise ConfigError(f"{section!r} must be an object", _line_of(text, section))
            vals = {}
            for k, v in body.items():
                if k not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key {k!r} in {section!r}", _line_of(text, k))
                vals[k] = _typed(text, k, v, _SCHEMA[section][k])
            try:
                kw[section] = cls(**vals)
            except (InputError, ValueError) as e:
                raise ConfigError(str(e), _line_of(text, section)) from None
    if "grid" in kw and kw["grid"].n_points < 8:
        raise ConfigError("n_points must be at least 8", _line_of(text, "n_points"))
    if "tolerances" in raw:
        tol = _typed(text, "tolerances", raw["tolerances"], dict)
        for k, v in tol.items():
            if k not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {k!r}", _line_of(text, k))
            if not (_is_number(v) and v > 0):
                raise ConfigError(f"tolerance {k!r} must be a positive number", _line_of(text, k))
        kw["tolerances"] = {k: float(v) for k, v in tol.items()}
    for key, allowed in (("operator", OPERATOR_NAMES), ("domain", DOMAIN_NAMES)):
        if key in raw:
            v = _typed(text, key, raw[key], str)
            if v not in allowed:
                raise ConfigError(f"{key} {v!r} not in {list(allowed)}", _line_of(text, key))
            kw[key] = v
    if "state" in raw:
        from .functions import CATALOG_NAMES

        v = _typed(text, "state", raw["state"], str)
        if v not in CATALOG_NAMES:
            raise ConfigError(f"state {v!r} not in the catalog", _line_of(text, "state"))
        kw["state"] = v
    if "analyses" in raw:
        items = _typed(text, "analyses", raw["analyses"], list)
        for a in items:
            if a not in ANALYSES:
                raise ConfigError(f"unknown analysis {a!r}", _line_of(text, "analyses"))
        kw["analyses"] = tuple(items)
    if "seed" in raw:
        kw["seed"] = _typed(text, "seed", raw["seed"], int)
    return ScenarioConfig(**kw)


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    return parse_scenario(text)


def config_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["analyses"] = list(cfg.analyses)
    return d


# ------------------------------------------------ serialization


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": to_jsonable(z.real), "im": to_jsonable(z.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    return str(obj)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _text(report: dict) -> str:
    lines = []
    items = report.get("paradoxes", [report])
    for p in items:
        if "naive_result" not in p:
            lines.extend(f"{k}: {v}" for k, v in _flatten(p))
            continue
        lines.append(f"[{p['id']}] {p['title']}  ->  {p['verdict']}")
        lines.append("  naive:")
        lines.extend(f"    {k} = {v}" for k, v in _flatten(p["naive_result"]))
        lines.append(f"  defect: {p['defect']}")
        lines.append("  resolution:")
        lines.extend(f"    {k} = {v}" for k, v in _flatten(p["resolution_result"]))
        lines.append("  relations: " + "; ".join(p["equations"]))
        for chk in p["checks"]:
            lines.append(f"    [{'ok' if chk['passed'] else 'FAIL'}] {chk['name']}")
        for n in p.get("notes", []):
            lines.append(f"  note: {n}")
        lines.append("")
    for k in ("seed", "all_reproduced"):
        if k in report:
            lines.append(f"{k}: {report[k]}")
    return "\n".join(lines).rstrip() + "\n"


def emit_report(report, fmt: str = "json") -> bytes:
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r}; choose from {FORMATS}")
    data = to_jsonable(report)
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for k, v in _flatten(data):
            w.writerow([k, json.dumps(v, ensure_ascii=False) if isinstance(v, (dict, list)) else v])
        return buf.getvalue().encode("utf-8")
    return _text(data).encode("utf-8")


# ------------------------------------------------ scenario analyses


def _operator(cfg: ScenarioConfig):
    from . import operators as ops

    name = "P" if cfg.operator == "P_alpha" else cfg.operator
    return ops.operator_get(name, cfg.constants)


def _domain(cfg: ScenarioConfig, op):
    from . import operators as ops

    c = cfg.constants
    if cfg.domain == "line_maximal":
        return ops.line(ops.MAXIMAL)
    if cfg.domain == "line_schwartz":
        return ops.line(ops.SCHWARTZ_CLASS)
    if cfg.domain == "well_squared":
        return ops.well_squared(c.a)
    if op.name == "Lz":
        interval = (0.0, 2 * math.pi)
    elif op.name in ("H", "H^2") or cfg.operator == "Q":
        interval = (-c.a, c.a)
    else:
        interval = (0.0, c.a)
    if cfg.domain == "twisted":
        return ops.twisted(c.alpha, *interval)
    if cfg.domain == "periodic":
        return ops.periodic(*interval, k=1)
    return ops.dirichlet(*interval, k=max(1, min(op.order, 2)))


def run_scenario(cfg: ScenarioConfig) -> dict:
    from .deficiency import deficiency_indices, extension_family
    from .distributions import fourier
    from .functions import catalog_get
    from .numerics import Grid
    from .operators import domain_check, momentum, dirichlet
    from .spectral import discrete_spectrum, expectation_direct
    from .uncertainty import circle_report

    seed = resolve_seed(cfg.seed)
    out: dict = {"config": config_dict(cfg), "seed": seed, "results": {}}
    op = _operator(cfg)
    dom = _domain(cfg, op)
    c = cfg.constants
    for analysis in cfg.analyses:
        if analysis == "spectrum":
            grid = Grid.compact(*dom.interval, cfg.grid.n_points)
            sd = discrete_spectrum(op, dom, grid, 10 if op.order == 2 else 7)
            out["results"]["spectrum"] = {"eigenvalues": sd.eigenvalues, "source": sd.source}
        elif analysis == "extension_family":
            fam = extension_family(momentum(c), dirichlet(0.0, c.a))
            out["results"]["extension_family"] = {
                "alpha": c.alpha,
                "rows": [{"n": n, "p_n": fam.spectrum(n, c.alpha)} for n in range(-3, 4)],
            }
        elif analysis == "deficiency":
            rep = deficiency_indices(op, dom)
            out["results"]["deficiency"] = {
                "n_plus": rep.n_plus, "n_minus": rep.n_minus, "verdict": rep.verdict,
                "spectrum_class": rep.spectrum_class,
                "witnesses": [{"sign": w.sign, "name": w.name, "norm": w.norm.status} for w in rep.candidates],
            }
        elif analysis == "uncertainty":
            out["results"]["uncertainty"] = circle_report(catalog_get(cfg.state, c), c).as_dict()
        elif analysis == "fourier":
            f = catalog_get(cfg.state, c)
            g = Grid.line(cfg.grid.truncation, cfg.grid.n_points)
            ft = fourier(f.on_grid(g), Grid.line(cfg.grid.truncation, min(cfg.grid.n_points, 401)), c.hbar)
            out["results"]["fourier"] = {
                "p": ft.function.grid.nodes, "abs": np.abs(ft.function.values), "edges_decayed": ft.edges_decayed,
            }
        elif analysis == "domain_check":
            rep = domain_check(catalog_get(cfg.state, c), op, dom)
            out["results"]["domain_check"] = {
                "in_domain": rep.in_domain, "violated": list(rep.violated_constraints),
                "image_norm": rep.image_norm_status.status,
            }
        elif analysis == "expectation":
            e = expectation_direct(catalog_get(cfg.state, c), op, dom)
            out["results"]["expectation"] = {"value": e.value, "domain_flag": e.domain_flag}
    return out
