import json

import pytest

from qop.cli import EXIT_CONFIG, EXIT_OK, main
from qop.errors import ConfigError
from qop.paradoxes import REPRODUCED, TITLES, run_paradox
from qop.reports import (
    DEFAULT_SEED,
    emit_report,
    parse_scenario,
    resolve_seed,
    run_scenario,
)


def test_minimal_scenario_defaults():
    cfg = parse_scenario("{}")
    assert cfg.seed == DEFAULT_SEED
    assert cfg.constants.hbar == 1.0 and cfg.analyses == ()


@pytest.mark.parametrize(
    "text,line",
    [
        ('{\n  "constants": {\n    "hbarr": 1.0\n  }\n}', 3),
        ('{\n  "seed": "x"\n}', 2),
        ('{\n  "operator": "H",\n  "domain": "moebius"\n}', 3),
        ('{\n  "grid": {"n_points": 4}\n}', 2),
        ('{\n  "tolerances": {\n    "naive": -1\n  }\n}', 3),
        ('{\n  "analyses": ["spectrum", "dance"]\n}', 2),
        ('{\n  "constants": {"mass": true}\n}', 2),
        ('{\n  "seed": 1,\n}', 3),
    ],
)
def test_scenario_errors_are_line_anchored(text, line):
    with pytest.raises(ConfigError) as info:
        parse_scenario(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_nonphysical_constants_rejected():
    with pytest.raises(ConfigError):
        parse_scenario('{"constants": {"mass": -1.0}}')


def test_seed_environment_override(monkeypatch):
    monkeypatch.setenv("QOP_SEED", "99")
    assert resolve_seed(5) == 99
    monkeypatch.setenv("QOP_SEED", "nope")
    with pytest.raises(ConfigError):
        resolve_seed(5)


def test_json_is_deterministic():
    a = emit_report(run_paradox(5).as_dict(), "json")
    b = emit_report(run_paradox(5).as_dict(), "json")
    assert a == b
    json.loads(a)


def test_text_report_order():
    text = emit_report(run_paradox(5).as_dict(), "text").decode()
    assert text.index("naive") < text.index("defect") < text.index("resolution")


def test_csv_report_flattens():
    out = emit_report({"a": {"b": [1, 2]}, "c": 1.5}, "csv").decode().splitlines()
    assert len(out) >= 3


def test_paradox_reports_carry_formulas():
    for pid in (3, 4, 5):
        rep = run_paradox(pid)
        assert rep.equations and rep.title == TITLES[pid]
        assert rep.verdict == REPRODUCED


def test_failed_check_is_named():
    rep = run_paradox(3, tolerances={"eigen_rel": 1e-15})
    assert rep.verdict != REPRODUCED
    assert any("A f" in name for name in rep.failing)


def test_scenario_runs_requested_analyses():
    cfg = parse_scenario(
        '{"operator": "P_alpha", "domain": "twisted", "constants": {"alpha": 0.7},'
        ' "analyses": ["spectrum", "extension_family"]}'
    )
    out = run_scenario(cfg)
    assert set(out["results"]) == {"spectrum", "extension_family"}
    assert out["seed"] == DEFAULT_SEED


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "constants": {\n    "hbarr": 1\n  }\n}')
    assert main(["scenario", str(bad)]) == EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err
    assert main(["scenario", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    good = tmp_path / "good.json"
    good.write_text('{"analyses": ["spectrum"]}')
    assert main(["scenario", str(good)]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data["results"]["spectrum"]["eigenvalues"]) == 10


def test_cli_refusal_exits_one(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text('{"operator": "P", "domain": "dirichlet", "analyses": ["spectrum"]}')
    assert main(["scenario", str(cfg)]) == 1
    assert "NotSelfAdjointError" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--operator", "H", "--k", "3"],
        ["spectrum", "--operator", "P_alpha", "--alpha", "0.7", "--n-points", "257", "--k", "5"],
        ["deficiency", "--operator", "A_line"],
        ["uncertainty", "--state", "gaussian"],
        ["fourier", "--state", "gaussian", "--p-points", "21"],
        ["paradox", "5", "--format", "text"],
    ],
)
def test_cli_commands_succeed(argv, capsys):
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out


def test_cli_coarse_grid_reports_numerical_failure(capsys):
    assert main(["spectrum", "--operator", "P_alpha", "--n-points", "65", "--k", "10"]) == 1
    assert "NumericalError" in capsys.readouterr().err
