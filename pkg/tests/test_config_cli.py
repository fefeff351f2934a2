import csv
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qmaxent.cli import (
    CSV_HEADER,
    EXIT_INFEASIBLE,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECONDITION,
    OUTPUT_ENV,
    list_scenarios,
    main,
)
from qmaxent.config import ConfigError, emit_config, matrix_literal, parse_config
from qmaxent.scenarios import REGISTRY

FIXTURES = Path(__file__).parent / "fixtures"
ROOT = Path(__file__).resolve().parents[1]

MINIMAL = """
seed: 3
states:
  plus: {pure: [1, 1]}
bases:
  z: {computational: 2}
scenarios:
  - id: scenario_dephasing_channel
    params: {basis: z, state: plus}
"""


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


# parsing ------------------------------------------------------------------------


def test_minimal_config_parses():
    cfg = parse_config(MINIMAL)
    assert cfg.seed == 3
    assert [s.scenario_id for s in cfg.scenarios] == ["scenario_dephasing_channel"]
    np.testing.assert_allclose(cfg.objects["states"]["plus"], np.full((2, 2), 0.5))


def test_missing_reference_is_named():
    text = MINIMAL.replace("state: plus", "state: minus")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    (issue,) = err.value.issues
    assert "minus" in issue.message and "unresolved reference" in issue.message
    assert issue.path == "scenarios[0].params.state"
    assert issue.line == 9


def test_syntax_error_reports_line_and_column():
    with pytest.raises(ConfigError) as err:
        parse_config((FIXTURES / "fail_parse.yaml").read_text())
    (issue,) = err.value.issues
    assert issue.line is not None and issue.column is not None
    assert "syntax error" in issue.message


def test_all_errors_are_collected():
    text = """
operators:
  bad: {matrix: [[0, 1], [0, 0]]}
  sz: {pauli: q}
states:
  r: {random: {dim: 2, rank: 5}}
  t: {thermal: {hamiltonian: missing, beta: 1}}
bases:
  z: {computational: 3}
coarse_grainings:
  cg: {basis: z, blocks: [2, 2]}
scenarios:
  - id: scenario_nope
  - id: scenario_dephasing_channel
    params: {basis: z, state: r, extra: 1}
"""
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    messages = "\n".join(str(i) for i in err.value.issues)
    for needle in (
        "non-Hermitian literal",
        "unknown Pauli label",
        "rank must lie",
        "no entry 'missing'",
        "do not partition",
        "unknown scenario 'scenario_nope'",
        "unknown parameter",
    ):
        assert needle in messages
    assert len(err.value.issues) >= 7


def test_dimension_mismatch_is_reported():
    text = MINIMAL.replace("z: {computational: 2}", "z: {computational: 3}")
    with pytest.raises(ConfigError, match="dimension mismatch"):
        parse_config(text)
    with pytest.raises(ConfigError, match="dimension mismatch"):
        parse_config(MINIMAL.replace("plus: {pure: [1, 1]}", "plus: {pure: [1, 1], dim: 3}"))


def test_complex_matrix_round_trip():
    text = """
seed: 9
operators:
  h: {matrix: [[1.5, [0.25, -0.125]], [[0.25, 0.125], -0.3]]}
states:
  rho: {matrix: [[0.6, [0.1, 0.2]], [[0.1, -0.2], 0.4]]}
bases:
  eb: {eigenbasis: h}
scenarios:
  - id: scenario_dephasing_channel
    params: {basis: eb, state: rho}
"""
    cfg = parse_config(text)
    again = parse_config(emit_config(cfg))
    for section in ("operators", "states", "bases"):
        for name, value in cfg.objects[section].items():
            np.testing.assert_array_equal(again.objects[section][name], value)
    assert cfg.objects["operators"]["h"][0, 1] == 0.25 - 0.125j
    assert matrix_literal([[1j]]) == [[[0.0, 1.0]]]


def test_random_objects_follow_seed():
    text = MINIMAL.replace("plus: {pure: [1, 1]}", "plus: {random: {dim: 2}}")
    a, b = parse_config(text), parse_config(text)
    np.testing.assert_array_equal(a.objects["states"]["plus"], b.objects["states"]["plus"])
    c = parse_config(text, seed=4)
    assert not np.array_equal(a.objects["states"]["plus"], c.objects["states"]["plus"])


def test_tolerances_accept_yaml_exponent_strings():
    cfg = parse_config(MINIMAL + "tolerances: {constraint: 1e-10, scenario: 1e-8, max_iter: 50}\n")
    assert cfg.constraint_tol == 1e-10 and cfg.scenario_tol == 1e-8 and cfg.max_iter == 50


def test_circular_reference_is_reported():
    text = MINIMAL + "operators:\n  a: {tensor: [b, b]}\n  b: {tensor: [a, a]}\n"
    with pytest.raises(ConfigError, match="circular reference"):
        parse_config(text)


# running ------------------------------------------------------------------------


def test_golden_csv_is_reproduced(tmp_path):
    config = str(FIXTURES / "golden.yaml")
    assert main(["run", config, "--output", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", config, "--output", str(tmp_path / "b"), "--parallel", "3"]) == EXIT_OK
    first = (tmp_path / "a" / "results.csv").read_bytes()
    assert first == (tmp_path / "b" / "results.csv").read_bytes()
    assert (tmp_path / "a" / "reports.json").read_bytes() == (tmp_path / "b" / "reports.json").read_bytes()

    got, want = _rows(tmp_path / "a" / "results.csv"), _rows(FIXTURES / "golden.csv")
    assert got[0] == list(CSV_HEADER) == want[0]
    assert [r[:2] + r[4:] for r in got] == [r[:2] + r[4:] for r in want]
    for g, w in zip(got[1:], want[1:]):
        for a, b in zip(g[2:4], w[2:4]):
            assert (a == "") == (b == "")
            if a:
                # last digits of roundoff-level values may differ across BLAS builds
                assert math.isclose(float(a), float(b), rel_tol=1e-9, abs_tol=1e-10)


def test_golden_key_values():
    rows = {(r[0], r[1]): r for r in _rows(FIXTURES / "golden.csv")[1:]}
    assert float(rows[("plus_dephasing", "sigma_channel")][2]) == pytest.approx(math.log(2), abs=1e-9)
    assert float(rows[("idle", "sigma_full_initial")][2]) == pytest.approx(0.0, abs=1e-9)
    assert float(rows[("bit_flip", "entropy_change_dilation")][2]) == pytest.approx(0.562335, abs=1e-5)


def test_seed_flag_changes_random_output(tmp_path):
    config = str(FIXTURES / "golden.yaml")
    main(["run", config, "--output", str(tmp_path / "a")])
    main(["run", config, "--output", str(tmp_path / "b"), "--seed", "99"])
    assert (tmp_path / "a" / "results.csv").read_bytes() != (tmp_path / "b" / "results.csv").read_bytes()
    assert _rows(tmp_path / "b" / "results.csv")[1][4] == "99"


@pytest.mark.parametrize(
    "fixture,code",
    [
        ("fail_parse", EXIT_PARSE),
        ("fail_infeasible", EXIT_INFEASIBLE),
        ("fail_nonconvergence", EXIT_NONCONVERGENCE),
        ("fail_precondition", EXIT_PRECONDITION),
    ],
)
def test_failure_exit_codes(fixture, code, tmp_path, capsys):
    assert main(["run", str(FIXTURES / f"{fixture}.yaml"), "--output", str(tmp_path)]) == code
    assert capsys.readouterr().err


def test_failure_message_names_scenario(tmp_path, caplog):
    main(["run", str(FIXTURES / "fail_infeasible.yaml"), "--output", str(tmp_path)])
    assert "scenario_maxent#0" in caplog.text and "constraint 0" in caplog.text


def test_output_directory_precedence(tmp_path, monkeypatch):
    config = tmp_path / "c.yaml"
    config.write_text(MINIMAL + f"output: {{dir: {tmp_path / 'from_config'}}}\n")
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "from_env"))
    assert main(["run", str(config)]) == EXIT_OK
    assert (tmp_path / "from_env" / "results.csv").exists()
    assert main(["run", str(config), "--output", str(tmp_path / "from_flag")]) == EXIT_OK
    assert (tmp_path / "from_flag" / "results.csv").exists()
    monkeypatch.delenv(OUTPUT_ENV)
    assert main(["run", str(config)]) == EXIT_OK
    assert (tmp_path / "from_config" / "results.csv").exists()


def test_tolerance_flag_can_fail_a_run(tmp_path):
    config = tmp_path / "c.yaml"
    config.write_text((FIXTURES / "golden.yaml").read_text())
    assert main(["run", str(config), "--output", str(tmp_path / "o"), "--tol", "1e-30"]) == EXIT_NONCONVERGENCE


def test_check_and_list(capsys):
    assert main(["check", str(FIXTURES / "golden.yaml")]) == EXIT_OK
    assert "6 scenario(s)" in capsys.readouterr().out
    assert main(["check", str(FIXTURES / "fail_parse.yaml")]) == EXIT_PARSE
    assert main(["check", str(FIXTURES / "does_not_exist.yaml")]) == EXIT_PARSE
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "scenario_fine_grained" in out


def test_list_covers_registry():
    table = list_scenarios()
    lines = [l for l in table.splitlines()[1:] if l.startswith("scenario_")]
    assert len(lines) == len(REGISTRY)
    for sid, info in REGISTRY.items():
        assert sid in table and info.anchor in table


def test_every_scenario_is_reachable_from_config(tmp_path):
    # the example config drives each registered scenario at least once
    cfg = parse_config((ROOT / "configs" / "all_scenarios.yaml").read_text())
    assert {s.scenario_id for s in cfg.scenarios} == set(REGISTRY)
    assert main(["run", str(ROOT / "configs" / "all_scenarios.yaml"), "--output", str(tmp_path)]) == EXIT_OK


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qmaxent.cli", "list"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "scenario_one_to_one" in proc.stdout
