"""
Tests for the command-line interface
"""

import json

import pytest

from src.semiinf_periods.bundles import mutate_model, obstructed_model
from src.semiinf_periods.cli import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    UsageError,
    main,
    parse_config,
    verify_models,
)
from src.semiinf_periods.model_store import save_model


def test_parse_config():
    """Test flag parsing into a RunConfig"""
    config = parse_config(["periods", "--builtin", "torus.1", "--order", "2", "--format", "csv", "--window", "-8", "8"])

    assert config.command == "periods"
    assert config.builtin == "torus.1"
    assert config.format == "csv"
    engine = config.engine_config()
    assert engine.order == 2
    assert engine.hbar_window == (-8, 8)


def test_parse_config_errors():
    """Test usage errors"""
    with pytest.raises(UsageError, match="needs --model or --builtin"):
        parse_config(["periods"])
    with pytest.raises(UsageError):
        parse_config(["periods", "--builtin", "torus.1", "--model", "m.json"])
    with pytest.raises(UsageError):
        parse_config(["periods", "--builtin", "torus.1", "--format", "xml"])
    with pytest.raises(UsageError, match="is empty"):
        parse_config(["periods", "--builtin", "torus.1", "--window", "3", "3"])


def test_run_config_sources():
    """Test the source validator directly"""
    with pytest.raises(ValueError, match="mutually exclusive"):
        RunConfig(command="check", model="m.json", builtin="torus.1")
    assert RunConfig(command="verify-all").model is None


def test_order_defaults_to_model():
    """Test that N comes from the model when --order is absent"""
    config = RunConfig(command="mc-solve", builtin="obstructed")
    assert config.engine_config(obstructed_model()).order == 2


def test_usage_exit_codes(tmp_path, capsys):
    """Test exit code 2 for bad input"""
    assert main(["check"]) == EXIT_USAGE
    assert main(["check", "--builtin", "sphere"]) == EXIT_USAGE
    assert main(["check", "--model", str(tmp_path / "absent.json")]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_check_torus(capsys):
    """Test a passing check run"""
    assert main(["check", "--builtin", "torus.1", "--order", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"]
    assert payload["checks"]["cy_condition"]["pass"]


def test_check_mutated_model(tmp_path, capsys):
    """Test exit code 1 and the failing check on stderr"""
    path = save_model(mutate_model(obstructed_model(), "i"), tmp_path / "mutated.json")
    assert main(["check", "--model", str(path)]) == EXIT_CHECK_FAILED
    captured = capsys.readouterr()
    assert not json.loads(captured.out)["passed"]
    assert "obstructed~i: " in captured.err


def test_mc_solve_obstructed(capsys):
    """Test that the obstruction is reported with its stage"""
    assert main(["mc-solve", "--builtin", "obstructed", "--order", "2"]) == EXIT_CHECK_FAILED
    assert "mc_solve: obstructed at order 2" in capsys.readouterr().err


def test_mc_solve_to_file(tmp_path):
    """Test CSV output written to a file"""
    out = tmp_path / "gamma.csv"
    assert main(["mc-solve", "--builtin", "torus.1", "--order", "2", "--format", "csv", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "section,key,halfstep,monomial,component,value"
    assert all(line.startswith("gamma,") for line in lines[1:])
    assert len(lines) == 5


@pytest.mark.integration
def test_periods_is_deterministic(tmp_path):
    """Test byte-identical output for repeated runs"""
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        assert main(["periods", "--builtin", "torus.1", "--order", "1", "--out", str(out)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    payload = json.loads(first.read_text())
    for key in ("gamma", "psi", "tW_map", "A", "eta", "checks"):
        assert key in payload


@pytest.mark.integration
def test_constants_torus(capsys):
    """Test the constants document"""
    assert main(["constants", "--builtin", "torus.1", "--order", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"model", "order", "A", "eta", "checks"}


def test_verify_models_default():
    """Test the default model list of verify-all"""
    config = RunConfig(command="verify-all", seed=4)
    names = [bundle.name for bundle in verify_models(config)]
    assert names[0] == "torus.1"
    assert names[1] == "random.4"


@pytest.mark.integration
def test_verify_all_single_model(capsys):
    """Test verify-all on one builtin model with two threads"""
    assert main(["verify-all", "--builtin", "torus.1", "--order", "1", "--threads", "2"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"]
    assert list(payload["models"]) == ["torus.1"]
