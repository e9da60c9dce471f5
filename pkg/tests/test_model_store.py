"""
Tests for reading and writing model files
"""

import json
from dataclasses import replace

import pytest

from src.semiinf_periods.bundles import mutate_model, obstructed_model, torus_model
from src.semiinf_periods.errors import ModelError
from src.semiinf_periods.model_store import load_model, model_document, read_model, save_model


@pytest.fixture
def torus():
    return torus_model(1)


def test_save_and_load(tmp_path, torus):
    """Test that a saved model loads back to the same document"""
    path = save_model(torus, tmp_path / "torus.json")
    loaded = load_model(path)
    assert loaded.name == "torus.1"
    assert model_document(loaded) == model_document(torus)
    assert loaded.cohomology.hspace.labels == torus.cohomology.hspace.labels


def test_saved_rationals_are_strings(tmp_path):
    """Test the "p/q" encoding and sorted keys"""
    path = save_model(obstructed_model(), tmp_path / "obstructed.json")
    raw = json.loads(path.read_text())
    assert list(raw) == sorted(raw)
    assert raw["tensors"]["i"][1][3][0] == "-2"
    assert all(isinstance(x, str) for x in raw["omega0"])


def test_filtration_round_trip(tmp_path, torus):
    """Test a model carrying an explicit W"""
    with_w = replace(torus, w_levels=torus.filtration_w().levels)
    loaded = load_model(save_model(with_w, tmp_path / "torus_w.json"))
    assert loaded.w_levels is not None
    assert model_document(loaded) == model_document(with_w)
    assert sorted(loaded.filtration_w().levels) == [1, 2, 3]


def test_missing_file(tmp_path):
    """Test that a missing file is reported as such"""
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "absent.json")


def test_invalid_json(tmp_path):
    """Test a file that is not JSON"""
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ModelError, match="not valid JSON"):
        read_model(path)


def test_schema_violation(tmp_path):
    """Test a document without tensors"""
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"name": "partial", "basis": {}, "omega0": [], "n": 1}))
    with pytest.raises(ModelError, match="schema violation"):
        read_model(path)


def test_missing_basis(tmp_path, torus):
    """Test the g/h basis validator"""
    payload = model_document(torus).model_dump(exclude_none=True)
    del payload["basis"]["g"]
    path = tmp_path / "no_g.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ModelError, match="basis is missing"):
        read_model(path)


def test_failed_axiom_is_named(tmp_path):
    """Test that load_model names the failing check"""
    path = save_model(mutate_model(obstructed_model(), "i"), tmp_path / "mutated.json")
    bundle = read_model(path)
    assert bundle.name == "obstructed~i"
    with pytest.raises(ModelError, match=r"mutated\.json: .* fails"):
        load_model(path)
