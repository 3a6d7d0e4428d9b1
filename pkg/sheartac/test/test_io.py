import pytest
from sheartac.errors import DatasetError
from sheartac.io import (
    save_json, load_json, save_curves, load_curves, write_json_lines,
    read_json_lines)


def test_save_json_is_canonical(tmp_path):
    save_json({"b": 1, "a": [1.5, 2]}, tmp_path / "a.json")
    save_json({"a": [1.5, 2], "b": 1}, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == \
        (tmp_path / "b.json").read_bytes()
    assert load_json(tmp_path / "a.json") == {"a": [1.5, 2], "b": 1}


def test_load_json_errors(tmp_path):
    with pytest.raises(DatasetError):
        load_json(tmp_path / "missing.json")
    (tmp_path / "broken.json").write_text("{")
    with pytest.raises(DatasetError):
        load_json(tmp_path / "broken.json")


def test_curves(tmp_path):
    curves = [{"epoch": 1, "val_mape": 0.25}, {"epoch": 2, "val_mape": 0.125}]
    save_curves(curves, tmp_path / "curves.csv")
    loaded = load_curves(tmp_path / "curves.csv")
    assert loaded == curves
    assert isinstance(loaded[0]["epoch"], int)
    with pytest.raises(ValueError):
        save_curves([], tmp_path / "empty.csv")


def test_json_lines(tmp_path):
    lines = [{"type": "header"}, {"type": "cycle", "error": 0.1}]
    write_json_lines(lines, tmp_path / "log.jsonl")
    assert read_json_lines(tmp_path / "log.jsonl") == lines
    (tmp_path / "bad.jsonl").write_text('{"type": "header"}\nnot json\n')
    with pytest.raises(DatasetError):
        read_json_lines(tmp_path / "bad.jsonl")
