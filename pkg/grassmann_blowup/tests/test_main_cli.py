import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pandas as pd
import pytest
from core.artifacts import load_json, save_json
from core.config import RunConfig, parse_index_list
from core.errors import InvalidParameters
from main import main

GR24 = ["--d", "2", "--n", "4", "--m", "1,2"]


def read(path):
    with open(path, "rb") as f:
        return f.read()


def test_parse_index_list():
    assert parse_index_list("34,13") == [(3, 4), (1, 3)]
    assert parse_index_list("1.10,2.3", 10) == [(1, 10), (2, 3)]
    assert parse_index_list("") == []
    assert parse_index_list("3,4", 4, 2) == [(3, 4)]
    assert parse_index_list("34,13", 4, 2) == [(3, 4), (1, 3)]
    assert parse_index_list("1,2,3", 6, 3) == [(1, 2, 3)]
    assert parse_index_list("3,10", 10, 2) == [(3, 10)]
    with pytest.raises(InvalidParameters):
        parse_index_list("4,3", 4, 2)


def test_run_config_validation(monkeypatch):
    monkeypatch.setenv("GRASSMANN_BLOWUP_OUT", "elsewhere")
    config = RunConfig(2, 4, (1, 2))
    assert config.out_dir == "elsewhere"
    assert config.config_hash() == RunConfig(2, 4, (1, 2), out_dir="other").config_hash()
    assert config.config_hash() != RunConfig(2, 4, (1, 2), seed=1).config_hash()

    with pytest.raises(InvalidParameters, match="require 1 ≤ d < n"):
        RunConfig(4, 4, (1, 2, 3, 4))
    with pytest.raises(InvalidParameters):
        RunConfig(2, 4, (1, 2), primes=(4,))
    with pytest.raises(InvalidParameters):
        RunConfig(2, 4, (1, 2), gamma=[(3, 4)], matroid_path="m.json")


# Тест підкоманди relations
def test_relations_command(tmp_path):
    assert main(["relations", "--d", "2", "--n", "5", "--m", "4,5", "--out", str(tmp_path)]) == 0
    data = load_json(str(tmp_path / "relations.json"))
    assert data["upsilon"] == 3
    table = pd.read_csv(tmp_path / "relations.csv")
    assert list(table["u"].astype(str)) == ["12", "13", "23"]
    assert load_json(str(tmp_path / "manifest.json"))["command"] == "relations"


def test_relations_usage_error(tmp_path, capsys):
    assert main(["relations", "--d", "4", "--n", "4", "--m", "1234", "--out", str(tmp_path)]) == 2
    assert "require 1 ≤ d < n" in capsys.readouterr().err


def test_checksum_is_checked(tmp_path):
    path = str(tmp_path / "artifact.json")
    save_json({"a": 1}, path)
    assert load_json(path) == {"a": 1}
    with open(path, "a") as f:
        f.write(" ")
    with pytest.raises(ValueError, match="Checksum mismatch."):
        load_json(path)
    with pytest.raises(FileNotFoundError):
        load_json(str(tmp_path / "missing.json"))


# Наскрізний запуск verify для конуса і повторюваність артефактів
def test_verify_cone_end_to_end(tmp_path):
    args = ["verify"] + GR24 + ["--gamma", "34", "--primes", "3"]
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0

    report = load_json(str(first / "report.json"))
    assert report["verdict"] == "PASS"
    assert report["input_singular_points"]["count"] >= 1
    for name in ("report.json", "tower.json", "gamma.json", "manifest.json"):
        assert read(first / name) == read(second / name), name
    assert (first / "certification.csv").exists()
    assert (first / "timings.csv").exists()


def test_verify_gamma_as_separate_indices(tmp_path):
    args = ["verify"] + GR24 + ["--gamma", "3,4", "--primes", "3,5", "--out", str(tmp_path)]
    assert main(args) == 0
    report = load_json(str(tmp_path / "report.json"))
    assert report["verdict"] == "PASS"
    assert report["maximality"]["maximal"]
    assert all(check["injective"] for check in report["birationality"])
    assert load_json(str(tmp_path / "gamma.json"))["gamma"]["gamma"] == ["34"]


def test_tower_jobs_and_depth(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    base = ["tower"] + GR24 + ["--primes", "3"]
    assert main(base + ["--out", str(first)]) == 0
    assert main(base + ["--jobs", "2", "--out", str(second)]) == 0
    assert read(first / "tower.json") == read(second / "tower.json")
    assert main(base + ["--certificate-depth", "3", "--out", str(tmp_path / "deep")]) == 0


def test_truncated_verify_fails(tmp_path):
    args = ["verify"] + GR24 + ["--gamma", "34", "--primes", "3", "--truncate-after", "theta"]
    assert main(args + ["--out", str(tmp_path)]) == 1
    assert load_json(str(tmp_path / "report.json"))["verdict"] == "FAIL"


def test_chart_budget_exit_code(tmp_path):
    assert main(["tower"] + GR24 + ["--primes", "3", "--max-charts", "3", "--out", str(tmp_path)]) == 3
    manifest = load_json(str(tmp_path / "manifest.json"))
    assert manifest["status"] == "partial"
    assert load_json(str(tmp_path / "tower.json"))["partial"]


if __name__ == "__main__":
    pytest.main()
