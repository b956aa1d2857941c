import json

import pytest

from src.core.config_manager import ConfigManager


@pytest.fixture
def manager(tmp_path):
    return ConfigManager(tmp_path / "config" / "settings.json")


def test_defaults_are_written_and_valid(manager):
    assert manager.config_path.exists()
    assert manager.validate() == (True, [])
    assert manager.get("budgets.brute_force_vertices") == 25
    assert manager.get("zeros.precision_ladder") == [53, 106, 212]


def test_dot_paths(manager):
    assert manager.get("zeros.missing", "fallback") == "fallback"
    assert manager.get("run.seed.deeper") is None
    manager.set("run.seed", 7)
    assert manager.get("run.seed") == 7
    assert json.loads(manager.config_path.read_text())["run"]["seed"] == 7
    manager.set("dynamics.orbit_iterations", 5, save_immediately=False)
    assert json.loads(manager.config_path.read_text())["dynamics"]["orbit_iterations"] == 60


def test_stored_values_merge_with_defaults(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"zeros": {"plateau_ratio": 1.3}}))
    manager = ConfigManager(path)
    assert manager.get("zeros.plateau_ratio") == 1.3
    assert manager.get("zeros.growth_ratio") == 1.5


def test_unreadable_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text("{broken")
    assert ConfigManager(path).get("run.seed") == ConfigManager.DEFAULT_CONFIG["run"]["seed"]


@pytest.mark.parametrize(
    "key, value, message",
    [
        ("budgets.build_vertices", 0, "Budget 'build_vertices' must be a positive integer"),
        ("tolerances.root_residual", 2.0, "Tolerance 'root_residual' must lie in (0, 1)"),
        ("zeros.precision_ladder", [106, 53], "Precision ladder must be non-empty and strictly increasing"),
        ("zeros.growth_ratio", 1.0, "zeros.growth_ratio must be greater than 1"),
        ("dynamics.contraction_ladder", [1e-2], "Contraction ladder needs at least three steps"),
        ("dynamics.fm_search_factor", 0, "FM search factor must be at least 1"),
    ],
)
def test_validation_errors(manager, key, value, message):
    manager.set(key, value, save_immediately=False)
    is_valid, errors = manager.validate()
    assert not is_valid
    assert errors == [message]


def test_snapshot_sections(manager):
    snapshot = manager.snapshot()
    assert sorted(snapshot) == ["budgets", "dynamics", "run", "tolerances", "zeros"]
    snapshot["run"]["seed"] = -1
    assert manager.get("run.seed") != -1


def test_export_import_and_reset(manager, tmp_path):
    manager.set("run.seed", 11)
    exported = tmp_path / "exported.json"
    manager.export_config(str(exported))

    other = ConfigManager(tmp_path / "other.json")
    other.import_config(str(exported))
    assert other.get("run.seed") == 11

    other.reset_to_defaults()
    assert other.get("run.seed") == ConfigManager.DEFAULT_CONFIG["run"]["seed"]
