"""
Configuration Test Suite

Profile layering, experiment files, environment overrides and validation
of the typed experiment configuration.
"""

from pathlib import Path

import allure
import pytest

from indicator_selection.config.manager import ConfigManager
from indicator_selection.config.models import ExperimentConfig, load_experiment_config
from indicator_selection.core.base_test import BasePipelineTest
from indicator_selection.exceptions import ConfigError
from indicator_selection.indicators.registry import NATIVE_REGISTRY
from indicator_selection.indicators.roster import load_roster

ROOT = Path(__file__).resolve().parents[2]
EXPERIMENTS = ROOT / "config" / "experiments"


@allure.epic("Configuration")
@allure.feature("Config Manager")
@pytest.mark.unit
class TestConfigManager:

    @pytest.fixture(autouse=True)
    def clean_environment(self, monkeypatch):
        monkeypatch.delenv("INDSEL_PROFILE", raising=False)

    @pytest.mark.smoke
    @pytest.mark.positive
    def test_default_profile(self):
        manager = ConfigManager()
        assert manager.profile == "default"
        assert manager.get("selection.cv_folds") == 5
        assert len(manager.get("selection.families")) == 10
        assert manager.get("experiment.fast") is False

    @pytest.mark.positive
    @allure.title("Profile overlays merge on top of the defaults")
    def test_fast_overlay(self):
        manager = ConfigManager(profile="fast")
        assert manager.get("experiment.fast") is True
        assert manager.get("selection.families") == ["LR", "Ridge", "KNN", "DTR"]
        assert manager.get("window.w") == 3
        assert manager.get("tuning.grids.Ridge.alpha") == [0.0, 0.01, 0.1, 1.0, 10.0]

    @pytest.mark.positive
    def test_profile_from_environment(self, monkeypatch):
        monkeypatch.setenv("INDSEL_PROFILE", "fast")
        assert ConfigManager().profile == "fast"

    @pytest.mark.positive
    @allure.title("INDSEL_ variables override nested keys with type conversion")
    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("INDSEL_SELECTION__CV_FOLDS", "3")
        monkeypatch.setenv("INDSEL_DATA__SHUFFLE_SPLIT", "yes")
        monkeypatch.setenv("INDSEL_SELECTION__METRICS", "mse,mae")
        manager = ConfigManager(profile="fast")

        assert manager.get("selection.cv_folds") == 3
        assert manager.get("data.shuffle_split") is True
        assert manager.get("selection.metrics") == ["mse", "mae"]

    @pytest.mark.positive
    def test_dot_notation_set_and_get(self):
        manager = ConfigManager(profile="fast")
        manager.set("window.w", "5")
        manager.set("output.dir", "007", convert=False)
        manager.set("brand.new.key", "none")

        assert manager.get("window.w") == 5
        assert manager.get("output.dir") == "007"
        assert manager.get("brand.new.key") is None
        assert manager.get("missing.key", "fallback") == "fallback"
        assert manager.get_section("nothing") == {}

    @pytest.mark.positive
    def test_to_dict_is_a_copy(self):
        manager = ConfigManager(profile="fast")
        copy = manager.to_dict()
        copy["window"]["w"] = 99
        assert manager.get("window.w") == 3

    @pytest.mark.positive
    @allure.title("YAML experiment file overrides the profile")
    def test_yaml_experiment_file(self, tmp_path):
        path = tmp_path / "experiment.yaml"
        path.write_text("window:\n  w: 7\nselection:\n  families: [SVR]\n", encoding="utf-8")
        manager = ConfigManager(profile="fast", config_file=path)

        assert manager.get("window.w") == 7
        assert manager.get("window.h") == 3
        assert manager.get("selection.families") == ["SVR"]

    @pytest.mark.positive
    @allure.title("Sectioned INI experiment file maps onto the nested layout")
    def test_ini_experiment_file(self, tmp_path):
        path = tmp_path / "experiment.ini"
        path.write_text(
            "[selection]\n"
            "families = LR, Ridge\n"
            "cv_folds = 4  # inline comment\n"
            "[regressors.MLP]\n"
            "hidden_layer_sizes = 20\n"
            "[tuning.Ridge]\n"
            "alpha = 0.5\n"
            "[indicators]\n"
            "specs = sma(length=5), bbands(length=20,std=2)\n",
            encoding="utf-8",
        )
        manager = ConfigManager(profile="fast", config_file=path)

        assert manager.get("selection.families") == ["LR", "Ridge"]
        assert manager.get("selection.cv_folds") == 4
        assert manager.get("regressors.MLP.hidden_layer_sizes") == 20
        assert manager.get("tuning.grids.Ridge.alpha") == [0.5]
        assert manager.get("indicators.specs") == ["sma(length=5)", "bbands(length=20,std=2)"]

    @pytest.mark.negative
    def test_unknown_profile(self):
        with pytest.raises(ConfigError, match="unknown profile"):
            ConfigManager(profile="staging")

    @pytest.mark.negative
    @pytest.mark.parametrize("name, content", [("run.toml", "x = 1"), ("run.yaml", "- just\n- a list\n"), ("run.yaml", "a: [")])
    def test_rejected_files(self, tmp_path, name, content):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ConfigError):
            ConfigManager(config_file=path)

    @pytest.mark.negative
    @pytest.mark.parametrize("name", ["absent.yaml", "absent.ini"])
    def test_missing_file(self, tmp_path, name):
        with pytest.raises(ConfigError, match="not found"):
            ConfigManager(config_file=tmp_path / name)


@allure.epic("Configuration")
@allure.feature("Experiment Config")
@pytest.mark.unit
class TestExperimentConfig(BasePipelineTest):

    @pytest.mark.smoke
    @pytest.mark.positive
    @allure.title("Fast profile expands to an 8-run selection matrix")
    def test_fast_selection_matrix(self, fast_config):
        configs = fast_config.selection_configs()

        assert len(configs) == 8
        assert [c.label for c in configs[:4]] == ["SFS_LR_mse", "SFS_Ridge_mse", "SFS_KNN_mse", "SFS_DTR_mse"]
        assert all(c.cv_folds == 5 and c.seed == fast_config.seed for c in configs)
        assert len(fast_config.indicator_specs()) == 12

    @pytest.mark.positive
    def test_regressor_overrides_and_fast_caps(self):
        config = self.experiment_config(regressors={"gbr": {"n_estimators": 500}, "Ridge": {"alpha": 0.3}})

        assert config.regressor_config("ridge").resolved.alpha == 0.3
        assert config.regressor_config("GBR").resolved.n_estimators <= 50
        assert config.regressor_config("LR").seed == config.seed

    @pytest.mark.positive
    def test_default_roster_when_unspecified(self):
        config = self.experiment_config(profile="default", indicators__specs=[], selection__families=["LR"])
        assert len(config.indicator_specs()) == 32

    @pytest.mark.positive
    def test_roster_file(self, tmp_path):
        roster = tmp_path / "roster.txt"
        roster.write_text("sma(length=3)\nrsi\n", encoding="utf-8")
        config = self.experiment_config(indicators__roster=str(roster))
        assert [spec.name for spec in config.indicator_specs()] == ["sma", "rsi"]

    @pytest.mark.positive
    def test_config_hash(self):
        first = self.experiment_config()
        assert first.config_hash() == self.experiment_config().config_hash()
        assert first.config_hash() != self.experiment_config(experiment__seed=7).config_hash()

    @pytest.mark.positive
    def test_load_with_overrides(self, tmp_path):
        config = load_experiment_config(
            profile="fast", overrides={"output.dir": str(tmp_path), "window.w": 4, "window.h": None}
        )
        assert config.out_dir == tmp_path
        assert (config.window.w, config.window.h) == (4, 3)

    @pytest.mark.positive
    def test_dated_partitions(self):
        config = self.experiment_config(data__selection_end="2013-12-31", data__prediction_start="2014-01-01")
        assert config.data.dated_partitions

    @pytest.mark.negative
    @pytest.mark.parametrize(
        "overrides",
        [
            {"selection__families": []},
            {"selection__methods": ["GA"]},
            {"selection__metrics": ["accuracy"]},
            {"selection__families": ["XGB"]},
            {"regressors": {"Ridge": {"alpha": -1.0}}},
            {"regressors": {"LR": {"depth": 3}}},
            {"data__train_fraction": 1.5},
            {"window__w": 0},
            {"data__selection_end": "2015-01-01", "data__prediction_start": "2014-01-01"},
            {"data__prediction_start": "2014-01-01"},
            {"surprise": {"key": 1}},
        ],
    )
    def test_invalid_configurations(self, overrides):
        with pytest.raises(ConfigError):
            self.experiment_config(**overrides)

    @pytest.mark.negative
    def test_from_mapping_rejects_unknown_section(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping({"selection": {"families": ["LR"]}, "extras": {}})


@allure.epic("Configuration")
@allure.feature("Shipped Configuration Files")
@pytest.mark.unit
class TestShippedFiles:

    @pytest.mark.regression
    @allure.title("YAML and INI synthetic experiments describe the same run")
    def test_yaml_and_ini_agree(self):
        yaml_config = load_experiment_config("fast", str(EXPERIMENTS / "synthetic_fast.yaml"))
        ini_config = load_experiment_config("fast", str(EXPERIMENTS / "synthetic_fast.ini"))

        assert [c.label for c in yaml_config.selection_configs()] == [c.label for c in ini_config.selection_configs()]
        assert yaml_config.regressor_config("KNN") == ini_config.regressor_config("KNN")
        assert yaml_config.seed == ini_config.seed == 7
        assert ini_config.tuning.grids["Ridge"] == {"alpha": [0.0, 0.1, 1.0]}

    @pytest.mark.positive
    def test_full_experiment_matrix(self):
        config = load_experiment_config("full", str(EXPERIMENTS / "full_aapl.yaml"))

        assert len(config.selection_configs()) == 100
        assert config.data.dated_partitions
        assert config.data.scaler_fit == "partition"

    @pytest.mark.positive
    def test_default_roster_file(self):
        specs = load_roster(ROOT / "config" / "rosters" / "default.txt")
        assert len(specs) == 32
        assert {spec.name for spec in specs} == set(NATIVE_REGISTRY.names())
