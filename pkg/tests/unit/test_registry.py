"""
Registry and Roster Test Suite

Extension point, warm-up removal and roster file parsing.
"""

import allure
import numpy as np
import pandas as pd
import pytest

from indicator_selection.core.base_test import BasePipelineTest
from indicator_selection.data.series import FeatureFrame
from indicator_selection.exceptions import (
    EmptyFrameError,
    RegistryConflictError,
    SchemaError,
    UnknownIndicatorError,
)
from indicator_selection.indicators.registry import (
    NATIVE_REGISTRY,
    IndicatorSpec,
    catalogue_numbers,
    compute,
    compute_all,
    drop_warmup,
    infer_groups,
    register,
)
from indicator_selection.indicators.roster import (
    default_roster,
    format_roster,
    load_roster,
    parse_roster,
    parse_spec,
)
from indicator_selection.utils.assertions import assert_frame


def typical_price(series, length=3):
    return ((series.high + series.low + series.close) / 3.0).rolling(length).mean()


@allure.epic("Indicators")
@allure.feature("Registry")
@pytest.mark.unit
class TestRegistry(BasePipelineTest):

    @pytest.fixture(autouse=True)
    def registry(self):
        self.registry = NATIVE_REGISTRY.copy()

    @pytest.mark.smoke
    @pytest.mark.positive
    @allure.title("Registered user indicator is computable")
    def test_register_and_compute(self):
        self.registry.register("typ", typical_price, defaults={"length": 3},
                               warmup=lambda p: p["length"] - 1, length_params=("length",))
        series = self.data_factory.create_ohlcv(n_days=20, seed=3)
        frame = compute(IndicatorSpec.of("typ", length=4), series, registry=self.registry)

        assert_frame(frame).has_exact_columns(["typ"]).has_rows(20)
        assert frame.data["typ"].iloc[:3].isna().all()
        assert "typ" not in NATIVE_REGISTRY

    @pytest.mark.positive
    def test_register_multi_output_names(self):
        def bands(series, width=1.0):
            return pd.DataFrame({"lo": series.close - width, "hi": series.close + width})

        self.registry.register("band", bands, defaults={"width": 1.0}, outputs=("lo", "hi"))
        frame = compute(IndicatorSpec.of("band"), self.data_factory.create_ohlcv(n_days=5, seed=3),
                        registry=self.registry)
        assert frame.columns == ["band_lo", "band_hi"]
        assert frame.group_names == ["band"]

    @pytest.mark.negative
    def test_register_existing_name(self):
        with pytest.raises(RegistryConflictError):
            self.registry.register("sma", typical_price)

    @pytest.mark.negative
    def test_frozen_registry_rejects(self):
        self.registry.freeze()
        with pytest.raises(RegistryConflictError):
            self.registry.register("typ", typical_price)

    @pytest.mark.negative
    @allure.title("The native registry is frozen after import")
    def test_native_registry_is_frozen(self):
        assert NATIVE_REGISTRY.frozen
        with pytest.raises(RegistryConflictError):
            register(NATIVE_REGISTRY, "typ", typical_price)
        assert "typ" not in NATIVE_REGISTRY

    @pytest.mark.positive
    def test_register_into_owned_copy(self):
        definition = register(self.registry, "typ", typical_price, defaults={"length": 3},
                              warmup=lambda p: p["length"] - 1, length_params=("length",))

        assert definition.name == "typ"
        assert "typ" in self.registry
        assert not self.registry.frozen
        assert "typ" not in NATIVE_REGISTRY
        assert "typ" not in NATIVE_REGISTRY.copy()

    @pytest.mark.negative
    def test_unknown_lookup(self):
        with pytest.raises(UnknownIndicatorError):
            self.registry.get("foo")

    @pytest.mark.negative
    def test_unknown_parameter(self):
        with pytest.raises(SchemaError):
            self.registry.resolve(IndicatorSpec.of("sma", window=3))

    @pytest.mark.positive
    def test_native_roster_size_and_catalogue(self):
        assert len(NATIVE_REGISTRY) == 32
        numbers = catalogue_numbers(["sma", "squeeze_pro", "nope"])
        assert numbers == [94, 98, None]

    @pytest.mark.positive
    def test_infer_groups_longest_prefix(self):
        groups = infer_groups(["squeeze_pro_on_wide@0", "squeeze_mom@2", "sma@1", "custom@0"])
        assert groups == {"squeeze_pro_on_wide@0": "squeeze_pro", "squeeze_mom@2": "squeeze", "sma@1": "sma"}


@allure.epic("Indicators")
@allure.feature("Warm-up Removal")
@pytest.mark.unit
class TestDropWarmup(BasePipelineTest):

    @pytest.mark.positive
    @allure.title("Mixed warm-ups drop the longest one")
    def test_max_warmup_rule(self):
        series = self.data_factory.create_ohlcv(n_days=120, seed=4)
        specs = [
            IndicatorSpec.of("sma", length=4),
            IndicatorSpec.of("rsi", length=14),
            IndicatorSpec.of("midpoint", length=53),
        ]
        assert [NATIVE_REGISTRY.warmup(s) for s in specs] == [3, 14, 52]

        trimmed = drop_warmup(compute_all(specs, series))
        assert_frame(trimmed).has_rows(120 - 52).has_no_missing()
        assert trimmed.dates[0] == series.dates[52]

    @pytest.mark.positive
    def test_complete_frame_unchanged(self):
        index = pd.bdate_range("2020-01-01", periods=4)
        frame = FeatureFrame(pd.DataFrame({"a": [1.0, 2.0, 3.0, 4.0]}, index=index))
        pd.testing.assert_frame_equal(drop_warmup(frame).data, frame.data)

    @pytest.mark.negative
    def test_all_rows_missing(self):
        index = pd.bdate_range("2020-01-01", periods=3)
        frame = FeatureFrame(pd.DataFrame({"a": [1.0, 2.0, 3.0], "b": [np.nan] * 3}, index=index))
        with pytest.raises(EmptyFrameError):
            drop_warmup(frame)


@allure.epic("Indicators")
@allure.feature("Roster Files")
@pytest.mark.unit
class TestRoster:

    @pytest.mark.positive
    @pytest.mark.parametrize(
        "line, name, params",
        [
            ("sma", "sma", {}),
            ("sma()", "sma", {}),
            ("sma(length=5)", "sma", {"length": 5}),
            ("bbands(length=20, std=2.5)", "bbands", {"length": 20, "std": 2.5}),
            ("  macd( fast=8 ,slow=21,signal=5 )  ", "macd", {"fast": 8, "slow": 21, "signal": 5}),
        ],
    )
    def test_parse_spec(self, line, name, params):
        spec = parse_spec(line)
        assert spec.name == name
        assert dict(spec.params) == params

    @pytest.mark.negative
    @pytest.mark.parametrize("line", ["sma(length)", "sma(length=abc)", "sma(length=3, length=4)", "1sma", "sma(("])
    def test_parse_spec_rejects(self, line):
        with pytest.raises(SchemaError):
            parse_spec(line)

    @pytest.mark.positive
    def test_parse_roster_skips_comments(self):
        specs = parse_roster(["# trend", "", "sma(length=3)  # short", "rsi"])
        assert [s.name for s in specs] == ["sma", "rsi"]

    @pytest.mark.positive
    def test_format_and_load_roundtrip(self, tmp_path):
        specs = [IndicatorSpec.of("sma", length=3), IndicatorSpec.of("bbands", length=20, std=2.5)]
        path = tmp_path / "roster.txt"
        path.write_text(format_roster(specs), encoding="utf-8")

        loaded = load_roster(path)
        assert [(s.name, dict(s.params)) for s in loaded] == [(s.name, dict(s.params)) for s in specs]
        assert format_roster(specs) == "sma(length=3)\nbbands(length=20,std=2.5)\n"

    @pytest.mark.negative
    def test_load_roster_unknown_name(self, tmp_path):
        path = tmp_path / "roster.txt"
        path.write_text("sma\nfoo(length=3)\n", encoding="utf-8")
        with pytest.raises(UnknownIndicatorError):
            load_roster(path)

    @pytest.mark.negative
    def test_load_roster_empty(self, tmp_path):
        path = tmp_path / "roster.txt"
        path.write_text("# nothing here\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_roster(path)

    @pytest.mark.positive
    def test_default_roster_covers_registry(self):
        assert [s.name for s in default_roster()] == NATIVE_REGISTRY.names()
