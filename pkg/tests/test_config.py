"""Tests for run configuration."""

import json

import pytest

from producer_scrounger import ConfigError
from producer_scrounger.config import (
    RunConfig,
    build_config,
    load_config_file,
    parse_axis,
    parse_range,
)


class TestParseRange:
    """Test LO:HI:STEP parsing."""

    def test_range(self):
        assert parse_range("0:5:0.01") == {"gamma_lo": 0.0, "gamma_hi": 5.0, "step": 0.01}

    @pytest.mark.parametrize("text", ["0:1", "0:1:0.1:2", "a:b:c", ""])
    def test_malformed_range(self, text):
        with pytest.raises(ConfigError):
            parse_range(text)

    def test_axis(self):
        assert parse_axis("s:0.2:0.6:0.2") == {"name": "s", "lo": 0.2, "hi": 0.6, "step": 0.2}

    def test_malformed_axis(self):
        with pytest.raises(ConfigError, match="NAME:LO:HI:STEP"):
            parse_axis("s:0.2:0.6")


class TestBuildConfig:
    """Test merging of file values and flags."""

    def test_defaults(self):
        config = build_config()
        assert (config.game, config.n, config.s, config.gamma) == ("foraging", 2, 0.5, 1.0)
        assert config.utility == "exp:2"
        assert config.sweep is None
        assert config.solver_config().grid_points == 2001

    def test_flags_override_file(self):
        config = build_config({"n": 3, "s": 0.4}, {"n": 4, "s": None})
        assert config.n == 4
        assert config.s == 0.4

    def test_hyphenated_keys(self):
        config = build_config({"game": "company", "p-succ": 0.8, "gamma-range": "0:3:0.01"})
        assert config.p_succ == 0.8
        assert config.sweep.step == 0.01

    def test_solver_and_output_keys(self):
        config = build_config(flag_values={"grid_points": 101, "gap_tol": 1e-8, "format": "json"})
        assert config.solver_config().grid_points == 101
        assert config.solver_config().gap_tol == 1e-8
        assert config.output.format == "json"

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config keys: colour"):
            build_config({"colour": "blue"})

    @pytest.mark.parametrize("flags", [
        {"gamma": -1.0},
        {"n": 1},
        {"s": 1.5},
        {"a": 1.0},
        {"gamma_range": "0:3:0"},
        {"gamma_range": "3:1:0.1"},
        {"utility": "log"},
        {"format": "xml"},
        {"game": "company", "n": 4, "s": 0.2},
        {"second_axis": "s:0.2:0.6:0.2"},
        {"gamma_range": "0:1:0.1", "second_axis": "x:0:1:0.1"},
        {"gamma_range": "0:1:0.1", "second_axis": "s:0.5:1.5:0.5"},
        {"game": "company", "n": 4, "gamma_range": "0:1:0.1", "second_axis": "s:0.1:0.5:0.1"},
        {"game": "foraging", "gamma_range": "0:1:0.5", "second_axis": "c:0:0.2:0.1"},
        {"game": "foraging-modified", "gamma_range": "0:1:0.5", "second_axis": "c:0:0.2:0.1"},
    ])
    def test_invalid(self, flags):
        with pytest.raises(ConfigError):
            build_config(flag_values=flags)

    def test_cost_axis_needs_company(self):
        with pytest.raises(ConfigError, match="second axis c needs the company game"):
            build_config(flag_values={"gamma_range": "0:1:0.5", "second_axis": "c:0:0.2:0.1"})

    def test_config_is_frozen(self):
        with pytest.raises(Exception):
            build_config().n = 5


class TestRunConfig:
    """Test derived views of a configuration."""

    def test_second_axis_values(self):
        config = build_config(flag_values={
            "game": "company", "gamma_range": "0:1:0.1", "second_axis": "c:0.1:0.2:0.05",
        })
        assert config.second_axis.values() == pytest.approx([0.1, 0.15, 0.2])

    def test_family_at_other_share(self):
        config = build_config(flag_values={"n": 4, "s": 0.4})
        assert config.family().label == "foraging(n=4,s=0.4)"
        assert config.family(s=0.2).label == "foraging(n=4,s=0.2)"

    def test_company_family_at_other_cost(self):
        config = build_config(flag_values={"game": "company", "n": 2, "s": 0.7, "c": 0.25, "utility": "linear"})
        assert config.family(c=0.1).params["c"] == 0.1
        assert config.family().singular_points == pytest.approx((0.25 / 0.175,))

    def test_game_at(self):
        config = build_config(flag_values={"game": "foraging-modified", "n": 3, "gamma": 0.5})
        assert config.game_at().label == "foraging-modified(n=3,s=0.5,gamma=0.5)"

    @pytest.mark.parametrize("game,utility,expected", [
        ("company", "exp:2", False),
        ("company", "exp:3", True),
        ("company", "cap:2", True),
        ("foraging", "exp:3", False),
    ])
    def test_extrapolated(self, game, utility, expected):
        config = build_config(flag_values={"game": game, "utility": utility})
        assert config.extrapolated is expected

    def test_echo_is_json_ready(self):
        echo = build_config(flag_values={"gamma_range": "0:1:0.5"}).echo()
        assert json.loads(json.dumps(echo))["sweep"] == {"gamma_lo": 0.0, "gamma_hi": 1.0, "step": 0.5}

    def test_model_validate_directly(self):
        assert RunConfig(game="company", n=3, s=0.5).n == 3


class TestLoadConfigFile:
    """Test JSON config files."""

    def test_load(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"n": 3, "gamma-range": "0:2:0.1"}))
        assert load_config_file(path) == {"n": 3, "gamma-range": "0:2:0.1"}

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config_file(tmp_path / "absent.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("n = 3")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config_file(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config_file(path)
