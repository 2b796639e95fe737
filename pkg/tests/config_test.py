import pytest

from entropy_lpp.config import (
    FULL_FIELD_HARD_LIMIT,
    ElppConfig,
    RunConfig,
    load_run_config,
)
from entropy_lpp.errors import ConfigError


class TestElppConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("ELPP_THREADS", raising=False)
        config = ElppConfig()
        assert config.ELPP_THREADS == 1
        assert config.ELPP_K_MAX is None
        assert config.ELPP_CONVERGENCE_GAMMA == 0.75
        assert config.ELPP_BLOWUP_CONTROL_BAND == (0.8, 1.25)
        assert config.ELPP_TRUNCATION_GROWTH == 4.0

    def test_overrides_win_over_the_environment(self, monkeypatch):
        monkeypatch.setenv("ELPP_THREADS", "4")
        assert ElppConfig().ELPP_THREADS == 4
        assert ElppConfig({"ELPP_THREADS": 2}).ELPP_THREADS == 2

    def test_unknown_keys(self):
        with pytest.raises(ConfigError):
            ElppConfig({"THREADS": 2})

    def test_thread_floor(self):
        with pytest.raises(ConfigError):
            ElppConfig({"ELPP_THREADS": 0})

    def test_full_field_hard_limit(self):
        with pytest.raises(ConfigError):
            ElppConfig({"ELPP_FULL_FIELD_MAX_SITES": FULL_FIELD_HARD_LIMIT + 1})

    def test_as_dict(self):
        values = ElppConfig({"ELPP_BRUTE_FORCE_MAX": 12}).as_dict()
        assert values["ELPP_BRUTE_FORCE_MAX"] == 12
        assert all(k.startswith("ELPP_") for k in values)


class TestRunConfig:
    def test_flat_defaults(self):
        config = RunConfig.from_dict(
            {
                "subcommand": " exp tail ",
                "params": {"m": 100, "t-max": 2.0},
                "master_seed": 7,
                "output": "tail.jsonl",
                "format": "jsonl",
            }
        )
        assert config.command_path() == ["exp", "tail"]
        assert config.flat_defaults() == {
            "m": 100,
            "t_max": 2.0,
            "seed": 7,
            "output": "tail.jsonl",
            "fmt": "jsonl",
        }

    def test_explicit_params_keep_their_seed(self):
        config = RunConfig.from_dict(
            {"subcommand": "volume", "params": {"seed": 3}, "master_seed": 7}
        )
        assert config.flat_defaults()["seed"] == 3

    @pytest.mark.parametrize(
        "data",
        [
            [],
            {"params": {}},
            {"subcommand": "lpp", "extra": 1},
            {"subcommand": "lpp", "format": "xml"},
            {"subcommand": "lpp", "params": [1, 2]},
            {"subcommand": "lpp", "master_seed": -1},
            {"subcommand": "lpp", "master_seed": 2**64},
            {"subcommand": "lpp", "master_seed": "7"},
        ],
    )
    def test_rejects_malformed_configs(self, data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(data)


def test_load_run_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"subcommand": "lpp", "params": {"budget": 1.0}}')
    assert load_run_config(path).params == {"budget": 1.0}


def test_load_run_config_rejects_bad_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{subcommand: lpp")
    with pytest.raises(ConfigError):
        load_run_config(path)
