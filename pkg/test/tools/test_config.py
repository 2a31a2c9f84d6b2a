from pathlib import Path

from pytest import raises

from diffusion_bench import *


def test_defaults():
    cfg = parse_config()

    assert cfg.experiment == "figure1"
    assert cfg.lambda_list == [10.0, 50.0, 100.0]
    assert cfg.d == 2
    assert cfg.n_data == 100
    assert cfg.sigma2 == 100.0
    assert cfg.T == 10.0
    assert cfg.h_list == [0.4, 0.2, 0.1, 0.05, 0.025]
    assert cfg.schemes == list(SchemeKind)
    assert cfg.corruption.is_clean
    assert not cfg.corruption.resample_each_call
    assert not cfg.record_timing
    assert (cfg.sweep_mean, cfg.sweep_variance) == (2.0, 1.0)


def test_empty_file(tmp_path: Path):
    path = tmp_path / "empty.toml"
    path.write_text("")

    assert parse_config(path) == parse_config()


def test_file_and_overrides(tmp_path: Path):
    path = tmp_path / "study.toml"
    path.write_text(
        "\n".join(
            [
                'experiment = "order_study"',
                "h_list = [0.5, 0.25, 0.125]",
                'schemes = "em,so"',
                "master_seed = 42",
                "",
                "[corruption]",
                "eps_sc = 0.1",
            ]
        )
    )

    cfg = parse_config(path, {"h_list": [0.5, 0.1], "master_seed": None})

    assert cfg.experiment == "order_study"
    assert cfg.h_list == [0.5, 0.1]
    assert cfg.master_seed == 42
    assert cfg.schemes == [SchemeKind.EM, SchemeKind.SO]
    assert cfg.corruption.eps_sc == 0.1


def test_zero_step_rejected():
    with raises(ConfigError) as e:
        parse_config(overrides={"h_list": [0.1, 0.0]})

    assert any(error.startswith("h_list") for error in e.value.errors)


def test_increasing_steps_rejected():
    with raises(ConfigError):
        parse_config(overrides={"h_list": [0.1, 0.2]})


def test_horizon_rejected():
    with raises(ConfigError) as e:
        parse_config(overrides={"T": 0.3})

    assert "must exceed" in str(e.value)


def test_unknown_key(tmp_path: Path):
    path = tmp_path / "typo.toml"
    path.write_text("n_trajectories = 5\n")

    with raises(ConfigError) as e:
        parse_config(path)

    assert "n_trajectories" in e.value.errors[0]


def test_all_errors_reported():
    with raises(ConfigError) as e:
        parse_config(overrides={"d": 0, "n_traj": 0, "schemes": "em,rk4"})

    assert len(e.value.errors) == 3


def test_unreadable(tmp_path: Path):
    path = tmp_path / "broken.toml"
    path.write_text("h_list = [\n")

    with raises(ConfigError):
        parse_config(path)

    with raises(ConfigError):
        parse_config(tmp_path / "missing.toml")


def test_dump():
    cfg = parse_config(overrides={"schemes": ["SO", "EM"]})
    data = cfg.model_dump(mode="json")

    assert data["schemes"] == ["SO", "EM"]
    assert data["out_dir"] == "results"
