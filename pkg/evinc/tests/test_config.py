"""
Настройки процесса и файл конфигурации запуска
"""
from pathlib import Path

import numpy as np
import pytest

from evinc.config import Settings, build_lambda_schedule, get_lambda_schedule, get_log_level
from evinc.exceptions import ConfigError
from evinc.harness.checks import CheckName
from evinc.run_config import (
    RunConfig,
    apply_overrides,
    build_forcing,
    build_problem,
    load_run_config,
    recognized_keys,
)
from evinc.signals.models import TimeGrid
from evinc.signals.weighted_space import write_signal_csv
from evinc.solver.problem import SolveMode


class TestSettings:
    def test_defaults(self):
        defaults = Settings(_env_file=None)
        assert defaults.FP_TOL == 1e-10
        assert defaults.FP_MAX_ITER == 10_000
        assert defaults.CSV_DIGITS == 17

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("EVINC_FP_TOL", "1e-8")
        monkeypatch.setenv("EVINC_LOG_LEVEL", "debug")
        overridden = Settings(_env_file=None)
        assert overridden.FP_TOL == 1e-8
        assert overridden.LOG_LEVEL == "debug"

    def test_env_example_matches_defaults(self):
        example = Path(__file__).resolve().parents[2] / ".env.example"
        names = [
            line.split("=", 1)[0]
            for line in example.read_text(encoding="utf-8").splitlines()
            if line and not line.startswith("#")
        ]
        assert names and all(name.startswith("EVINC_") for name in names)
        assert {name[len("EVINC_"):] for name in names} <= set(Settings.model_fields)
        assert Settings(_env_file=example) == Settings(_env_file=None)

    def test_default_lambda_schedule(self):
        schedule = Settings(_env_file=None).lambda_schedule
        assert len(schedule) == 21
        assert schedule[0] == 1.0 and schedule[-1] == 1e-6
        assert all(a > b for a, b in zip(schedule, schedule[1:]))
        assert get_lambda_schedule()[-1] > 0

    def test_schedule_ends_at_stop(self):
        assert build_lambda_schedule(1.0, 0.25, 0.5) == [1.0, 0.5, 0.25]
        assert build_lambda_schedule(1.0, 0.3, 0.5) == [1.0, 0.5, 0.3]

    @pytest.mark.parametrize("start, stop, factor", [(0.0, 1e-3, 0.5), (1.0, 1e-3, 1.0), (1.0, -1.0, 0.5)])
    def test_schedule_rejects(self, start, stop, factor):
        with pytest.raises(ValueError):
            build_lambda_schedule(start, stop, factor)

    def test_log_level_is_upper(self):
        assert get_log_level() == get_log_level().upper()


class TestOverrides:
    def test_nested_values(self):
        data = apply_overrides({"grid": {"dt": 0.1}}, ["grid.dt=0.5", 'solver.mode="yosida"', "campaign.tolerances.lipschitz=2"])
        assert data == {"grid": {"dt": 0.5}, "solver": {"mode": "yosida"}, "campaign": {"tolerances": {"lipschitz": 2}}}

    def test_bare_word_is_string(self):
        assert apply_overrides({}, ["relation.relation=soft_threshold"]) == {"relation": {"relation": "soft_threshold"}}

    @pytest.mark.parametrize("item", ["grid", "dt=1", "grid.=1", ".dt=1"])
    def test_malformed(self, item):
        with pytest.raises(ConfigError):
            apply_overrides({}, [item])

    def test_scalar_is_not_section(self):
        with pytest.raises(ConfigError):
            apply_overrides({"grid": 1}, ["grid.dt=0.1"])


class TestRunConfig:
    def test_defaults_without_file(self):
        config = load_run_config()
        assert config.material.builder == "constant"
        assert config.grid.to_grid().n == 101
        assert config.solver.solve_mode is SolveMode.DIRECT
        assert config.campaign.checks == list(CheckName)

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[grid]\ndt = 0.1\nn = 5\n[relation]\nrelation = "soft_threshold"\nweight = 2.0\n', encoding="utf-8")
        config = load_run_config(path, ["grid.n=7"])
        assert config.grid.to_grid() == TimeGrid(t0=0.0, dt=0.1, n=7)
        assert config.relation.params() == {"weight": 2.0}

    @pytest.mark.parametrize(
        "text",
        [
            "[grid]\nn = 5\nhorizon = 1.0\n",
            "[grid]\ndt = -1\n",
            "[unknown]\nkey = 1\n",
            '[material]\nbuilder = "sinusoidal"\n',
            '[relation]\nrelation = "no_such_relation"\n',
            '[forcing]\nkind = "csv"\n',
            '[solver]\nmode = "implicit"\n',
        ],
    )
    def test_rejected(self, tmp_path, text):
        path = tmp_path / "run.toml"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_recognized_keys(self):
        keys = recognized_keys()
        assert set(keys) == set(RunConfig.model_fields)
        assert "fp_max_iter" in keys["solver"] and "tolerances" in keys["campaign"]


class TestBuildProblem:
    def test_default_weight_and_c_tilde(self):
        config = load_run_config(overrides=["material.m1=[[2.0]]"])
        problem = build_problem(config)
        assert problem.c_tilde == pytest.approx(0.5)
        assert problem.rho == max(1.0, problem.rho_zero)
        assert problem.conditions is not None and problem.conditions.passed

    def test_forcing_kinds(self, tmp_path):
        grid = TimeGrid(t0=0.0, dt=0.25, n=5)
        config = load_run_config(overrides=['forcing.kind="indicator"', "forcing.start=0.25", "forcing.stop=0.5"])
        indicator = build_forcing(config.forcing, grid, 2, 1.0)
        np.testing.assert_array_equal(indicator.values[:, 1], [0, 1, 1, 0, 0])
        config = load_run_config(overrides=['forcing.kind="random"', "forcing.seed=3"])
        first = build_forcing(config.forcing, grid, 1, 1.0)
        assert np.array_equal(first.values, build_forcing(config.forcing, grid, 1, 1.0).values)
        path = write_signal_csv(first, tmp_path / "f.csv")
        config = load_run_config(overrides=['forcing.kind="csv"', f'forcing.path="{path}"'])
        np.testing.assert_allclose(build_forcing(config.forcing, grid, 1, 1.0).values, first.values, rtol=1e-15)
        with pytest.raises(ConfigError):
            build_forcing(config.forcing, TimeGrid(t0=0.0, dt=0.25, n=6), 1, 1.0)
