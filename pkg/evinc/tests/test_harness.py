"""
Проверочные кампании, оракул перебора ветвей, итерации неподвижной точки
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from evinc.exceptions import ContractViolation, OracleFailure
from evinc.gallery.catalog import CATALOG, catalog_names, catalog_problem
from evinc.harness import (
    CheckName,
    PropertyCampaign,
    fixed_point_bound,
    fixed_point_iterates,
    oracle_trajectory,
    prefix_pair,
    random_forcing,
    replay_seed,
    replay_trial,
    run_campaign,
    run_check,
    solution_lipschitz_bound,
    tail_within_bound,
    trial_seed,
)
from evinc.harness.checks import stage_ratios
from evinc.harness.oracle import oracle_step
from evinc.relations.catalog import BallSaturation, SoftThreshold
from evinc.signals.weighted_space import weighted_norm
from evinc.solver import solve


def campaign(name: str, checks, trials: int, **options) -> PropertyCampaign:
    return PropertyCampaign(
        problem=lambda: catalog_problem(name), trials=trials, seed=7, checks=tuple(checks), name=name, **options
    )


class TestForcing:
    def test_random_forcing_has_unit_norm(self, grid, rng):
        assert weighted_norm(random_forcing(grid, 3, 2.0, rng)) == pytest.approx(1.0)

    def test_prefix_pair_shares_prefix(self, grid, rng):
        for _ in range(10):
            f, g, cut = prefix_pair(grid, 2, 1.0, rng)
            assert 0 <= cut <= grid.n - 2
            assert_array_equal(f.values[: cut + 1], g.values[: cut + 1])
            assert np.all(f.values[cut + 1 :] != g.values[cut + 1 :])


class TestCampaign:
    def test_zero_trials(self):
        report = run_campaign(campaign("scalar_ode", CheckName, 0))
        assert report.rows == [] and report.passed
        assert all(summary.runs == 0 for summary in report.summaries())

    def test_causality_scalar(self):
        report = run_campaign(campaign("scalar_ode", [CheckName.CAUSALITY], 50))
        assert len(report.rows) == 50 and report.passed
        assert all(row.margin == 0.0 for row in report.rows)

    def test_lipschitz_degenerate(self):
        report = run_campaign(campaign("degenerate", [CheckName.LIPSCHITZ], 100))
        assert report.passed
        (summary,) = report.summaries()
        assert summary.passed == 100 and summary.worst_margin >= 0.0

    @pytest.mark.parametrize(
        "name",
        ["scalar_ode", "degenerate", "sign_ramp", "planar_saturation", "thermoplasticity_m2", "viscoplasticity_m2"],
    )
    def test_default_checks_except_yosida(self, name):
        oracle = CATALOG[name].oracle
        checks = [
            check
            for check in CheckName
            if check is not CheckName.YOSIDA_AGREEMENT and (oracle or check is not CheckName.ORACLE_MATCH)
        ]
        report = run_campaign(campaign(name, checks, 3 if oracle else 1))
        assert len(report.rows) == len(checks) * (3 if oracle else 1)
        assert report.passed, report.summary_text()

    @pytest.mark.parametrize("name", ["scalar_ode", "planar_saturation"])
    def test_yosida_agreement(self, name):
        report = run_campaign(campaign(name, [CheckName.YOSIDA_AGREEMENT], 2))
        assert report.passed, report.summary_text()

    @pytest.mark.parametrize("name", ["sign_ramp", "degenerate", "algebraic"])
    def test_substitute_agreement(self, name):
        report = run_campaign(campaign(name, [CheckName.SUBSTITUTE_AGREEMENT], 3))
        assert report.passed, report.summary_text()
        assert all(row.detail.startswith("gap=") for row in report.rows)

    def test_substitute_agreement_detects_tight_tolerance(self):
        tight = campaign(
            "planar_saturation", [CheckName.SUBSTITUTE_AGREEMENT], 1, tolerances={CheckName.SUBSTITUTE_AGREEMENT: -1.0}
        )
        (row,) = run_campaign(tight).rows
        assert not row.passed and row.margin < 0.0

    def test_deterministic_and_thread_independent(self, tmp_path):
        checks = [CheckName.CAUSALITY, CheckName.LIPSCHITZ, CheckName.ORACLE_MATCH]
        first = run_campaign(campaign("planar_saturation", checks, 6))
        second = run_campaign(campaign("planar_saturation", checks, 6, workers=3))
        assert first.rows == second.rows
        first.to_csv(tmp_path / "a.csv")
        second.to_csv(tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert [(row.trial, row.check) for row in first.rows] == [(t, c) for t in range(6) for c in checks]

    def test_failures_replay_from_seed(self):
        tight = campaign("scalar_ode", [CheckName.LIPSCHITZ], 4, tolerances={CheckName.LIPSCHITZ: 0.0})
        report = run_campaign(tight)
        assert len(report.failures) == 4 and not report.passed
        (summary,) = report.summaries()
        assert summary.failing_seeds == [trial_seed(7, trial) for trial in range(4)]
        for row in report.failures:
            assert replay_trial(tight, CheckName.LIPSCHITZ, row.trial) == row
            outcome = replay_seed(catalog_problem("scalar_ode"), CheckName.LIPSCHITZ, row.seed, tolerance=0.0)
            assert outcome.margin == row.margin
        with pytest.raises(ContractViolation):
            replay_trial(tight, CheckName.CAUSALITY, 0)
        with pytest.raises(ContractViolation):
            replay_trial(tight, CheckName.LIPSCHITZ, 4)

    def test_check_error_recorded_as_failure(self):
        report = run_campaign(campaign("thermoplasticity_m2", [CheckName.ORACLE_MATCH], 1))
        (row,) = report.rows
        assert not row.passed and math.isnan(row.margin)
        assert row.detail == "error=ContractViolation"

    def test_summary_and_csv(self, tmp_path):
        report = run_campaign(campaign("sign_ramp", [CheckName.CAUSALITY, CheckName.RHO_INDEPENDENCE], 2))
        text = report.summary_text()
        assert "causality.passed = 2/2\n" in text
        assert "rho_independence.failing_seeds = none\n" in text
        lines = report.to_csv(tmp_path / "campaign.csv").read_text().splitlines()
        assert lines[0] == "trial,check,passed,margin,seed,detail"
        assert len(lines) == 5
        assert lines[1].startswith("0,causality,true,")

    def test_trial_seed_is_stable(self):
        assert trial_seed(7, 0) == trial_seed(7, 0)
        assert trial_seed(7, 0) != trial_seed(7, 1) != trial_seed(8, 1)


class TestChecks:
    def test_stage_ratios(self):
        assert_array_equal(stage_ratios([0.0, 0.0, 1.0, 2.0]), [1.0, np.inf, 2.0])
        assert stage_ratios([3.0]).size == 0

    def test_monotonicity_check(self, rng):
        outcome = run_check(CheckName.MONOTONICITY_BOUND, catalog_problem("degenerate", dt=1e-3), rng)
        assert outcome.passed and outcome.margin >= 0

    def test_rho_independence_check(self, rng):
        outcome = run_check(CheckName.RHO_INDEPENDENCE, catalog_problem("sign_ramp"), rng)
        assert outcome.passed and outcome.margin == 0.0


class TestOracle:
    @pytest.mark.parametrize("name", catalog_names(oracle_only=True))
    def test_matches_solver(self, name):
        problem = catalog_problem(name)
        solved = solve(problem).solution.values
        assert np.max(np.abs(oracle_trajectory(problem).values - solved)) <= 10 * problem.fp_tol

    def test_linear_scalar_recursion(self):
        problem = catalog_problem("scalar_ode")
        dt = problem.grid.dt
        expected, previous = [], 0.0
        for _ in range(problem.grid.n):
            previous = (previous + dt) / (1.0 + dt)
            expected.append(previous)
        assert_allclose(oracle_trajectory(problem).values[:, 0], expected, rtol=0, atol=1e-12)

    def test_sign_branches(self):
        relation = SoftThreshold(1, 1.0)
        assert oracle_step(relation, np.array([[10.0]]), np.array([2.0]))[0] == pytest.approx(0.1)
        assert oracle_step(relation, np.array([[10.0]]), np.array([-0.5]))[0] == 0.0

    def test_saturated_branch(self):
        relation = BallSaturation(2, 0.5)
        u = oracle_step(relation, np.eye(2), np.array([3.0, 0.0]))
        assert_allclose(u, [2.5, 0.0], atol=1e-10)

    def test_no_branch_raises(self):
        with pytest.raises(OracleFailure):
            oracle_step(SoftThreshold(1, 1.0), np.array([[1.0]]), np.array([np.nan]))

    def test_rejects_large_problems(self):
        with pytest.raises(ContractViolation):
            oracle_trajectory(catalog_problem("thermoplasticity_m2"))


class TestFixedPoint:
    def test_identity_is_immediately_fixed(self):
        iterates = fixed_point_iterates(lambda y: y, lambda y: 0 * y, np.array([1.5]), 3, 1.0, 0.0)
        assert len(iterates) == 4
        assert_array_equal(iterates[1], [1.5])
        assert_array_equal(iterates[-1], [1.5])

    def test_scalar_contraction(self):
        half = lambda y: 0.5 * y  # noqa: E731
        iterates = fixed_point_iterates(half, half, np.array([1.0]), 60, 0.5, 0.5)
        assert iterates[-1][0] == pytest.approx(0.4, abs=1e-12)
        assert tail_within_bound(iterates, 0.5, 0.5)
        other = fixed_point_iterates(half, half, np.array([1.0]), 60, 0.5, 0.5, y0=np.array([100.0]))
        assert abs(other[-1][0] - iterates[-1][0]) <= 1e-12

    def test_a_priori_bounds(self):
        assert fixed_point_bound(0.5, 0.5, 1.0, 2) == pytest.approx(0.0625 / 0.75)
        assert solution_lipschitz_bound(0.5, 0.5) == pytest.approx(0.5 / 0.75)

    def test_contraction_required(self):
        with pytest.raises(ContractViolation):
            fixed_point_iterates(lambda y: y, lambda y: y, np.zeros(1), 5, 1.0, 1.0)
        with pytest.raises(ContractViolation):
            fixed_point_iterates(lambda y: y, lambda y: 0 * y, np.zeros(1), 0, 1.0, 0.0)
