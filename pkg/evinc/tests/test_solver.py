"""
Решатель: шаг, прямой марш, путь Йосиды, сертификат Липшица, отчёт о сбое
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pydantic import ValidationError

from evinc.exceptions import ContractViolation, DtTooLargeError, StepFailure
from evinc.gallery.catalog import catalog_problem, exact_solution
from evinc.harness.checks import stage_ratios
from evinc.harness.forcing import random_forcing
from evinc.materials.family import constant_family, rho_zero, sinusoidal_family
from evinc.relations.catalog import SoftThreshold, ZeroRelation
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.signals.weighted_space import weighted_norm
from evinc.solver import (
    InclusionProblem,
    SolveMode,
    SolveStatus,
    lipschitz_bound,
    lipschitz_certificate,
    lipschitz_tolerance,
    solve,
    solve_step,
    substitute_forcing,
    substitute_problem,
    yosida_bound,
    yosida_delta,
)

UNIT = constant_family([[1.0]])


class TestSolveStep:
    def test_linear_step(self):
        assert solve_step(UNIT, ZeroRelation(1), 0.0, 0.5, [0.0], [0.0], [2.0])[0] == pytest.approx(1.0)

    def test_algebraic_step_returns_forcing(self):
        family = constant_family([[0.0]], [[1.0]])
        assert solve_step(family, ZeroRelation(1), 0.0, 0.1, [5.0], [0.0], [0.7])[0] == pytest.approx(0.7, abs=1e-15)

    def test_sign_step(self):
        u = solve_step(UNIT, SoftThreshold(1, 1.0), 0.0, 0.1, [0.0], [0.0], [2.0])
        assert u[0] == pytest.approx(0.1, abs=1e-12)

    def test_sign_step_stays_at_zero(self):
        assert solve_step(UNIT, SoftThreshold(1, 1.0), 0.0, 0.1, [0.0], [0.0], [0.5])[0] == 0.0

    def test_iteration_limit(self):
        with pytest.raises(StepFailure) as caught:
            solve_step(UNIT, SoftThreshold(1, 1.0), 0.0, 0.1, [0.0], [0.0], [2.0], fp_max_iter=1)
        assert caught.value.reason == "max_iter"


class TestDirectSolve:
    def test_scalar_ode_matches_recursion_and_exponential(self):
        problem = catalog_problem("scalar_ode", dt=1e-3, horizon=5.0)
        u = solve(problem).solution.values[:, 0]
        dt = problem.grid.dt
        recursion = np.zeros_like(u)
        previous = 0.0
        for k in range(len(u)):
            previous = (previous + dt) / (1.0 + dt)
            recursion[k] = previous
        assert_allclose(u, recursion, rtol=1e-12)
        assert np.max(np.abs(u - (1.0 - np.exp(-problem.grid.times)))) <= 5e-3

    def test_scalar_ode_first_order(self):
        errors = []
        for dt in (1e-3, 5e-4):
            problem = catalog_problem("scalar_ode", dt=dt)
            u = solve(problem).solution
            errors.append(np.max(np.abs(u.values - exact_solution("scalar_ode", u.times))))
        assert 1.5 <= errors[0] / errors[1] <= 2.5

    @pytest.mark.parametrize("name", ["scalar_ode", "sign_ramp", "degenerate", "planar_saturation"])
    def test_zero_forcing_gives_zero(self, name):
        problem = catalog_problem(name)
        zero = WeightedSignal.zeros(problem.grid, problem.family.dim, problem.rho)
        report = solve(problem.with_forcing(zero))
        assert not report.solution.values.any()

    def test_sign_ramp(self):
        problem = catalog_problem("sign_ramp", dt=1e-3)
        u = solve(problem).solution
        assert np.max(np.abs(u.values - exact_solution("sign_ramp", u.times))) <= 5e-3

    def test_degenerate_tracks_exact(self):
        problem = catalog_problem("degenerate", dt=1e-3)
        u = solve(problem).solution
        assert np.max(np.abs(u.values - exact_solution("degenerate", u.times))) <= 5e-3

    def test_causality_bit_for_bit(self, rng):
        problem = catalog_problem("planar_saturation", dt=0.02)
        f = problem.forcing
        cut = 40
        tail = f.values.copy()
        tail[cut + 1 :] = rng.standard_normal(tail[cut + 1 :].shape)
        u_f = solve(problem).solution.values
        u_g = solve(problem.with_forcing(f.with_values(tail))).solution.values
        assert_array_equal(u_f[: cut + 1], u_g[: cut + 1])
        assert np.any(u_f[cut + 1 :] != u_g[cut + 1 :])

    def test_rho_independence_bit_for_bit(self):
        problem = catalog_problem("sign_ramp")
        u = solve(problem).solution.values
        assert_array_equal(solve(problem.with_rho(3.0 * problem.rho)).solution.values, u)

    def test_anchored_at_zero(self, rng):
        problem = catalog_problem("degenerate")
        problem = problem.with_forcing(random_forcing(problem.grid, 2, problem.rho, rng))
        u = solve(problem).solution
        assert weighted_norm(u) <= lipschitz_bound(problem) * weighted_norm(problem.forcing)

    def test_report_text(self, scalar_problem):
        text = solve(scalar_problem).to_text()
        assert "status = converged\n" in text
        assert f"steps = {scalar_problem.grid.n}\n" in text


class TestAdmission:
    def test_rho_below_threshold_rejected(self, scalar_problem):
        with pytest.raises(ValidationError):
            scalar_problem.with_rho(0.5 * scalar_problem.rho_zero)

    def test_relation_must_contain_origin(self, scalar_problem):
        relation = ZeroRelation(1)
        relation.contains_origin = False
        with pytest.raises(ValidationError):
            InclusionProblem(
                family=UNIT, relation=relation, forcing=scalar_problem.forcing, rho=1.0, c_tilde=0.5
            )

    def test_dimension_mismatch(self, scalar_problem):
        with pytest.raises(ValidationError):
            InclusionProblem(
                family=UNIT, relation=ZeroRelation(2), forcing=scalar_problem.forcing, rho=1.0, c_tilde=0.5
            )

    def test_schedule_must_decrease(self, scalar_problem):
        with pytest.raises(ValidationError):
            InclusionProblem(
                family=UNIT,
                relation=ZeroRelation(1),
                forcing=scalar_problem.forcing,
                rho=1.0,
                c_tilde=0.5,
                lambda_schedule=(0.1, 0.5),
            )


class TestFailures:
    def _coupled_problem(self, dt: float, **options) -> InclusionProblem:
        family = constant_family(np.diag([1.0, 0.0]), [[0.0, 2.0], [0.0, 1.0]])
        grid = TimeGrid(t0=0.0, dt=dt, n=5)
        rho = rho_zero(family, 0.5) + 1.0
        forcing = WeightedSignal(grid=grid, values=np.ones((grid.n, 2)), rho=rho)
        return InclusionProblem(
            family=family, relation=ZeroRelation(2), forcing=forcing, rho=rho, c_tilde=0.5, **options
        )

    def test_dt_too_large_raises(self):
        with pytest.raises(DtTooLargeError) as caught:
            solve(self._coupled_problem(0.5))
        assert caught.value.suggested_dt < 0.5

    def test_dt_too_large_reported(self):
        report = solve(self._coupled_problem(0.5), raise_on_failure=False)
        assert report.status is SolveStatus.FAILED
        assert report.failed_step == 0
        assert report.failure_reason == "dt_too_large"
        assert "failure_reason = dt_too_large\n" in report.to_text()

    def test_step_failure_keeps_prefix(self):
        problem = catalog_problem("sign_ramp", fp_max_iter=1)
        report = solve(problem, raise_on_failure=False)
        assert not report.converged
        assert report.failed_step == 0
        assert report.failure_reason == "max_iter"
        with pytest.raises(StepFailure):
            solve(problem)


class TestLipschitzCertificate:
    def test_identical_forcing(self, scalar_problem):
        assert lipschitz_certificate(scalar_problem, scalar_problem.forcing) == 0.0

    @pytest.mark.parametrize("name", ["scalar_ode", "degenerate"])
    def test_ratio_within_bound(self, name, rng):
        problem = catalog_problem(name)
        assert lipschitz_tolerance(problem) == pytest.approx(
            20 * problem.grid.dt * (problem.rho + problem.family.lip_m0 + problem.family.sup_m1)
        )
        for _ in range(5):
            f = random_forcing(problem.grid, problem.family.dim, problem.rho, rng)
            g = random_forcing(problem.grid, problem.family.dim, problem.rho, rng)
            ratio = lipschitz_certificate(problem.with_forcing(f), g)
            assert 0.0 < ratio <= lipschitz_bound(problem)


class TestYosidaPath:
    SCHEDULE = (1.0, 0.1, 0.01, 0.001)

    def test_agrees_with_direct(self):
        direct = catalog_problem("sign_ramp")
        regularized = direct.with_mode(SolveMode.YOSIDA_PATH)
        regularized = InclusionProblem(**{**regularized._fields(), "lambda_schedule": self.SCHEDULE})
        report = solve(regularized)
        assert report.lambda_trace == list(self.SCHEDULE)
        gap = np.max(np.abs(report.solution.values - solve(direct).solution.values))
        assert gap <= 10 * direct.fp_tol + 5 * min(self.SCHEDULE)
        assert np.all(stage_ratios(report.yosida_stage_norms) <= 2.0)
        assert np.isfinite(report.yosida_sup_norm)
        assert report.yosida_sup_norm <= report.yosida_bound
        assert "lambda_stages = 4\n" in report.to_text()

    def test_delta_and_bound(self, scalar_problem):
        family = scalar_problem.family
        assert yosida_delta(scalar_problem) == 2 * (family.sup_m1 + family.lip_m0) + 1
        assert yosida_bound(scalar_problem, delta=1.0) < yosida_bound(scalar_problem, delta=2.0)


def breathing_problem(rng, relation=None) -> InclusionProblem:
    """Вырожденное M₀(t) = (1 + ½sin t)·diag(1, 0): M₀′ ≠ 0, ядро второй координаты"""
    family = sinusoidal_family(np.diag([1.0, 0.0]), np.diag([0.5, 1.0]), amplitude=0.5)
    grid = TimeGrid(t0=0.0, dt=0.01, n=101)
    rho = rho_zero(family, 0.5) + 1.0
    return InclusionProblem(
        family=family,
        relation=SoftThreshold(2, 0.5) if relation is None else relation,
        forcing=random_forcing(grid, 2, rho, rng),
        rho=rho,
        c_tilde=0.5,
        name="breathing",
    )


class TestSubstituteProblem:
    def test_coefficients(self, rng):
        problem = breathing_problem(rng)
        delta = yosida_delta(problem)
        substitute = substitute_problem(problem)
        assert substitute.name == "breathing+substitute"
        assert substitute.relation is problem.relation
        assert substitute.c_tilde == min(problem.c_tilde, delta / 2)
        assert substitute.rho >= max(problem.rho, substitute.rho_zero)
        assert_array_equal(substitute.forcing.values, problem.forcing.values)
        for t in (0.0, 0.4, 1.0):
            assert_allclose(substitute.family.M0(t), problem.family.M0(t))
            expected = delta * np.eye(2) - 0.5 * np.cos(t) * np.diag([1.0, 0.0])
            assert_allclose(substitute.family.M1(t), expected, atol=1e-8)

    @pytest.mark.parametrize("relation", [None, ZeroRelation(2)])
    def test_solution_solves_original_with_corrected_forcing(self, rng, relation):
        problem = breathing_problem(rng, relation)
        substitute = substitute_problem(problem)
        u = solve(substitute).solution
        g = substitute_forcing(problem, substitute, u)
        assert not np.allclose(g.values, problem.forcing.values)
        recovered = solve(problem.with_forcing(g)).solution
        assert np.max(np.abs(recovered.values - u.values)) <= 1e-8

    def test_substitute_solution_differs_from_original(self, rng):
        problem = breathing_problem(rng)
        u_substitute = solve(substitute_problem(problem)).solution.values
        assert np.max(np.abs(u_substitute - solve(problem).solution.values)) > 1e-3

    def test_forcing_rejects_foreign_grid(self, rng, sign_problem):
        problem = breathing_problem(rng)
        with pytest.raises(ContractViolation):
            substitute_forcing(problem, substitute_problem(problem), sign_problem.forcing)
