"""
Отношения: резольвенты каталога, Йосида, лифт, комбинаторы, проверка Минти
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from evinc.exceptions import ContractViolation, ConvergenceFailure, ParameterOutOfRange, ResolventFailure
from evinc.relations.base import ValueSet
from evinc.relations.catalog import (
    RELATION_REGISTRY,
    BallSaturation,
    DeviatoricSaturation,
    LinearRelation,
    SoftThreshold,
    ZeroRelation,
    build_relation,
    identity_relation,
)
from evinc.relations.combinators import DirectSumRelation, NodewiseRelation, SlotRelation, YosidaRelation
from evinc.relations.operations import lift, minty_scan, resolvent, sum_with_lipschitz, yosida
from evinc.relations.stationary import plan_forward_backward, solve_stationary
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.signals.time_calculus import translate
from evinc.utils import mandel

SIGN = SoftThreshold(1, 1.0)


class PuncturedSign(SoftThreshold):
    """sign без точки x = 0: не максимально монотонно"""

    def eval(self, x):
        if np.all(np.asarray(x) == 0.0):
            return ValueSet.empty()
        return super().eval(x)


class FailingRelation(ZeroRelation):
    def _resolve(self, lam, y):
        raise ConvergenceFailure("inner solve diverged", 1.0, 3)


class TestResolvent:
    def test_catalog_examples(self):
        assert_array_equal(resolvent(ZeroRelation(2), 0.7, [1.0, -2.0]), [1.0, -2.0])
        assert resolvent(identity_relation(1), 1.0, [4.0])[0] == pytest.approx(2.0)
        assert resolvent(SIGN, 1.0, [2.0])[0] == 1.0
        assert resolvent(SIGN, 1.0, [0.5])[0] == 0.0

    def test_nonpositive_lambda_rejected(self):
        for lam in (0.0, -1.0):
            with pytest.raises(ContractViolation):
                resolvent(SIGN, lam, [1.0])

    def test_inner_failure_carries_diagnostics(self):
        with pytest.raises(ResolventFailure) as caught:
            resolvent(FailingRelation(1), 0.5, [1.0])
        assert caught.value.diagnostics["cause"] == "ConvergenceFailure"
        assert caught.value.diagnostics["lambda"] == 0.5

    @pytest.mark.parametrize(
        "relation",
        [
            SoftThreshold(3, 0.7, "l1"),
            SoftThreshold(3, 0.7, "l2"),
            BallSaturation(3, 0.4),
            DeviatoricSaturation(0.5),
            LinearRelation(np.array([[2.0, 1.0], [-1.0, 0.5]])),
        ],
        ids=lambda r: r.name,
    )
    def test_catalog_inclusion_residual(self, relation, rng):
        for lam in (0.1, 1.0, 3.0):
            for y in rng.standard_normal((50, relation.dim)) * 3:
                x = resolvent(relation, lam, y)
                assert relation.eval(x).distance((y - x) / lam) <= 1e-8

    def test_deviatoric_saturation_output_is_trace_free(self, rng):
        relation = DeviatoricSaturation(0.3)
        x = rng.standard_normal((20, mandel.MANDEL_DIM)) * 5
        outputs = np.array([relation.eval(row).center for row in x])
        assert np.abs(mandel.trace(outputs)).max() <= 1e-12
        assert np.linalg.norm(outputs, axis=1).max() <= 0.3 + 1e-12
        assert relation.contains_origin and relation.bounded

    def test_on_subspace_requires_trace_free_basis(self):
        relation = DeviatoricSaturation(0.5)
        restricted = relation.on_subspace(mandel.deviatoric_basis()[:, :2])
        assert isinstance(restricted, BallSaturation) and restricted.dim == 2
        with pytest.raises(ContractViolation):
            relation.on_subspace(np.eye(mandel.MANDEL_DIM)[:, :1])

    def test_registry_builds_every_relation(self):
        for identifier in RELATION_REGISTRY:
            dim = mandel.MANDEL_DIM if identifier == "deviatoric_saturation" else 2
            assert build_relation(identifier, dim).dim == dim
        assert build_relation("soft_threshold", 1, {"weight": 2.0}).weight == 2.0
        with pytest.raises(ContractViolation):
            build_relation("nope", 1)

    def test_linear_relation_rejects_nonmonotone_matrix(self):
        with pytest.raises(ContractViolation):
            LinearRelation(np.diag([1.0, -1.0]))


class TestYosida:
    def test_examples(self):
        assert yosida(identity_relation(1), 1.0, [2.0])[0] == pytest.approx(1.0)
        assert yosida(SIGN, 1.0, [2.0])[0] == 1.0
        assert yosida(SIGN, 1.0, [0.5])[0] == 0.5
        assert_array_equal(yosida(BallSaturation(2, 1.0), 0.3, np.zeros(2)), 0.0)

    def test_monotone_and_lipschitz(self, rng):
        relation = SoftThreshold(2, 1.0, "l2")
        lam = 0.4
        for _ in range(200):
            x, y = rng.standard_normal((2, 2)) * 3
            gap = yosida(relation, lam, x) - yosida(relation, lam, y)
            assert np.dot(gap, x - y) >= -1e-12
            assert np.linalg.norm(gap) <= (1 / lam + 1e-9) * np.linalg.norm(x - y)

    def test_resolvent_identity(self, rng):
        for y in rng.standard_normal((50, 1)) * 4:
            x = resolvent(SIGN, 0.3, y)
            assert_allclose(x + 0.3 * yosida(SIGN, 0.3, y), y, rtol=0, atol=1e-15 * (1 + abs(y[0])) * 4)

    def test_yosida_relation_resolvent(self, rng):
        relation = YosidaRelation(SIGN, 0.5)
        for mu in (0.1, 1.0, 4.0):
            for y in rng.standard_normal((30, 1)) * 3:
                x = relation.resolve(mu, y)
                assert_allclose(x + mu * relation.apply(x), y, atol=1e-12)


class TestLift:
    def test_zero_relation_lift_is_identity(self, random_signal):
        u = random_signal(2)
        assert_array_equal(lift(ZeroRelation(2), u.grid, u.rho).resolve(0.5, u).values, u.values)

    def test_lift_thresholds_each_node(self, random_signal):
        u = random_signal(1)
        lifted = lift(SIGN, u.grid, u.rho).resolve(0.5, u).values[:, 0]
        expected = [resolvent(SIGN, 0.5, [value])[0] for value in u.values[:, 0]]
        assert_array_equal(lifted, expected)

    def test_lift_commutes_with_translate(self, random_signal):
        u = random_signal(3)
        lifted = lift(SoftThreshold(3, 0.5, "l2"), u.grid, u.rho)
        for h in (1, 4, -2):
            left = lifted.resolve(0.7, translate(u, h)).values
            right = translate(lifted.resolve(0.7, u), h).values
            assert_array_equal(left, right)

    def test_yosida_of_lift_equals_lift_of_yosida(self, random_signal):
        u = random_signal(2)
        base = SoftThreshold(2, 0.8, "l1")
        of_lift = lift(base, u.grid, u.rho).yosida(0.25, u).values
        lift_of = np.array([YosidaRelation(base, 0.25).apply(row) for row in u.values])
        assert_allclose(of_lift, lift_of, rtol=0, atol=1e-14)

    def test_lift_rejects_mismatched_signal(self):
        grid = TimeGrid(t0=0.0, dt=0.1, n=5)
        u = WeightedSignal.zeros(grid, 2, 1.0)
        with pytest.raises(ContractViolation):
            lift(SIGN, grid, 1.0).resolve(0.5, u)


class TestSumWithLipschitz:
    def test_zero_perturbation_reduces_to_resolvent(self, rng):
        relation = sum_with_lipschitz(SIGN, lambda x: np.zeros_like(x), 0.0)
        for y in rng.standard_normal((20, 1)) * 3:
            assert_allclose(relation.resolve(0.5, y), resolvent(SIGN, 0.5, y), atol=1e-15)

    def test_identity_perturbation_closed_form(self):
        relation = sum_with_lipschitz(ZeroRelation(1), lambda x: x, 1.0)
        assert relation.resolve(0.5, [3.0])[0] == pytest.approx(2.0, abs=1e-11)

    def test_sign_plus_identity_matches_grid_search(self):
        relation = sum_with_lipschitz(SIGN, lambda x: x, 1.0)
        u = relation.resolve(0.5, [3.0])[0]
        grid = np.linspace(0.0, 3.0, 3_000_001)
        # при u > 0 включение однозначно: u + 0.5(1 + u) = 3
        searched = grid[np.argmin(np.abs(grid + 0.5 * (1.0 + grid) - 3.0))]
        assert abs(u - searched) <= 1e-6
        assert u == pytest.approx(5.0 / 3.0, abs=1e-8)

    def test_lambda_times_lipschitz_bound(self):
        relation = sum_with_lipschitz(SIGN, lambda x: 2 * x, 2.0)
        with pytest.raises(ParameterOutOfRange):
            relation.resolve(0.5, [1.0])
        with pytest.raises(ContractViolation):
            sum_with_lipschitz(SIGN, lambda x: x, float("inf"))

    def test_nonconvergence_reported(self):
        relation = sum_with_lipschitz(ZeroRelation(1), lambda x: 0.9 * x, 1.0, max_iter=3)
        with pytest.raises(ConvergenceFailure) as caught:
            relation.resolve(0.9, [5.0])
        assert caught.value.iterations == 3
        assert caught.value.last_residual > 0


class TestCombinators:
    def test_direct_sum_acts_blockwise(self, rng):
        parts = [SoftThreshold(1, 1.0), BallSaturation(2, 0.5)]
        relation = DirectSumRelation(parts)
        y = rng.standard_normal(3) * 2
        expected = np.concatenate([parts[0].resolve(0.4, y[:1]), parts[1].resolve(0.4, y[1:])])
        assert_array_equal(relation.resolve(0.4, y), expected)

    def test_nodewise_copies(self, rng):
        relation = NodewiseRelation(BallSaturation(2, 0.5), 3)
        y = rng.standard_normal((4, 6))
        expected = BallSaturation(2, 0.5).resolve(0.4, y.reshape(-1, 2)).reshape(4, 6)
        assert_array_equal(relation.resolve_batch(0.4, y), expected)

    def test_slot_relation_with_skew_part(self, rng):
        skew = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 2.0], [0.0, -2.0, 0.0]])
        relation = SlotRelation(3, [([0], SoftThreshold(1, 0.5))], linear=skew)
        for y in rng.standard_normal((20, 3)) * 2:
            x = relation.resolve(0.3, y)
            value = (y - x) / 0.3 - skew @ x
            assert abs(value[1]) <= 1e-8 and abs(value[2]) <= 1e-8
            assert SoftThreshold(1, 0.5).eval(x[:1]).distance(value[:1]) <= 1e-8

    def test_slot_relation_without_linear_part(self):
        relation = SlotRelation(3, [([2], SIGN)])
        assert_array_equal(relation.resolve(1.0, [1.0, -2.0, 2.5]), [1.0, -2.0, 1.5])
        split = relation.split()
        assert split.linear is None and list(split.indices) == [2]

    def test_slot_relation_validation(self):
        with pytest.raises(ContractViolation):
            SlotRelation(2, [([0, 0], BallSaturation(2, 1.0))])
        with pytest.raises(ContractViolation):
            SlotRelation(2, linear=-np.eye(2))


class TestMintyScan:
    def test_sign_passes(self):
        report = minty_scan(SIGN, 0.5, 1000, 10.0, seed=1)
        assert report.passed and not report.degraded
        assert report.inclusion_pass == 1000

    def test_punctured_sign_fails_near_origin(self):
        report = minty_scan(PuncturedSign(1, 1.0), 0.5, 400, 2.0, seed=2)
        assert not report.passed
        assert report.inclusion_fail > 0
        assert all(abs(y[0]) <= 0.5 for y in report.failing_targets)

    def test_without_eval_is_degraded(self):
        relation = DirectSumRelation([SIGN, SIGN])
        report = minty_scan(relation, 0.5, 50, 3.0)
        assert report.degraded and report.passed
        assert report.nonexpansive_pairs == 50 * 49 // 2


class TestStationary:
    OPERATOR = np.array([[1.0, 0.0], [0.0, 10.0]])

    def test_soft_threshold_solution(self):
        result = solve_stationary(self.OPERATOR, np.array([3.0, 0.5]), SoftThreshold(2, 1.0), np.arange(2))
        assert_allclose(result.x, [2.0, 0.0], atol=1e-8)
        assert 0.0 < result.contraction < 1.0

    def test_gives_up_with_contraction_estimate(self, caplog):
        plan = plan_forward_backward(self.OPERATOR)
        with caplog.at_level("ERROR", logger="evinc.relations.stationary"):
            with pytest.raises(ConvergenceFailure) as caught:
                solve_stationary(
                    self.OPERATOR, np.array([3.0, 0.5]), SoftThreshold(2, 1.0), np.arange(2), tol=1e-300, max_iter=2
                )
        assert caught.value.reason == "max_iter"
        assert caught.value.iterations == 2
        assert caught.value.contraction == pytest.approx(plan.contraction)
        assert f"q={plan.contraction:.6f}" in caplog.text
