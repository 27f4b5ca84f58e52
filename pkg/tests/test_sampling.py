"""Sampler tests: hand-traced selection rules, pool mechanics, and the
round-loop invariants (budget, conservation, single shared EU sort)."""

import numpy as np
import pytest

from evidunc.enn import EvidentialMLP, TrainConfig, train
from evidunc.losses import LossConfig
from evidunc.pools import BudgetExhaustedError, PoolError, SamplePool
from evidunc.sampling import (
    RoundPlan,
    certainty_sampling,
    default_round_plans,
    default_schedule,
    eu_sort_count,
    run_ada,
    select_certain,
    select_certain_balanced,
    select_uncertain,
    uncertainty_sampling,
)
from evidunc.special import DomainError
from evidunc.synthetic import DomainSpec, generate_domain_pair, split_pools

IDS = np.array([1, 2, 3, 4, 5, 6])
EU = np.array([5.0, 4.0, 3.0, 2.0, 1.0, 0.0])
AU = np.array([0.0, 1.0, 9.0, 8.0, 0.0, 0.0])


class TestSelectUncertain:
    def test_two_step_hand_trace(self):
        # EU keeps {1,2,3,4}; AU ranks them 3(9), 4(8), 2(1), 1(0).
        chosen = select_uncertain(IDS, EU, AU, b_u=2, kappa=2)
        np.testing.assert_array_equal(chosen, [3, 4])

    def test_degenerate_kappa_reduces_to_au_ranking(self):
        chosen = select_uncertain(IDS, EU, AU, b_u=2, kappa=3)
        np.testing.assert_array_equal(chosen, [3, 4])

    def test_zero_budget_selects_nothing(self):
        assert select_uncertain(IDS, EU, AU, b_u=0, kappa=2).size == 0

    def test_pool_too_small(self):
        with pytest.raises(PoolError):
            select_uncertain(IDS, EU, AU, b_u=4, kappa=2)

    def test_eu_ties_break_by_ascending_id(self):
        ids = np.array([7, 3, 5])
        eu = np.array([1.0, 1.0, 1.0])
        au = np.array([0.0, 0.0, 0.0])
        chosen = select_uncertain(ids, eu, au, b_u=2, kappa=1)
        np.testing.assert_array_equal(chosen, [3, 5])


class TestSelectCertain:
    def test_least_eu_hand_trace(self):
        np.testing.assert_array_equal(select_certain(IDS, EU, b_c=1), [6])

    def test_zero_is_noop(self):
        assert select_certain(IDS, EU, b_c=0).size == 0

    def test_oversized_request_takes_everything(self):
        chosen = select_certain(IDS, EU, b_c=10)
        np.testing.assert_array_equal(chosen, [6, 5, 4, 3, 2, 1])

    def test_balanced_hand_trace(self):
        ids = np.array([1, 2, 3, 4])
        eu = np.array([1.0, 2.0, 3.0, 4.0])
        predicted = np.array([1, 1, 2, 2])
        chosen = select_certain_balanced(ids, eu, predicted, b_c=2, num_classes=2)
        np.testing.assert_array_equal(sorted(chosen), [1, 3])

    def test_balanced_remainder_fills_globally(self):
        ids = np.array([1, 2, 3, 4])
        eu = np.array([1.0, 2.0, 3.0, 4.0])
        predicted = np.array([1, 1, 2, 2])
        chosen = select_certain_balanced(ids, eu, predicted, b_c=3, num_classes=2)
        assert sorted(chosen) == [1, 2, 3]

    def test_balanced_counts_within_one_of_quota(self):
        rng = np.random.default_rng(8)
        ids = np.arange(60)
        eu = rng.random(60)
        predicted = rng.integers(1, 4, size=60)
        chosen = select_certain_balanced(ids, eu, predicted, b_c=12, num_classes=3)
        assert chosen.size == 12
        by_class = {c: 0 for c in (1, 2, 3)}
        lookup = dict(zip(ids, predicted))
        for sid in chosen:
            by_class[lookup[sid]] += 1
        assert all(v >= 4 - 1 for v in by_class.values()) or max(by_class.values()) <= 4 + (12 % 3) + 1


def scored_pool(n_target=12, budget=6):
    """Pool plus a fixed linear model whose EU ordering is predictable."""
    rng = np.random.default_rng(19)
    source = rng.normal(size=(10, 2))
    source_labels = (np.arange(10) % 2) + 1
    target = rng.normal(size=(n_target, 2))
    target_labels = (np.arange(n_target) % 2) + 1
    pool = SamplePool(source, source_labels, target, target_labels, budget)
    model = EvidentialMLP.create(2, 2, hidden=(8,), seed=4)
    return pool, model


class TestPoolLevelOps:
    def test_uncertainty_sampling_charges_budget_and_reveals_truth(self):
        pool, model = scored_pool()
        plan = RoundPlan(round_index=1, b_u=2, b_c=0, kappa=3)
        selected = uncertainty_sampling(pool, model, plan)
        assert selected.size == 2
        assert pool.budget_spent == 2
        _, labels, provenance = pool.labeled_target()
        np.testing.assert_array_equal(labels, pool.true_target_labels(selected))
        assert provenance == ["oracle", "oracle"]
        pool.check_invariants()

    def test_uncertainty_sampling_budget_exhaustion(self):
        pool, model = scored_pool(budget=1)
        plan = RoundPlan(round_index=1, b_u=2, b_c=0, kappa=2)
        with pytest.raises(BudgetExhaustedError):
            uncertainty_sampling(pool, model, plan)

    def test_uncertainty_sampling_pool_too_small(self):
        pool, model = scored_pool(n_target=5)
        plan = RoundPlan(round_index=1, b_u=2, b_c=0, kappa=3)
        with pytest.raises(PoolError):
            uncertainty_sampling(pool, model, plan)

    def test_certainty_sampling_is_free_and_uses_predictions(self):
        pool, model = scored_pool()
        plan = RoundPlan(round_index=1, b_u=0, b_c=3, kappa=1)
        selected, pseudo = certainty_sampling(pool, model, plan)
        assert selected.size == 3
        assert pool.budget_spent == 0
        assert pool.pseudo_count == 3
        alpha = model.forward_batch(pool.target_features_by_id(selected))
        np.testing.assert_array_equal(pseudo, np.argmax(alpha, axis=1) + 1)
        pool.check_invariants()


def ada_setup(seed=0, n=80, epochs=6):
    spec = DomainSpec(
        num_classes=2,
        feature_dim=2,
        samples_per_domain=n,
        class_scale=0.8,
        shift_rotation_degrees=20.0,
        shift_translation=(0.5, 0.0),
        seed=seed,
    )
    source, target = generate_domain_pair(spec)
    pool = split_pools(source, target, budget_fraction=0.1)
    model = EvidentialMLP.create(2, 2, hidden=(8,), seed=seed + 100)
    cfg = TrainConfig(epochs=epochs, batch_size=16, learning_rate=0.05, seed=seed + 200)
    return pool, model, cfg


class TestRunAda:
    def test_round_loop_invariants(self):
        pool, model, cfg = ada_setup()
        plans = [RoundPlan(1, b_u=3, b_c=2, kappa=2), RoundPlan(2, b_u=3, b_c=2, kappa=2)]
        report = run_ada(
            model, pool, cfg, LossConfig(), plans, schedule=[2, 4],
            cs_enabled=True,
        )
        assert pool.budget_spent == 6
        assert report.budget_spent == 6
        assert pool.oracle_count == 6
        assert pool.pseudo_count == 4
        assert pool.num_labeled_target + pool.num_unlabeled == pool.num_target
        assert report.eu_sorts_per_round == [1, 1]
        assert len(report.round_accuracies) == 2
        assert len(report.loss_curve) == 6
        # Within each round the uncertain and certain picks are disjoint.
        for rnd in (1, 2):
            uncertain = {r["sample_id"] for r in report.selection_log
                         if r["round"] == rnd and r["selection_type"] == "uncertain"}
            certain = {r["sample_id"] for r in report.selection_log
                       if r["round"] == rnd and r["selection_type"] == "certain"}
            assert len(uncertain) == 3 and len(certain) == 2
            assert not (uncertain & certain)
        assert report.pseudo_label_accuracy is not None
        report.validate()

    def test_single_shared_sort_counter(self):
        pool, model, cfg = ada_setup(seed=1)
        before = eu_sort_count()
        run_ada(
            model, pool, cfg, LossConfig(),
            [RoundPlan(1, b_u=2, b_c=2, kappa=2)], [3], cs_enabled=True,
        )
        assert eu_sort_count() - before == 1

    def test_deterministic_given_seed(self):
        logs, weights = [], []
        for _ in range(2):
            pool, model, cfg = ada_setup(seed=2)
            report = run_ada(
                model, pool, cfg, LossConfig(),
                [RoundPlan(1, b_u=3, b_c=3, kappa=2)], [3], cs_enabled=True,
            )
            logs.append(report.selection_log)
            weights.append(model.weights)
        assert logs[0] == logs[1]
        for w1, w2 in zip(*weights):
            np.testing.assert_array_equal(w1, w2)

    def test_no_rounds_reduces_to_plain_training(self):
        pool_a, model_a, cfg = ada_setup(seed=3)
        report = run_ada(model_a, pool_a, cfg, LossConfig(), [], [])
        pool_b, model_b, _ = ada_setup(seed=3)
        curve = train(model_b, pool_b, cfg, LossConfig())
        assert report.round_accuracies == []
        assert [r[1] for r in report.loss_curve] == [c[1] for c in curve]
        for w1, w2 in zip(model_a.weights, model_b.weights):
            np.testing.assert_array_equal(w1, w2)

    def test_plan_schedule_mismatch(self):
        pool, model, cfg = ada_setup()
        with pytest.raises(DomainError):
            run_ada(model, pool, cfg, LossConfig(), [RoundPlan(1, 1, 0)], [2, 4])
        with pytest.raises(DomainError):
            run_ada(model, pool, cfg, LossConfig(), [RoundPlan(1, 1, 0)], [99])

    def test_budget_overcommit_rejected_upfront(self):
        pool, model, cfg = ada_setup()
        plans = [RoundPlan(1, b_u=5, b_c=0), RoundPlan(2, b_u=5, b_c=0)]
        with pytest.raises(DomainError):
            run_ada(model, pool, cfg, LossConfig(), plans, [2, 4])

    def test_overlapping_selection_window_rejected(self):
        pool, model, cfg = ada_setup(n=40)
        # kappa*b_u + b_c exceeds the 40-sample unlabeled pool.
        plans = [RoundPlan(1, b_u=2, b_c=38, kappa=2)]
        with pytest.raises(PoolError):
            run_ada(model, pool, cfg, LossConfig(), plans, [2], cs_enabled=True)

    def test_class_balanced_round(self):
        pool, model, cfg = ada_setup(seed=5)
        report = run_ada(
            model, pool, cfg, LossConfig(),
            [RoundPlan(1, b_u=0, b_c=4, kappa=1)], [3],
            us_enabled=False, cs_enabled=True, class_balanced=True,
        )
        certain = [r for r in report.selection_log if r["selection_type"] == "certain"]
        assert len(certain) == 4
        counts = {}
        for row in certain:
            counts[row["predicted_class"]] = counts.get(row["predicted_class"], 0) + 1
        assert all(v == 2 for v in counts.values())


class TestPlansAndSchedules:
    def test_desk_scale_defaults(self):
        plans = default_round_plans(2000)
        assert len(plans) == 5
        assert all(p.b_u == 20 for p in plans)
        assert [p.b_c for p in plans] == [20, 40, 60, 80, 100]
        assert all(p.kappa == 10 for p in plans)
        assert sum(p.b_u for p in plans) == 100
        assert default_schedule() == [10, 12, 14, 16, 18]

    def test_plan_validation(self):
        with pytest.raises(DomainError):
            RoundPlan(0, 1, 1)
        with pytest.raises(DomainError):
            RoundPlan(1, -1, 0)
        with pytest.raises(DomainError):
            RoundPlan(1, 1, 1, kappa=0)
