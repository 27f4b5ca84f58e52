"""Two-step uncertainty sampling, certainty sampling, and the active
domain-adaptation loop.

Uncertainty sampling picks oracle queries in two steps: rank the unlabeled
target set by epistemic uncertainty, keep the top ``kappa * b_u`` as
candidates, then rank those by aleatoric uncertainty and query the top
``b_u``. The first step finds samples the model lacks knowledge about
(domain gaps); the second focuses the budget on samples that are also
intrinsically hard.

Certainty sampling is the mirror image: the ``b_c`` samples with the least
epistemic uncertainty adopt their own predictions as free pseudo labels. It
shares the epistemic ordering already computed for step one, so a combined
round sorts by EU exactly once; uncertain picks come from the head of that
ordering and certain picks from the tail. Within tied EU values the shared
ordering breaks ties by ascending sample id, which means the tail is read
largest-id-first; ties are broken by id either way, just read from opposite
ends.

``run_ada`` interleaves training epochs with sampling rounds and fills an
AdaRunReport with accuracies, AUROC snapshots, selection logs, and the
quantities the report consumers need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enn import Trainer, evaluate
from .losses import LossConfig
from .metrics import AdaRunReport, auroc, batch_uncertainties, class_level_uncertainty_summary, rank_class_pairs
from .dirichlet import predict_class_batch
from .pools import PoolError, SamplePool
from .special import DomainError

__all__ = [
    "RoundPlan",
    "default_round_plans",
    "default_schedule",
    "select_uncertain",
    "select_certain",
    "select_certain_balanced",
    "uncertainty_sampling",
    "certainty_sampling",
    "run_ada",
    "eu_sort_count",
]

# Counts every epistemic-uncertainty sort performed; the single-sort-per-
# round property is asserted against deltas of this counter.
_EU_SORTS = 0


def eu_sort_count() -> int:
    return _EU_SORTS


@dataclass(frozen=True)
class RoundPlan:
    """One sampling round: how many uncertain and certain samples to take."""

    round_index: int
    b_u: int
    b_c: int
    kappa: int = 10

    def __post_init__(self):
        if self.round_index < 1:
            raise DomainError("round_index is 1-based")
        if self.b_u < 0 or self.b_c < 0:
            raise DomainError("selection counts must be nonnegative")
        if self.kappa < 1:
            raise DomainError("kappa must be at least 1")


def default_round_plans(num_target: int, num_rounds: int = 5, budget_fraction: float = 0.05,
                        kappa: int = 10, certain_percent_per_round: int = 1):
    """Desk-scale round plans: budget 5% of the target split evenly across
    rounds, with round k pseudo-labeling k% of the target set."""
    budget = int(round(budget_fraction * num_target))
    b_u = budget // num_rounds
    return [
        RoundPlan(
            round_index=k,
            b_u=b_u,
            b_c=(k * certain_percent_per_round * num_target) // 100,
            kappa=kappa,
        )
        for k in range(1, num_rounds + 1)
    ]


def default_schedule(num_rounds: int = 5, first_epoch: int = 10, stride: int = 2):
    """Sampling epochs mirroring the 20-epoch convention: 10, 12, 14, ..."""
    return [first_epoch + stride * i for i in range(num_rounds)]


def _eu_order(ids, eu) -> np.ndarray:
    """Permutation ordering samples by descending EU, ties by ascending id."""
    global _EU_SORTS
    _EU_SORTS += 1
    return np.lexsort((ids, -np.asarray(eu, dtype=np.float64)))


def _pick_uncertain(order, ids, au, b_u, kappa):
    if b_u == 0:
        return np.empty(0, dtype=np.int64)
    candidates = order[: kappa * b_u]
    au_order = np.lexsort((ids[candidates], -np.asarray(au)[candidates]))
    return ids[candidates[au_order[:b_u]]]


def _pick_certain_tail(order, ids, b_c, exclude=()):
    picked = []
    banned = set(int(i) for i in exclude)
    for pos in range(order.size - 1, -1, -1):
        if len(picked) == b_c:
            break
        sid = int(ids[order[pos]])
        if sid not in banned:
            picked.append(sid)
    return np.array(picked, dtype=np.int64)


def _pick_certain_balanced_tail(order, ids, predicted, b_c, num_classes, exclude=()):
    quota = b_c // num_classes
    banned = set(int(i) for i in exclude)
    picked: list[int] = []
    if quota:
        per_class = {c: 0 for c in range(1, num_classes + 1)}
        for pos in range(order.size - 1, -1, -1):
            sid = int(ids[order[pos]])
            cls = int(predicted[order[pos]])
            if sid not in banned and per_class[cls] < quota:
                per_class[cls] += 1
                picked.append(sid)
    remainder = min(b_c, order.size - len(banned)) - len(picked)
    if remainder > 0:
        fill = _pick_certain_tail(order, ids, remainder, exclude=banned | set(picked))
        picked.extend(int(i) for i in fill)
    return np.array(picked, dtype=np.int64)


def select_uncertain(ids, eu, au, b_u: int, kappa: int) -> np.ndarray:
    """Pure two-step selection on score arrays; returns chosen sample ids.

    Step one keeps the kappa*b_u highest-EU samples; step two returns the
    b_u highest-AU among them. Both sorts break ties by ascending id.
    """
    ids = np.asarray(ids, dtype=np.int64)
    if kappa * b_u > ids.size:
        raise PoolError(
            f"two-step selection needs kappa*b_u <= pool size "
            f"({kappa}*{b_u} > {ids.size})"
        )
    order = _eu_order(ids, eu)
    return _pick_uncertain(order, ids, au, b_u, kappa)


def select_certain(ids, eu, b_c: int) -> np.ndarray:
    """The b_c least-EU sample ids (soft: fewer if the pool is smaller)."""
    ids = np.asarray(ids, dtype=np.int64)
    order = _eu_order(ids, eu)
    return _pick_certain_tail(order, ids, min(b_c, ids.size))


def select_certain_balanced(ids, eu, predicted, b_c: int, num_classes: int) -> np.ndarray:
    """Class-balanced certainty selection: floor(b_c/C) least-EU samples per
    predicted class, remainder filled by global least-EU."""
    ids = np.asarray(ids, dtype=np.int64)
    order = _eu_order(ids, eu)
    return _pick_certain_balanced_tail(
        order, ids, np.asarray(predicted), min(b_c, ids.size), num_classes
    )


def _scored_snapshot(pool: SamplePool, model, mode: str):
    ids = pool.unlabeled_ids()
    alpha = model.forward_batch(pool.unlabeled_features())
    _, au, eu = batch_uncertainties(alpha, mode)
    return ids, alpha, au, eu


def uncertainty_sampling(pool: SamplePool, model, plan: RoundPlan, mode: str = "variance") -> np.ndarray:
    """Standalone two-step round: select, query the oracle, charge budget."""
    ids, _, au, eu = _scored_snapshot(pool, model, mode)
    selected = select_uncertain(ids, eu, au, plan.b_u, plan.kappa)
    if selected.size:
        pool.acquire_with_oracle(selected)
    return selected


def certainty_sampling(pool: SamplePool, model, plan: RoundPlan,
                       class_balanced: bool = False, mode: str = "variance"):
    """Standalone certainty round: pseudo-label the most certain samples."""
    ids, alpha, _, eu = _scored_snapshot(pool, model, mode)
    predicted = predict_class_batch(alpha)
    if class_balanced:
        selected = select_certain_balanced(ids, eu, predicted, plan.b_c, alpha.shape[1])
    else:
        selected = select_certain(ids, eu, plan.b_c)
    id_to_row = {int(s): r for r, s in enumerate(ids)}
    labels = np.array([predicted[id_to_row[int(s)]] for s in selected], dtype=np.int64)
    if selected.size:
        pool.acquire_with_pseudo_labels(selected, labels)
    return selected, labels


def _log_rows(round_index, selection_type, sample_ids, ids, au, eu, predicted, true_labels):
    id_to_row = {int(s): r for r, s in enumerate(ids)}
    rows = []
    for sid in sample_ids:
        r = id_to_row[int(sid)]
        rows.append(
            {
                "round": round_index,
                "sample_id": int(sid),
                "selection_type": selection_type,
                "epistemic": float(eu[r]),
                "aleatoric": float(au[r]),
                "predicted_class": int(predicted[r]),
                "true_class": int(true_labels[int(sid)]),
            }
        )
    return rows


def run_ada(
    model,
    pool: SamplePool,
    train_cfg,
    loss_cfg: LossConfig,
    plans,
    schedule,
    mode: str = "variance",
    ug_enabled: bool = True,
    us_enabled: bool = True,
    cs_enabled: bool = False,
    class_balanced: bool = False,
    auroc_epoch: int | None = None,
) -> AdaRunReport:
    """Train with sampling rounds interleaved at the scheduled epochs.

    ``plans[i]`` executes right after epoch ``schedule[i]`` completes.
    Disabled steps (us/cs) leave their part of the round out; with no rounds
    at all this reduces to plain training. The AUROC snapshot is taken right
    before the round at ``auroc_epoch`` (default: the first scheduled epoch).
    """
    plans = list(plans)
    schedule = list(schedule)
    if len(plans) != len(schedule):
        raise DomainError("one round plan per scheduled epoch is required")
    if sorted(schedule) != schedule or len(set(schedule)) != len(schedule):
        raise DomainError("schedule epochs must be strictly increasing")
    if schedule and (schedule[0] < 1 or schedule[-1] > train_cfg.epochs):
        raise DomainError("scheduled epochs must fall within the training run")
    if us_enabled and sum(p.b_u for p in plans) > pool.budget_total:
        raise DomainError("round plans exceed the oracle budget")
    if auroc_epoch is None:
        auroc_epoch = schedule[0] if schedule else None

    report = AdaRunReport(mode=mode, seed=train_cfg.seed, auroc_epoch=auroc_epoch)
    trainer = Trainer(model, pool, train_cfg, loss_cfg, ug_enabled=ug_enabled)
    rounds_by_epoch = dict(zip(schedule, plans))
    target_features = pool.target_features_by_id(np.arange(pool.num_target))
    target_labels = pool.true_target_labels()

    pseudo_hits = 0
    pseudo_total = 0
    unlabeled_acc = []

    for epoch in range(1, train_cfg.epochs + 1):
        sup, ug = trainer.run_epoch()
        report.loss_curve.append((epoch, sup, ug))

        if epoch == auroc_epoch:
            _record_auroc(report, model, target_features, target_labels, mode)
        plan = rounds_by_epoch.get(epoch)
        if plan is None:
            continue

        ids, alpha, au, eu = _scored_snapshot(pool, model, mode)
        predicted = predict_class_batch(alpha)
        want_us = us_enabled and plan.b_u > 0
        want_cs = cs_enabled and plan.b_c > 0
        if want_us and plan.kappa * plan.b_u > ids.size:
            raise PoolError("unlabeled pool too small for two-step selection")
        if want_us and want_cs and plan.kappa * plan.b_u + plan.b_c > ids.size:
            raise PoolError(
                "certainty and uncertainty selections would overlap in the "
                "EU ordering; shrink b_c or kappa*b_u"
            )

        sorts_before = eu_sort_count()
        order = _eu_order(ids, eu) if (want_us or want_cs) else None

        if want_us:
            chosen_u = _pick_uncertain(order, ids, au, plan.b_u, plan.kappa)
            pool.acquire_with_oracle(chosen_u)
            report.selection_log.extend(
                _log_rows(plan.round_index, "uncertain", chosen_u, ids, au, eu,
                          predicted, target_labels)
            )
        if want_cs:
            unlabeled_acc.append(
                float(np.mean(predicted == target_labels[ids]))
            )
            exclude = chosen_u if want_us else ()
            if class_balanced:
                chosen_c = _pick_certain_balanced_tail(
                    order, ids, predicted, plan.b_c, alpha.shape[1], exclude=exclude
                )
            else:
                chosen_c = _pick_certain_tail(order, ids, plan.b_c, exclude=exclude)
            id_to_row = {int(s): r for r, s in enumerate(ids)}
            pseudo = np.array(
                [predicted[id_to_row[int(s)]] for s in chosen_c], dtype=np.int64
            )
            pool.acquire_with_pseudo_labels(chosen_c, pseudo)
            pseudo_hits += int((pseudo == target_labels[chosen_c]).sum())
            pseudo_total += int(pseudo.size)
            report.selection_log.extend(
                _log_rows(plan.round_index, "certain", chosen_c, ids, au, eu,
                          predicted, target_labels)
            )
        report.eu_sorts_per_round.append(eu_sort_count() - sorts_before)
        pool.check_invariants()
        report.round_accuracies.append(evaluate(model, target_features, target_labels))

    report.final_accuracy = evaluate(model, target_features, target_labels)
    report.budget_spent = pool.budget_spent
    if pseudo_total:
        report.pseudo_label_accuracy = pseudo_hits / pseudo_total
        report.model_accuracy_on_unlabeled = float(np.mean(unlabeled_acc))
    report.class_uncertainty_source = class_level_uncertainty_summary(
        model, pool.source_features
    )
    report.class_uncertainty_target = class_level_uncertainty_summary(
        model, target_features
    )
    report.correlated_pairs = rank_class_pairs(
        model.forward_batch(target_features), labels=target_labels
    )
    report.validate()
    return report


def _record_auroc(report, model, features, labels, mode):
    alpha = model.forward_batch(features)
    _, au, eu = batch_uncertainties(alpha, mode)
    wrong = predict_class_batch(alpha) != labels
    if wrong.any() and not wrong.all():
        report.auroc_epistemic = auroc(eu, wrong)
        report.auroc_aleatoric = auroc(au, wrong)
