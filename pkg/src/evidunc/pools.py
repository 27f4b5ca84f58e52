"""Sample pools for active domain adaptation with enforced budget accounting.

A pool holds the labeled source set plus the target set split into a labeled
part and an unlabeled part. Target labels exist in the pool (simulation needs
them) but are access-gated: the only ways to obtain a label for training are

- ``acquire_with_oracle``, which reveals true labels and spends budget, or
- ``acquire_with_pseudo_labels``, which is free and stores caller-supplied
  labels with pseudo provenance.

``true_target_labels`` bypasses the gate and exists for evaluation and
reporting code only; selection logic must never call it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["PoolError", "BudgetExhaustedError", "SamplePool"]

PROVENANCE_ORACLE = "oracle"
PROVENANCE_PSEUDO = "pseudo"


class PoolError(ValueError):
    """Structural misuse of a pool: bad indices, bad shapes, bad labels."""


class BudgetExhaustedError(RuntimeError):
    """Raised when an oracle acquisition would exceed the labeling budget."""


def _check_features_labels(features, labels, what):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if features.ndim != 2:
        raise PoolError(f"{what} features must be an (n, d) matrix")
    if labels.shape != (features.shape[0],):
        raise PoolError(f"{what} labels must be one 1-based class per sample")
    if not np.issubdtype(labels.dtype, np.integer):
        raise PoolError(f"{what} labels must be integers")
    if labels.size and labels.min() < 1:
        raise PoolError(f"{what} labels must be 1-based")
    return features, labels.astype(np.int64)


class SamplePool:
    """Source set, target labeled/unlabeled split, and oracle budget."""

    def __init__(
        self,
        source_features,
        source_labels,
        target_features,
        target_labels,
        budget_total: int,
    ):
        self.source_features, self.source_labels = _check_features_labels(
            source_features, source_labels, "source"
        )
        self._target_features, self._target_labels = _check_features_labels(
            target_features, target_labels, "target"
        )
        if self.source_features.shape[1] != self._target_features.shape[1]:
            raise PoolError("source and target feature dimensions differ")
        if budget_total < 0:
            raise PoolError("budget must be nonnegative")
        self.budget_total = int(budget_total)
        self.budget_spent = 0
        # Target indices double as stable sample ids for tie-breaking.
        self._unlabeled = list(range(self._target_features.shape[0]))
        self._labeled: list[int] = []
        self._labeled_labels: list[int] = []
        self._labeled_provenance: list[str] = []

    # --- sizes ---

    @property
    def num_source(self) -> int:
        return self.source_features.shape[0]

    @property
    def num_target(self) -> int:
        return self._target_features.shape[0]

    @property
    def num_unlabeled(self) -> int:
        return len(self._unlabeled)

    @property
    def num_labeled_target(self) -> int:
        return len(self._labeled)

    @property
    def oracle_count(self) -> int:
        return self._labeled_provenance.count(PROVENANCE_ORACLE)

    @property
    def pseudo_count(self) -> int:
        return self._labeled_provenance.count(PROVENANCE_PSEUDO)

    # --- unlabeled view ---

    def unlabeled_ids(self) -> np.ndarray:
        """Ids of the unlabeled target samples in stable ascending order."""
        return np.array(self._unlabeled, dtype=np.int64)

    def unlabeled_features(self) -> np.ndarray:
        return self._target_features[self._unlabeled]

    def target_features_by_id(self, ids) -> np.ndarray:
        return self._target_features[np.asarray(ids, dtype=np.int64)]

    # --- label acquisition (the only training-time label paths) ---

    def _take(self, ids) -> list[int]:
        ids = [int(i) for i in np.atleast_1d(np.asarray(ids))]
        if len(set(ids)) != len(ids):
            raise PoolError("duplicate sample ids in acquisition")
        unlabeled = set(self._unlabeled)
        missing = [i for i in ids if i not in unlabeled]
        if missing:
            raise PoolError(f"samples not in the unlabeled pool: {missing}")
        for i in ids:
            self._unlabeled.remove(i)
        return ids

    def acquire_with_oracle(self, ids) -> np.ndarray:
        """Move samples to the labeled target set, revealing their true
        labels at a cost of one budget unit each."""
        ids = [int(i) for i in np.atleast_1d(np.asarray(ids))]
        if self.budget_spent + len(ids) > self.budget_total:
            raise BudgetExhaustedError(
                f"acquiring {len(ids)} labels would exceed the budget "
                f"({self.budget_spent}/{self.budget_total} spent)"
            )
        ids = self._take(ids)
        labels = self._target_labels[ids]
        self._labeled.extend(ids)
        self._labeled_labels.extend(int(v) for v in labels)
        self._labeled_provenance.extend([PROVENANCE_ORACLE] * len(ids))
        self.budget_spent += len(ids)
        return labels.copy()

    def acquire_with_pseudo_labels(self, ids, labels) -> None:
        """Move samples to the labeled target set under caller-supplied
        pseudo labels; costs nothing."""
        labels = np.atleast_1d(np.asarray(labels))
        ids_arr = np.atleast_1d(np.asarray(ids))
        if labels.shape != ids_arr.shape:
            raise PoolError("one pseudo label per sample id is required")
        if labels.size and (not np.issubdtype(labels.dtype, np.integer) or labels.min() < 1):
            raise PoolError("pseudo labels must be 1-based integers")
        taken = self._take(ids_arr)
        self._labeled.extend(taken)
        self._labeled_labels.extend(int(v) for v in labels)
        self._labeled_provenance.extend([PROVENANCE_PSEUDO] * len(taken))

    # --- training views ---

    def labeled_target(self):
        """(features, labels, provenance) of the labeled target set."""
        idx = np.array(self._labeled, dtype=np.int64)
        features = self._target_features[idx] if idx.size else np.empty(
            (0, self._target_features.shape[1])
        )
        return (
            features,
            np.array(self._labeled_labels, dtype=np.int64),
            list(self._labeled_provenance),
        )

    def supervised_set(self, pseudo_label_weight: float = 1.0):
        """(features, labels, weights) over source plus labeled target.

        Oracle-labeled rows carry weight 1; pseudo-labeled rows carry the
        given weight.
        """
        t_feat, t_labels, provenance = self.labeled_target()
        features = np.vstack([self.source_features, t_feat])
        labels = np.concatenate([self.source_labels, t_labels])
        weights = np.concatenate(
            [
                np.ones(self.num_source),
                np.array(
                    [1.0 if p == PROVENANCE_ORACLE else pseudo_label_weight for p in provenance]
                ),
            ]
        )
        return features, labels, weights

    # --- evaluation-only access ---

    def true_target_labels(self, ids=None) -> np.ndarray:
        """True labels of target samples. Evaluation and reporting only;
        never an input to selection or training."""
        if ids is None:
            return self._target_labels.copy()
        return self._target_labels[np.asarray(ids, dtype=np.int64)].copy()

    def check_invariants(self) -> None:
        """Assert the structural pool invariants; cheap enough to call after
        every sampling round."""
        labeled = set(self._labeled)
        unlabeled = set(self._unlabeled)
        if labeled & unlabeled:
            raise PoolError("labeled and unlabeled target sets overlap")
        if labeled | unlabeled != set(range(self.num_target)):
            raise PoolError("target samples lost or duplicated")
        if self.budget_spent > self.budget_total:
            raise PoolError("budget overspent")
        if self.budget_spent != self.oracle_count:
            raise PoolError("budget spent does not match oracle-labeled count")
        if len(self._labeled) != len(self._labeled_labels) or len(self._labeled) != len(
            self._labeled_provenance
        ):
            raise PoolError("labeled bookkeeping arrays diverged")
