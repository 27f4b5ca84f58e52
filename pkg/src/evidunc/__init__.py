"""Variance-based evidential uncertainty for classifiers, with an active
domain adaptation loop built on top.

The package splits into a quantification core (``dirichlet``, ``losses``,
``metrics``) that works on any Dirichlet output, and an experiment stack
(``enn``, ``pools``, ``sampling``, ``synthetic``, ``config``,
``experiments``, ``cli``) for desk-scale studies.
"""

from .config import (
    AblationSwitches,
    ConfigError,
    ExperimentConfig,
    config_hash,
    load_config,
    parse_config,
)
from .dirichlet import (
    ALPHA_FLOOR,
    CovarianceBundle,
    DirichletPrediction,
    UncertaintyBundle,
    class_uncertainties,
    covariance_bundle,
    entropy_uncertainties_batch,
    mean_probabilities,
    predict_class,
    predict_class_batch,
    prediction_from_record,
    quantify_record,
    sample_uncertainty_entropy,
    sample_uncertainty_variance,
    variance_uncertainties_batch,
)
from .enn import (
    EvidentialMLP,
    TrainConfig,
    Trainer,
    TrainingDivergedError,
    evaluate,
    load_checkpoint,
    save_checkpoint,
)
from .experiments import (
    ABLATION_ROWS,
    aggregate_reports,
    run_ablation,
    run_experiment,
    run_seed,
)
from .losses import (
    LossConfig,
    OneHotLabel,
    edl_loss,
    edl_loss_and_gradient,
    kl_regularizer,
    nll_loss,
    total_loss,
    ug_loss,
    ug_loss_and_gradient,
)
from .metrics import (
    AdaRunReport,
    auroc,
    batch_uncertainties,
    class_level_uncertainty_summary,
    dataset_class_correlation,
    export_uncertainty_histograms,
    rank_class_pairs,
)
from .pools import BudgetExhaustedError, PoolError, SamplePool
from .sampling import (
    RoundPlan,
    certainty_sampling,
    default_round_plans,
    default_schedule,
    run_ada,
    uncertainty_sampling,
)
from .special import DomainError, digamma, log_gamma, trigamma
from .synthetic import (
    Dataset,
    DomainSpec,
    generate_domain_pair,
    import_domains_csv,
    export_domains_csv,
    split_pools,
)

__version__ = "0.1.0"

__all__ = [
    "ABLATION_ROWS",
    "ALPHA_FLOOR",
    "AblationSwitches",
    "AdaRunReport",
    "BudgetExhaustedError",
    "ConfigError",
    "CovarianceBundle",
    "Dataset",
    "DirichletPrediction",
    "DomainError",
    "DomainSpec",
    "EvidentialMLP",
    "ExperimentConfig",
    "LossConfig",
    "OneHotLabel",
    "PoolError",
    "RoundPlan",
    "SamplePool",
    "TrainConfig",
    "Trainer",
    "TrainingDivergedError",
    "UncertaintyBundle",
    "aggregate_reports",
    "auroc",
    "batch_uncertainties",
    "certainty_sampling",
    "class_level_uncertainty_summary",
    "class_uncertainties",
    "config_hash",
    "covariance_bundle",
    "dataset_class_correlation",
    "default_round_plans",
    "default_schedule",
    "edl_loss",
    "edl_loss_and_gradient",
    "entropy_uncertainties_batch",
    "evaluate",
    "export_domains_csv",
    "export_uncertainty_histograms",
    "generate_domain_pair",
    "import_domains_csv",
    "kl_regularizer",
    "load_checkpoint",
    "load_config",
    "log_gamma",
    "digamma",
    "trigamma",
    "mean_probabilities",
    "nll_loss",
    "parse_config",
    "predict_class",
    "predict_class_batch",
    "prediction_from_record",
    "quantify_record",
    "rank_class_pairs",
    "run_ablation",
    "run_ada",
    "run_experiment",
    "run_seed",
    "sample_uncertainty_entropy",
    "sample_uncertainty_variance",
    "save_checkpoint",
    "split_pools",
    "total_loss",
    "ug_loss",
    "ug_loss_and_gradient",
    "uncertainty_sampling",
    "variance_uncertainties_batch",
    "__version__",
]
