"""Dataset ingestion, splitting, training, metrics, and feature analysis."""

from molfuse.pipeline.analysis import (
    analyze_features,
    collect_representations,
    pca_2d,
    pearson_correlation,
    shannon_entropy,
)
from molfuse.pipeline.dataset import (
    DatasetBundle,
    Record,
    SkipEntry,
    attach_knowledge,
    load_dataset,
    load_knowledge_texts,
    write_skip_log,
)
from molfuse.pipeline.metrics import auroc, multi_task_auroc, rmse
from molfuse.pipeline.splits import (
    SPLITS,
    assign_splits,
    destandardize,
    split_table,
    standardize_targets,
)
from molfuse.pipeline.synth import generate_fixtures
from molfuse.pipeline.tasks import (
    MULTILABEL,
    RANDOM,
    REGRESSION,
    SCAFFOLD,
    TaskSpec,
    get_task,
    task_names,
)
from molfuse.pipeline.train import (
    EpochReport,
    TrainConfig,
    TrainResult,
    evaluate,
    train_model,
)

__all__ = [
    "DatasetBundle", "EpochReport", "MULTILABEL", "RANDOM", "REGRESSION",
    "Record", "SCAFFOLD", "SPLITS", "SkipEntry", "TaskSpec", "TrainConfig",
    "TrainResult", "analyze_features", "assign_splits", "attach_knowledge",
    "auroc", "collect_representations", "destandardize", "evaluate",
    "generate_fixtures", "get_task", "load_dataset", "load_knowledge_texts",
    "multi_task_auroc", "pca_2d", "pearson_correlation", "rmse",
    "shannon_entropy", "split_table", "standardize_targets", "task_names",
    "train_model", "write_skip_log",
]
