"""Benchmark task registry: label columns, split policy, standardization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from molfuse.chem.prompts import SIDER_ADR_CATEGORIES
from molfuse.errors import ConfigError

REGRESSION = "regression"
MULTILABEL = "multilabel"

SCAFFOLD = "scaffold"
RANDOM = "random"


@dataclass
class TaskSpec:
    """Dataset descriptor: what to read, how to split, how to report."""

    name: str
    task_type: str
    smiles_column: str
    label_columns: tuple[str, ...]
    split_policy: str = SCAFFOLD
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    label_mean: float | None = None
    label_std: float | None = None

    def __post_init__(self):
        if self.task_type not in (REGRESSION, MULTILABEL):
            raise ConfigError(f"unknown task type {self.task_type!r}")
        if self.split_policy not in (SCAFFOLD, RANDOM):
            raise ConfigError(f"unknown split policy {self.split_policy!r}")
        if len(self.fractions) != 3 or any(f <= 0 for f in self.fractions):
            raise ConfigError("split fractions must be three positive numbers")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ConfigError(
                f"split fractions must sum to 1, got {sum(self.fractions)}")
        if not self.label_columns:
            raise ConfigError("task needs at least one label column")
        if self.task_type == REGRESSION and len(self.label_columns) != 1:
            raise ConfigError("regression tasks are single-column")

    @property
    def num_tasks(self) -> int:
        return len(self.label_columns)

    def with_stats(self, mean: float, std: float) -> "TaskSpec":
        return replace(self, label_mean=mean, label_std=std)


_REGISTRY: dict[str, TaskSpec] = {
    "freesolv": TaskSpec(
        name="freesolv",
        task_type=REGRESSION,
        smiles_column="smiles",
        label_columns=("expt",),
        split_policy=RANDOM,
    ),
    "bace": TaskSpec(
        name="bace",
        task_type=MULTILABEL,
        smiles_column="mol",
        label_columns=("Class",),
        split_policy=SCAFFOLD,
    ),
    "clintox": TaskSpec(
        name="clintox",
        task_type=MULTILABEL,
        smiles_column="smiles",
        label_columns=("FDA_APPROVED", "CT_TOX"),
        split_policy=SCAFFOLD,
    ),
    "sider": TaskSpec(
        name="sider",
        task_type=MULTILABEL,
        smiles_column="smiles",
        label_columns=tuple(SIDER_ADR_CATEGORIES),
        split_policy=SCAFFOLD,
    ),
    "fusion_synthetic": TaskSpec(
        name="fusion_synthetic",
        task_type=MULTILABEL,
        smiles_column="smiles",
        label_columns=("active",),
        split_policy=RANDOM,
    ),
}


def task_names() -> list[str]:
    return sorted(_REGISTRY)


def get_task(name: str, **overrides) -> TaskSpec:
    """Fetch a fresh TaskSpec copy; overrides replace registry defaults."""
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown task {name!r}; registered tasks: {', '.join(task_names())}")
    spec = _REGISTRY[name]
    return replace(spec, **overrides) if overrides else replace(spec)
