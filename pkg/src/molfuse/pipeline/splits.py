"""Train/valid/test assignment: scaffold-grouped greedy or seeded random."""

from __future__ import annotations

import warnings

import numpy as np

from molfuse.errors import ConfigError, DataError
from molfuse.pipeline.dataset import DatasetBundle
from molfuse.pipeline.tasks import RANDOM, REGRESSION, SCAFFOLD, TaskSpec

SPLITS = ("train", "valid", "test")


def assign_splits(bundle: DatasetBundle) -> dict[str, int]:
    """Assign every record to exactly one split, in place.

    Scaffold policy groups records by scaffold key, orders groups by
    descending size (key-lexicographic tiebreak), and fills train to the
    train fraction, then valid, with the remainder as test — so no scaffold
    key ever spans two splits. Random policy is a seeded shuffle cut at the
    fraction boundaries.
    """
    spec = bundle.spec
    n = len(bundle.records)
    if n < 3:
        raise DataError(f"need at least 3 records to split, got {n}")
    if spec.split_policy == SCAFFOLD:
        order = _scaffold_order(bundle)
    elif spec.split_policy == RANDOM:
        rng = np.random.default_rng(spec.seed)
        order = [[int(i)] for i in rng.permutation(n)]
    else:
        raise ConfigError(f"unknown split policy {spec.split_policy!r}")

    train_target = spec.fractions[0] * n
    valid_target = spec.fractions[1] * n
    counts = {"train": 0, "valid": 0, "test": 0}
    for group in order:
        if counts["train"] < train_target:
            name = "train"
            if len(group) > train_target:
                warnings.warn(
                    f"scaffold group of {len(group)} records exceeds the "
                    f"train budget of {train_target:.0f}; assigned to train")
        elif counts["valid"] < valid_target:
            name = "valid"
        else:
            name = "test"
        for idx in group:
            bundle.records[idx].split = name
        counts[name] += len(group)
    for name in ("valid", "test"):
        if counts[name] == 0:
            raise DataError(
                f"{name} split is empty; dataset too small or groups too large")
    return counts


def _scaffold_order(bundle: DatasetBundle) -> list[list[int]]:
    groups: dict[str, list[int]] = {}
    for idx, record in enumerate(bundle.records):
        groups.setdefault(record.scaffold, []).append(idx)
    return [groups[key]
            for key in sorted(groups, key=lambda k: (-len(groups[k]), k))]


def standardize_targets(bundle: DatasetBundle, mean: float | None = None,
                        std: float | None = None) -> TaskSpec:
    """Fit mean/std on the train split only and transform every record.

    Pass explicit ``mean``/``std`` to reuse statistics fitted elsewhere
    (e.g. when scoring a new dataset against a trained checkpoint).
    Returns the updated spec (also stored back on the bundle). Regression
    only; raises on zero-variance train targets.
    """
    spec = bundle.spec
    if spec.task_type != REGRESSION:
        raise ConfigError("standardization applies to regression tasks only")
    if (mean is None) != (std is None):
        raise ConfigError("provide both mean and std, or neither")
    if mean is None:
        train = bundle.split_records("train")
        if not train:
            raise DataError("no train split assigned; run assign_splits first")
        values = np.array([r.labels[0] for r in train])
        mean = float(values.mean())
        std = float(values.std())
    if std <= 1e-12:
        raise DataError("train targets have zero variance; cannot standardize")
    for record in bundle.records:
        record.labels = (record.labels - mean) / std
    bundle.spec = spec.with_stats(mean, std)
    return bundle.spec


def destandardize(spec: TaskSpec, values: np.ndarray) -> np.ndarray:
    """Map standardized model outputs back to original target units."""
    values = np.asarray(values, dtype=np.float64)
    if spec.label_mean is None or spec.label_std is None:
        return values
    return values * spec.label_std + spec.label_mean


def split_table(bundle: DatasetBundle) -> list[tuple[str, str, str]]:
    """(id, split, scaffold key) rows for splits.csv."""
    return [(r.rid, r.split, r.scaffold) for r in bundle.records]
