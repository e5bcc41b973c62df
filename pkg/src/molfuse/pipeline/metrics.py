"""Evaluation metrics: rank-based AUROC with tie handling, RMSE."""

from __future__ import annotations

import numpy as np

from molfuse.errors import DataError, ShapeError


def auroc(scores, labels) -> float:
    """Probability a random positive outranks a random negative.

    Computed from rank sums (Mann-Whitney U); tied scores receive average
    ranks, which credits each tied positive/negative pair exactly 1/2.
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if scores.shape != labels.shape:
        raise ShapeError(
            f"scores length {scores.size} does not match labels {labels.size}")
    if scores.size == 0:
        raise DataError("auroc needs at least one score")
    if not np.isin(labels, (0.0, 1.0)).all():
        raise DataError("auroc labels must be 0 or 1")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            f"auroc is undefined with a single class "
            f"({n_pos} positives, {n_neg} negatives)")
    ranks = _average_ranks(scores)
    pos_rank_sum = float(ranks[labels == 1.0].sum())
    u = pos_rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks; ties share the average of their rank range."""
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # ranks i+1 .. j+1 (1-based) averaged over the tie block
        avg = (i + j) / 2.0 + 1.0
        ranks[order[i:j + 1]] = avg
        i = j + 1
    return ranks


def multi_task_auroc(scores, labels, mask=None) -> tuple[float, list[dict]]:
    """Unweighted mean AUROC over tasks where both classes are present.

    scores/labels are (N, T); mask marks which labels exist. Tasks without
    both classes are excluded and reported in the per-task breakdown.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape or scores.ndim != 2:
        raise ShapeError(
            f"scores {scores.shape} and labels {labels.shape} must both be (N, T)")
    if mask is None:
        mask = np.ones(labels.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    per_task: list[dict] = []
    values: list[float] = []
    for t in range(scores.shape[1]):
        keep = mask[:, t]
        entry: dict = {"task": t, "labelled": int(keep.sum())}
        try:
            value = auroc(scores[keep, t], labels[keep, t])
        except DataError as exc:
            entry["auroc"] = None
            entry["skipped"] = str(exc)
        else:
            entry["auroc"] = value
            values.append(value)
        per_task.append(entry)
    if not values:
        raise DataError("no task had both classes present")
    return float(np.mean(values)), per_task


def rmse(preds, targets) -> float:
    """Root mean squared error; callers pass de-standardized values."""
    preds = np.asarray(preds, dtype=np.float64).reshape(-1)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if preds.shape != targets.shape:
        raise ShapeError(
            f"predictions length {preds.size} does not match targets {targets.size}")
    if preds.size == 0:
        raise DataError("rmse needs at least one value")
    return float(np.sqrt(np.mean((preds - targets) ** 2)))
