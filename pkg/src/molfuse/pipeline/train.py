"""Training loop: minibatch Adam, plateau LR schedule, early stopping."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from molfuse import numkit as nk
from molfuse.errors import DataError, NumericError
from molfuse.model import (
    CLASSIFICATION,
    Model,
    model_forward,
    predict,
    sample_loss,
    save_checkpoint,
)
from molfuse.numkit import AdamState, PlateauScheduler, adam_step
from molfuse.pipeline.dataset import DatasetBundle, Record
from molfuse.pipeline.metrics import multi_task_auroc, rmse
from molfuse.pipeline.splits import destandardize, split_table
from molfuse.pipeline.tasks import REGRESSION


@dataclass
class TrainConfig:
    max_epochs: int = 100
    batch_size: int = 128
    lr: float = 3e-4
    weight_decay: float = 1e-3
    scheduler_factor: float = 0.5
    scheduler_patience: int = 5
    early_stop_patience: int = 10
    seed: int = 0
    # Scalar fusion gates start at zero, so their gradient signal is weak
    # relative to batch noise; a faster rate for just those two scalars lets
    # the knowledge pathway open at small-dataset scale. 1.0 = single rate.
    gate_lr_scale: float = 1.0


@dataclass
class EpochReport:
    epoch: int
    train_loss: float
    val_metric: float
    lr: float
    early_stop_counter: int
    wall_time: float  # informational; excluded from the deterministic run log

    def log_line(self) -> str:
        # wall time is dropped so reruns with one seed are byte-identical
        row = asdict(self)
        row.pop("wall_time")
        return json.dumps(row, sort_keys=True)


@dataclass
class TrainResult:
    model: Model
    reports: list[EpochReport]
    best_epoch: int
    best_metric: float
    test_metrics: dict = field(default_factory=dict)


def _forward_record(model: Model, record: Record, training: bool, rng):
    chem = record.knowledge
    features = record.features if model.variant != "chem_only" else None
    edges = record.edges if model.variant != "chem_only" else None
    if model.variant == "gin_only":
        chem = None
    return model_forward(model, features, edges, chem,
                         training=training, dropout_rng=rng)


def evaluate(model: Model, bundle: DatasetBundle, split: str) -> dict:
    """Split-level metrics: RMSE in original units, or mean AUROC."""
    records = bundle.split_records(split)
    if not records:
        raise DataError(f"split {split!r} has no records")
    preds = np.array([
        predict(model,
                r.features if model.variant != "chem_only" else None,
                r.edges if model.variant != "chem_only" else None,
                None if model.variant == "gin_only" else r.knowledge)
        for r in records])
    labels = np.array([r.labels for r in records])
    mask = np.array([r.label_mask for r in records])
    if bundle.spec.task_type == REGRESSION:
        value = rmse(destandardize(bundle.spec, preds[:, 0]),
                     destandardize(bundle.spec, labels[:, 0]))
        return {"metric": value, "rmse": value, "split": split}
    mean_auc, per_task = multi_task_auroc(preds, labels, mask)
    return {"metric": mean_auc, "auroc": mean_auc,
            "per_task": per_task, "split": split}


def _snapshot(model: Model) -> dict[str, np.ndarray]:
    return {name: p.data.copy() for name, p in model.params.items()}


def _restore(model: Model, snapshot: dict[str, np.ndarray]) -> None:
    for name, p in model.params.items():
        p.data = snapshot[name].copy()


def train_model(
    model: Model,
    bundle: DatasetBundle,
    cfg: TrainConfig,
    out_dir=None,
    run_config: dict | None = None,
    ckpt_extra: dict | None = None,
) -> TrainResult:
    """Fit on the train split, schedule on the validation metric.

    Classification validates on mean AUROC (maximized); regression on RMSE
    in original units (minimized). The best-validation parameter snapshot is
    restored into the model and written to best.ckpt when out_dir is set.
    """
    train_records = bundle.split_records("train")
    if not train_records:
        raise DataError("no train split assigned; run assign_splits first")
    classification = model.head_cfg.task_type == CLASSIFICATION
    mode = "max" if classification else "min"

    opt = AdamState(lr=cfg.lr, weight_decay=cfg.weight_decay)
    scheduler = PlateauScheduler(
        lr=cfg.lr, factor=cfg.scheduler_factor,
        patience=cfg.scheduler_patience, mode=mode)
    gate_names = [name for name in model.params
                  if name.endswith(("alpha_xattn", "alpha_dense"))]
    shuffle_rng = np.random.default_rng(cfg.seed)
    dropout_rng = np.random.default_rng(cfg.seed + 1)

    best_metric = -np.inf if mode == "max" else np.inf
    best_epoch = -1
    best_state = _snapshot(model)
    stall = 0
    reports: list[EpochReport] = []
    started = time.perf_counter()

    for epoch in range(1, cfg.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_records))
        epoch_loss = 0.0
        for batch_no, start in enumerate(range(0, len(order), cfg.batch_size)):
            batch = [train_records[i] for i in order[start:start + cfg.batch_size]]
            losses = []
            for record in batch:
                outputs, _ = _forward_record(model, record, True, dropout_rng)
                losses.append(sample_loss(model, outputs, record.labels,
                                          record.label_mask))
            total = losses[0]
            for extra in losses[1:]:
                total = total + extra
            batch_loss = total * (1.0 / len(batch))
            value = batch_loss.item()
            if not np.isfinite(value):
                raise NumericError(
                    f"non-finite training loss {value} at epoch {epoch}, "
                    f"batch {batch_no} (lr {scheduler.lr:.3g})")
            for p in model.params.values():
                p.zero_grad()
            nk.backward(batch_loss)
            grads = {name: p.grad for name, p in model.params.items()
                     if p.grad is not None}
            opt.lr = scheduler.lr
            overrides = None
            if cfg.gate_lr_scale != 1.0 and gate_names:
                overrides = {name: scheduler.lr * cfg.gate_lr_scale
                             for name in gate_names}
            adam_step(model.params, grads, opt, param_lrs=overrides)
            epoch_loss += value * len(batch)
        epoch_loss /= len(train_records)

        val = evaluate(model, bundle, "valid")["metric"]
        improved = val > best_metric if mode == "max" else val < best_metric
        if improved:
            best_metric, best_epoch, stall = val, epoch, 0
            best_state = _snapshot(model)
        else:
            stall += 1
        scheduler.step(val)
        reports.append(EpochReport(
            epoch=epoch, train_loss=epoch_loss, val_metric=val,
            lr=scheduler.lr, early_stop_counter=stall,
            wall_time=time.perf_counter() - started))
        if stall >= cfg.early_stop_patience:
            break

    _restore(model, best_state)
    result = TrainResult(model=model, reports=reports,
                         best_epoch=best_epoch, best_metric=best_metric)
    if bundle.split_records("test"):
        result.test_metrics = evaluate(model, bundle, "test")
    if out_dir is not None:
        _write_run_dir(Path(out_dir), model, bundle, cfg, result, run_config,
                       ckpt_extra)
    return result


def _write_run_dir(out_dir: Path, model: Model, bundle: DatasetBundle,
                   cfg: TrainConfig, result: TrainResult,
                   run_config: dict | None,
                   ckpt_extra: dict | None = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    config = dict(run_config or {})
    config.setdefault("train", asdict(cfg))
    config.setdefault("task", bundle.spec.name)
    config.setdefault("variant", model.variant)
    (out_dir / "config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    with (out_dir / "splits.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "split", "scaffold"])
        writer.writerows(split_table(bundle))

    with (out_dir / "epochs.jsonl").open("w", encoding="utf-8") as fh:
        for report in result.reports:
            fh.write(report.log_line() + "\n")

    extra = dict(ckpt_extra or {})
    extra.update({
        "task": bundle.spec.name,
        "best_epoch": result.best_epoch,
        "best_val_metric": result.best_metric,
    })
    if bundle.spec.label_mean is not None:
        extra["label_mean"] = bundle.spec.label_mean
        extra["label_std"] = bundle.spec.label_std
    save_checkpoint(out_dir / "best.ckpt", model, extra=extra)

    metrics = {
        "best_epoch": result.best_epoch,
        "best_val_metric": result.best_metric,
        "epochs_run": len(result.reports),
        "test": {k: v for k, v in result.test_metrics.items() if k != "split"},
    }
    (out_dir / "metrics.json").write_text(
        json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _plot_history(out_dir / "history.svg", result.reports,
                  "auroc" if model.head_cfg.task_type == CLASSIFICATION else "rmse")


def _plot_history(path: Path, reports: list[EpochReport], metric_name: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = [r.epoch for r in reports]
    fig, (ax_loss, ax_val) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_loss.plot(epochs, [r.train_loss for r in reports], color="#1f77b4")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("train loss")
    ax_val.plot(epochs, [r.val_metric for r in reports], color="#d62728")
    ax_val.set_xlabel("epoch")
    ax_val.set_ylabel(f"validation {metric_name}")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
