"""Feature-space analysis: PCA, per-sample entropy, correlation heatmaps."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from molfuse.errors import DataError
from molfuse.model import Model, model_forward
from molfuse.pipeline.dataset import DatasetBundle

REPRESENTATIONS = ("mol", "chem", "fused")

_AUX_KEYS = {"mol": "mol_pooled", "chem": "chem_pooled", "fused": "head_input"}


def pca_2d(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Project onto the top-2 principal axes via covariance eigendecomposition.

    Returns (coords (N, 2), explained-variance ratios (2,)). Component signs
    are fixed so each axis's largest-magnitude loading is positive.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 3:
        raise DataError(
            f"PCA needs a 2-D matrix with at least 3 samples, got {matrix.shape}")
    centered = matrix - matrix.mean(axis=0)
    cov = centered.T @ centered / (matrix.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]
    total = eigvals.sum()
    if total <= 0.0:
        raise DataError("PCA input has zero total variance")
    components = eigvecs[:, :2].copy()
    for k in range(components.shape[1]):
        pivot = np.argmax(np.abs(components[:, k]))
        if components[pivot, k] < 0:
            components[:, k] = -components[:, k]
    coords = centered @ components
    if coords.shape[1] < 2:  # single-feature input
        coords = np.hstack([coords, np.zeros((coords.shape[0], 1))])
    explained = eigvals[:2] / total
    if explained.size < 2:
        explained = np.append(explained, 0.0)
    return coords, explained


def shannon_entropy(matrix: np.ndarray) -> np.ndarray:
    """Per-sample entropy of the normalized absolute feature vector.

    p_i = |x_i| / sum|x_j|; H = -sum p_i ln p_i, with 0 ln 0 = 0. An all-zero
    row gets entropy 0.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise DataError(f"entropy expects an (N, D) matrix, got {matrix.shape}")
    magnitudes = np.abs(matrix)
    totals = magnitudes.sum(axis=1, keepdims=True)
    safe = np.where(totals > 0.0, totals, 1.0)
    p = magnitudes / safe
    terms = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return -terms.sum(axis=1)


def pearson_correlation(matrix: np.ndarray) -> np.ndarray:
    """Feature-by-feature Pearson correlation; zero-variance dims correlate 0
    with everything else and 1 with themselves."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise DataError(
            f"correlation needs at least 2 samples, got {matrix.shape}")
    centered = matrix - matrix.mean(axis=0)
    std = centered.std(axis=0)
    safe = np.where(std > 0.0, std, 1.0)
    normalized = centered / safe
    corr = normalized.T @ normalized / matrix.shape[0]
    flat = std == 0.0
    corr[flat, :] = 0.0
    corr[:, flat] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def collect_representations(
    model: Model, bundle: DatasetBundle, split: str | None = None,
) -> dict[str, dict]:
    """Per-molecule pooled vectors for each representation the variant has."""
    records = bundle.records if split is None else bundle.split_records(split)
    if len(records) < 3:
        raise DataError(
            f"analysis needs at least 3 records, got {len(records)}")
    available = {
        "full": ("mol", "chem", "fused"),
        "gin_only": ("mol",),
        "chem_only": ("chem",),
    }[model.variant]
    vectors: dict[str, list[np.ndarray]] = {name: [] for name in available}
    ids = []
    splits = []
    for record in records:
        features = record.features if model.variant != "chem_only" else None
        edges = record.edges if model.variant != "chem_only" else None
        chem = None if model.variant == "gin_only" else record.knowledge
        _, aux = model_forward(model, features, edges, chem, training=False)
        for name in available:
            vectors[name].append(aux[_AUX_KEYS[name]])
        ids.append(record.rid)
        splits.append(record.split)
    return {
        name: {"matrix": np.array(rows), "ids": ids, "splits": splits}
        for name, rows in vectors.items()
    }


def analyze_features(
    model: Model,
    bundle: DatasetBundle,
    split: str | None = None,
    out_dir=None,
) -> dict:
    """PCA/entropy/correlation per representation; CSVs and SVGs on request."""
    collected = collect_representations(model, bundle, split)
    results: dict = {}
    for name, data in collected.items():
        matrix = data["matrix"]
        coords, explained = pca_2d(matrix)
        entropy = shannon_entropy(matrix)
        corr = pearson_correlation(matrix)
        results[name] = {
            "ids": data["ids"],
            "splits": data["splits"],
            "pca_coords": coords,
            "explained_variance": explained,
            "entropy": entropy,
            "correlation": corr,
        }
    if out_dir is not None:
        _write_analysis(Path(out_dir), results)
    return results


def _write_analysis(out_dir: Path, results: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name, res in results.items():
        _write_pca_csv(out_dir / f"{name}_pca.csv", res)
        _write_entropy_csv(out_dir / f"{name}_entropy.csv", res)
        _write_matrix_csv(out_dir / f"{name}_correlation.csv", res["correlation"])
        _plot_pca(out_dir / f"{name}_pca.svg", name, res)
        _plot_entropy(out_dir / f"{name}_entropy.svg", name, res)
        _plot_correlation(out_dir / f"{name}_correlation.svg", name, res)
        summary[name] = {
            "samples": len(res["ids"]),
            "explained_variance_pc1": float(res["explained_variance"][0]),
            "explained_variance_pc2": float(res["explained_variance"][1]),
            "mean_entropy": float(res["entropy"].mean()),
        }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_pca_csv(path: Path, res: dict) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "split", "pc1", "pc2"])
        for rid, split, (x, y) in zip(res["ids"], res["splits"], res["pca_coords"]):
            writer.writerow([rid, split, repr(float(x)), repr(float(y))])


def _write_entropy_csv(path: Path, res: dict) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "split", "entropy"])
        for rid, split, h in zip(res["ids"], res["splits"], res["entropy"]):
            writer.writerow([rid, split, repr(float(h))])


def _write_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(matrix.shape[1])])
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def _plot_pca(path: Path, name: str, res: dict) -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(5, 4))
    palette = {"train": "#1f77b4", "valid": "#ff7f0e", "test": "#2ca02c", "": "#7f7f7f"}
    for split in sorted(set(res["splits"])):
        pick = [i for i, s in enumerate(res["splits"]) if s == split]
        ax.scatter(res["pca_coords"][pick, 0], res["pca_coords"][pick, 1],
                   s=12, alpha=0.7, label=split or "all",
                   color=palette.get(split, "#7f7f7f"))
    ev = res["explained_variance"]
    ax.set_xlabel(f"PC1 ({ev[0]:.1%})")
    ax.set_ylabel(f"PC2 ({ev[1]:.1%})")
    ax.set_title(f"{name} representation")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def _plot_entropy(path: Path, name: str, res: dict) -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(res["entropy"], bins=30, color="#1f77b4", alpha=0.85)
    ax.set_xlabel("per-sample entropy (nats)")
    ax.set_ylabel("count")
    ax.set_title(f"{name} feature entropy")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def _plot_correlation(path: Path, name: str, res: dict) -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(4.5, 4))
    image = ax.imshow(res["correlation"], vmin=-1.0, vmax=1.0, cmap="RdBu_r")
    fig.colorbar(image, ax=ax, shrink=0.8)
    ax.set_title(f"{name} feature correlations")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
