"""CSV ingestion: parse, featurize, scaffold, and track skipped rows."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from molfuse.chem import MolGraph, featurize, murcko_scaffold, parse_smiles
from molfuse.errors import DataError, MolfuseError, ParseError
from molfuse.knowledge import EmbeddingProvider, KnowledgeEmbedding
from molfuse.pipeline.tasks import REGRESSION, TaskSpec

SKIP_RATE_LIMIT = 0.05


@dataclass
class Record:
    rid: str
    smiles: str
    graph: MolGraph
    labels: np.ndarray          # (T,) float64; masked-out cells hold 0.0
    label_mask: np.ndarray      # (T,) bool, True where the cell was present
    scaffold: str               # canonical scaffold key ("" for acyclic)
    knowledge: KnowledgeEmbedding | None = None
    split: str = ""

    @property
    def features(self) -> np.ndarray:
        return featurize(self.graph)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.graph.bonds]


@dataclass
class SkipEntry:
    row: int         # 1-based CSV data-row index
    smiles: str
    reason: str


@dataclass
class DatasetBundle:
    spec: TaskSpec
    records: list[Record]
    skip_log: list[SkipEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def split_records(self, split: str) -> list[Record]:
        return [r for r in self.records if r.split == split]

    def label_matrix(self, split: str | None = None):
        recs = self.records if split is None else self.split_records(split)
        labels = np.array([r.labels for r in recs])
        mask = np.array([r.label_mask for r in recs])
        return labels, mask


def _parse_label_cell(raw: str | None) -> tuple[float, bool]:
    if raw is None:
        return 0.0, False
    text = raw.strip()
    if not text:
        return 0.0, False
    return float(text), True


def load_dataset(csv_path, spec: TaskSpec, allow_skips: bool = False) -> DatasetBundle:
    """Read a benchmark-style CSV into parsed, featurized records.

    Unparseable SMILES and malformed labels are skipped and logged; a skip
    rate above 5% raises unless allow_skips is set.
    """
    path = Path(csv_path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in (spec.smiles_column, *spec.label_columns)
                   if c not in header]
        if missing:
            raise DataError(
                f"dataset {path.name} is missing columns: {', '.join(missing)}")
        rows = list(reader)

    records: list[Record] = []
    skip_log: list[SkipEntry] = []
    for row_idx, row in enumerate(rows, start=1):
        smiles = (row.get(spec.smiles_column) or "").strip()
        if not smiles:
            skip_log.append(SkipEntry(row_idx, "", "empty SMILES cell"))
            continue
        try:
            graph = parse_smiles(smiles)
        except ParseError as exc:
            skip_log.append(SkipEntry(row_idx, smiles, f"SMILES parse error: {exc}"))
            continue
        labels = np.zeros(spec.num_tasks)
        mask = np.zeros(spec.num_tasks, dtype=bool)
        bad_label = None
        for t, column in enumerate(spec.label_columns):
            try:
                value, present = _parse_label_cell(row.get(column))
            except ValueError:
                bad_label = f"non-numeric label in column {column!r}"
                break
            if present and spec.task_type != REGRESSION and value not in (0.0, 1.0):
                bad_label = f"non-binary label {value} in column {column!r}"
                break
            labels[t], mask[t] = value, present
        if bad_label is not None:
            skip_log.append(SkipEntry(row_idx, smiles, bad_label))
            continue
        if spec.task_type == REGRESSION and not mask.all():
            skip_log.append(SkipEntry(row_idx, smiles, "missing regression target"))
            continue
        if not mask.any():
            skip_log.append(SkipEntry(row_idx, smiles, "no labels present"))
            continue
        try:
            scaffold = murcko_scaffold(graph)
        except MolfuseError as exc:
            skip_log.append(SkipEntry(row_idx, smiles, f"scaffold failure: {exc}"))
            continue
        records.append(Record(
            rid=f"m{len(records):06d}",
            smiles=smiles,
            graph=graph,
            labels=labels,
            label_mask=mask,
            scaffold=scaffold,
        ))

    if not records:
        raise DataError(f"dataset {path.name} produced no usable records")
    skip_rate = len(skip_log) / (len(records) + len(skip_log))
    if skip_rate > SKIP_RATE_LIMIT and not allow_skips:
        raise DataError(
            f"skip rate {skip_rate:.1%} exceeds {SKIP_RATE_LIMIT:.0%} "
            f"({len(skip_log)} of {len(rows)} rows); pass allow_skips to proceed")
    return DatasetBundle(spec=spec, records=records, skip_log=skip_log)


def load_knowledge_texts(jsonl_path) -> dict[str, str]:
    """Read {smiles, text} JSON lines into a lookup table."""
    path = Path(jsonl_path)
    if not path.exists():
        raise DataError(f"knowledge text file not found: {path}")
    texts: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(
                    f"{path.name} line {line_no}: invalid JSON ({exc.msg})") from exc
            if "smiles" not in row or "text" not in row:
                raise DataError(
                    f"{path.name} line {line_no}: rows need smiles and text keys")
            if not str(row["text"]).strip():
                raise DataError(f"{path.name} line {line_no}: text is empty")
            texts[row["smiles"]] = row["text"]
    return texts


def attach_knowledge(
    bundle: DatasetBundle,
    texts: dict[str, str],
    provider: EmbeddingProvider,
) -> None:
    """Embed each record's knowledge text in place; every record must have one."""
    missing = [r.smiles for r in bundle.records if r.smiles not in texts]
    if missing:
        raise DataError(
            f"{len(missing)} records lack knowledge text "
            f"(first: {missing[0]!r})")
    cache: dict[str, KnowledgeEmbedding] = {}
    for record in bundle.records:
        text = texts[record.smiles]
        if text not in cache:
            cache[text] = provider.embed(text)
        record.knowledge = cache[text]


def write_skip_log(bundle: DatasetBundle, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "smiles", "reason"])
        for entry in bundle.skip_log:
            writer.writerow([entry.row, entry.smiles, entry.reason])
