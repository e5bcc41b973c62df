"""Deterministic synthetic benchmark fixtures with known structure.

Builds MoleculeNet-shaped CSVs by decorating a library of ring templates
with substituents, so scaffold groups stay small (good greedy-split
behavior) and labels follow known rules over graph descriptors. Also emits
a fusion probe set whose label is the AND of a graph motif (an aromatic
oxygen ring) and a keyword carried only by the knowledge text.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from molfuse.chem import SIDER_ADR_CATEGORIES, MolGraph, murcko_scaffold, parse_smiles
from molfuse.errors import DataError

RING_CORES = (
    "c1ccccc1",            # benzene
    "c1ccncc1",            # pyridine
    "c1ccoc1",             # furan
    "c1ccsc1",             # thiophene
    "c1cc[nH]c1",          # pyrrole
    "C1CCCCC1",            # cyclohexane
    "C1CCCC1",             # cyclopentane
    "C1CCOC1",             # oxolane
    "C1CCNC1",             # pyrrolidine
    "C1CCNCC1",            # piperidine
    "C1CCOCC1",            # oxane
    "C1CCSCC1",            # thiane
    "c1ccc2ccccc2c1",      # naphthalene
    "C1CCC2CCCCC2C1",      # decalin
    "c1ccc2c(c1)CCCC2",    # tetralin
    "C1CC2CCC1CC2",        # bicyclooctane
)

LINKERS = ("", "C", "CC", "CCC", "OC", "NC")

PREFIXES = (
    "", "C", "CC", "CCC", "CC(C)", "CC(=O)", "N#C", "OC", "OCC",
    "NC", "F", "Cl", "Br", "CO", "CN", "CCO",
)

SUFFIXES = (
    "", "C", "CC", "O", "N", "F", "Cl", "C(=O)O", "C(=O)N",
    "C#N", "OC", "C(F)(F)F", "S(=O)(=O)N", "CO",
)

ACYCLIC_BASES = ("C", "CC", "CCC", "CCCC", "CCCCC", "CC(C)C", "CC(C)CC",
                 "CCOC", "CCNC", "CSC")
ACYCLIC_TAILS = ("", "O", "N", "OC", "C(=O)O", "C(=O)N", "Cl", "Br",
                 "C#N", "OCC", "C(F)(F)F")

GROUP_SIZE_CYCLE = (3, 6, 1, 9, 4, 12, 2, 7, 5, 10)

FIXTURE_SIZES = {"freesolv": 642, "bace": 1513, "sider": 1427, "clintox": 1478}

KEYWORD_POSITIVE = "a strong potent high affinity binder engaging the pocket"
KEYWORD_NEGATIVE = "a weak inert negligible affinity nonbinder avoiding the pocket"


@dataclass
class SynthMolecule:
    smiles: str
    graph: MolGraph
    scaffold: str


def _descriptors(graph: MolGraph) -> dict[str, float]:
    heavy = [a for a in graph.atoms if a.element != "H"]
    n = len(heavy)
    count = lambda pred: sum(1 for a in heavy if pred(a))  # noqa: E731
    ring_atoms = graph.ring_atom_indices()
    return {
        "heavy": float(n),
        "frac_o": count(lambda a: a.element == "O") / n,
        "frac_n": count(lambda a: a.element == "N") / n,
        "frac_s": count(lambda a: a.element == "S") / n,
        "frac_halogen": count(lambda a: a.element in ("F", "Cl", "Br", "I")) / n,
        "frac_aromatic": count(lambda a: a.aromatic) / n,
        "frac_ring": len(ring_atoms) / n,
        "mean_h": sum(a.hydrogens for a in heavy) / n,
        "mean_degree": sum(a.degree for a in heavy) / n,
    }


def _scaffold_templates() -> list[str]:
    """Ring templates with pairwise-distinct scaffold keys, stable order."""
    templates: list[str] = []
    seen: set[str] = set()
    candidates = list(RING_CORES)
    for i, a in enumerate(RING_CORES):
        for b in RING_CORES[i:]:
            for linker in LINKERS:
                candidates.append(a + linker + b)
    for smiles in candidates:
        graph = parse_smiles(smiles)
        key = murcko_scaffold(graph)
        if key and key not in seen:
            seen.add(key)
            templates.append(smiles)
    return templates


def _decorations() -> list[tuple[str, str]]:
    return list(itertools.product(PREFIXES, SUFFIXES))


def _make(smiles: str) -> SynthMolecule | None:
    try:
        graph = parse_smiles(smiles)
    except Exception:
        return None
    return SynthMolecule(smiles=smiles, graph=graph,
                         scaffold=murcko_scaffold(graph))


def ring_molecules(n: int, offset: int = 0,
                   templates: list[str] | None = None) -> list[SynthMolecule]:
    """Exactly n unique ring-bearing molecules in small scaffold groups.

    Templates are visited round-robin with a bounded decoration budget per
    visit, so one pass over a large library yields small scaffold groups;
    small libraries are revisited with fresh decorations until n is reached.
    """
    templates = templates if templates is not None else _scaffold_templates()
    if not templates:
        raise DataError("no scaffold templates available")
    decorations = _decorations()
    out: list[SynthMolecule] = []
    seen: set[str] = set()
    cycle = itertools.cycle(GROUP_SIZE_CYCLE)
    cursors = [0] * len(templates)
    exhausted = 0
    t_idx = 0
    while len(out) < n:
        if t_idx >= len(templates):
            t_idx = 0
            if exhausted >= len(templates):
                raise DataError(
                    f"template library exhausted at {len(out)} of {n} molecules")
            exhausted = 0
        slot = (t_idx + offset) % len(templates)
        template = templates[slot]
        group_target = next(cycle)
        made = 0
        while (made < group_target and len(out) < n
               and cursors[slot] < len(decorations)):
            d_idx = cursors[slot]
            cursors[slot] += 1
            prefix, suffix = decorations[(d_idx + slot) % len(decorations)]
            mol = _make(prefix + template + suffix)
            if mol is None or mol.smiles in seen or not mol.scaffold:
                continue
            seen.add(mol.smiles)
            out.append(mol)
            made += 1
        if cursors[slot] >= len(decorations):
            exhausted += 1
        t_idx += 1
    return out


def acyclic_molecules(limit: int) -> list[SynthMolecule]:
    out: list[SynthMolecule] = []
    seen: set[str] = set()
    for base, tail in itertools.product(ACYCLIC_BASES, ACYCLIC_TAILS):
        if len(out) >= limit:
            break
        mol = _make(base + tail)
        if mol is None or mol.smiles in seen or mol.scaffold:
            continue
        seen.add(mol.smiles)
        out.append(mol)
    return out


def _freesolv_label(desc: dict[str, float], noise: float) -> float:
    """Hydration-energy-like target: linear in intensive descriptors."""
    return (-1.4
            - 8.0 * desc["frac_o"]
            - 5.5 * desc["frac_n"]
            - 1.5 * desc["frac_s"]
            + 2.6 * desc["frac_aromatic"]
            + 2.0 * desc["frac_halogen"]
            - 1.1 * desc["mean_h"]
            + noise)


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def build_freesolv(path: Path) -> int:
    n = FIXTURE_SIZES["freesolv"]
    rng = np.random.default_rng(101)
    acyclic = acyclic_molecules(100)
    ring = ring_molecules(n - len(acyclic), offset=0)
    molecules = acyclic + ring
    rows = []
    for mol in molecules:
        label = _freesolv_label(_descriptors(mol.graph), rng.normal(0.0, 0.2))
        rows.append([mol.smiles, f"{label:.6f}"])
    _write_csv(path, ["smiles", "expt"], rows)
    return len(rows)


def build_bace(path: Path) -> int:
    n = FIXTURE_SIZES["bace"]
    rng = np.random.default_rng(202)
    molecules = ring_molecules(n, offset=17)
    rows = []
    for mol in molecules:
        desc = _descriptors(mol.graph)
        score = (3.0 * (desc["frac_aromatic"] - 0.45)
                 + 2.0 * desc["frac_n"] + rng.normal(0.0, 1.0))
        rows.append([mol.smiles, str(int(score > 0.0))])
    _write_csv(path, ["mol", "Class"], rows)
    _assert_both_classes(rows, 1)
    return len(rows)


def build_clintox(path: Path) -> int:
    n = FIXTURE_SIZES["clintox"]
    rng = np.random.default_rng(303)
    molecules = ring_molecules(n, offset=41)
    rows = []
    for mol in molecules:
        desc = _descriptors(mol.graph)
        tox = (1.6 * desc["frac_halogen"] + 1.2 * desc["frac_s"]
               + rng.normal(0.0, 0.35)) > 0.45
        approved = not tox or rng.uniform() < 0.25
        rows.append([mol.smiles, str(int(approved)), str(int(tox))])
    _write_csv(path, ["smiles", "FDA_APPROVED", "CT_TOX"], rows)
    _assert_both_classes(rows, 1)
    _assert_both_classes(rows, 2)
    return len(rows)


def build_sider(path: Path, label_columns: tuple[str, ...]) -> int:
    n = FIXTURE_SIZES["sider"]
    rng = np.random.default_rng(404)
    molecules = ring_molecules(n, offset=73)
    weight_keys = ("frac_o", "frac_n", "frac_aromatic", "frac_halogen",
                   "frac_ring", "mean_h")
    weights = rng.normal(0.0, 1.2, size=(len(label_columns), len(weight_keys)))
    prevalence = rng.uniform(0.15, 0.85, size=len(label_columns))
    logits = np.empty((len(molecules), len(label_columns)))
    for i, mol in enumerate(molecules):
        desc = _descriptors(mol.graph)
        vec = np.array([desc[k] for k in weight_keys])
        logits[i] = weights @ vec + rng.normal(0.0, 0.8, size=len(label_columns))
    # threshold each column at its prevalence quantile so both classes exist
    cuts = np.quantile(logits, 1.0 - prevalence, axis=0, method="higher").diagonal()
    labels = (logits >= cuts).astype(int)
    rows = [[mol.smiles] + [str(v) for v in labels[i]]
            for i, mol in enumerate(molecules)]
    _write_csv(path, ["smiles", *label_columns], rows)
    for t in range(len(label_columns)):
        _assert_both_classes(rows, t + 1)
    return len(rows)


def _assert_both_classes(rows: list[list[str]], column: int) -> None:
    values = {row[column] for row in rows}
    if values != {"0", "1"}:
        raise DataError(f"fixture column {column} is single-class: {values}")


MOTIF_CORES = ("c1ccoc1",)
PLAIN_CORES = ("c1ccccc1", "c1ccncc1", "c1ccsc1", "C1CCCCC1",
               "C1CCNCC1", "c1ccc2ccccc2c1")


def _fusion_pool(n_each: int) -> tuple[list[SynthMolecule], list[SynthMolecule]]:
    """Motif molecules contain an aromatic-oxygen ring; plain ones never do."""
    motif_templates = [core + linker + other
                       for core in MOTIF_CORES
                       for linker in ("", "C", "CC")
                       for other in ("", *PLAIN_CORES)]
    plain_templates = [a + linker + b
                       for a in PLAIN_CORES
                       for linker in ("", "C", "CC")
                       for b in ("", *PLAIN_CORES)]
    motif = ring_molecules(n_each, templates=[t for t in motif_templates
                                              if _make(t) is not None])
    plain = ring_molecules(n_each, templates=[t for t in plain_templates
                                              if _make(t) is not None])
    has_motif = lambda m: any(  # noqa: E731
        a.aromatic and a.element == "O" for a in m.graph.atoms)
    bad = [m for m in motif if not has_motif(m)] + [m for m in plain if has_motif(m)]
    if bad:
        raise DataError(f"fusion motif contamination: {bad[0].smiles}")
    return motif, plain


def build_fusion(csv_path: Path, knowledge_path: Path, n: int = 400) -> int:
    """Label = (aromatic-O ring present) AND (text says strong binder)."""
    rng = np.random.default_rng(505)
    motif, plain = _fusion_pool(n // 2)
    molecules = [m for pair in zip(motif, plain) for m in pair]
    rows = []
    knowledge = []
    for mol in molecules:
        is_motif = any(a.aromatic and a.element == "O" for a in mol.graph.atoms)
        keyword = bool(rng.uniform() < 0.5)
        verdict = KEYWORD_POSITIVE if keyword else KEYWORD_NEGATIVE
        text = f"expert assessment: the compound is {verdict}."
        label = int(is_motif and keyword)
        rows.append([mol.smiles, str(label)])
        knowledge.append({"smiles": mol.smiles, "text": text})
    _write_csv(csv_path, ["smiles", "active"], rows)
    with knowledge_path.open("w", encoding="utf-8") as fh:
        for row in knowledge:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    _assert_both_classes(rows, 1)
    return len(rows)


def generate_fixtures(
        out_dir,
        sider_columns: tuple[str, ...] = tuple(SIDER_ADR_CATEGORIES)) -> dict[str, str]:
    """Write every fixture CSV (plus fusion knowledge) into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts = {
        "freesolv": build_freesolv(out / "freesolv.csv"),
        "bace": build_bace(out / "bace.csv"),
        "sider": build_sider(out / "sider.csv", sider_columns),
        "clintox": build_clintox(out / "clintox.csv"),
        "fusion": build_fusion(out / "fusion.csv", out / "fusion_knowledge.jsonl"),
    }
    for name, expected in FIXTURE_SIZES.items():
        if counts[name] != expected:
            raise DataError(
                f"fixture {name} has {counts[name]} rows, expected {expected}")
    return {name: str(out / f"{name}.csv") for name in counts}
