"""Prompt rendering for chemist-knowledge elicitation."""

from __future__ import annotations

from molfuse.errors import ConfigError
from molfuse.chem.graph import MolGraph
from molfuse.chem.properties import compute_properties

SIDER_ADR_CATEGORIES = [
    "Hepatobiliary disorders",
    "Metabolism and nutrition disorders",
    "Product issues",
    "Eye disorders",
    "Investigations",
    "Musculoskeletal and connective tissue disorders",
    "Gastrointestinal disorders",
    "Social circumstances",
    "Immune system disorders",
    "Reproductive system and breast disorders",
    "Neoplasms (benign, malignant, and unspecified)",
    "General disorders and administration site conditions",
    "Endocrine disorders",
    "Surgical and medical procedures",
    "Vascular disorders",
    "Blood and lymphatic system disorders",
    "Skin and subcutaneous tissue disorders",
    "Congenital, familial, and genetic disorders",
    "Infections and infestations",
    "Respiratory, thoracic, and mediastinal disorders",
    "Psychiatric disorders",
    "Renal and urinary disorders",
    "Pregnancy, puerperium, and perinatal conditions",
    "Ear and labyrinth disorders",
    "Cardiac disorders",
    "Nervous system disorders",
    "Injury, poisoning, and procedural complications",
]

_SIDER_LIST = "\n".join(
    f"{k}. {name}" for k, name in enumerate(SIDER_ADR_CATEGORIES, start=1)
)

TASK_OBJECTIVES = {
    "freesolv": (
        "This task involves predicting the hydration free energy of small "
        "molecules in water, which reflects solvation behavior and plays a key "
        "role in drug absorption and distribution."
    ),
    "bace": (
        "A binary classification task for predicting the binding affinity of "
        "molecules with human beta-secretase 1 (BACE-1), a therapeutic target "
        "in Alzheimer's disease."
    ),
    "clintox": (
        "A toxicity classification task that aims to distinguish drugs "
        "approved by the FDA from those that have failed clinical trials due "
        "to toxicity."
    ),
    "sider": (
        "This multi-label classification task predicts potential adverse drug "
        "reactions (ADRs) across 27 physiological systems. The full list of "
        "ADR categories is as follows:\n" + _SIDER_LIST
    ),
}

_TEMPLATE = """You are an experienced medicinal chemist analyzing a candidate molecule.

[Molecular structure]
SMILES: {smiles}

[Computed physicochemical properties]
Molecular weight: {mw:.2f}
Heavy atoms: {heavy}
Rings: {rings} (aromatic: {aromatic_rings})
H-bond donors: {hbd}
H-bond acceptors: {hba}
Net formal charge: {charge:+d}

[Prediction objective]
{objective}

[Instructions]
Emulate chemist reasoning about this molecule with respect to the prediction \
objective. Cover structural interpretations, functional group identification, \
physicochemical property inference, and ADMET risk assessment. Ground every \
statement in the structure and properties above, and keep the analysis \
specific to this molecule."""


def render_prompt(g: MolGraph, task) -> str:
    name = getattr(task, "name", task)
    if not isinstance(name, str) or name not in TASK_OBJECTIVES:
        known = ", ".join(sorted(TASK_OBJECTIVES))
        raise ConfigError(f"unknown task {name!r}; registered tasks: {known}")
    props = compute_properties(g)
    smiles = g.source_smiles if g.source_smiles else "(not recorded)"
    return _TEMPLATE.format(
        smiles=smiles,
        mw=props.mol_weight,
        heavy=props.heavy_atoms,
        rings=props.ring_count,
        aromatic_rings=props.aromatic_ring_count,
        hbd=props.h_bond_donors,
        hba=props.h_bond_acceptors,
        charge=props.net_charge,
        objective=TASK_OBJECTIVES[name],
    )
