"""SMILES parsing, featurization, scaffolds, descriptors, and prompts."""

from molfuse.chem.graph import AROMATIC, AtomRecord, BondOrder, MolGraph, minimum_cycle_basis
from molfuse.chem.smiles import parse_smiles, to_smiles
from molfuse.chem.featurize import FEATURE_DIM, featurize
from molfuse.chem.scaffold import murcko_scaffold, murcko_scaffold_graph
from molfuse.chem.properties import ATOMIC_MASSES, MolProperties, compute_properties
from molfuse.chem.prompts import SIDER_ADR_CATEGORIES, TASK_OBJECTIVES, render_prompt

__all__ = [
    "AROMATIC",
    "ATOMIC_MASSES",
    "AtomRecord",
    "BondOrder",
    "FEATURE_DIM",
    "MolGraph",
    "MolProperties",
    "SIDER_ADR_CATEGORIES",
    "TASK_OBJECTIVES",
    "compute_properties",
    "featurize",
    "minimum_cycle_basis",
    "murcko_scaffold",
    "murcko_scaffold_graph",
    "parse_smiles",
    "render_prompt",
    "to_smiles",
]
