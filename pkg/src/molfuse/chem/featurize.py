"""Fixed-layout atom feature matrix for the graph encoder."""

from __future__ import annotations

import numpy as np

from molfuse.chem.graph import MolGraph

ELEMENT_VOCAB = ["B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I"]  # + "other"
N_ELEMENT = len(ELEMENT_VOCAB) + 1  # 12
N_DEGREE = 7  # 0..6
N_CHARGE = 5  # -2..+2
N_HYDROGEN = 5  # 0..4
FEATURE_DIM = N_ELEMENT + N_DEGREE + N_CHARGE + 1 + N_HYDROGEN  # 30

_ELEMENT_INDEX = {symbol: k for k, symbol in enumerate(ELEMENT_VOCAB)}


def featurize(g: MolGraph) -> np.ndarray:
    out = np.zeros((len(g.atoms), FEATURE_DIM), dtype=np.float64)
    for row, atom in enumerate(g.atoms):
        out[row, _ELEMENT_INDEX.get(atom.element, N_ELEMENT - 1)] = 1.0
        base = N_ELEMENT
        out[row, base + min(atom.degree, N_DEGREE - 1)] = 1.0
        base += N_DEGREE
        out[row, base + min(max(atom.charge, -2), 2) + 2] = 1.0
        base += N_CHARGE
        out[row, base] = 1.0 if atom.aromatic else 0.0
        base += 1
        out[row, base + min(atom.hydrogens, N_HYDROGEN - 1)] = 1.0
    return out
