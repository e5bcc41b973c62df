"""Physicochemical descriptors computed from a molecular graph."""

from __future__ import annotations

from dataclasses import dataclass

from molfuse.chem.graph import AROMATIC, MolGraph

# IUPAC standard atomic weights (conventional values)
ATOMIC_MASSES = {
    "H": 1.008, "He": 4.002602, "Li": 6.94, "Be": 9.0121831, "B": 10.81,
    "C": 12.011, "N": 14.007, "O": 15.999, "F": 18.998403163, "Ne": 20.1797,
    "Na": 22.98976928, "Mg": 24.305, "Al": 26.9815385, "Si": 28.085,
    "P": 30.973761998, "S": 32.06, "Cl": 35.45, "Ar": 39.948, "K": 39.0983,
    "Ca": 40.078, "Ti": 47.867, "Cr": 51.9961, "Mn": 54.938044, "Fe": 55.845,
    "Co": 58.933194, "Ni": 58.6934, "Cu": 63.546, "Zn": 65.38, "Ga": 69.723,
    "Ge": 72.630, "As": 74.921595, "Se": 78.971, "Br": 79.904, "Kr": 83.798,
    "Sr": 87.62, "Mo": 95.95, "Ru": 101.07, "Rh": 102.90550, "Pd": 106.42,
    "Ag": 107.8682, "Cd": 112.414, "Sn": 118.710, "Sb": 121.760, "Te": 127.60,
    "I": 126.90447, "Xe": 131.293, "Ba": 137.327, "Gd": 157.25, "W": 183.84,
    "Pt": 195.084, "Au": 196.966569, "Hg": 200.592, "Tl": 204.38, "Pb": 207.2,
    "Bi": 208.98040,
}


@dataclass
class MolProperties:
    mol_weight: float
    heavy_atoms: int
    ring_count: int
    aromatic_ring_count: int
    h_bond_donors: int
    h_bond_acceptors: int
    net_charge: int


def compute_properties(g: MolGraph) -> MolProperties:
    weight = 0.0
    donors = 0
    acceptors = 0
    charge = 0
    for atom in g.atoms:
        weight += ATOMIC_MASSES[atom.element] + atom.hydrogens * ATOMIC_MASSES["H"]
        charge += atom.charge
        if atom.element in ("N", "O"):
            acceptors += 1
            if atom.hydrogens >= 1:
                donors += 1
    aromatic_rings = 0
    for ring in g.rings:
        m = len(ring)
        atoms_ok = all(g.atoms[idx].aromatic for idx in ring)
        bonds_ok = all(
            g.bond_order(ring[k], ring[(k + 1) % m]) == AROMATIC for k in range(m))
        if atoms_ok and bonds_ok:
            aromatic_rings += 1
    return MolProperties(
        mol_weight=weight,
        heavy_atoms=sum(1 for atom in g.atoms if atom.element != "H"),
        ring_count=len(g.rings),
        aromatic_ring_count=aromatic_rings,
        h_bond_donors=donors,
        h_bond_acceptors=acceptors,
        net_charge=charge,
    )
