"""Bemis-Murcko scaffold extraction and order-independent canonical keys."""

from __future__ import annotations

from molfuse.chem.graph import AtomRecord, BondOrder, MolGraph


def murcko_scaffold_graph(g: MolGraph) -> MolGraph | None:
    """Iteratively prune terminal non-ring atoms; None for acyclic molecules."""
    ring_atoms = g.ring_atom_indices()
    if not ring_atoms:
        return None
    keep = set(range(len(g.atoms)))
    while True:
        degree = {idx: 0 for idx in keep}
        for i, j, _ in g.bonds:
            if i in keep and j in keep:
                degree[i] += 1
                degree[j] += 1
        prunable = {idx for idx in keep if degree[idx] <= 1 and idx not in ring_atoms}
        if not prunable:
            break
        keep -= prunable
    remap = {old: new for new, old in enumerate(sorted(keep))}
    atoms = [
        AtomRecord(
            element=g.atoms[old].element,
            charge=g.atoms[old].charge,
            hydrogens=0,
            aromatic=g.atoms[old].aromatic,
        )
        for old in sorted(keep)
    ]
    bonds = [
        (remap[i], remap[j], order)
        for i, j, order in g.bonds
        if i in keep and j in keep
    ]
    return MolGraph(atoms=atoms, bonds=bonds)


def murcko_scaffold(g: MolGraph) -> str:
    scaffold = murcko_scaffold_graph(g)
    if scaffold is None:
        return ""
    labels = [
        (atom.element, atom.charge, atom.aromatic) for atom in scaffold.atoms
    ]
    edges = {
        (min(i, j), max(i, j)): order for i, j, order in scaffold.bonds
    }
    return _canonical_form(labels, edges)


def _canonical_form(
    labels: list[tuple], edges: dict[tuple[int, int], BondOrder]
) -> str:
    n = len(labels)
    adj: list[list[tuple[int, str]]] = [[] for _ in range(n)]
    for (i, j), order in edges.items():
        tag = str(order)
        adj[i].append((j, tag))
        adj[j].append((i, tag))

    def dense_rank(keys: list) -> list[int]:
        order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
        return [order[key] for key in keys]

    def refine(colors: list[int]) -> list[int]:
        while True:
            keys = [
                (colors[v], tuple(sorted((tag, colors[u]) for u, tag in adj[v])))
                for v in range(n)
            ]
            new = dense_rank(keys)
            if new == colors:
                return new
            colors = new

    def serialize(colors: list[int]) -> str:
        position = sorted(range(n), key=lambda v: colors[v])
        rank = {v: k for k, v in enumerate(position)}
        node_part = ";".join(
            f"{labels[v][0]}{labels[v][1]:+d}{'a' if labels[v][2] else '.'}"
            for v in position
        )
        edge_part = ";".join(
            f"{a}-{b}:{tag}"
            for a, b, tag in sorted(
                (min(rank[i], rank[j]), max(rank[i], rank[j]), str(order))
                for (i, j), order in edges.items()
            )
        )
        return node_part + "|" + edge_part

    def search(colors: list[int]) -> str:
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            return serialize(colors)
        best = None
        for v in target:
            branched = [(c, 1) for c in colors]
            branched[v] = (colors[v], 0)
            candidate = search(refine(dense_rank(branched)))
            if best is None or candidate < best:
                best = candidate
        return best

    initial = refine(dense_rank(labels))
    return search(initial)
