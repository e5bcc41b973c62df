"""Molecular graph types and ring perception."""

from __future__ import annotations

from dataclasses import dataclass, field

from molfuse.errors import DataError

# bond order: 1, 2, 3, or the string "aromatic"
BondOrder = int | str

AROMATIC = "aromatic"


@dataclass
class AtomRecord:
    element: str
    charge: int = 0
    hydrogens: int = 0  # total attached H after implicit filling
    aromatic: bool = False
    degree: int = 0  # incidence count in bonds, maintained by MolGraph


@dataclass
class MolGraph:
    atoms: list[AtomRecord]
    bonds: list[tuple[int, int, BondOrder]]
    rings: list[list[int]] = field(default_factory=list)
    source_smiles: str = ""

    def __post_init__(self):
        n = len(self.atoms)
        seen = set()
        for i, j, order in self.bonds:
            if not (0 <= i < n and 0 <= j < n):
                raise DataError(f"bond ({i}, {j}) references a missing atom")
            if i == j:
                raise DataError(f"self-bond on atom {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DataError(f"duplicate bond between atoms {i} and {j}")
            seen.add(key)
            if order not in (1, 2, 3, AROMATIC):
                raise DataError(f"unsupported bond order {order!r}")
        degrees = [0] * n
        for i, j, _ in self.bonds:
            degrees[i] += 1
            degrees[j] += 1
        for atom, d in zip(self.atoms, degrees):
            atom.degree = d
        if not self.rings:
            self.rings = minimum_cycle_basis(n, self.bonds)
        ring_atoms = self.ring_atom_indices()
        for idx, atom in enumerate(self.atoms):
            if atom.aromatic and idx not in ring_atoms:
                raise DataError(f"aromatic atom {idx} is not in any ring")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.atoms]
        for i, j, _ in self.bonds:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def bond_order(self, i: int, j: int) -> BondOrder | None:
        for a, b, order in self.bonds:
            if (a, b) == (i, j) or (a, b) == (j, i):
                return order
        return None

    def ring_atom_indices(self) -> set[int]:
        return {idx for ring in self.rings for idx in ring}


def minimum_cycle_basis(n: int, bonds: list[tuple[int, int, BondOrder]]) -> list[list[int]]:
    """Minimum-weight cycle basis over unit edge weights (Horton candidates +
    greedy GF(2) independence). Returns each cycle as an ordered atom list."""
    edges = [(min(i, j), max(i, j)) for i, j, _ in bonds]
    edge_index = {e: k for k, e in enumerate(edges)}
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)

    components = 0
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
    rank_needed = len(edges) - n + components
    if rank_needed <= 0:
        return []

    # BFS shortest-path trees from every vertex
    parents: list[list[int]] = []
    depths: list[list[int]] = []
    for root in range(n):
        parent = [-1] * n
        depth = [-1] * n
        depth[root] = 0
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for u in adj[v]:
                if depth[u] < 0:
                    depth[u] = depth[v] + 1
                    parent[u] = v
                    queue.append(u)
        parents.append(parent)
        depths.append(depth)

    def path_to_root(root: int, v: int) -> list[int] | None:
        if depths[root][v] < 0:
            return None
        out = [v]
        while v != root:
            v = parents[root][v]
            out.append(v)
        return out

    # Horton candidate cycles: SP(v,x) + (x,y) + SP(y,v)
    candidates: list[tuple[int, int, list[int]]] = []
    for x, y in edges:
        for v in range(n):
            px = path_to_root(v, x)
            py = path_to_root(v, y)
            if px is None or py is None:
                continue
            if set(px) & set(py) != {v}:
                continue
            cycle = px[::-1] + py[:-1]  # v..x, y..(v excluded)
            m = len(cycle)
            if m < 3:
                continue
            mask = 0
            ok = True
            for k in range(m):
                e = (min(cycle[k], cycle[(k + 1) % m]), max(cycle[k], cycle[(k + 1) % m]))
                bit = 1 << edge_index.get(e, -1) if e in edge_index else 0
                if bit == 0 or mask & bit:
                    ok = False
                    break
                mask |= bit
            if ok:
                candidates.append((m, mask, cycle))

    candidates.sort(key=lambda c: (c[0], c[1]))
    echelon: list[int] = []  # reduced masks, distinct leading bits
    basis_cycles: list[list[int]] = []
    for _, mask, cycle in candidates:
        reduced = mask
        for bm in echelon:
            reduced = min(reduced, reduced ^ bm)
        if reduced == 0:
            continue
        echelon.append(reduced)
        echelon.sort(reverse=True)
        basis_cycles.append(cycle)
        if len(basis_cycles) == rank_needed:
            break
    return basis_cycles
