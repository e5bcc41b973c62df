"""SMILES subset parser and serializer.

Supported: organic-subset atoms, bracket atoms (isotope, charge, H-count,
chirality), branches, ring closures (digits and %nn), bond symbols -=#:/\\,
dot disconnection, aromatic lowercase. Stereo markers are parsed and dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

from molfuse.errors import ParseError
from molfuse.chem.graph import AROMATIC, AtomRecord, BondOrder, MolGraph, minimum_cycle_basis
from molfuse.chem.properties import ATOMIC_MASSES

ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_SYMBOLS = {"b", "c", "n", "o", "p", "s"}
# standard valence alternatives used to fill implicit hydrogens
DEFAULT_VALENCES = {
    "B": (3,), "C": (4,), "N": (3, 5), "O": (2,),
    "P": (3, 5), "S": (2, 4, 6), "F": (1,), "Cl": (1,), "Br": (1,), "I": (1,),
}
# contribution of the delocalized pi system to an aromatic atom's bond-order sum
AROMATIC_PI = {"b": 1, "c": 1, "n": 1, "p": 1, "o": 0, "s": 0}

BOND_CHARS = {"-": 1, "=": 2, "#": 3, ":": AROMATIC, "/": 1, "\\": 1}


@dataclass
class _RawAtom:
    element: str
    aromatic: bool
    charge: int
    explicit_h: int | None  # None: fill by valence rules
    offset: int


def parse_smiles(s: str) -> MolGraph:
    if not s or not s.strip():
        raise ParseError("empty SMILES string", offset=0)
    atoms: list[_RawAtom] = []
    bonds: list[tuple[int, int, BondOrder]] = []
    prev: int | None = None
    pending_bond: BondOrder | None = None
    pending_bond_offset = 0
    branch_stack: list[int] = []
    ring_open: dict[int, tuple[int, BondOrder | None, int]] = {}  # num -> (atom, bond, offset)

    def add_atom(raw: _RawAtom) -> None:
        nonlocal prev, pending_bond
        atoms.append(raw)
        idx = len(atoms) - 1
        if prev is not None:
            order = pending_bond
            if order is None:
                order = AROMATIC if (atoms[prev].aromatic and raw.aromatic) else 1
            bonds.append((prev, idx, order))
        pending_bond = None
        prev = idx

    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch == "(":
            if prev is None:
                raise ParseError("branch opened before any atom", offset=i)
            if pending_bond is not None:
                raise ParseError("bond symbol immediately before '('", offset=pending_bond_offset)
            branch_stack.append(prev)
            i += 1
        elif ch == ")":
            if not branch_stack:
                raise ParseError("unbalanced parentheses: ')' without '('", offset=i)
            if pending_bond is not None:
                raise ParseError("dangling bond symbol before ')'", offset=pending_bond_offset)
            prev = branch_stack.pop()
            i += 1
        elif ch in BOND_CHARS:
            if pending_bond is not None:
                raise ParseError("two consecutive bond symbols", offset=i)
            if prev is None:
                raise ParseError("bond symbol before any atom", offset=i)
            pending_bond = BOND_CHARS[ch]
            pending_bond_offset = i
            i += 1
        elif ch == ".":
            if pending_bond is not None:
                raise ParseError("bond symbol before '.'", offset=pending_bond_offset)
            prev = None
            i += 1
        elif ch.isdigit() or ch == "%":
            if ch == "%":
                if not s[i + 1 : i + 3].isdigit() or len(s[i + 1 : i + 3]) < 2:
                    raise ParseError("'%' ring closure needs two digits", offset=i)
                num = int(s[i + 1 : i + 3])
                tok_len = 3
            else:
                num = int(ch)
                tok_len = 1
            if prev is None:
                raise ParseError("ring closure before any atom", offset=i)
            if num in ring_open:
                open_atom, open_bond, _ = ring_open.pop(num)
                if open_atom == prev:
                    raise ParseError(f"ring closure {num} bonds an atom to itself", offset=i)
                if open_bond is not None and pending_bond is not None and open_bond != pending_bond:
                    raise ParseError(f"conflicting bond orders on ring closure {num}", offset=i)
                order = open_bond if open_bond is not None else pending_bond
                if order is None:
                    order = AROMATIC if (atoms[open_atom].aromatic and atoms[prev].aromatic) else 1
                if any({a, b} == {open_atom, prev} for a, b, _ in bonds):
                    raise ParseError(f"ring closure {num} duplicates an existing bond", offset=i)
                bonds.append((open_atom, prev, order))
            else:
                ring_open[num] = (prev, pending_bond, i)
            pending_bond = None
            i += tok_len
        elif ch == "[":
            raw, i = _parse_bracket_atom(s, i)
            add_atom(raw)
        elif ch in ("C", "B") and s[i : i + 2] in ("Cl", "Br"):
            add_atom(_RawAtom(s[i : i + 2], False, 0, None, i))
            i += 2
        elif ch in "BCNOPSFI":
            add_atom(_RawAtom(ch, False, 0, None, i))
            i += 1
        elif ch in AROMATIC_SYMBOLS:
            add_atom(_RawAtom(ch.upper(), True, 0, None, i))
            i += 1
        else:
            raise ParseError(f"unknown atom token {ch!r}", offset=i)

    if branch_stack:
        raise ParseError("unbalanced parentheses: unclosed '('", offset=n - 1)
    if ring_open:
        num, (_, _, offset) = sorted(ring_open.items())[0]
        raise ParseError(f"unmatched ring closure digit {num}", offset=offset)
    if pending_bond is not None:
        raise ParseError("dangling bond symbol at end of input", offset=pending_bond_offset)
    if not atoms:
        raise ParseError("no atoms in SMILES string", offset=0)

    records = _resolve_hydrogens(atoms, bonds)
    rings = minimum_cycle_basis(len(atoms), bonds)
    ring_members = {idx for ring in rings for idx in ring}
    for idx, raw in enumerate(atoms):
        if raw.aromatic and idx not in ring_members:
            raise ParseError("aromatic atom is not in any ring", offset=raw.offset)
    return MolGraph(atoms=records, bonds=bonds, rings=rings, source_smiles=s)


def _parse_bracket_atom(s: str, start: int) -> tuple[_RawAtom, int]:
    i = start + 1
    n = len(s)

    def fail(msg: str, at: int | None = None) -> ParseError:
        return ParseError(msg, offset=start if at is None else at)

    while i < n and s[i].isdigit():  # isotope label, parsed and dropped
        i += 1
    if i >= n:
        raise fail("unterminated bracket atom")
    aromatic = False
    if s[i] in AROMATIC_SYMBOLS:
        element = s[i].upper()
        aromatic = True
        i += 1
    elif s[i].isupper():
        element = s[i]
        i += 1
        if i < n and s[i].islower() and s[i] != "h" and element + s[i] in ATOMIC_MASSES:
            element += s[i]
            i += 1
    else:
        raise fail(f"unknown atom token {s[i]!r}", at=i)
    if element not in ATOMIC_MASSES:
        raise fail(f"unknown atom token {element!r}", at=start)
    while i < n and s[i] == "@":  # chirality, parsed and dropped
        i += 1
    hydrogens = 0
    if i < n and s[i] == "H":
        i += 1
        digits = ""
        while i < n and s[i].isdigit():
            digits += s[i]
            i += 1
        hydrogens = int(digits) if digits else 1
    charge = 0
    if i < n and s[i] in "+-":
        sign = 1 if s[i] == "+" else -1
        symbol = s[i]
        i += 1
        digits = ""
        while i < n and s[i].isdigit():
            digits += s[i]
            i += 1
        if digits:
            charge = sign * int(digits)
        else:
            charge = sign
            while i < n and s[i] == symbol:
                charge += sign
                i += 1
    if i < n and s[i] == ":":  # atom class, parsed and dropped
        i += 1
        if i >= n or not s[i].isdigit():
            raise fail("atom class ':' needs digits", at=min(i, n - 1))
        while i < n and s[i].isdigit():
            i += 1
    if i >= n or s[i] != "]":
        raise fail("unterminated bracket atom")
    return _RawAtom(element, aromatic, charge, hydrogens, start), i + 1


def _resolve_hydrogens(
    atoms: list[_RawAtom], bonds: list[tuple[int, int, BondOrder]]
) -> list[AtomRecord]:
    order_sum = [0] * len(atoms)
    for a, b, order in bonds:
        value = 1 if order == AROMATIC else order
        order_sum[a] += value
        order_sum[b] += value
    records = []
    for idx, raw in enumerate(atoms):
        if raw.explicit_h is not None:
            h = raw.explicit_h
        else:
            total = order_sum[idx]
            if raw.aromatic:
                total += AROMATIC_PI[raw.element.lower()]
            valences = DEFAULT_VALENCES[raw.element]
            fitting = [v for v in valences if v >= total]
            if not fitting:
                raise ParseError(
                    f"valence overflow on {raw.element} (bond order sum {total}, "
                    f"max standard valence {max(valences)})",
                    offset=raw.offset,
                )
            h = fitting[0] - total
        records.append(AtomRecord(
            element=raw.element, charge=raw.charge, hydrogens=h, aromatic=raw.aromatic))
    return records


def to_smiles(g: MolGraph) -> str:
    """Serialize with every atom in bracket form so hydrogen counts, charges,
    and aromatic flags survive a round trip exactly."""
    n = len(g.atoms)
    adj: list[list[tuple[int, BondOrder]]] = [[] for _ in range(n)]
    for i, j, order in g.bonds:
        adj[i].append((j, order))
        adj[j].append((i, order))
    for neighbors in adj:
        neighbors.sort(key=lambda t: t[0])

    visited = [False] * n
    parent = [-1] * n
    tree_children: list[list[tuple[int, BondOrder]]] = [[] for _ in range(n)]
    ring_at: list[list[tuple[int, BondOrder]]] = [[] for _ in range(n)]  # (label, order)
    next_label = 1
    roots = []
    for start in range(n):
        if visited[start]:
            continue
        roots.append(start)
        visited[start] = True
        stack = [start]
        seen_ring: set[tuple[int, int]] = set()
        while stack:
            v = stack.pop()
            for u, order in adj[v]:
                if not visited[u]:
                    visited[u] = True
                    parent[u] = v
                    tree_children[v].append((u, order))
                    stack.append(u)
                elif u != parent[v]:
                    key = (min(u, v), max(u, v))
                    if key not in seen_ring:
                        seen_ring.add(key)
                        ring_at[v].append((next_label, order))
                        ring_at[u].append((next_label, order))
                        next_label += 1

    def atom_token(idx: int) -> str:
        atom = g.atoms[idx]
        symbol = atom.element.lower() if atom.aromatic else atom.element
        h = "" if atom.hydrogens == 0 else ("H" if atom.hydrogens == 1 else f"H{atom.hydrogens}")
        if atom.charge == 0:
            q = ""
        elif atom.charge > 0:
            q = "+" if atom.charge == 1 else f"+{atom.charge}"
        else:
            q = "-" if atom.charge == -1 else f"-{abs(atom.charge)}"
        return f"[{symbol}{h}{q}]"

    def bond_token(order: BondOrder) -> str:
        return {1: "", 2: "=", 3: "#", AROMATIC: ":"}[order]

    def ring_token(label: int, order: BondOrder) -> str:
        digit = str(label) if label <= 9 else f"%{label:02d}"
        return bond_token(order) + digit

    def render(v: int) -> str:
        parts = [atom_token(v)]
        parts.extend(ring_token(lab, order) for lab, order in ring_at[v])
        children = tree_children[v]
        for k, (u, order) in enumerate(children):
            piece = bond_token(order) + render(u)
            parts.append(f"({piece})" if k < len(children) - 1 else piece)
        return "".join(parts)

    return ".".join(render(r) for r in roots)
