"""Combinatorial encoding of finitely ramified self-similar boundary structures.

A :class:`FractalTriple` records the boundary vertices, the first-level vertex
set and the cell maps as plain integer tables; everything downstream (energies,
the renormalization map, uniqueness certificates) is built on this data alone,
so no geometric embedding is ever constructed.  Vertex ids ``0..N-1`` are the
boundary vertices, in order, and ``cells[i][p]`` is the id of the image of
boundary vertex ``p`` under cell map ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from ._graphutil import adjacency, connected_within

__all__ = [
    "FractalTriple",
    "ConnectivityFlags",
    "builtin",
    "builtin_names",
    "cell_graph",
    "check_weights",
    "connectivity_flags",
    "uniform_weights",
    "validate",
]


@dataclass(frozen=True)
class FractalTriple:
    """First-level data of a finitely ramified self-similar structure.

    The first ``N`` cells are the boundary cells: cell ``j`` fixes boundary
    vertex ``j`` and no other cell contains it.  ``num_vertices`` counts the
    whole first-level vertex set, boundary included.
    """

    name: str
    N: int
    k: int
    num_vertices: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "cells", tuple(tuple(int(v) for v in cell) for cell in self.cells)
        )

    @property
    def boundary(self) -> range:
        return range(self.N)

    @property
    def interior(self) -> range:
        return range(self.N, self.num_vertices)

    def cell_vertex(self, i: int, p: int) -> int:
        return self.cells[i][p]


class ConnectivityFlags(NamedTuple):
    a_connected: bool
    o_connected: bool


def validate(triple: FractalTriple) -> list[str]:
    """Check every structural invariant of a triple.

    Returns the list of violated invariants, each with the offending indices;
    an empty list means the triple is valid.  Violations are data, not
    failures, so nothing is raised.
    """
    v: list[str] = []
    n, k, nv = triple.N, triple.k, triple.num_vertices
    if n < 2:
        v.append(f"boundary count must be at least 2 (N={n})")
    if k < n:
        v.append(f"cell count must be at least the boundary count (k={k}, N={n})")
    if nv < n:
        v.append(f"vertex count must be at least the boundary count ({nv} < {n})")
    if len(triple.cells) != k:
        v.append(f"expected {k} cell maps, found {len(triple.cells)}")
        return v

    shape_ok = not v
    for i, cell in enumerate(triple.cells):
        if len(cell) != n:
            v.append(f"cell {i} has {len(cell)} entries, expected {n}")
            shape_ok = False
            continue
        for x in cell:
            if not 0 <= x < nv:
                v.append(f"cell {i} contains out-of-range vertex id {x}")
                shape_ok = False
    if not shape_ok:
        return v

    for i, cell in enumerate(triple.cells):
        if len(set(cell)) != n:
            v.append(f"cell {i} is not injective: {list(cell)}")
    for j in range(n):
        if triple.cells[j][j] != j:
            v.append(
                f"fixed-point condition at j={j}: cells[{j}][{j}] == {triple.cells[j][j]}"
            )
        for i in range(k):
            if i != j and j in triple.cells[i]:
                v.append(
                    f"boundary vertex {j} appears in cell {i}; it may only appear in cell {j}"
                )
    covered = {x for cell in triple.cells for x in cell}
    for x in range(nv):
        if x not in covered:
            v.append(f"vertex id {x} does not occur in any cell")

    adj = adjacency(k, cell_graph(triple))
    if not connected_within(range(k), adj):
        v.append("cell graph disconnected")
    return v


def cell_graph(triple: FractalTriple) -> frozenset[tuple[int, int]]:
    """Edges ``{i1, i2}`` between cells that share a vertex id."""
    sets = [set(cell) for cell in triple.cells]
    edges = set()
    for i1 in range(len(sets)):
        for i2 in range(i1 + 1, len(sets)):
            if sets[i1] & sets[i2]:
                edges.add((i1, i2))
    return frozenset(edges)


def connectivity_flags(triple: FractalTriple) -> ConnectivityFlags:
    """Two connectivity strengths of the cell structure.

    ``a_connected``: removing any single boundary cell leaves all remaining
    boundary cells joined within the cell graph.  ``o_connected``: the
    boundary cells are pairwise disjoint and the non-boundary cells form a
    nonempty connected subgraph.  The second implies the first.
    """
    n, k = triple.N, triple.k
    adj = adjacency(k, cell_graph(triple))

    a_conn = True
    for j in range(n):
        allowed = set(range(k)) - {j}
        # every surviving boundary index must sit in one component of the rest
        targets = [i for i in range(n) if i != j]
        if len(targets) > 1:
            seen = _reach_within(targets[0], allowed, adj)
            if not all(t in seen for t in targets[1:]):
                a_conn = False
                break

    sets = [set(cell) for cell in triple.cells]
    disjoint = all(
        not (sets[j1] & sets[j2]) for j1 in range(n) for j2 in range(j1 + 1, n)
    )
    inner = set(range(n, k))
    o_conn = disjoint and bool(inner) and connected_within(inner, adj)
    return ConnectivityFlags(a_connected=a_conn, o_connected=o_conn)


def _reach_within(start, allowed, adj):
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in allowed and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def uniform_weights(triple: FractalTriple) -> np.ndarray:
    return np.ones(triple.k)


def check_weights(triple: FractalTriple, weights) -> np.ndarray:
    """Validate a weight vector: one strictly positive finite entry per cell."""
    r = np.asarray(weights, dtype=float)
    if r.shape != (triple.k,):
        raise ValueError(f"expected {triple.k} weights, got shape {r.shape}")
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise ValueError("weights must be strictly positive finite reals")
    return r


# Canonical built-in structures.  The identification pattern of each table is
# what matters; ids are assigned boundary-first, then cell by cell.
_BUILTINS: Mapping[str, dict] = {
    "gasket": dict(
        N=3,
        k=3,
        num_vertices=6,
        cells=((0, 3, 4), (3, 1, 5), (4, 5, 2)),
    ),
    # gasket with the midpoint between cells 1 and 2 split in two, so those
    # cells no longer touch
    "tree_gasket": dict(
        N=3,
        k=3,
        num_vertices=7,
        cells=((0, 3, 4), (3, 1, 5), (4, 6, 2)),
    ),
    # four corner cells around one central cell; each corner cell meets the
    # center in a single vertex and corner cells are pairwise disjoint
    "vicsek": dict(
        N=4,
        k=5,
        num_vertices=16,
        cells=(
            (0, 4, 5, 6),
            (7, 1, 8, 9),
            (10, 11, 2, 12),
            (13, 14, 15, 3),
            (5, 9, 10, 14),
        ),
    ),
}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def builtin(name: str) -> FractalTriple:
    """Return one of the canonical built-in triples by name."""
    try:
        entry = _BUILTINS[name]
    except KeyError:
        known = ", ".join(_BUILTINS)
        raise ValueError(f"unknown builtin fractal {name!r}; available: {known}") from None
    return FractalTriple(name=name, **entry)
