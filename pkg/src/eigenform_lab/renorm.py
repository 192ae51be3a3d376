"""Energy-minimizing extension and the induced map on boundary forms.

Placing a weighted copy of a boundary form on every cell turns the first-level
vertex set into a conductance network.  Minimizing the network energy over all
extensions of given boundary data is a linear solve against the interior block
of the network Laplacian; reading the minimum energy back as a quadratic form
in the boundary data is the Schur complement of that Laplacian onto the
boundary.  The boundary-to-boundary maps obtained by restricting the minimizer
to a single cell are small stochastic matrices and are cached per
(form, weights) pair, since every composite map is a product of them.

Linear solves use dense LU with partial pivoting; interior blocks are tiny, so
exactness and determinism win over scalability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._graphutil import adjacency
from .errors import InternalConsistencyError, SingularInteriorError
from .forms import COEFF_EPS, DirichletForm, energy, pair_list
from .fractal import FractalTriple, check_weights

__all__ = [
    "CellOperator",
    "ExtensionResult",
    "OperatorCache",
    "cell_operator",
    "conductance_laplacian",
    "constrained_extension",
    "harmonic_extension",
    "one_step_energy",
    "renormalize",
    "word_operator",
]


@dataclass(frozen=True)
class ExtensionResult:
    """Minimizing extension over the first-level vertices.

    ``values[v]`` is the extension at vertex id ``v``; ``achieved_energy`` is
    the one-step energy of that extension.
    """

    values: np.ndarray
    achieved_energy: float


@dataclass(frozen=True)
class CellOperator:
    """Row ``p`` expresses the minimizing extension, read at the image of
    boundary vertex ``p`` inside the cell, as a linear function of the
    boundary data.  Rows sum to one."""

    index: int
    matrix: np.ndarray


def conductance_laplacian(
    triple: FractalTriple, form: DirichletForm, weights
) -> np.ndarray:
    """Weighted graph Laplacian of the first-level conductance network.

    Each pair coefficient of the form, scaled by the cell weight, becomes a
    conductance on the image of that pair inside the cell; parallel edges
    from different cells accumulate additively.
    """
    r = check_weights(triple, weights)
    nv = triple.num_vertices
    lap = np.zeros((nv, nv))
    m = form.matrix()
    for i, cell in enumerate(triple.cells):
        for a, b in pair_list(triple.N):
            c = m[a, b]
            if c <= 0.0:
                continue
            w = r[i] * c
            p, q = cell[a], cell[b]
            lap[p, p] += w
            lap[q, q] += w
            lap[p, q] -= w
            lap[q, p] -= w
    return lap


def _check_reachable(lap: np.ndarray, free: Sequence[int], fixed: Sequence[int]):
    """Every free vertex must reach a fixed vertex through positive
    conductances, otherwise the free block is singular."""
    nv = lap.shape[0]
    edges = [
        (p, q) for p in range(nv) for q in range(p + 1, nv) if lap[p, q] != 0.0
    ]
    adj = adjacency(nv, edges)
    seen = set(fixed)
    stack = list(fixed)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    for v in free:
        if v not in seen:
            raise SingularInteriorError(v)


def _solve_free(
    lap: np.ndarray, free: Sequence[int], fixed: Sequence[int], fixed_values: np.ndarray
) -> np.ndarray:
    """Values on the free vertices minimizing the network energy."""
    if not free:
        return np.zeros(0)
    _check_reachable(lap, free, fixed)
    a = lap[np.ix_(free, free)]
    b = lap[np.ix_(free, fixed)] @ fixed_values
    try:
        return np.linalg.solve(a, -b)
    except np.linalg.LinAlgError:
        # reachability held, so this is numerical breakdown rather than a
        # disconnected vertex; report the first free vertex
        raise SingularInteriorError(free[0], "interior block is numerically singular")


def one_step_energy(triple: FractalTriple, form: DirichletForm, weights, v) -> float:
    """Weighted sum of the form over all cell restrictions of first-level data."""
    r = check_weights(triple, weights)
    v = np.asarray(v, dtype=float)
    if v.shape != (triple.num_vertices,):
        raise ValueError(
            f"expected data on {triple.num_vertices} vertices, got shape {v.shape}"
        )
    return float(
        sum(r[i] * energy(form, v[np.array(cell)]) for i, cell in enumerate(triple.cells))
    )


def harmonic_extension(
    triple: FractalTriple, form: DirichletForm, weights, u
) -> ExtensionResult:
    """Unique extension of boundary data minimizing the one-step energy."""
    u = np.asarray(u, dtype=float)
    if u.shape != (triple.N,):
        raise ValueError(f"expected boundary data of length {triple.N}, got {u.shape}")
    lap = conductance_laplacian(triple, form, weights)
    boundary = list(range(triple.N))
    free = list(range(triple.N, triple.num_vertices))
    values = np.empty(triple.num_vertices)
    values[: triple.N] = u
    values[triple.N :] = _solve_free(lap, free, boundary, u)
    values.flags.writeable = False
    return ExtensionResult(values, one_step_energy(triple, form, weights, values))


def constrained_extension(
    triple: FractalTriple, form: DirichletForm, weights, fixed: Mapping[int, float]
) -> ExtensionResult:
    """Energy minimizer among first-level data agreeing with ``fixed``."""
    if not fixed:
        raise ValueError("the fixed-value map must be nonempty")
    fixed_ids = sorted(int(v) for v in fixed)
    for v in fixed_ids:
        if not 0 <= v < triple.num_vertices:
            raise ValueError(f"fixed vertex id {v} out of range")
    fixed_vals = np.array([float(fixed[v]) for v in fixed_ids])
    pinned = set(fixed_ids)
    free = [v for v in range(triple.num_vertices) if v not in pinned]
    lap = conductance_laplacian(triple, form, weights)
    values = np.empty(triple.num_vertices)
    values[fixed_ids] = fixed_vals
    values[free] = _solve_free(lap, free, fixed_ids, fixed_vals)
    values.flags.writeable = False
    return ExtensionResult(values, one_step_energy(triple, form, weights, values))


def renormalize(triple: FractalTriple, form: DirichletForm, weights) -> DirichletForm:
    """Boundary form whose value on any data is the minimal one-step energy.

    Coefficients are read off the Schur complement of the first-level network
    Laplacian onto the boundary block.  Schur off-diagonals in
    ``[-COEFF_EPS * max, 0]`` are clamped to zero: structural zeros of the
    stable support pick up only round-off there.
    """
    lap = conductance_laplacian(triple, form, weights)
    n = triple.N
    boundary = list(range(n))
    free = list(range(n, triple.num_vertices))
    s = lap[np.ix_(boundary, boundary)].copy()
    if free:
        _check_reachable(lap, free, boundary)
        a = lap[np.ix_(free, free)]
        b = lap[np.ix_(free, boundary)]
        try:
            s -= b.T @ np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            raise SingularInteriorError(free[0], "interior block is numerically singular")
    coeffs = {}
    off = [-s[a_, b_] for a_, b_ in pair_list(n)]
    scale = max((abs(x) for x in off), default=0.0)
    for (a_, b_), c in zip(pair_list(n), off):
        if c < -COEFF_EPS * scale:
            raise InternalConsistencyError(
                f"renormalized coefficient for pair ({a_},{b_}) is negative: {c}"
            )
        coeffs[(a_, b_)] = max(c, 0.0)
    return DirichletForm(n, coeffs)


def _extension_matrix(triple: FractalTriple, form: DirichletForm, weights) -> np.ndarray:
    """Matrix sending boundary data to the full minimizing extension."""
    lap = conductance_laplacian(triple, form, weights)
    n, nv = triple.N, triple.num_vertices
    free = list(range(n, nv))
    ext = np.zeros((nv, n))
    ext[:n, :n] = np.eye(n)
    if free:
        _check_reachable(lap, free, range(n))
        a = lap[np.ix_(free, range(n))]
        try:
            ext[n:, :] = np.linalg.solve(lap[np.ix_(free, free)], -a)
        except np.linalg.LinAlgError:
            raise SingularInteriorError(free[0], "interior block is numerically singular")
    return ext


class OperatorCache:
    """All cell operators for one (triple, form, weights) context.

    Built once, read-only afterwards; safe to share across threads.
    """

    def __init__(self, triple: FractalTriple, form: DirichletForm, weights):
        self.triple = triple
        self.form = form
        self.weights = check_weights(triple, weights)
        ext = _extension_matrix(triple, form, weights)
        ops = []
        for cell in triple.cells:
            m = ext[np.array(cell), :].copy()
            m.flags.writeable = False
            ops.append(m)
        self._ops = tuple(ops)

    def cell(self, i: int) -> np.ndarray:
        return self._ops[i]

    def word(self, word: Iterable[int]) -> np.ndarray:
        """Product of cell operators, first index applied last (outermost)."""
        out = np.eye(self.triple.N)
        for i in word:
            out = out @ self._ops[i]
        return out


def cell_operator(
    triple: FractalTriple,
    form: DirichletForm,
    weights,
    i: int,
    cache: OperatorCache | None = None,
) -> CellOperator:
    cache = cache or OperatorCache(triple, form, weights)
    return CellOperator(index=i, matrix=cache.cell(i))


def word_operator(
    triple: FractalTriple,
    form: DirichletForm,
    weights,
    word: Sequence[int],
    cache: OperatorCache | None = None,
) -> np.ndarray:
    """Composite boundary-to-boundary map for a word of cell indices.

    The empty word gives the identity.  Note the reversal under level
    composition: the composite map of the word ``(i1, ..., in)`` read as a
    single n-level cell applies the single-cell maps in the opposite order;
    only the direct composition order is exposed here.
    """
    cache = cache or OperatorCache(triple, form, weights)
    return cache.word(word)
