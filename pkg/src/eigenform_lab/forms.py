"""Dirichlet forms on the boundary vertex set.

A form is a nonnegative quadratic expression in pairwise differences of
boundary values, stored by its coefficient on each unordered vertex pair.
Forms are immutable; all operations here are pure.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .graphs import BoundaryGraph

__all__ = [
    "COEFF_EPS",
    "DirichletForm",
    "energy",
    "is_harmonic_at",
    "is_irreducible",
    "laplacian",
    "pair_list",
    "support_graph",
]

# Relative threshold below which a stored coefficient counts as zero.  The
# renormalization map produces round-off residue exactly where the stable
# support graph predicts structural zeros, and that residue must not create
# support edges.
COEFF_EPS = 1e-10


def pair_list(n: int) -> list[tuple[int, int]]:
    """Canonical ordering of the unordered vertex pairs."""
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


class DirichletForm:
    """Coefficient table of a boundary Dirichlet form.

    ``coefficients`` may be a mapping ``{(j1, j2): c}`` or an iterable of
    ``(j1, j2, c)`` entries; missing pairs carry coefficient zero.  All
    coefficients must be nonnegative and finite.
    """

    __slots__ = ("N", "_m")

    def __init__(self, N: int, coefficients: Mapping | Iterable = ()):
        if N < 2:
            raise ValueError(f"a form needs at least 2 vertices, got N={N}")
        if isinstance(coefficients, Mapping):
            entries = [(a, b, c) for (a, b), c in coefficients.items()]
        else:
            entries = [tuple(e) for e in coefficients]
        m = np.zeros((N, N))
        seen = set()
        for a, b, c in entries:
            a, b, c = int(a), int(b), float(c)
            if a == b or not (0 <= a < N and 0 <= b < N):
                raise ValueError(f"invalid vertex pair ({a}, {b}) for N={N}")
            if not np.isfinite(c) or c < 0:
                raise ValueError(f"coefficient for pair ({a}, {b}) must be finite and >= 0, got {c}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate coefficient for pair {key}")
            seen.add(key)
            m[key[0], key[1]] = c
        m = m + m.T
        m.flags.writeable = False
        self.N = N
        self._m = m

    @classmethod
    def ones(cls, N: int) -> "DirichletForm":
        return cls(N, {p: 1.0 for p in pair_list(N)})

    @classmethod
    def from_matrix(cls, m) -> "DirichletForm":
        m = np.asarray(m, dtype=float)
        n = m.shape[0]
        if m.shape != (n, n) or not np.allclose(m, m.T):
            raise ValueError("coefficient matrix must be square and symmetric")
        if np.any(np.diag(m) != 0.0):
            raise ValueError("coefficient matrix must have a zero diagonal")
        return cls(n, {(a, b): m[a, b] for a, b in pair_list(n)})

    def matrix(self) -> np.ndarray:
        """Symmetric coefficient matrix with zero diagonal (read-only view)."""
        return self._m

    def coefficient(self, a: int, b: int) -> float:
        if a == b:
            raise ValueError("coefficients live on distinct vertex pairs")
        return float(self._m[a, b])

    def coefficient_items(self) -> list[tuple[int, int, float]]:
        """Nonzero entries as ``(j1, j2, c)`` with ``j1 < j2``."""
        return [
            (a, b, float(self._m[a, b]))
            for a, b in pair_list(self.N)
            if self._m[a, b] != 0.0
        ]

    def vector(self) -> np.ndarray:
        """Coefficients in canonical pair order."""
        return np.array([self._m[a, b] for a, b in pair_list(self.N)])

    def max_coefficient(self) -> float:
        return float(self._m.max())

    def l1_norm(self) -> float:
        return float(self.vector().sum())

    def scaled(self, factor: float) -> "DirichletForm":
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        return DirichletForm.from_matrix(self._m * factor)

    def __repr__(self):
        items = ", ".join(f"({a},{b}): {c:.6g}" for a, b, c in self.coefficient_items())
        return f"DirichletForm(N={self.N}, {{{items}}})"


def energy(form: DirichletForm, u) -> float:
    """Value of the form on boundary data: sum of c * (difference)^2."""
    u = np.asarray(u, dtype=float)
    d = u[:, None] - u[None, :]
    return float(0.5 * np.sum(form.matrix() * d * d))


def laplacian(form: DirichletForm, u) -> np.ndarray:
    """Weighted difference operator: entry j is sum_h c_{jh} (u_h - u_j)."""
    u = np.asarray(u, dtype=float)
    m = form.matrix()
    return m @ u - m.sum(axis=1) * u


def support_graph(form: DirichletForm, rel_eps: float = COEFF_EPS) -> BoundaryGraph:
    """Graph of the pairs whose coefficient is positive beyond round-off."""
    cut = rel_eps * form.max_coefficient()
    edges = [
        (a, b) for a, b in pair_list(form.N) if form.matrix()[a, b] > cut
    ]
    return BoundaryGraph.from_edges(form.N, edges)


def is_irreducible(form: DirichletForm) -> bool:
    """True when the form vanishes only on constants, i.e. the support graph
    joins all boundary vertices."""
    return support_graph(form).is_connected()


def is_harmonic_at(form: DirichletForm, u, j: int, tol: float = 1e-9) -> bool:
    """Whether the weighted difference operator vanishes at vertex ``j``.

    The comparison is relative: the threshold scales with the largest
    coefficient and the oscillation of ``u``, so the answer is invariant under
    rescaling either the form or the data.  Zero scale counts as harmonic.
    """
    u = np.asarray(u, dtype=float)
    scale = form.max_coefficient() * (u.max() - u.min())
    value = laplacian(form, u)[j]
    return bool(abs(value) <= tol * scale)
