"""Perron data of the cell operators.

For each boundary vertex the associated cell operator (or the power matching
the component period) acts as a strictly positive matrix on a distinguished
coordinate block; its Perron pair, the pushed-forward eigenvector on the full
component, and the limiting projection coefficient of arbitrary data feed the
stability analysis.

Eigenvectors are normalized to sup-norm one with positive entries.  Perron
pairs come from power iteration with a Rayleigh-quotient eigenvalue, falling
back to a dense eigensolver on stagnation; the matrices are tiny and strictly
positive on the relevant block, so convergence is geometric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, NonConvergenceError
from .forms import COEFF_EPS, DirichletForm
from .fractal import FractalTriple
from .graphs import ComponentData
from .renorm import OperatorCache

__all__ = [
    "PerronData",
    "perron_component",
    "perron_positive",
    "pi_limit",
    "project_g",
    "project_g_tilde",
]

POWER_TOL = 1e-13
_POWER_MAX_ITER = 20000


@dataclass(frozen=True)
class PerronData:
    """Perron pair of one (vertex, component) node.

    ``u_bar`` is supported on the surviving part of the component and strictly
    positive there, sup-norm one.  ``u_tilde`` is its image under the
    period-th operator power: strictly positive on the whole component, an
    eigenvector of that power with the stored eigenvalue.
    """

    j: int
    s: int
    period: int
    u_bar: np.ndarray
    u_tilde: np.ndarray
    eigenvalue: float


def _perron_pair(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Dominant eigenpair of an entrywise positive matrix."""
    n = matrix.shape[0]
    if n == 1:
        return np.ones(1), float(matrix[0, 0])
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(_POWER_MAX_ITER):
        y = matrix @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise InternalConsistencyError("positive operator annihilated a positive vector")
        y /= norm
        if np.max(np.abs(y - x)) < POWER_TOL:
            x = y
            break
        x = y
    else:
        return _perron_dense(matrix)
    value = float(x @ (matrix @ x))
    return x, value


def _perron_dense(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    values, vectors = np.linalg.eig(matrix)
    idx = int(np.argmax(np.abs(values)))
    value = values[idx]
    vec = vectors[:, idx]
    if abs(value.imag) > 1e-10 * max(abs(value), 1.0):
        raise InternalConsistencyError("dominant eigenvalue is not real")
    vec = np.real(vec)
    if vec.sum() < 0:
        vec = -vec
    return vec / np.linalg.norm(vec), float(value.real)


def _positive_sup_normalized(vec: np.ndarray) -> np.ndarray:
    top = np.max(np.abs(vec))
    if top == 0.0:
        raise InternalConsistencyError("Perron vector vanished")
    out = vec / top
    if out.min() <= 1e-12:
        raise InternalConsistencyError(
            f"Perron vector is not strictly positive: {out}"
        )
    return out


def perron_positive(
    triple: FractalTriple,
    form: DirichletForm,
    weights,
    j: int,
    cache: OperatorCache | None = None,
) -> tuple[np.ndarray, float]:
    """Perron pair of the cell-``j`` operator on data vanishing at ``j``.

    Requires a positive form (every pair coefficient above the zero
    threshold); then the operator restricted to the complementary coordinates
    is entrywise positive and the pair is unique.
    """
    vec = form.vector()
    if vec.min() <= COEFF_EPS * vec.max():
        raise ValueError("perron_positive requires a positive form")
    cache = cache or OperatorCache(triple, form, weights)
    others = [p for p in range(triple.N) if p != j]
    block = cache.cell(j)[np.ix_(others, others)]
    if block.min() <= 0.0:
        raise InternalConsistencyError(
            f"restricted cell operator at j={j} is not entrywise positive"
        )
    small, value = _perron_pair(block)
    u_bar = np.zeros(triple.N)
    u_bar[others] = _positive_sup_normalized(small)
    u_bar.flags.writeable = False
    return u_bar, value


def perron_component(
    triple: FractalTriple,
    form: DirichletForm,
    weights,
    j: int,
    s: int,
    comp: ComponentData,
    cache: OperatorCache | None = None,
) -> PerronData:
    """Perron data of component ``s`` at boundary vertex ``j``.

    The operator power matching the component period, cut down to the
    surviving coordinates, must be entrywise positive; anything else is an
    internal-consistency failure.
    """
    if comp.j != j:
        raise ValueError(f"component data is for j={comp.j}, not j={j}")
    cache = cache or OperatorCache(triple, form, weights)
    period = comp.periods[s]
    power = cache.word((j,) * period)
    prime = list(comp.c_prime[s])
    block = power[np.ix_(prime, prime)]
    if block.min() <= 0.0:
        raise InternalConsistencyError(
            f"component-restricted operator at (j={j}, s={s}) is not entrywise positive"
        )
    small, value = _perron_pair(block)
    u_bar = np.zeros(triple.N)
    u_bar[prime] = _positive_sup_normalized(small)

    u_tilde = power @ u_bar
    inside = np.array(comp.components[s])
    outside = np.setdiff1d(np.arange(triple.N), inside)
    stray = np.max(np.abs(u_tilde[outside])) if outside.size else 0.0
    if stray > 1e-10 * np.max(np.abs(u_tilde)):
        raise InternalConsistencyError(
            f"iterate at (j={j}, s={s}) leaks outside its component by {stray}"
        )
    u_tilde[outside] = 0.0
    if u_tilde[inside].min() <= 0.0:
        raise InternalConsistencyError(
            f"iterate at (j={j}, s={s}) is not positive on its component"
        )
    u_bar.flags.writeable = False
    u_tilde.flags.writeable = False
    return PerronData(
        j=j, s=s, period=period, u_bar=u_bar, u_tilde=u_tilde, eigenvalue=value
    )


def project_g(u, comp: ComponentData, s: int) -> np.ndarray:
    """Shift by the value at the pivot vertex, then mask to component ``s``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    idx = list(comp.components[s])
    out[idx] = u[idx] - u[comp.j]
    return out


def project_g_tilde(u, comp: ComponentData, s: int) -> np.ndarray:
    """Mask to the surviving part of component ``s``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    idx = list(comp.c_prime[s])
    out[idx] = u[idx]
    return out


def pi_limit(
    triple: FractalTriple,
    form: DirichletForm,
    weights,
    pdata: PerronData,
    u,
    tol: float = 1e-12,
    max_iter: int = 500,
    cache: OperatorCache | None = None,
) -> float:
    """Limiting coefficient of data along the component eigenvector.

    Repeatedly applies the period-th operator power divided by its eigenvalue
    until the iterate stabilizes along ``u_tilde`` and returns the coefficient
    against it.  The input must be supported on the component.
    """
    u = np.asarray(u, dtype=float)
    cache = cache or OperatorCache(triple, form, weights)
    outside = set(range(triple.N)) - set(np.flatnonzero(pdata.u_tilde > 0.0).tolist())
    stray = max((abs(u[v]) for v in outside), default=0.0)
    if stray > 1e-9 * max(np.max(np.abs(u)), 1e-300):
        raise ValueError("data must be supported on the component")
    power = cache.word((pdata.j,) * pdata.period)
    tilde = pdata.u_tilde
    denom = float(tilde @ tilde)
    scale = max(float(np.max(np.abs(u))), 1e-300)
    w = u.astype(float)
    prev = None
    for _ in range(max_iter):
        w = (power @ w) / pdata.eigenvalue
        coeff = float(w @ tilde) / denom
        resid = float(np.max(np.abs(w - coeff * tilde)))
        close = resid <= tol * max(abs(coeff) * np.max(tilde), scale)
        if prev is not None and close and abs(coeff - prev) <= tol * max(1.0, abs(coeff)):
            return coeff
        prev = coeff
    raise NonConvergenceError(
        f"projection coefficient did not stabilize within {max_iter} iterations"
    )
