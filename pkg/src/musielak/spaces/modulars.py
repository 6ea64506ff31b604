"""Discrete modulars on a DomainGrid (midpoint rule on node cells)."""

import numpy as np

from ..exceptions import DomainError
from ..nfunction.calculus import SobolevConjugate, complementary
from .grid import GridFunction, as_values
from .pairs import PairKernels, gagliardo_canonical


def potential_values(V, grid):
    """Nodal samples of a potential given as scalar, array, GridFunction or callable."""
    if isinstance(V, GridFunction):
        vals = V.values
    elif callable(V):
        vals = np.asarray(V(grid.nodes), dtype=float)
    else:
        vals = np.asarray(V, dtype=float)
    vals = np.broadcast_to(vals, (grid.N,))
    if not np.all(np.isfinite(vals)):
        raise DomainError("potential must be finite")
    if np.any(vals <= 0):
        k = int(np.argmin(vals))
        raise DomainError(f"potential must be positive; V={vals[k]:g} at node {k}")
    return vals


class ModularEvaluator:
    """All modulars of one family on one grid, on raw value arrays.

    Value arrays have the node index on the last axis, so a batch of
    functions is evaluated with one call (shape ``(B, N)`` gives ``(B,)``).
    """

    def __init__(self, fam, grid):
        self.fam = fam
        self.grid = grid
        self._bound_hat = None
        self._pairs = None
        self._conj = {}

    @property
    def bound_hat(self):
        if self._bound_hat is None:
            nodes = self.grid.nodes
            self._bound_hat = self.fam.bind_hat(nodes[:1] if self.fam.x_independent else nodes)
        return self._bound_hat

    @property
    def pairs(self):
        if self._pairs is None:
            self._pairs = PairKernels.of(self.fam, self.grid)
        return self._pairs

    def Ghat_nodes(self, vals):
        """``Ghat_{x_i}(|u_i|)`` per node."""
        return self.bound_hat.G(np.abs(vals))

    def ghat_nodes(self, vals):
        return self.bound_hat.g(vals)

    def Ghat(self, vals):
        return np.sum(self.Ghat_nodes(vals), axis=-1) * self.grid.cell

    def weighted(self, vals, V):
        return np.sum(V * self.Ghat_nodes(vals), axis=-1) * self.grid.cell

    def gagliardo(self, vals):
        return self.pairs.modular(vals)

    def combined(self, vals):
        return self.Ghat(vals) + self.gagliardo(vals)

    def conjugate(self, vals):
        """Modular of the complementary function ``sum G~_{x_i}(|u_i|) h^d``."""
        nodes = self.grid.nodes
        x = nodes[:1] if self.fam.x_independent else nodes
        return np.sum(complementary(self.fam, x, np.abs(vals)), axis=-1) * self.grid.cell

    def sobolev_conjugate_table(self, method="auto"):
        if method not in self._conj:
            nodes = self.grid.nodes
            x = nodes[0] if self.fam.x_independent else nodes
            self._conj[method] = SobolevConjugate(self.fam, x, self.grid.s, method=method)
        return self._conj[method]

    def sobolev_conjugate(self, vals, method="auto"):
        """Modular ``sum G*_{x_i}(|u_i|) h^d``."""
        sc = self.sobolev_conjugate_table(method)
        return np.sum(sc(np.abs(vals)), axis=-1) * self.grid.cell


def evaluator(fam, grid):
    """Shared ModularEvaluator for ``(fam, grid)``."""
    store = grid.family_cache(fam)
    if "evaluator" not in store:
        store["evaluator"] = ModularEvaluator(fam, grid)
    return store["evaluator"]


def modular_Ghat(fam, u):
    """``J(u) = sum_i Ghat_{x_i}(|u_i|) h^d``."""
    grid, vals = as_values(u)
    return float(evaluator(fam, grid).Ghat(vals))


def modular_gagliardo(fam, u, order="canonical"):
    """Discrete Gagliardo modular over ordered node pairs ``i != j``.

    ``order="canonical"`` sums row by row in the order of a literal double
    loop (bitwise reproducible); ``order="fast"`` uses pairwise summation
    over the upper triangle, which is what the norms and the solver use.
    """
    grid, vals = as_values(u)
    if order == "canonical":
        return gagliardo_canonical(fam, grid, vals)
    if order != "fast":
        raise ValueError(f"unknown order {order!r}")
    return float(evaluator(fam, grid).gagliardo(vals))


def modular_weighted(fam, u, V):
    """``sum_i V(x_i) Ghat_{x_i}(|u_i|) h^d``; ``V`` must be positive."""
    grid, vals = as_values(u)
    return float(evaluator(fam, grid).weighted(vals, potential_values(V, grid)))


def ball_modular(fam, u, center, r):
    """``modular_Ghat`` restricted to nodes with ``|x_i - center| < r``."""
    grid, vals = as_values(u)
    center = np.asarray(center, dtype=float)
    diff = grid.nodes - center
    inside = np.sqrt(np.sum(diff * diff, axis=-1)) < r
    ev = evaluator(fam, grid)
    return float(np.sum(np.where(inside, ev.Ghat_nodes(vals), 0.0)) * grid.cell)
