"""Pair geometry and pair sums for the nonlocal (double-sum) terms.

Every discrete nonlocal quantity is a sum over node pairs ``i != j`` of a
kernel evaluated at the difference quotient ``(u_i - u_j) / |x_i - x_j|^s``
weighted by ``h^{2d} / |x_i - x_j|^d`` (modular) or
``h^{2d} / |x_i - x_j|^{d+s}`` (weak form, gradient).

Distances are computed with ``sqrt`` of the summed squared coordinate
differences; powers of distances are taken with ``math.pow`` on the
distinct distance values, so the weights are bitwise reproducible by any
scalar reference implementation that follows the same formulas.
"""

import math

import numpy as np

CHUNK = 1 << 20
MATERIALIZE_MAX = 3_000_000
ROW_BLOCK = 64
BATCH_ELEMENTS = 1 << 22


def _distances(a, b):
    diff = a - b
    return np.sqrt(np.sum(diff * diff, axis=-1))


class PairGeometry:
    """Upper-triangle pairs ``i < j`` of a grid with distance tables."""

    def __init__(self, grid):
        self.grid = grid
        nodes = grid.nodes
        N = grid.N
        d, s = grid.d, grid.s
        self.h2d = math.pow(grid.h, 2 * d)
        counts = np.arange(N - 1, -1, -1)
        self.n_pairs = int(counts.sum())
        I = np.repeat(np.arange(N, dtype=np.int32), counts)
        starts = np.cumsum(np.r_[0, counts[:-1]])
        J = (np.arange(self.n_pairs) - np.repeat(starts, counts) + np.repeat(np.arange(N), counts) + 1).astype(np.int32)
        self.I, self.J = I, J
        r_u, inv = [], np.empty(self.n_pairs, dtype=np.int32)
        r = np.empty(self.n_pairs)
        for a in range(0, self.n_pairs, CHUNK):
            b = min(a + CHUNK, self.n_pairs)
            r[a:b] = _distances(nodes[I[a:b]], nodes[J[a:b]])
        self.r_table, inv_full = np.unique(r, return_inverse=True)
        inv[:] = inv_full
        del r, inv_full, r_u
        self.idx = inv
        rt = self.r_table.tolist()
        self.rs_table = np.array([math.pow(v, s) for v in rt])
        self.wG_table = np.array([self.h2d / math.pow(v, d) for v in rt])
        self.wg_table = np.array([self.h2d / math.pow(v, d + s) for v in rt])
        self.materialized = self.n_pairs <= MATERIALIZE_MAX
        if self.materialized:
            self.rs = self.rs_table[inv]
            self.wG = self.wG_table[inv]
            self.wg = self.wg_table[inv]

    @classmethod
    def of(cls, grid):
        return grid.cached("pairs", lambda: cls(grid))

    def chunks(self):
        """Yield ``(k, I, J, rs, wG, wg)`` over chunks of pairs."""
        for k, a in enumerate(range(0, self.n_pairs, CHUNK)):
            b = min(a + CHUNK, self.n_pairs)
            if self.materialized:
                yield k, self.I[a:b], self.J[a:b], self.rs[a:b], self.wG[a:b], self.wg[a:b]
            else:
                ix = self.idx[a:b]
                yield k, self.I[a:b], self.J[a:b], self.rs_table[ix], self.wG_table[ix], self.wg_table[ix]

    def lookup(self, r):
        """Table indices of distances ``r`` (which must occur in the table)."""
        ix = np.searchsorted(self.r_table, r)
        ix = np.clip(ix, 0, self.r_table.size - 1)
        return ix


def kernel_symmetric(fam, grid, n_samples=512, seed=0):
    """Whether ``G(x, y, t) = G(y, x, t)`` on this grid (sampled when unknown)."""
    if fam.symmetric is not None:
        return bool(fam.symmetric)
    cache = grid.family_cache(fam)
    if "symmetric" not in cache:
        rng = np.random.default_rng(seed)
        nodes = grid.nodes
        i = rng.integers(0, grid.N, n_samples)
        j = rng.integers(0, grid.N, n_samples)
        t = np.exp(rng.uniform(-5, 5, n_samples))
        cache["symmetric"] = fam.is_symmetric(nodes[i], nodes[j], t)
    return cache["symmetric"]


class PairKernels:
    """Family parameters bound on the pair list of a grid (cached per chunk)."""

    def __init__(self, fam, geom):
        self.fam = fam
        self.geom = geom
        self.symmetric = kernel_symmetric(fam, geom.grid)
        self._cache = {}

    @classmethod
    def of(cls, fam, grid):
        store = grid.family_cache(fam)
        if "pair_kernels" not in store:
            store["pair_kernels"] = cls(fam, PairGeometry.of(grid))
        return store["pair_kernels"]

    def bound(self, k, I, J):
        """``(forward, reverse)`` bound kernels for chunk ``k``; reverse is
        None for symmetric kernels."""
        if k in self._cache:
            return self._cache[k]
        nodes = self.geom.grid.nodes
        if self.fam.x_independent:
            x0 = nodes[:1]
            fwd = self.fam.bind(x0, x0)
            out = (fwd, None)
        else:
            xi, xj = nodes[I], nodes[J]
            fwd = self.fam.bind(xi, xj)
            rev = None if self.symmetric else self.fam.bind(xj, xi)
            out = (fwd, rev)
        if self.geom.materialized or self.fam.x_independent:
            self._cache[k] = out
        return out

    # -- sums over ordered pairs -------------------------------------------
    def modular(self, vals):
        """``sum_{i != j} G_ij((u_i - u_j) / r^s) h^2d / r^d`` for ``vals`` of
        shape ``(..., N)``; upper-triangle evaluation, pairwise summation."""
        vals = np.asarray(vals, dtype=float)
        flat = vals.reshape(-1, vals.shape[-1])
        rows = max(1, BATCH_ELEMENTS // min(CHUNK, max(self.geom.n_pairs, 1)))
        if vals.ndim > 1 and flat.shape[0] > rows:
            # bound the (batch, pairs) temporaries
            out = np.concatenate([self.modular(flat[a:a + rows]) for a in range(0, flat.shape[0], rows)])
            return out.reshape(vals.shape[:-1])
        total = np.zeros(vals.shape[:-1])
        for k, I, J, rs, wG, _ in self.geom.chunks():
            fwd, rev = self.bound(k, I, J)
            q = (vals[..., I] - vals[..., J]) / rs
            Gq = fwd.G(q)
            if rev is None:
                total = total + 2.0 * np.sum(Gq * wG, axis=-1)
            else:
                total = total + np.sum((Gq + rev.G(q)) * wG, axis=-1)
        return total

    def weak(self, u, v):
        """``sum_{i != j} g_ij((u_i - u_j) / r^s) (v_i - v_j) h^2d / r^(d+s)``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        rows = max(1, BATCH_ELEMENTS // min(CHUNK, max(self.geom.n_pairs, 1)))
        if len(shape) > 1 and int(np.prod(shape[:-1])) > rows:
            u2 = np.broadcast_to(u, shape).reshape(-1, shape[-1])
            v2 = np.broadcast_to(v, shape).reshape(-1, shape[-1])
            out = np.concatenate([self.weak(u2[a:a + rows], v2[a:a + rows]) for a in range(0, u2.shape[0], rows)])
            return out.reshape(shape[:-1])
        total = np.zeros(shape[:-1])
        for k, I, J, rs, _, wg in self.geom.chunks():
            fwd, rev = self.bound(k, I, J)
            q = (u[..., I] - u[..., J]) / rs
            dv = v[..., I] - v[..., J]
            gq = fwd.g(q)
            if rev is None:
                total = total + 2.0 * np.sum(gq * dv * wg, axis=-1)
            else:
                total = total + np.sum((gq + rev.g(q)) * dv * wg, axis=-1)
        return total

    def gradient(self, u):
        """Nodal gradient of ``modular`` at a single ``u`` of shape ``(N,)``."""
        u = np.asarray(u, dtype=float)
        N = u.shape[-1]
        grad = np.zeros(N)
        for k, I, J, rs, _, wg in self.geom.chunks():
            fwd, rev = self.bound(k, I, J)
            q = (u[I] - u[J]) / rs
            if rev is None:
                c = 2.0 * fwd.g(q) * wg
            else:
                c = (fwd.g(q) + rev.g(q)) * wg
            grad += np.bincount(I, c, minlength=N) - np.bincount(J, c, minlength=N)
        return grad

    def energy_and_gradient(self, u):
        """``(modular(u), gradient(u))`` in one pass over the pairs."""
        u = np.asarray(u, dtype=float)
        N = u.shape[-1]
        grad = np.zeros(N)
        total = 0.0
        for k, I, J, rs, wG, wg in self.geom.chunks():
            fwd, rev = self.bound(k, I, J)
            q = (u[I] - u[J]) / rs
            if rev is None:
                total += 2.0 * float(np.sum(fwd.G(q) * wG))
                c = 2.0 * fwd.g(q) * wg
            else:
                total += float(np.sum((fwd.G(q) + rev.G(q)) * wG))
                c = (fwd.g(q) + rev.g(q)) * wg
            grad += np.bincount(I, c, minlength=N) - np.bincount(J, c, minlength=N)
        return total, grad


def gagliardo_canonical(fam, grid, u):
    """Gagliardo modular in the canonical summation order.

    Rows ``i = 0..N-1`` in order; within a row the terms ``j = 0..N-1``
    (``j != i``) are accumulated sequentially; row sums are then
    accumulated sequentially.  This is the order of a literal double loop,
    so the result is reproducible bit for bit by a scalar reference.
    """
    geom = PairGeometry.of(grid)
    nodes = grid.nodes
    u = np.asarray(u, dtype=float)
    N = grid.N
    row_sums = np.empty(N)
    for i0 in range(0, N, ROW_BLOCK):
        i1 = min(i0 + ROW_BLOCK, N)
        r = _distances(nodes[i0:i1, None, :], nodes[None, :, :])
        diag = r == 0.0
        ix = geom.lookup(np.where(diag, geom.r_table[0], r))
        rs = np.where(diag, 1.0, geom.rs_table[ix])
        wG = np.where(diag, 0.0, geom.wG_table[ix])
        q = (u[i0:i1, None] - u[None, :]) / rs
        if fam.x_independent:
            Gq = fam.bind(nodes[:1], nodes[:1]).G(q)
        else:
            Gq = fam.bind(nodes[i0:i1, None, :], nodes[None, :, :]).G(q)
        terms = np.where(diag, 0.0, Gq * wG)
        row_sums[i0:i1] = np.cumsum(terms, axis=1)[:, -1]
    return float(np.cumsum(row_sums)[-1])
