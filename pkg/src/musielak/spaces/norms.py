"""Luxemburg norms of discrete modulars."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import NotInSpaceError, NumericError
from ..nfunction.assumptions import gstar, gtilde
from ..reports import signed_violation
from .grid import GridFunction, as_values
from .modulars import evaluator, potential_values

TOL_LUX = 1e-8
MAX_ITER = 200


@dataclass
class NormValue:
    """Luxemburg norm with diagnostics.

    ``modular_at_norm`` is the modular at ``u / value``; it lies in
    ``[1 - tol_lux, 1]`` on success.  ``tol_achieved`` is ``1 - modular_at_norm``.
    """

    value: float
    modular_at_norm: float
    bisection_iters: int
    tol_achieved: float
    converged: bool = True
    modular: float = float("nan")

    def __float__(self):
        return float(self.value)


@dataclass
class NormBatch:
    """Vectorized NormValue for a batch of functions."""

    value: np.ndarray
    modular_at_norm: np.ndarray
    bisection_iters: np.ndarray
    modular: np.ndarray
    converged: np.ndarray

    def __len__(self):
        return len(self.value)

    def __getitem__(self, k):
        return NormValue(float(self.value[k]), float(self.modular_at_norm[k]), int(self.bisection_iters[k]),
                         float(1.0 - self.modular_at_norm[k]) if self.value[k] > 0 else 0.0,
                         bool(self.converged[k]), float(self.modular[k]))


def _bracket(m, g_minus, g_plus):
    """Sandwich bracket for the norm given the modular ``m`` at ``lambda = 1``."""
    a = np.power(m, 1.0 / g_minus)
    b = np.power(m, 1.0 / g_plus)
    return np.minimum(a, b), np.maximum(a, b)


def luxemburg_batch(modular, vals, exponents, tol=TOL_LUX, max_iter=MAX_ITER):
    """Luxemburg norms ``inf{lam : modular(u / lam) <= 1}`` for a batch.

    Parameters
    ----------
    modular : callable
        Maps value arrays ``(k, N)`` to modulars ``(k,)``; must be
        increasing along rays.
    vals : ndarray, shape (B, N)
    exponents : (float, float)
        ``(g_minus, g_plus)`` of the modular; only used for the initial
        bracket, which is widened automatically if it is wrong.

    Notes
    -----
    The search runs on ``mu = log lam`` with an Illinois secant step on
    ``log modular`` and stops at the first upper endpoint whose modular lies
    in ``[1 - tol, 1]``.
    """
    vals = np.atleast_2d(np.asarray(vals, dtype=float))
    B = vals.shape[0]
    g_minus, g_plus = exponents
    m = np.asarray(modular(vals), dtype=float).reshape(B)
    if np.any(np.isinf(m)) or np.any(np.isnan(m)):
        raise NotInSpaceError("modular is infinite: function not in the space")
    zero = ~np.any(vals != 0, axis=-1) | (m == 0)
    value = np.zeros(B)
    at_norm = np.zeros(B)
    iters = np.zeros(B, dtype=int)
    conv = np.ones(B, dtype=bool)
    act = np.flatnonzero(~zero)
    if act.size == 0:
        return NormBatch(value, at_norm, iters, m, conv)

    def f(idx, lam):
        return np.asarray(modular(vals[idx] / lam[:, None]), dtype=float)

    lo, hi = _bracket(m[act], g_minus, g_plus)
    lo = lo * (1.0 - 1e-13)
    hi = hi * (1.0 + 1e-13)
    f_lo = f(act, lo)
    f_hi = f(act, hi)
    n_it = np.full(act.size, 2)
    step = np.full(act.size, 1e-12)
    for _ in range(max_iter):
        bad = f_hi > 1.0
        if not bad.any():
            break
        hi = np.where(bad, hi * (1.0 + step), hi)
        step = np.where(bad, np.minimum(step * 16.0, 1e6), step)
        sub = np.flatnonzero(bad)
        f_hi[sub] = f(act[sub], hi[sub])
        n_it += bad
    step = np.full(act.size, 1e-12)
    for _ in range(max_iter):
        bad = (f_lo < 1.0 - tol) & (f_hi < 1.0 - tol)
        if not bad.any():
            break
        lo = np.where(bad, lo / (1.0 + step), lo)
        step = np.where(bad, np.minimum(step * 16.0, 1e6), step)
        sub = np.flatnonzero(bad)
        f_lo[sub] = f(act[sub], lo[sub])
        n_it += bad

    take = (f_hi < 1.0 - tol) & (f_lo <= 1.0)
    hi = np.where(take, lo, hi)
    f_hi = np.where(take, f_lo, f_hi)
    ya, yb = np.log(lo), np.log(hi)
    Fa, Fb = np.log(np.maximum(f_lo, 1e-300)), np.log(np.maximum(f_hi, 1e-300))
    side = np.zeros(act.size, dtype=int)
    done = f_hi >= 1.0 - tol
    for _ in range(max_iter):
        run = np.flatnonzero(~done)
        if run.size == 0:
            break
        fa, fb = Fa[run], Fb[run]
        a, b = ya[run], yb[run]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = b - fb * (b - a) / (fb - fa)
        mid = 0.5 * (a + b)
        c = np.where(~np.isfinite(c) | (c <= a) | (c >= b), mid, c)
        fc = f(act[run], np.exp(c))
        n_it[run] += 1
        Fc = np.log(np.maximum(fc, 1e-300))
        feasible = fc <= 1.0
        # root of log f = 0 lies above c when f(c) > 1 (f decreasing in lambda)
        up = ~feasible
        s = side[run]
        Fb_new = np.where(up & (s == 1), 0.5 * fb, fb)
        Fa_new = np.where(feasible & (s == -1), 0.5 * fa, fa)
        ya[run] = np.where(up, c, a)
        Fa[run] = np.where(up, Fc, Fa_new)
        yb[run] = np.where(feasible, c, b)
        Fb[run] = np.where(feasible, Fc, Fb_new)
        f_hi[run] = np.where(feasible, fc, f_hi[run])
        side[run] = np.where(up, 1, -1)
        fin = feasible & (fc >= 1.0 - tol)
        stuck = (yb[run] - ya[run]) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(yb[run]))
        done[run] = fin | stuck
    lam = np.exp(yb)
    ok = (f_hi >= 1.0 - tol) & (f_hi <= 1.0)
    value[act] = lam
    at_norm[act] = f_hi
    iters[act] = n_it
    conv[act] = ok
    return NormBatch(value, at_norm, iters, m, conv)


def luxemburg_norm(modular, u, exponents, grid=None, tol=TOL_LUX, max_iter=MAX_ITER, strict=False):
    """Luxemburg norm of one grid function.

    ``modular`` maps value arrays ``(k, N)`` to ``(k,)``.  With
    ``strict=True`` a run that misses the tolerance raises NumericError,
    otherwise it is reported through ``converged``.
    """
    grid, vals = as_values(u, grid)
    res = luxemburg_batch(modular, vals[None, :], exponents, tol, max_iter)[0]
    if res.value == 0.0:
        res.tol_achieved = 0.0
    if strict and not res.converged:
        raise NumericError("Luxemburg bisection did not reach tolerance", achieved=res.tol_achieved,
                           iteration=res.bisection_iters)
    return res


def _exps(fam):
    return fam.g_minus, fam.g_plus


def norm_Ghat(fam, u):
    """``||u||`` in the Musielak-Orlicz space of ``Ghat``."""
    grid, _ = as_values(u)
    return luxemburg_norm(evaluator(fam, grid).Ghat, u, _exps(fam))


def seminorm_gagliardo(fam, u):
    """Gagliardo seminorm: Luxemburg norm of the Gagliardo modular."""
    grid, _ = as_values(u)
    return luxemburg_norm(evaluator(fam, grid).gagliardo, u, _exps(fam))


def norm_W(fam, u):
    """``||u||_{L^Ghat} + [u]_{s,G}``."""
    return norm_Ghat(fam, u).value + seminorm_gagliardo(fam, u).value


def norm_combined(fam, u):
    """Luxemburg norm of ``rho = J_Ghat + J_{s,G}``."""
    grid, _ = as_values(u)
    return luxemburg_norm(evaluator(fam, grid).combined, u, _exps(fam))


def norm_weighted(fam, u, V):
    """Luxemburg norm of the V-weighted modular."""
    grid, _ = as_values(u)
    Vn = potential_values(V, grid)
    ev = evaluator(fam, grid)
    return luxemburg_norm(lambda w: ev.weighted(w, Vn), u, _exps(fam))


def norm_E(fam, u, V):
    """``[u]_{s,G} + ||u||`` of the V-weighted space."""
    return seminorm_gagliardo(fam, u).value + norm_weighted(fam, u, V).value


def conjugate_exponents(fam):
    """``(g~_low, g~_high)`` of the complementary function."""
    return gtilde(fam.g_plus), gtilde(fam.g_minus)


def norm_conjugate(fam, u):
    """Luxemburg norm for the complementary function of ``Ghat``."""
    grid, _ = as_values(u)
    return luxemburg_norm(evaluator(fam, grid).conjugate, u, conjugate_exponents(fam))


def norm_sobolev_conjugate(fam, u, method="auto"):
    """Luxemburg norm for the Sobolev conjugate ``G*``."""
    grid, _ = as_values(u)
    ev = evaluator(fam, grid)
    exps = (float(gstar(fam.g_minus, grid.d, grid.s)), float(gstar(fam.g_plus, grid.d, grid.s)))
    return luxemburg_norm(lambda w: ev.sobolev_conjugate(w, method), u, exps)


def holder_pair(fam, u, v):
    """``(sum u_i v_i h^d, 2 ||u|| ||v||~)`` with the complementary norm on ``v``."""
    grid, uv = as_values(u)
    _, vv = as_values(v, grid)
    pairing = float(np.sum(uv * vv) * grid.cell)
    bound = 2.0 * norm_Ghat(fam, u).value * norm_conjugate(fam, v).value
    return pairing, bound


def modular_power(vals, p, cell):
    """``sum |u_i|^{p_i} / p_i h^d`` for a nodal exponent field."""
    p = np.asarray(p, dtype=float)
    return np.sum(np.power(np.abs(vals), p) / p, axis=-1) * cell


def norm_power(u, p, grid=None):
    """Variable-exponent Luxemburg norm with ``B_x(t) = |t|^{p(x)} / p(x)``."""
    grid, vals = as_values(u, grid)
    p = np.broadcast_to(np.asarray(p, dtype=float), (grid.N,))
    return luxemburg_norm(lambda w: modular_power(w, p, grid.cell), vals, (float(p.min()), float(p.max())), grid=grid)


def char_function_norm(fam, grid, B):
    """Luxemburg norm of the indicator of the node set ``B``.

    ``B`` is a boolean mask over the nodes or an array of node indices.
    """
    B = np.asarray(B)
    mask = np.zeros(grid.N, dtype=bool)
    if B.dtype == bool:
        mask[:] = B
    else:
        mask[B.astype(int)] = True
    u = GridFunction(grid, mask.astype(float))
    return norm_Ghat(fam, u)


def char_function_bounds(fam, measure, ell=None):
    """Brackets ``(C3 min{|B|^(1/l-), |B|^(1/l+)}, C4 max{...})`` for indicator norms.

    ``C3 = min(C1^(1/l-), C1^(1/l+))`` and ``C4 = max(C2^(1/l-), C2^(1/l+))``.
    """
    lm, lp = ell or (fam.g_minus, fam.g_plus)
    c1, c2 = fam.c1, fam.c2
    if c1 is None or c2 is None:
        raise ValueError("family does not declare C1, C2")
    C3 = min(c1 ** (1 / lm), c1 ** (1 / lp))
    C4 = max(c2 ** (1 / lm), c2 ** (1 / lp))
    measure = np.asarray(measure, dtype=float)
    a, b = np.power(measure, 1 / lm), np.power(measure, 1 / lp)
    return C3 * np.minimum(a, b), C4 * np.maximum(a, b)


def sandwich_violation(norm, modular, g_minus, g_plus):
    """Signed violation of ``min{n^g-, n^g+} <= m <= max{n^g-, n^g+}``."""
    norm = np.asarray(norm, dtype=float)
    a, b = np.power(norm, g_minus), np.power(norm, g_plus)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return np.maximum(signed_violation(lo, modular), signed_violation(modular, hi))
