"""Vectorized root finding for strictly increasing positive maps.

Every inversion in the library (``G^{-1}``, the first-order condition of
the Legendre transform, the Sobolev conjugate, Luxemburg norms) reduces to
solving ``f(t) = v`` for an increasing ``f`` on ``(0, inf)``.  The solver
works on ``log t`` and ``log f`` where N-functions are close to affine, so
a bracketed secant step (Illinois variant) converges in a handful of
iterations; a plain bisection step is taken whenever the secant step
leaves the bracket.
"""

import numpy as np

from .exceptions import NumericError

TOL_ROOT = 1e-10

_TINY = 1e-300
_HUGE = 1e300


def expand_bracket(f, target, lo, hi, max_steps=80):
    """Grow ``[lo, hi]`` until ``f(lo) <= target <= f(hi)`` elementwise.

    The growth factor is squared at every step (2, 4, 16, ...), so brackets
    spanning hundreds of decades are found in a few steps.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    f_lo = f(lo)
    f_hi = f(hi)
    factor = np.full(hi.shape, 2.0)
    for _ in range(max_steps):
        need = f_hi < target
        if not need.any():
            break
        hi = np.where(need, np.minimum(hi * factor, _HUGE), hi)
        factor = np.where(need, np.minimum(factor * factor, 1e16), factor)
        f_hi = np.where(need, f(hi), f_hi)
    else:
        raise NumericError("could not bracket root from above")
    factor = np.full(lo.shape, 2.0)
    for _ in range(max_steps):
        need = f_lo > target
        if not need.any():
            break
        lo = np.where(need, np.maximum(lo / factor, _TINY), lo)
        factor = np.where(need, np.minimum(factor * factor, 1e16), factor)
        f_lo = np.where(need, f(lo), f_lo)
    else:
        raise NumericError("could not bracket root from below")
    return lo, hi, f_lo, f_hi


def solve_increasing(f, target, lo=None, hi=None, rtol=1e-14, max_iter=200):
    """Solve ``f(t) = target`` for ``t > 0``, elementwise.

    Parameters
    ----------
    f : callable
        Vectorized, strictly increasing, positive on ``(0, inf)``.  It is
        called with arrays of the broadcast shape of ``target``.
    target : array_like
        Non-negative right-hand sides; zeros map to ``t = 0``.
    lo, hi : array_like, optional
        Initial bracket guesses (expanded automatically if wrong).
    rtol : float
        Relative width of the final bracket in ``t``.

    Returns
    -------
    ndarray
        Solutions with the shape of ``target``.
    """
    target = np.asarray(target, dtype=float)
    shape = target.shape
    v = np.atleast_1d(target).astype(float)
    out = np.zeros(v.shape)
    pos = v > 0
    if not pos.any():
        return out.reshape(shape)

    lo = np.ones(v.shape) if lo is None else np.broadcast_to(np.asarray(lo, float), v.shape).copy()
    hi = lo.copy() if hi is None else np.broadcast_to(np.asarray(hi, float), v.shape).copy()
    lo = np.where(pos, np.maximum(lo, _TINY), 1.0)
    hi = np.where(pos, np.maximum(hi, lo), 1.0)
    tv = np.where(pos, v, 1.0)

    def fpos(t):
        return f(t)

    # Positions with target 0 are parked at f(1) so they never trigger expansion.
    def fpark(t):
        val = fpos(t)
        return np.where(pos, val, tv)

    lo, hi, f_lo, f_hi = expand_bracket(fpark, tv, lo, hi)

    ya, yb = np.log(lo), np.log(hi)
    log_t = np.log(tv)
    Fa = _safe_log(f_lo) - log_t
    Fb = _safe_log(f_hi) - log_t
    side = np.zeros(v.shape, dtype=int)
    floor = rtol + 8 * np.finfo(float).eps * np.maximum(np.abs(ya), np.abs(yb))
    done = ~pos | (Fa >= 0) | (Fb <= 0) | (yb - ya <= floor)
    best = np.where(Fb <= 0, yb, ya)
    for _ in range(max_iter):
        act = ~done
        if not act.any():
            break
        denom = Fb - Fa
        with np.errstate(divide="ignore", invalid="ignore"):
            yc = yb - Fb * (yb - ya) / denom
        mid = 0.5 * (ya + yb)
        bad = ~np.isfinite(yc) | (yc <= ya) | (yc >= yb)
        yc = np.where(bad, mid, yc)
        Fc = np.full(v.shape, np.nan)
        Fc[act] = _safe_log(fpos(np.exp(yc))[act]) - log_t[act]
        hit = act & (Fc == 0)
        best = np.where(hit, yc, best)
        done |= hit
        lower = act & ~hit & (Fc < 0)
        upper = act & ~hit & (Fc > 0)
        # Illinois: halve the stale endpoint's value after two same-side moves.
        Fb = np.where(lower & (side == -1), 0.5 * Fb, Fb)
        Fa = np.where(upper & (side == 1), 0.5 * Fa, Fa)
        ya = np.where(lower, yc, ya)
        Fa = np.where(lower, Fc, Fa)
        yb = np.where(upper, yc, yb)
        Fb = np.where(upper, Fc, Fb)
        side = np.where(lower, -1, np.where(upper, 1, side))
        width = yb - ya
        conv = act & ~hit & (width <= floor)
        best = np.where(conv, 0.5 * (ya + yb), best)
        done |= conv
    else:
        if not done.all():
            raise NumericError("root solver did not converge", achieved=float(np.max(yb - ya)))
    out = np.where(pos, np.exp(best), 0.0)
    return out.reshape(shape)


def _safe_log(x):
    return np.log(np.maximum(x, _TINY))


def golden_section_max(phi, lo, hi, tol=1e-12, max_iter=400):
    """Maximize a unimodal scalar function on ``[lo, hi]``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(d)
    x = 0.5 * (a + b)
    return x, phi(x)
