"""Evaluation, inversion and conjugation of generalized N-functions."""

import math

import numpy as np

from .._quadrature import GL_W, GL_X, TOL_QUAD, adaptive_quad
from .._roots import golden_section_max, solve_increasing
from ..exceptions import ConfigurationError, DomainError, NumericError
from .families import abs_pow


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise DomainError("x must be a point with a coordinate axis")
    return x


def _finite(t, name="t"):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError(f"{name} must be finite")
    return t


def eval_G(fam, x, y, t, method="auto", tol=TOL_QUAD):
    """``G(x, y, t) = int_0^|t| a(x, y, tau) tau dtau``.

    ``method="auto"`` uses the family's closed form (or its vectorized
    graded quadrature); ``method="quad"`` forces adaptive Gauss-Kronrod
    quadrature of the density at a single point pair, which is what the
    tests use to cross-check closed forms.
    """
    t = _finite(t)
    if method == "auto":
        return fam.G(x, y, t)
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    x = _points(x)
    y = _points(y)
    bound = fam.bind(x, y)

    def one(tt):
        tt = abs(float(tt))
        if tt == 0.0:
            return 0.0
        return adaptive_quad(lambda tau: float(bound.a(np.asarray(tau)) * tau) if tau > 0 else 0.0, 0.0, tt, tol=tol)

    return np.vectorize(one, otypes=[float])(t)


def eval_g(fam, x, y, t):
    """Odd extension ``sign(t) a(x, y, |t|) |t|``; zero at ``t = 0``."""
    return fam.g(x, y, _finite(t))


def _broadcast_xv(x, v):
    x = _points(x)
    v = np.asarray(v, dtype=float)
    shape = np.broadcast_shapes(x.shape[:-1], v.shape)
    return np.broadcast_to(x, shape + x.shape[-1:]), np.broadcast_to(v, shape)


def _hat_bracket(bound, fam, v):
    """Initial bracket for ``Ghat(t) = v`` from the exponent sandwich."""
    c = np.maximum(bound.G(np.ones(np.shape(v))), 1e-300)
    r = np.where(v > 0, v / c, 1.0)
    with np.errstate(over="ignore", divide="ignore"):
        e1 = np.power(r, 1.0 / fam.g_minus)
        e2 = np.power(r, 1.0 / fam.g_plus)
    lo = np.clip(np.minimum(e1, e2), 1e-300, 1e300)
    hi = np.clip(np.maximum(e1, e2), 1e-300, 1e300)
    return lo, hi


def _inverse_bound(fam, bound, p, v):
    if p is not None:
        return np.power(p * v, 1.0 / p)
    lo, hi = _hat_bracket(bound, fam, v)
    return solve_increasing(bound.G, v, lo, hi)


def inverse_Ghat(fam, x, v):
    """The inverse of the increasing homeomorphism ``Ghat_x`` on ``[0, inf)``."""
    v = _finite(v, "v")
    if np.any(v < 0):
        raise DomainError("inverse_Ghat needs v >= 0")
    x, v = _broadcast_xv(x, v)
    return _inverse_bound(fam, fam.bind_hat(x), fam.hat_power(x), v)


def complementary(fam, x, t, return_argmax=False):
    """Complementary function ``sup_{tau >= 0} (t tau - Ghat_x(tau))``.

    The supremum is attained where ``ghat_x(tau) = t``; that equation is
    solved by monotone root finding.  Entries where the root finder fails
    fall back to a golden-section search.  With ``return_argmax`` the
    maximizer ``tau*`` (the derivative of the complementary function) is
    returned as well.
    """
    t = _finite(t)
    if np.any(t < 0):
        raise DomainError("complementary needs t >= 0")
    x, t = _broadcast_xv(x, t)
    p = fam.hat_power(x)
    if p is not None:
        q = p / (p - 1.0)
        val = abs_pow(t, q) / q
        tau = np.power(t, 1.0 / (p - 1.0))
        return (val, tau) if return_argmax else val
    bound = fam.bind_hat(x)
    gh1 = np.maximum(bound.g(np.ones(t.shape)), 1e-300)
    r = np.where(t > 0, t / gh1, 1.0)
    e1 = np.power(r, 1.0 / (fam.g_minus - 1.0))
    e2 = np.power(r, 1.0 / (fam.g_plus - 1.0))
    try:
        tau = solve_increasing(bound.g, t, np.minimum(e1, e2), np.maximum(e1, e2))
    except NumericError:
        tau = _complementary_golden(bound, t)
    val = t * tau - bound.G(tau)
    val = np.maximum(val, 0.0)
    return (val, tau) if return_argmax else val


def _complementary_golden(bound, t):
    flat_t = np.atleast_1d(t).ravel()
    out = np.zeros(flat_t.shape)
    params_full = bound

    for i, ti in enumerate(flat_t):
        if ti <= 0:
            continue
        idx = np.unravel_index(i, np.shape(t)) if np.ndim(t) else ()

        def phi(tau, ti=ti, idx=idx):
            gval = np.broadcast_to(params_full.G(np.full(np.shape(t), tau)), np.shape(t))
            return ti * tau - float(gval[idx])

        hi = 1.0
        while phi(2 * hi) > phi(hi) and hi < 1e300:
            hi *= 2
        out[i], _ = golden_section_max(phi, 0.0, 2 * hi)
    return out.reshape(np.shape(t))


class SobolevConjugate:
    """Musielak-Sobolev conjugate of ``Ghat_x`` for fixed points ``x``.

    The inverse ``(G*_x)^{-1}(t) = int_0^t Ghat_x^{-1}(tau) tau^{-(d+s)/d} dtau``
    is computed after the substitution ``tau = Ghat_x(sigma)``, which gives
    ``F(sigma) = int_0^sigma r ghat_x(r) Ghat_x(r)^{-(d+s)/d} dr`` with
    ``(G*_x)^{-1}(t) = F(Ghat_x^{-1}(t))`` and ``G*_x(v) = Ghat_x(F^{-1}(v))``.
    The integrand only needs forward evaluations of ``Ghat`` and ``ghat``.
    ``F`` is tabulated once on equal panels in ``w = log sigma`` (8-point
    Gauss-Legendre) with a power-law tail below the mesh; evaluation adds
    one partial panel to the cumulative table.

    ``x`` is one point ``(d,)`` or an array of points ``(M, d)``; in the
    latter case arguments carry the point index on their last axis.
    For x-independent families a single table is shared.

    ``method="closed"`` uses the exact power-law formulas when ``Ghat_x``
    is a pure power, ``"quadrature"`` always integrates and ``"auto"``
    picks the closed form when available.
    """

    panel = 0.5

    def __init__(self, fam, x, s, method="auto"):
        x = _points(x)
        self.d = x.shape[-1]
        self.s = float(s)
        if not 0.0 < self.s < 1.0:
            raise DomainError("fractional order s must lie in (0, 1)")
        if fam.g_plus >= self.d / self.s:
            raise ConfigurationError(
                f"Sobolev conjugate undefined: g_plus={fam.g_plus} >= d/s={self.d / self.s}")
        if method not in ("auto", "closed", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        self.fam = fam
        self.exponent = self.s / self.d
        self.multi = x.ndim == 2 and not fam.x_independent
        self.x = x if self.multi else (x[0] if x.ndim == 2 else x)
        p = fam.hat_power(self.x)
        if method == "closed" and p is None:
            raise ConfigurationError("no closed form for this family")
        self.closed_p = None if method == "quadrature" or p is None else np.asarray(p, dtype=float)
        self._p_last = p
        self._bound_last = fam.bind_hat(self.x)          # params on the last axis
        self._rows = self.x.shape[0] if self.multi else 1
        xt = self.x if self.multi else self.x[None, :]
        self._bound_rows = fam.bind_hat(xt[:, None, :])   # params shape (M, 1)
        # keep Ghat(sigma_floor) well inside the double range
        self.w_floor = max(math.log(1e-15), -650.0 / fam.g_plus)
        self._w_hi = self.w_floor
        self._cum = np.zeros((self._rows, 1))
        self._tail_rate = None
        self._extend(math.log(1e4))

    # -- tabulation ----------------------------------------------------
    def _integrand(self, bound, w):
        sig = np.exp(w)
        return sig * sig * bound.g(sig) * np.power(bound.G(sig), -1.0 - self.exponent)

    def _h(self, w):
        """Integrand of ``F`` in ``w = log sigma``; ``w`` has shape (M, ...)."""
        return self._integrand(self._bound_rows.expand(w.ndim - 2), w)

    def _h_at(self, w, rows):
        """Integrand at ``w`` of shape ``rows.shape + (k,)``, row ``rows[i]`` per entry."""
        if not self.multi:
            return self._h(w[None, ...])[0]
        return self._integrand(self.fam.bind_hat(self.x[rows][..., None, :]), w)

    def _extend(self, w_target):
        if w_target <= self._w_hi:
            return
        n_new = int(math.ceil((w_target - self._w_hi) / self.panel))
        edges = self._w_hi + self.panel * np.arange(n_new + 1)
        if self._tail_rate is None:
            h0 = self._h(np.full((self._rows, 1), self.w_floor))[:, 0]
            h1 = self._h(np.full((self._rows, 1), self.w_floor + self.panel))[:, 0]
            rate = (np.log(h1) - np.log(h0)) / self.panel
            if not np.all(rate > 0):
                raise ConfigurationError("conjugate integral diverges at 0: condition (g5) fails")
            self._tail_rate = rate
            self._cum[:, 0] = h0 / rate
        lo = edges[:-1]
        nodes = lo[:, None] + self.panel * GL_X[None, :]
        wn = np.broadcast_to(nodes, (self._rows,) + nodes.shape)
        vals = self.panel * np.sum(self._h(wn) * GL_W, axis=-1)
        if not np.all(np.isfinite(vals)):
            raise NumericError("Sobolev conjugate table overflowed")
        cum = self._cum[:, -1:] + np.cumsum(vals, axis=1)
        self._cum = np.concatenate([self._cum, cum], axis=1)
        self._w_hi = float(edges[-1])

    def _row_index(self, shape):
        if not self.multi:
            return np.zeros(shape, dtype=int)
        if shape[-1:] != (self._rows,):
            raise DomainError("arguments must carry the point index on their last axis")
        return np.broadcast_to(np.arange(self._rows), shape)

    def _F(self, sig, rows=None):
        """``F(sigma)`` for ``sigma > 0``; ``rows`` defaults to the point index on the last axis."""
        w = np.log(sig)
        self._extend(float(np.max(w)) + self.panel)
        if rows is None:
            rows = self._row_index(w.shape)
        k = np.floor((w - self.w_floor) / self.panel).astype(int)
        below = k < 0
        k = np.clip(k, 0, self._cum.shape[1] - 1)
        w_k = self.w_floor + self.panel * k
        width = w - w_k
        nodes = w_k[..., None] + width[..., None] * GL_X
        partial = width * np.sum(self._h_at(nodes, rows) * GL_W, axis=-1)
        val = self._cum[rows, k] + partial
        if below.any():
            h_here = self._h_at(w[..., None], rows)[..., 0]
            val = np.where(below, h_here / self._tail_rate[rows], val)
        return val

    # -- evaluation ----------------------------------------------------
    def inverse(self, t):
        """``(G*_x)^{-1}(t)`` for ``t >= 0``."""
        t = _finite(t)
        if np.any(t < 0):
            raise DomainError("t must be non-negative")
        if self.closed_p is not None:
            p = self.closed_p
            e = 1.0 / p - self.exponent
            return np.power(p, 1.0 / p) * np.power(t, e) / e
        pos = t > 0
        if not pos.any():
            return np.zeros(t.shape)
        self._row_index(t.shape)
        sig = _inverse_bound(self.fam, self._bound_last, self._p_last, np.where(pos, t, 1.0))
        return np.where(pos, self._F(sig), 0.0)

    def __call__(self, v):
        """``G*_x(v)`` for ``v >= 0``."""
        v = _finite(v, "v")
        if np.any(v < 0):
            raise DomainError("v must be non-negative")
        if self.closed_p is not None:
            p = self.closed_p
            e = 1.0 / p - self.exponent
            return np.power(v * e / np.power(p, 1.0 / p), 1.0 / e)
        pos = v > 0
        if not pos.any():
            return np.zeros(v.shape)
        vmax = float(np.max(v[pos]))
        while np.min(self._cum[:, -1]) < vmax:
            if self._w_hi > 690.0:
                raise NumericError("Sobolev conjugate exceeds floating range")
            self._extend(self._w_hi + max(10.0, 0.5 * (self._w_hi - self.w_floor)))
        rows = self._row_index(v.shape)
        vv = np.where(pos, v, 1.0)
        cum = self._cum
        rf, vf = rows.ravel(), vv.ravel()
        k = np.empty(vf.shape, dtype=int)
        if self._rows <= 256:
            for r in range(self._rows):
                sel = rf == r
                k[sel] = np.searchsorted(cum[r], vf[sel], side="right") - 1
        else:
            step = max(1, 4_000_000 // cum.shape[1])
            for a in range(0, vf.size, step):
                k[a:a + step] = np.sum(cum[rf[a:a + step]] <= vf[a:a + step, None], axis=1) - 1
        k = k.reshape(v.shape)
        # below the table F is a power with the tail rate
        rate = self._tail_rate[rows]
        tail = np.exp(self.w_floor) * np.power(vv / cum[rows, 0], 1.0 / rate)
        lo = np.where(k < 0, 0.5 * tail, np.exp(self.w_floor + self.panel * np.maximum(k, 0)))
        hi = np.where(k < 0, 2.0 * tail, np.exp(self.w_floor + self.panel * (k + 1)))
        sig = self._solve_F(vv, lo, hi, rows)
        return np.where(pos, self._bound_last.G(sig), 0.0)

    def _solve_F(self, v, lo, hi, rows, max_iter=60):
        """Safeguarded Newton for ``F(sigma) = v`` in ``w = log sigma``.

        ``d log F / dw = integrand / F`` is available exactly, so a few
        steps suffice from a panel bracket; entries that do not settle fall
        back to the Illinois solver.
        """
        shape = v.shape
        lv = np.log(v).ravel()
        wa, wb = np.log(lo).ravel(), np.log(hi).ravel()
        rf = np.asarray(rows).ravel()
        w = 0.5 * (wa + wb)
        act = np.arange(w.size)
        for _ in range(max_iter):
            if act.size == 0:
                break
            wk, rk = w[act], rf[act]
            F = self._F(np.exp(wk), rk)
            with np.errstate(divide="ignore"):
                # F underflows only for subnormal targets; bisection handles those
                phi = np.log(F) - lv[act]
            above = phi > 0
            wb[act] = np.where(above, wk, wb[act])
            wa[act] = np.where(above, wa[act], wk)
            with np.errstate(divide="ignore", invalid="ignore"):
                slope = self._h_at(wk[:, None], rk)[:, 0] / F
                wn = wk - phi / slope
            bad = ~np.isfinite(wn) | (wn <= wa[act]) | (wn >= wb[act])
            wn = np.where(bad, 0.5 * (wa[act] + wb[act]), wn)
            wn = np.where(phi == 0, wk, wn)
            w[act] = wn
            settled = (np.abs(wn - wk) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(wk))) | (phi == 0)
            act = act[~settled]
        sig = np.exp(w)
        if act.size:
            sub = solve_increasing(lambda t: self._F(t, rf[act]), v.ravel()[act], np.exp(wa[act]), np.exp(wb[act]))
            sig[act] = sub
        return sig.reshape(shape)


def sobolev_conjugate_inverse(fam, x, t, s, method="auto"):
    """``(G*_x)^{-1}(t) = int_0^t Ghat_x^{-1}(tau) tau^{-(d+s)/d} dtau`` at one point ``x``."""
    return SobolevConjugate(fam, np.asarray(x, float), s, method=method).inverse(t)


def sobolev_conjugate(fam, x, v, s, method="auto"):
    """``G*_x(v)``, the monotone inverse of ``sobolev_conjugate_inverse``."""
    return SobolevConjugate(fam, np.asarray(x, float), s, method=method)(v)
