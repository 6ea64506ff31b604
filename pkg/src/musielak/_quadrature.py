"""Quadrature helpers.

Integrals of the form ``int_0^t f(tau) dtau`` with ``f`` behaving like a
power of ``tau`` near zero are computed in the variable ``w = log tau`` on
equal-width panels (a geometric mesh in ``tau``) with Gauss-Legendre nodes
on each panel.  The part below the lowest panel is closed analytically by
fitting a power law to the two lowest nodes.
"""

import warnings

import numpy as np
from scipy import integrate

from .exceptions import NumericError

TOL_QUAD = 1e-10

GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
# Nodes mapped to [0, 1].
GL_X = 0.5 * (_GL_NODES + 1.0)
GL_W = 0.5 * _GL_WEIGHTS


def adaptive_quad(f, a, b, tol=TOL_QUAD, limit=200):
    """Adaptive Gauss-Kronrod quadrature of a scalar function.

    Raises NumericError (with the achieved error estimate) when the
    requested tolerance is not met.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=True)[:3]
    if err > max(tol, tol * abs(val)) * 10:
        raise NumericError(f"quadrature did not converge on [{a}, {b}]", achieved=err)
    return val


def tail_power_integral(w0, f0, w1, f1):
    """Integral over ``(-inf, w0]`` of ``exp(w) * F(exp(w))`` when the
    integrand ``h(w) = F(e^w) e^w`` is a pure exponential through
    ``(w0, f0)`` and ``(w1, f1)`` with ``w1 > w0``.

    Returns 0 where the fitted exponent is not positive (divergent tail is
    reported by the caller's assumption checks, not here).
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = (np.log(f1) - np.log(f0)) / (w1 - w0)
        val = np.where((rate > 0) & (f0 > 0), f0 / rate, 0.0)
    return val


def log_panel_integral(h, w_lo, w_hi):
    """Gauss-Legendre integral of ``h(w)`` on panels ``[w_lo, w_hi]``.

    ``w_lo`` and ``w_hi`` broadcast together; ``h`` is evaluated on an array
    with one extra trailing axis of length GL_ORDER.
    """
    w_lo = np.asarray(w_lo, dtype=float)
    w_hi = np.asarray(w_hi, dtype=float)
    width = w_hi - w_lo
    w = w_lo[..., None] + width[..., None] * GL_X
    return width * np.sum(h(w) * GL_W, axis=-1)


def graded_integral(F, t, panel=0.5, depth=70.0):
    """``int_0^t F(tau) dtau`` for positive ``F`` with power behaviour at 0.

    ``F`` must accept arrays with shape ``t.shape + (n_panels, GL_ORDER)``.
    The mesh is geometric with ratio ``exp(panel)`` and reaches down to
    ``t * exp(-depth)``; the remainder is closed with a power-law tail.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    if not pos.any():
        return out
    n_pan = int(np.ceil(depth / panel))
    top = np.log(np.where(pos, t, 1.0))
    edges = top[..., None] - panel * np.arange(n_pan, -1, -1)

    def h(w):
        tau = np.exp(w)
        return F(tau) * tau

    vals = log_panel_integral(h, edges[..., :-1], edges[..., 1:])
    total = vals.sum(axis=-1)
    w0 = edges[..., 0]
    w1 = edges[..., 0] + panel
    f0 = h(w0[..., None, None])[..., 0, 0]
    f1 = h(w1[..., None, None])[..., 0, 0]
    total = total + tail_power_integral(w0, f0, w1, f1)
    if not np.all(np.isfinite(total[pos])):
        raise NumericError("graded quadrature produced non-finite values")
    return np.where(pos, total, 0.0)
