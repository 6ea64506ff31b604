"""Independent reference implementations used by the tests.

Nothing here calls the library's numerics: the oracles are literal loops,
scipy quadrature and brute-force searches over the textbook definitions.
"""

import math

import numpy as np
from scipy import integrate, optimize


def gagliardo_double_loop(axis, d, s, u, G):
    """Literal double loop over ordered node pairs ``i != j``.

    ``axis`` is the list of node coordinates along one axis and ``G`` a
    scalar callable ``G(q)``.  Rows are summed left to right and row sums
    are accumulated in row order.
    """
    axis = [float(a) for a in axis]
    n = len(axis)
    h = 2.0 * abs(axis[0]) / (n - 1)
    h2d = math.pow(h, 2 * d)
    if d == 1:
        nodes = [(a,) for a in axis]
    elif d == 2:
        nodes = [(a, b) for a in axis for b in axis]
    else:
        nodes = [(a, b, c) for a in axis for b in axis for c in axis]
    u = [float(v) for v in u]
    total = 0.0
    for i, xi in enumerate(nodes):
        row = 0.0
        for j, xj in enumerate(nodes):
            if i == j:
                continue
            r2 = 0.0
            for k in range(d):
                dk = xi[k] - xj[k]
                r2 = r2 + dk * dk
            r = math.sqrt(r2)
            q = (u[i] - u[j]) / math.pow(r, s)
            row = row + G(q) * (h2d / math.pow(r, d))
        total = total + row
    return total


def quad_G(a, t):
    """``int_0^|t| a(tau) tau dtau`` by adaptive scipy quadrature."""
    t = abs(float(t))
    if t == 0.0:
        return 0.0
    val, _ = integrate.quad(lambda tau: a(tau) * tau, 0.0, t, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def brute_complementary(G, t, tau_max=None):
    """``sup_tau (t tau - G(tau))`` by a coarse grid scan refined with golden section."""
    t = float(t)
    if t == 0.0:
        return 0.0
    tau_max = tau_max or 1.0
    while t * (2 * tau_max) - G(2 * tau_max) > t * tau_max - G(tau_max):
        tau_max *= 2.0
    tau_max *= 2.0
    grid = np.linspace(0.0, tau_max, 4001)
    vals = t * grid - np.array([G(v) for v in grid])
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda v: -(t * v - G(v)), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-14})
    return max(float(-res.fun), float(vals[k]))


def sobolev_conjugate_inverse_quad(G, g, t, d, s):
    """``(G*)^{-1}(t)`` from ``tau = G(sigma)`` and ``w = log sigma``.

    ``int_0^t G^{-1}(tau) tau^{-(d+s)/d} dtau
    = int_{-inf}^{log G^{-1}(t)} sigma^2 g(sigma) G(sigma)^{-(d+s)/d} dw``.
    """
    e = (d + s) / d
    top = optimize.brentq(lambda x: G(x) - t, 0.0, 1.0 + t, xtol=1e-15, rtol=1e-15)

    def f(w):
        sg = math.exp(w)
        return sg * sg * g(sg) * G(sg) ** (-e)

    wt = math.log(top)
    pts = [-120.0, -60.0, -30.0, -15.0, -5.0, 0.0]
    knots = [p for p in pts if p < wt] + [wt]
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        total += val
    return total


def central_difference(f, x, e, eps):
    return (f(x + eps * e) - f(x - eps * e)) / (2.0 * eps)
