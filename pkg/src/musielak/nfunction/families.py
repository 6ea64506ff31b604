"""Generalized N-function families.

A family is defined by its density ``a(x, y, t)``; everything else follows:

    g(x, y, t) = a(x, y, |t|) |t| sign(t),     G(x, y, t) = int_0^|t| g(x, y, tau) dtau,

and the diagonal restrictions ``Ghat(x, t) = G(x, x, t)``,
``ghat(x, t) = g(x, x, t)``.

All methods broadcast: points ``x`` and ``y`` have shape ``(..., d)`` and
``t`` has a shape broadcastable with ``x.shape[:-1]``.
"""

import numpy as np

from .._quadrature import graded_integral
from ..exceptions import DomainError


def abs_pow(t, p):
    """``|t| ** p`` with exact fast paths for the common integer exponents."""
    t = np.abs(t)
    if np.ndim(p) == 0:
        p = float(p)
        if p == 2.0:
            return t * t
        if p == 3.0:
            return t * t * t
        if p == 1.0:
            return t
        if p == 4.0:
            t2 = t * t
            return t2 * t2
    return np.power(t, p)


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise DomainError("points must have a trailing coordinate axis")
    return x


def _check_finite(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("N-function argument must be finite")
    return t


class BoundN:
    """An N-function with its parameters evaluated at fixed point pairs.

    Used in the hot loops (pair sums, Luxemburg bisections) where the
    same ``(x, y)`` set is reused with many arguments ``t``.
    """

    def __init__(self, family, params):
        self.family = family
        self.params = params

    def expand(self, n_axes):
        """Append ``n_axes`` singleton axes to every array parameter."""
        idx = (Ellipsis,) + (None,) * n_axes
        params = {}
        for k, v in self.params.items():
            if isinstance(v, np.ndarray) and v.ndim > 0:
                if k in ("x", "y"):
                    params[k] = v[(Ellipsis,) + (None,) * n_axes + (slice(None),)]
                else:
                    params[k] = v[idx]
            else:
                params[k] = v
        return BoundN(self.family, params)

    def G(self, t):
        return self.family._G(self.params, np.abs(t))

    def a(self, t):
        return self.family._a(self.params, t)

    def g(self, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = self.family._g_pos(self.params, at)
        return np.where(at > 0, np.sign(t) * val, 0.0)


class NFunctionFamily:
    """Base class of all families.

    Subclasses implement ``_params``, ``_a`` and optionally ``_G`` and
    ``_g_pos`` closed forms.  The generic ``_G`` integrates ``a(tau) tau``
    by graded quadrature.

    Attributes
    ----------
    g_minus, g_plus : float
        Declared exponent bounds of ``a t^2 / G``.
    c1, c2 : float
        Declared bounds of ``G(x, y, 1)``.
    x_independent : bool
        True when ``Ghat(x, .)`` does not depend on ``x``.
    """

    kind = "Custom"
    x_independent = False

    def __init__(self, g_minus, g_plus, c1=None, c2=None):
        if not (np.isfinite(g_minus) and np.isfinite(g_plus)):
            raise DomainError("exponent bounds must be finite")
        if not 1.0 < g_minus <= g_plus:
            raise DomainError(f"need 1 < g_minus <= g_plus, got ({g_minus}, {g_plus})")
        self.g_minus = float(g_minus)
        self.g_plus = float(g_plus)
        self.c1 = None if c1 is None else float(c1)
        self.c2 = None if c2 is None else float(c2)

    def __repr__(self):
        return f"{type(self).__name__}(g_minus={self.g_minus}, g_plus={self.g_plus})"

    @property
    def name(self):
        return repr(self)

    # -- parametrization ------------------------------------------------
    def _params(self, x, y):
        return {"x": x, "y": y}

    def bind(self, x, y):
        x = _as_points(x)
        y = _as_points(y)
        return BoundN(self, self._params(x, y))

    def bind_hat(self, x):
        x = _as_points(x)
        return self.bind(x, x)

    # -- kernel ---------------------------------------------------------
    def _a(self, params, t):
        raise NotImplementedError

    def _g_pos(self, params, t):
        return self._a(params, t) * t

    def _G(self, params, t):
        shape = np.broadcast_shapes(np.shape(t), *[np.shape(v)[:-1] if k in ("x", "y") else np.shape(v)
                                                   for k, v in params.items() if isinstance(v, np.ndarray)])
        t = np.broadcast_to(t, shape)
        expanded = {}
        for k, v in params.items():
            if isinstance(v, np.ndarray) and v.ndim > 0:
                if k in ("x", "y"):
                    v = np.broadcast_to(v, shape + v.shape[-1:])[..., None, None, :]
                else:
                    v = np.broadcast_to(v, shape)[..., None, None]
            expanded[k] = v

        def integrand(tau):
            return self._g_pos(expanded, tau)

        return graded_integral(integrand, t)

    # -- public evaluation ---------------------------------------------
    def a(self, x, y, t):
        t = _check_finite(t)
        if np.any(t <= 0):
            raise DomainError("a(x, y, t) is defined for t > 0")
        return self.bind(x, y).a(t)

    def G(self, x, y, t):
        return self.bind(x, y).G(_check_finite(t))

    def g(self, x, y, t):
        return self.bind(x, y).g(_check_finite(t))

    def Ghat(self, x, t):
        return self.bind_hat(x).G(_check_finite(t))

    def ghat(self, x, t):
        return self.bind_hat(x).g(_check_finite(t))

    # -- closed-form hooks ---------------------------------------------
    def hat_power(self, x):
        """Exponent ``p(x)`` when ``Ghat_x(t) = |t|^p / p`` exactly, else None."""
        return None

    def is_symmetric(self, x, y, t, rtol=1e-12):
        """Check ``G(x, y, t) == G(y, x, t)`` on the given samples."""
        a = self.G(x, y, t)
        b = self.G(y, x, t)
        return bool(np.all(np.abs(a - b) <= rtol * np.maximum(1.0, np.abs(a))))

    @property
    def symmetric(self):
        """Whether the kernel is symmetric by construction (None = unknown)."""
        return None


class PowerVariable(NFunctionFamily):
    """``G(x, y, t) = |t|^p(x,y) / p(x,y)``.

    ``p`` is a constant or a callable ``p(x, y)`` on point arrays; for a
    callable the bounds ``p_minus, p_plus`` must be declared.
    """

    kind = "PowerVariable"

    def __init__(self, p, p_minus=None, p_plus=None):
        if callable(p):
            if p_minus is None or p_plus is None:
                raise DomainError("variable exponent needs declared p_minus and p_plus")
            self._p_fn = p
            self.p = None
        else:
            p = float(p)
            self._p_fn = None
            self.p = p
            p_minus = p if p_minus is None else p_minus
            p_plus = p if p_plus is None else p_plus
        super().__init__(p_minus, p_plus, c1=1.0 / p_plus, c2=1.0 / p_minus)

    def __repr__(self):
        if self.p is not None:
            return f"PowerVariable(p={self.p:g})"
        return f"PowerVariable(p=<variable in [{self.g_minus:g}, {self.g_plus:g}]>)"

    @property
    def x_independent(self):
        return self._p_fn is None

    @property
    def symmetric(self):
        return True if self._p_fn is None else None

    def _params(self, x, y):
        if self._p_fn is None:
            return {"p": self.p}
        return {"p": np.asarray(self._p_fn(x, y), dtype=float)}

    def _a(self, params, t):
        return np.power(t, params["p"] - 2.0)

    def _g_pos(self, params, t):
        p = params["p"]
        if np.ndim(p) == 0 and float(p) == 2.0:
            return t
        return np.power(t, p - 1.0)

    def _G(self, params, t):
        return abs_pow(t, params["p"]) / params["p"]

    def hat_power(self, x):
        if self._p_fn is None:
            return self.p
        x = _as_points(x)
        return np.asarray(self._p_fn(x, x), dtype=float)


class DoublePhase(NFunctionFamily):
    """``G(x, y, t) = |t|^p / p + b(x, y) |t|^q / q`` with ``1 < p < q``.

    ``b`` is a non-negative constant or callable; a callable needs declared
    ``b_range = (b_min, b_max)`` for the fractional boundedness constants.
    """

    kind = "DoublePhase"

    def __init__(self, p=2.0, q=3.0, b=1.0, b_range=None):
        if not 1.0 < p < q:
            raise DomainError(f"double phase needs 1 < p < q, got p={p}, q={q}")
        self.p = float(p)
        self.q = float(q)
        if callable(b):
            if b_range is None:
                raise DomainError("callable weight b needs a declared b_range")
            self._b_fn = b
            self.b = None
            b_min, b_max = b_range
        else:
            if b < 0:
                raise DomainError("double phase weight must be non-negative")
            self._b_fn = None
            self.b = float(b)
            b_min = b_max = self.b
        super().__init__(self.p, self.q, c1=1.0 / self.p + b_min / self.q, c2=1.0 / self.p + b_max / self.q)

    def __repr__(self):
        b = f"{self.b:g}" if self.b is not None else "<field>"
        return f"DoublePhase(p={self.p:g}, q={self.q:g}, b={b})"

    @property
    def x_independent(self):
        return self._b_fn is None

    @property
    def symmetric(self):
        return True if self._b_fn is None else None

    def _params(self, x, y):
        if self._b_fn is None:
            return {"b": self.b}
        return {"b": np.asarray(self._b_fn(x, y), dtype=float)}

    def _a(self, params, t):
        return np.power(t, self.p - 2.0) + params["b"] * np.power(t, self.q - 2.0)

    def _g_pos(self, params, t):
        return abs_pow(t, self.p - 1.0) + params["b"] * abs_pow(t, self.q - 1.0)

    def _G(self, params, t):
        return abs_pow(t, self.p) / self.p + params["b"] * abs_pow(t, self.q) / self.q


def _tlog_m(t):
    return t * np.log1p(t)


_TLOG_COEF = np.array([(-1.0) ** (k + 1) / (k * (k + 2)) for k in range(1, 16)])


def _tlog_M(t):
    t = np.abs(np.asarray(t, dtype=float))
    t2 = t * t
    out = np.atleast_1d(np.log1p(t))
    out *= 0.5 * (t2 - 1.0)
    out -= 0.25 * t2
    out += 0.5 * t
    small = t < 0.05
    if small.any():
        # series sum_k (-1)^(k+1) t^(k+2) / (k (k+2)) where the closed form cancels
        ts = t[small]
        acc = np.zeros(ts.shape)
        for c in _TLOG_COEF[::-1]:
            acc = acc * ts + c
        out[np.atleast_1d(small)] = acc * ts ** 3
    return out.reshape(t.shape)


class Orlicz(NFunctionFamily):
    """x-independent family ``G(x, y, t) = M(t) = int_0^|t| m``.

    The default ``m(t) = t log(1 + t)`` has exponent range ``(2, 3)`` and
    ``M(1) = 1/4``.  A user ``m`` needs declared bounds; ``M`` is then
    integrated numerically unless supplied.
    """

    kind = "Orlicz"
    x_independent = True

    def __init__(self, m=None, M=None, g_minus=None, g_plus=None, c1=None, c2=None, label=None):
        if m is None:
            m, M = _tlog_m, _tlog_M
            g_minus, g_plus = 2.0, 3.0
            c1 = c2 = 0.25
            label = label or "tlog"
        elif g_minus is None or g_plus is None:
            raise DomainError("custom Orlicz m needs declared g_minus and g_plus")
        self._m = m
        self._M = M
        self.label = label or "custom"
        super().__init__(g_minus, g_plus, c1, c2)

    def __repr__(self):
        return f"Orlicz(m={self.label})"

    @property
    def symmetric(self):
        return True

    def _params(self, x, y):
        return {}

    def _a(self, params, t):
        return self._m(t) / t

    def _g_pos(self, params, t):
        return self._m(t)

    def _G(self, params, t):
        if self._M is not None:
            return self._M(t)
        return super()._G(params, t)


class Custom(NFunctionFamily):
    """User-supplied density ``a(x, y, t)`` with declared bounds.

    The library verifies the declared ``g_minus, g_plus, c1, c2`` with
    ``check_assumptions`` rather than deriving them.
    """

    kind = "Custom"

    def __init__(self, a, g_minus, g_plus, c1=None, c2=None, x_independent=False, label=None):
        self._a_fn = a
        self.x_independent = bool(x_independent)
        self.label = label or getattr(a, "__name__", "a")
        super().__init__(g_minus, g_plus, c1, c2)

    def __repr__(self):
        return f"Custom(a={self.label})"

    def _a(self, params, t):
        return np.asarray(self._a_fn(params["x"], params["y"], t), dtype=float)
