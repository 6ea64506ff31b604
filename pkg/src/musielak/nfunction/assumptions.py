"""Sampled verification of the standing assumptions on a family.

Nothing here proves anything: limits are judged from trends over a fixed
number of log-spaced decades, inequalities from random samples.  Every
check returns a PropertyReport carrying its worst case and tolerance.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError, DomainError, NumericError
from ..reports import SuiteReport, Tracker, signed_violation
from .calculus import SobolevConjugate
from .families import abs_pow

SLOPE_MIN = 0.05


@dataclass
class SampleSpec:
    """Where to sample ``(x, y, t)``.

    Points are uniform in ``[-box, box]^d``; ``t`` is log-spaced over
    ``[t_lo, t_hi]``.  ``s`` is the fractional order used by the
    conjugate-dependent checks.
    """

    d: int = 2
    s: float = 0.5
    box: float = 2.0
    n_points: int = 8
    t_lo: float = 1e-4
    t_hi: float = 1e4
    n_t: int = 81
    seed: int = 0

    @classmethod
    def coerce(cls, spec):
        if spec is None:
            return cls()
        if isinstance(spec, cls):
            return spec
        return cls(**dict(spec))

    def points(self):
        rng = np.random.default_rng(self.seed)
        x = rng.uniform(-self.box, self.box, size=(self.n_points, self.d))
        y = rng.uniform(-self.box, self.box, size=(self.n_points, self.d))
        # include the diagonal so that Ghat is sampled too
        y[: max(1, self.n_points // 4)] = x[: max(1, self.n_points // 4)]
        return x, y

    def t_grid(self):
        return np.geomspace(self.t_lo, self.t_hi, self.n_t)


def gstar(g, d, s):
    """Critical exponent ``d g / (d - s g)``; inf at or beyond ``d / s``."""
    g = np.asarray(g, dtype=float)
    den = d - s * g
    with np.errstate(divide="ignore"):
        return np.where(den > 0, d * g / np.where(den > 0, den, 1.0), np.inf)


def gtilde(g):
    """Conjugate exponent ``g / (g - 1)``."""
    return g / (g - 1.0)


@dataclass
class ExponentReport:
    """Empirical exponent range of ``a t^2 / G`` and its derived exponents."""

    g_minus_est: float
    g_plus_est: float
    gstar_minus: float | None
    gstar_plus: float | None
    gtilde_minus: float
    gtilde_plus: float
    declared: tuple
    violation: float
    witness: dict

    @property
    def within_declared(self):
        return self.violation <= 0.0


def _on_pairs(fn, t, n):
    """Evaluate a bound method on ``t`` and broadcast to ``(n_pairs, len(t))``."""
    t = np.asarray(t, dtype=float)
    return np.broadcast_to(fn(t), (n, t.size))


def _pair_grid(fam, spec):
    x, y = spec.points()
    t = spec.t_grid()
    X = x[:, None, :]
    Y = y[:, None, :]
    return x, y, t, X, Y


def estimate_exponents(fam, sample_spec=None, rtol=1e-9):
    """Inf and sup of ``a(x, y, t) t^2 / G(x, y, t)`` on samples.

    ``violation`` is the largest amount by which the samples leave the
    declared ``[g_minus, g_plus]`` (relative tolerance ``rtol`` absorbs
    quadrature error); positive means the declaration is wrong.
    """
    spec = SampleSpec.coerce(sample_spec)
    x, y, t, X, Y = _pair_grid(fam, spec)
    bound = fam.bind(X, Y)
    G = _on_pairs(bound.G, t, len(x))
    gt = _on_pairs(bound.g, t, len(x)) * t
    ratio = gt / G
    lo = float(np.min(ratio))
    hi = float(np.max(ratio))
    gm, gp = fam.g_minus, fam.g_plus
    below = gm - ratio
    above = ratio - gp
    v = np.maximum(below, above) / np.maximum(1.0, gp) - rtol
    k = np.unravel_index(int(np.argmax(v)), v.shape)
    witness = {"x": x[k[0]].tolist(), "y": y[k[0]].tolist(), "t": float(t[k[1]]), "ratio": float(ratio[k])}
    if hi < spec.d / spec.s:
        gsm, gsp = float(gstar(lo, spec.d, spec.s)), float(gstar(hi, spec.d, spec.s))
    else:
        gsm = gsp = None
    return ExponentReport(lo, hi, gsm, gsp, gtilde(lo), gtilde(hi), (gm, gp),
                          float(np.max(v)), witness)


def _log_slope(vals, t):
    """Least-squares slope of ``log vals`` against ``log t``."""
    lv = np.log(np.maximum(vals, 1e-300))
    lt = np.log(t)
    lt = lt - lt.mean(axis=-1, keepdims=True)
    lv = lv - lv.mean(axis=-1, keepdims=True)
    return np.sum(lt * lv, axis=-1) / np.sum(lt * lt, axis=-1)


def check_assumptions(fam, sample_spec=None):
    """Sampled verdicts for (g1)-(g5), (B_f) and the Delta_2 condition.

    Returns a SuiteReport with one PropertyReport per condition:

    ``g1_zero``, ``g1_infinity``
        ``a(x,y,t) t`` tends to 0 / infinity: the log-log slope of ``g``
        over eight decades must exceed a small positive threshold.
    ``g2_continuity``
        Largest jump of ``log a`` on a fine geometric grid (ratio 1.001).
    ``g3_monotone``
        ``a(x,y,t) t`` non-decreasing on the sample grid.
    ``g4_exponents``
        Samples of ``a t^2 / G`` inside the declared range, plus
        ``g_plus < g*_minus``.
    ``g5_conjugate``
        The conjugate integral converges at 0 and its integrand does not
        decay at infinity.
    ``bf_bounds``
        ``G(x, y, 1)`` inside the declared ``[C1, C2]``.
    ``delta2``
        ``G(2t) <= 2^g_plus G(t)``.
    """
    spec = SampleSpec.coerce(sample_spec)
    name = fam.name
    out = SuiteReport("assumptions")
    x, y, t, X, Y = _pair_grid(fam, spec)
    bound = fam.bind(X, Y)
    pts = {"x": x, "y": y}

    decades = np.logspace(-1, -8, 8)
    tr = Tracker("g1_zero", 0.0, name)
    g0 = _on_pairs(bound.g, decades, len(x))
    slope0 = _log_slope(g0, decades)
    tr.update(SLOPE_MIN - slope0, {**pts, "slope": slope0}, {"t_min": float(decades[-1])})
    out.add(tr.report())

    tr = Tracker("g1_infinity", 0.0, name)
    big = np.logspace(1, 8, 8)
    ginf = _on_pairs(bound.g, big, len(x))
    slope_inf = _log_slope(ginf, big)
    tr.update(SLOPE_MIN - slope_inf, {**pts, "slope": slope_inf}, {"t_max": float(big[-1])})
    out.add(tr.report())

    tr = Tracker("g2_continuity", 0.05, name, note="max |log a(t') - log a(t)| with t'/t = 1.001")
    fine = np.exp(np.arange(np.log(spec.t_lo), np.log(spec.t_hi), np.log(1.001)))
    a_f = _on_pairs(bound.a, fine, len(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        jump = np.abs(np.diff(np.log(a_f), axis=-1))
    jump = np.where(np.isfinite(jump), jump, np.inf)
    tr.update(np.max(jump, axis=-1), pts)
    out.add(tr.report())

    tr = Tracker("g3_monotone", 1e-12, name)
    g_f = _on_pairs(bound.g, fine, len(x))
    dec = (g_f[:, :-1] - g_f[:, 1:]) / np.maximum(1.0, np.abs(g_f[:, 1:]))
    tr.update(np.max(dec, axis=-1), pts)
    out.add(tr.report())

    exps = estimate_exponents(fam, spec)
    tr = Tracker("g4_exponents", 0.0, name)
    tr.update([exps.violation], extra={**exps.witness, "g_minus_est": exps.g_minus_est,
                                        "g_plus_est": exps.g_plus_est})
    crit = float(gstar(fam.g_minus, spec.d, spec.s))
    tr.update([(fam.g_plus - crit) / max(1.0, crit) if np.isfinite(crit) else 0.0],
              extra={"g_plus": fam.g_plus, "gstar_minus": crit})
    out.add(tr.report())

    out.add(_check_g5(fam, spec, x))

    tr = Tracker("bf_bounds", 1e-12, name)
    G1 = _on_pairs(bound.G, np.ones(1), len(x))[:, 0]
    c1 = fam.c1 if fam.c1 is not None else float(np.min(G1))
    c2 = fam.c2 if fam.c2 is not None else float(np.max(G1))
    tr.update(np.maximum(signed_violation(c1, G1), signed_violation(G1, c2)), {**pts, "G1": G1},
              {"C1": c1, "C2": c2, "declared": fam.c1 is not None and fam.c2 is not None})
    out.add(tr.report())

    tr = Tracker("delta2", 1e-10, name)
    K = 2.0 ** fam.g_plus
    Gt = _on_pairs(bound.G, t, len(x))
    G2t = _on_pairs(bound.G, 2.0 * t, len(x))
    tr.update(signed_violation(G2t, K * Gt), {"t": np.broadcast_to(t, Gt.shape)}, {"K": K})
    out.add(tr.report())
    return out


def _check_g5(fam, spec, x):
    tr = Tracker("g5_conjugate", 0.0, fam.name,
                 note="integrand exponent at 0 must be positive, at infinity non-negative")
    try:
        sc = SobolevConjugate(fam, x if not fam.x_independent else x[0], spec.s, method="quadrature")
    except ConfigurationError as exc:
        tr.update([1.0], extra={"error": str(exc)})
        return tr.report()
    except NumericError as exc:
        tr.update([np.inf], extra={"error": str(exc)})
        return tr.report()
    rows = sc._rows
    w = np.log(np.logspace(1, 8, 8))
    wr = np.broadcast_to(w, (rows, w.size))
    h = sc._h(wr)
    slope = np.polyfit(w, np.log(h).T, 1)[0]
    tr.update(np.atleast_1d(-slope - 1e-9), {"slope_inf": np.atleast_1d(slope)},
              {"rate_zero": np.asarray(sc._tail_rate).tolist(), "inverse_at_1": sc.inverse(np.ones(rows) if sc.multi else 1.0)})
    return tr.report()


class CandidateNFunction:
    """An x-dependent N-function ``A(x, t)`` with declared exponent bounds.

    Parameters
    ----------
    A : callable
        ``A(x, t)`` for points ``x`` of shape ``(..., d)`` and ``t >= 0``.
    ell_A, m_A : float
        Declared bounds ``1 < ell_A <= A'(x,t) t / A(x,t) <= m_A``.
    dA : callable, optional
        Derivative ``A'(x, t)``; estimated by central differences if absent.
    power : float, optional
        Set when ``A(x, t) = |t|^power / power``.
    """

    def __init__(self, A, ell_A, m_A, dA=None, label="A", power=None):
        if not 1.0 < ell_A <= m_A:
            raise DomainError("candidate needs 1 < ell_A <= m_A")
        self._A = A
        self._dA = dA
        self.ell_A = float(ell_A)
        self.m_A = float(m_A)
        self.label = label
        self.power = power

    def __repr__(self):
        return f"CandidateNFunction({self.label}, ell={self.ell_A:g}, m={self.m_A:g})"

    def __call__(self, x, t):
        return np.asarray(self._A(np.asarray(x, float), np.abs(np.asarray(t, float))), dtype=float)

    def derivative(self, x, t):
        t = np.asarray(t, float)
        if self._dA is not None:
            return np.asarray(self._dA(np.asarray(x, float), t), dtype=float)
        h = 1e-6 * np.maximum(1.0, t)
        return (self(x, t + h) - self(x, np.maximum(t - h, 0.0))) / (t + h - np.maximum(t - h, 0.0))

    @property
    def r_tilde(self):
        """Conjugate exponents ``(m/(m-1), ell/(ell-1))`` as (minus, plus)."""
        return gtilde(self.m_A), gtilde(self.ell_A)

    def check_exponents(self, x, t, rtol=1e-6):
        """Worst relative excursion of ``A' t / A`` outside ``[ell_A, m_A]``."""
        ratio = self.derivative(x, t) * t / self(x, t)
        return float(np.max(np.maximum(self.ell_A - ratio, ratio - self.m_A)) / self.m_A - rtol)

    @classmethod
    def power_law(cls, r, label=None):
        r = float(r)
        return cls(lambda x, t: abs_pow(t, r) / r, r, r,
                   dA=lambda x, t: np.power(np.abs(t), r - 1.0), label=label or f"|t|^{r:g}/{r:g}", power=r)

    @classmethod
    def from_family(cls, fam, label=None):
        """``Ghat`` of a family viewed as a candidate."""
        return cls(lambda x, t: fam.Ghat(x, t), fam.g_minus, fam.g_plus,
                   dA=lambda x, t: fam.ghat(x, t), label=label or fam.name)


def build_separating_power(fam, s, d=2):
    """The power function ``R(t) = |t|^r / r`` separating ``Ghat`` from ``G*``.

    ``r`` is the midpoint of ``(1, g*_minus / g_plus)``, so
    ``R o Ghat`` grows strictly slower than the Sobolev conjugate.
    """
    if fam.g_plus >= d / s:
        raise ConfigurationError(f"g_plus={fam.g_plus} >= d/s={d / s}: conjugate undefined")
    top = float(gstar(fam.g_minus, d, s)) / fam.g_plus
    assert top > 1.0, "empty separating interval contradicts g_plus < g*_minus"
    r = 0.5 * (1.0 + top)
    cand = CandidateNFunction.power_law(r, label=f"R(t)=|t|^{r:g}/{r:g}")
    cand.upper = top
    return cand


def check_growth_conditions(fam, cand, sample_spec=None, a_interp=(0.25, 0.5, 0.75), k_values=(0.5, 1.0, 2.0)):
    """Sampled verdicts for the conditions tying a candidate ``A`` to ``Ghat``.

    ``vanishing_at_zero``
        ``A(t) / Ghat(t) -> 0`` as ``t -> 0`` (ratio sampled at 10^-1..10^-8:
        non-increasing and finally below 1e-3 of its first value).
    ``bounded_at_zero``
        ``limsup A / Ghat < inf`` near 0 (ratio does not grow as ``t -> 0``).
    ``slower_than_conjugate``
        ``A(k t) / G*(t)`` decreasing to 0 over ``t = 10^2..10^8``.
    ``interpolation_a=<a>``
        ``A(t) <= Ghat(t)^a G*(t)^(1-a)`` on ``0 < t <= 1`` for each ``a``.
    """
    spec = SampleSpec.coerce(sample_spec)
    name = f"{fam.name} vs {cand.label}"
    out = SuiteReport("growth_conditions")
    x, _ = spec.points()
    X = x[:, None, :]
    small = np.logspace(-1, -8, 8)
    n = len(x)
    ratio = np.broadcast_to(cand(X, small), (n, small.size)) / np.broadcast_to(fam.Ghat(X, small), (n, small.size))

    tr = Tracker("vanishing_at_zero", 0.0, name)
    rise = np.max(np.diff(ratio, axis=-1) / np.maximum(ratio[:, :-1], 1e-300), axis=-1)
    final = ratio[:, -1] / ratio[:, 0] - 1e-3
    tr.update(np.maximum(rise - 1e-9, final), {"x": x, "ratio_last": ratio[:, -1]})
    out.add(tr.report())

    tr = Tracker("bounded_at_zero", 0.0, name)
    slope = _log_slope(ratio, small)
    tr.update(-slope - SLOPE_MIN, {"x": x, "slope": slope}, {"limsup_est": float(np.max(ratio[:, -4:]))})
    out.add(tr.report())

    sc = SobolevConjugate(fam, x if not fam.x_independent else x[0], spec.s)
    large = np.logspace(2, 8, 7)
    tr = Tracker("slower_than_conjugate", 0.0, name)
    gst = sc(large[:, None] * np.ones(len(x)) if sc.multi else large)
    gst = gst.T if sc.multi else np.broadcast_to(gst, (len(x), large.size))
    for k in k_values:
        rk = np.broadcast_to(cand(X, k * large), gst.shape) / gst
        rise = np.max(np.diff(rk, axis=-1) / rk[:, :-1], axis=-1)
        fin = rk[:, -1] / rk[:, 0] - 1e-3
        tr.update(np.maximum(rise, fin), {"x": x}, {"k": k})
    out.add(tr.report())

    if a_interp:
        tt = np.geomspace(1e-6, 1.0, 25)
        A_t = np.broadcast_to(cand(X, tt), (n, tt.size))
        Gh = np.broadcast_to(fam.Ghat(X, tt), (n, tt.size))
        gs = sc(tt[:, None] * np.ones(len(x)) if sc.multi else tt)
        gs = gs.T if sc.multi else np.broadcast_to(gs, Gh.shape)
        for a in a_interp:
            tr = Tracker(f"interpolation_a={a:g}", 1e-12, name)
            rhs = np.power(Gh, a) * np.power(gs, 1.0 - a)
            tr.update(signed_violation(A_t, rhs), {"x": x}, {"a": a})
            out.add(tr.report())
    return out
