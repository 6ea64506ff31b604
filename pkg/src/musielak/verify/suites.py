"""Randomized property suites.

Every suite takes a family, a case count and a seed, draws its inputs
from ``numpy.random.default_rng(seed)`` and returns a SuiteReport whose
checks are PropertyReports with explicit tolerances.  Each suite also
carries a negative control: a deliberately wrong variant of one of its
inequalities that must be detected.  The control's report passes when the
wrong inequality is violated beyond tolerance.
"""

import numpy as np

from ..nfunction.assumptions import SampleSpec, build_separating_power, gstar, gtilde
from ..nfunction.calculus import SobolevConjugate, complementary
from ..reports import PropertyReport, SuiteReport, Tracker, signed_violation
from ..spaces.grid import DomainGrid
from ..spaces.modulars import evaluator
from ..spaces.norms import TOL_LUX, char_function_bounds, conjugate_exponents, luxemburg_batch, modular_power, \
    sandwich_violation
from ..variational.functional import energy_and_gradient, energy_terms
from ..variational.problem import ProblemData
from .corpus import CorpusSpec, bump_corpus, suite_grid, with_declared

TOL_YOUNG = 1e-9
TOL_GAP = 1e-8
TOL_SCALAR = 1e-7
TOL_NORM = 10 * TOL_LUX
TOL_MONOTONE = 1e-9
TOL_FD = 1e-5
CHUNK = 1000


def _rng(seed):
    return np.random.default_rng(seed)


def _loguniform(rng, lo, hi, n):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), n))


def _points(rng, n, d, box):
    return rng.uniform(-box, box, (n, d))


def _hat_x(fam, x):
    """Points argument for Ghat-type calls: one point if x-independent."""
    return x[0] if fam.x_independent else x


def negative_control(name, rep, note=""):
    """Turn the report of a deliberately wrong inequality into a check.

    The result passes iff ``rep`` failed, i.e. the wrong inequality was
    caught.  ``worst_violation`` is ``rep.tolerance - rep.worst_violation``.
    """
    w = rep.worst_violation
    worst = rep.tolerance - w if w == w else -np.inf
    wit = dict(rep.witness)
    wit["control_worst_violation"] = float(w)
    wit["control_tolerance"] = rep.tolerance
    return PropertyReport(name, rep.cases_run, float(worst), wit, 0.0, family=rep.family, seed=rep.seed,
                          note=note or "negative control: passes when the wrong inequality is detected")


def _batch_norms(modular, vals, exps, chunk=CHUNK):
    """Luxemburg norms and modulars for a large batch, in fixed chunks."""
    value, mod = [], []
    for k in range(0, len(vals), chunk):
        nb = luxemburg_batch(modular, vals[k:k + chunk], exps)
        value.append(nb.value)
        mod.append(nb.modular)
    return np.concatenate(value), np.concatenate(mod)


def _scaled_corpus(grid, n, rng, lo=1e-2, hi=1e1, spec=None):
    """Corpus functions times log-uniform factors, so norms fall on both sides of 1."""
    vals = bump_corpus(grid, n, rng, spec)
    return vals * _loguniform(rng, lo, hi, n)[:, None]


def _scalar_sandwich(tr, f, t, tau, exps, inputs):
    """Record ``min{tau^e} f(t) <= f(tau t) <= max{tau^e} f(t)``."""
    a, b = np.power(tau, exps[0]), np.power(tau, exps[1])
    base = f(t)
    val = f(tau * t)
    v = np.maximum(signed_violation(np.minimum(a, b) * base, val), signed_violation(val, np.maximum(a, b) * base))
    tr.update(v, inputs)


# ---------------------------------------------------------------------------
def suite_young_holder(fam, n_cases=100_000, seed=0, grid=None, n_functions=1000, box=2.0):
    """Young's inequality, its equality case, Hoelder and the norm-modular bound.

    * ``young``: ``tau sigma <= Ghat_x(tau) + G~_x(sigma)`` on random triples.
    * ``young_equality``: the gap at ``sigma = ghat_x(tau)`` is at most 1e-8.
    * ``holder``: ``|sum u v h^d| <= 2 ||u|| ||v||~`` on corpus pairs.
    * ``norm_below_modular_plus_one``: ``||u|| <= J(u) + 1``.
    """
    rng = _rng(seed)
    name = fam.name
    grid = grid or suite_grid()
    out = SuiteReport("young_holder")
    d = grid.d

    x = _points(rng, n_cases, d, box)
    tau = _loguniform(rng, 1e-3, 1e3, n_cases)
    sig = _loguniform(rng, 1e-3, 1e3, n_cases)
    xh = _hat_x(fam, x)
    rhs = fam.Ghat(xh, tau) + complementary(fam, xh, sig)
    tr = Tracker("young", TOL_YOUNG, name, seed)
    tr.update(signed_violation(tau * sig, rhs), {"x": x, "tau": tau, "sigma": sig})
    out.add(tr.report())

    n_eq = max(1, n_cases // 10)
    x = _points(rng, n_eq, d, box)
    xh = _hat_x(fam, x)
    tau = _loguniform(rng, 1e-3, 1e3, n_eq)
    sig = fam.ghat(xh, tau)
    gap = fam.Ghat(xh, tau) + complementary(fam, xh, sig) - tau * sig
    tr = Tracker("young_equality", TOL_GAP, name, seed, note="gap Ghat + G~ - tau sigma at sigma = ghat(tau)")
    tr.update(np.abs(gap) / np.maximum(1.0, np.abs(tau * sig)), {"x": x, "tau": tau, "sigma": sig})
    out.add(tr.report())

    ev = evaluator(fam, grid)
    u = _scaled_corpus(grid, n_functions, rng)
    v = _scaled_corpus(grid, n_functions, rng)
    nu, mu = _batch_norms(ev.Ghat, u, (fam.g_minus, fam.g_plus))
    nv, _ = _batch_norms(ev.conjugate, v, conjugate_exponents(fam))
    pairing = np.abs(np.sum(u * v, axis=-1) * grid.cell)
    tr = Tracker("holder", TOL_NORM, name, seed)
    tr.update(signed_violation(pairing, 2.0 * nu * nv), {"u": u, "v": v, "norm_u": nu, "norm_v": nv})
    out.add(tr.report())

    tr = Tracker("norm_below_modular_plus_one", TOL_NORM, name, seed)
    tr.update(signed_violation(nu, mu + 1.0), {"u": u, "norm": nu, "modular": mu})
    out.add(tr.report())

    # control: halving the complementary term breaks Young at equality
    x = _points(rng, n_eq, d, box)
    xh = _hat_x(fam, x)
    tau = _loguniform(rng, 1e-1, 1e3, n_eq)
    sig = fam.ghat(xh, tau)
    tr = Tracker("young_halved_conjugate", TOL_YOUNG, name, seed)
    tr.update(signed_violation(tau * sig, fam.Ghat(xh, tau) + 0.5 * complementary(fam, xh, sig)),
              {"x": x, "tau": tau, "sigma": sig})
    out.add(negative_control("negative_control_young_halved_conjugate", tr.report()))
    return out


# ---------------------------------------------------------------------------
def _scalar_sandwiches(fam, n_cases, rng, d, s, box, only_hat=False):
    name = fam.name
    reps = []
    x = _points(rng, n_cases, d, box)
    t = _loguniform(rng, 1e-3, 1e3, n_cases)
    tau = _loguniform(rng, 1e-2, 1e2, n_cases)
    xh = _hat_x(fam, x)
    inputs = {"x": x, "t": t, "tau": tau}
    exps = (fam.g_minus, fam.g_plus)

    tr = Tracker("scalar_Ghat", TOL_SCALAR, name)
    _scalar_sandwich(tr, lambda z: fam.Ghat(xh, z), t, tau, exps, inputs)
    reps.append(tr.report())
    if only_hat:
        return reps

    y = _points(rng, n_cases, d, box)
    tr = Tracker("scalar_G_pairs", TOL_SCALAR, name)
    _scalar_sandwich(tr, lambda z: fam.G(x, y, z), t, tau, exps, dict(inputs, y=y))
    reps.append(tr.report())

    tr = Tracker("scalar_conjugate", TOL_SCALAR, name, note="exponents g~ = g/(g-1)")
    _scalar_sandwich(tr, lambda z: complementary(fam, xh, z), t, tau, conjugate_exponents(fam), inputs)
    reps.append(tr.report())

    sc = SobolevConjugate(fam, xh, s)
    gs = (float(gstar(fam.g_minus, d, s)), float(gstar(fam.g_plus, d, s)))
    tr = Tracker("scalar_sobolev_conjugate", TOL_SCALAR, name)
    _scalar_sandwich(tr, sc, t, tau, gs, inputs)
    reps.append(tr.report())
    return reps


def suite_sandwich(fam, n_cases=10_000, seed=0, grid=None, box=2.0):
    """Power-type sandwiches between modulars and norms.

    Scalar checks compare ``f(tau t)`` with ``min/max{tau^e} f(t)`` for
    ``G``, ``Ghat``, the complementary function and the Sobolev conjugate.
    Function checks compare each modular with its Luxemburg norm:
    ``min{n^e-, n^e+} <= J(u) <= max{n^e-, n^e+}``.  The negative control
    declares ``g_plus`` too small by 0.5.
    """
    rng = _rng(seed)
    grid = grid or suite_grid()
    out = SuiteReport("sandwich")
    for rep in _scalar_sandwiches(fam, n_cases, rng, grid.d, grid.s, box):
        rep.seed = seed
        out.add(rep)

    ev = evaluator(fam, grid)
    V = 1.0 + np.sum(grid.nodes ** 2, axis=-1)
    g = (fam.g_minus, fam.g_plus)
    gs = (float(gstar(fam.g_minus, grid.d, grid.s)), float(gstar(fam.g_plus, grid.d, grid.s)))
    checks = [
        ("modular_Ghat", ev.Ghat, g),
        ("modular_conjugate", ev.conjugate, conjugate_exponents(fam)),
        ("modular_gagliardo", ev.gagliardo, g),
        ("modular_sobolev_conjugate", ev.sobolev_conjugate, gs),
        ("modular_combined", ev.combined, g),
        ("modular_weighted", lambda w: ev.weighted(w, V), g),
    ]
    u = _scaled_corpus(grid, n_cases, rng)
    for label, modular, exps in checks:
        nrm, mod = _batch_norms(modular, u, exps)
        tr = Tracker(label, TOL_NORM, fam.name, seed)
        tr.update(sandwich_violation(nrm, mod, *exps), {"u": u, "norm": nrm, "modular": mod})
        out.add(tr.report())

    wrong = with_declared(fam, g_minus=min(fam.g_minus, fam.g_plus - 0.5), g_plus=fam.g_plus - 0.5)
    rep = _scalar_sandwiches(wrong, n_cases, _rng(seed + 1), grid.d, grid.s, box, only_hat=True)[0]
    rep.seed = seed
    out.add(negative_control("negative_control_wrong_g_plus", rep,
                             note=f"declared g_plus={wrong.g_plus:g} below the true {fam.g_plus:g}"))
    return out


# ---------------------------------------------------------------------------
def suite_convexity(fam, n_cases=100_000, seed=0, grid=None, n_pairs=1000, box=2.0):
    """Strong monotonicity of ``g`` and of the weak form.

    ``(g(tau) - g(sigma)) (tau - sigma) >= 4 G((tau - sigma) / 2)`` on random
    scalars and ``<J'(u) - J'(v), u - v> >= 4 J((u - v) / 2)`` on corpus pairs.
    """
    rng = _rng(seed)
    name = fam.name
    grid = grid or suite_grid()
    out = SuiteReport("convexity")
    x = _points(rng, n_cases, grid.d, box)
    y = _points(rng, n_cases, grid.d, box)
    tau = _loguniform(rng, 1e-3, 1e3, n_cases) * rng.choice([-1.0, 1.0], n_cases)
    sig = _loguniform(rng, 1e-3, 1e3, n_cases) * rng.choice([-1.0, 1.0], n_cases)
    eq = rng.random(n_cases) < 0.01
    sig[eq] = tau[eq]
    lhs = (fam.g(x, y, tau) - fam.g(x, y, sig)) * (tau - sig)
    rhs = 4.0 * fam.G(x, y, 0.5 * (tau - sig))
    tr = Tracker("scalar_monotonicity", TOL_MONOTONE, name, seed)
    tr.update(signed_violation(rhs, lhs), {"x": x, "y": y, "tau": tau, "sigma": sig})
    out.add(tr.report())

    pk = evaluator(fam, grid).pairs
    u = _scaled_corpus(grid, n_pairs, rng)
    v = _scaled_corpus(grid, n_pairs, rng)
    w = u - v
    gap = pk.weak(u, w) - pk.weak(v, w)
    rhs = 4.0 * pk.modular(0.5 * w)
    tr = Tracker("monotonicity_gap", TOL_MONOTONE, name, seed, note="gap >= 4 J_{s,G}((u - v) / 2)")
    tr.update(signed_violation(rhs, gap), {"u": u, "v": v, "gap": gap, "rhs": rhs})
    out.add(tr.report())

    # control: at sigma = 0 the left side is t g(t) <= g_plus G(t) < (g_plus + 1) G(t)
    n_c = max(1, n_cases // 10)
    x = _points(rng, n_c, grid.d, box)
    y = _points(rng, n_c, grid.d, box)
    tau = _loguniform(rng, 1e-2, 1e2, n_c)
    tr = Tracker("monotonicity_overstated_constant", TOL_MONOTONE, name, seed)
    tr.update(signed_violation((fam.g_plus + 1.0) * fam.G(x, y, tau), fam.g(x, y, tau) * tau),
              {"x": x, "y": y, "tau": tau})
    out.add(negative_control("negative_control_overstated_constant", tr.report()))
    return out


# ---------------------------------------------------------------------------
def norm_equivalence_grid():
    """Grid fine enough for the corpus width range ``[3h, R/4]``."""
    return DomainGrid(2, 4.0, 25, 0.5)


def suite_norm_equivalence(fam, n_cases=500, seed=0, grid=None, n_axioms=100):
    """``||u||_W / 2 <= ||u||_(Omega) <= 2 ||u||_W`` and the norm axioms."""
    rng = _rng(seed)
    name = fam.name
    grid = grid or norm_equivalence_grid()
    out = SuiteReport("norm_equivalence")
    ev = evaluator(fam, grid)
    g = (fam.g_minus, fam.g_plus)
    u = bump_corpus(grid, n_cases, rng)
    n_hat, _ = _batch_norms(ev.Ghat, u, g)
    n_sem, _ = _batch_norms(ev.gagliardo, u, g)
    n_omega, _ = _batch_norms(ev.combined, u, g)
    n_w = n_hat + n_sem
    wit = {"u": u, "norm_Ghat": n_hat, "seminorm": n_sem, "norm_combined": n_omega}
    tr = Tracker("lower_half_W", TOL_NORM, name, seed)
    tr.update(signed_violation(0.5 * n_w, n_omega), wit)
    out.add(tr.report())
    tr = Tracker("upper_twice_W", TOL_NORM, name, seed)
    tr.update(signed_violation(n_omega, 2.0 * n_w), wit)
    out.add(tr.report())

    tr = Tracker("zero_function", 0.0, name, seed)
    z = np.zeros((1, grid.N))
    tr.update([max(float(_batch_norms(m, z, g)[0][0]) for m in (ev.Ghat, ev.gagliardo, ev.combined))])
    out.add(tr.report())

    k = min(n_axioms, n_cases)
    alpha = _loguniform(rng, 0.1, 10.0, k) * rng.choice([-1.0, 1.0], k)
    n_scaled, _ = _batch_norms(ev.combined, alpha[:, None] * u[:k], g)
    target = np.abs(alpha) * n_omega[:k]
    tr = Tracker("homogeneity", TOL_NORM, name, seed)
    tr.update(np.abs(n_scaled - target) / np.maximum(1.0, target), {"u": u[:k], "alpha": alpha})
    out.add(tr.report())

    v = np.roll(u[:k], 1, axis=0)
    n_sum, _ = _batch_norms(ev.combined, u[:k] + v, g)
    tr = Tracker("triangle", TOL_NORM, name, seed)
    tr.update(signed_violation(n_sum, n_omega[:k] + np.roll(n_omega[:k], 1)), {"u": u[:k], "v": v})
    out.add(tr.report())

    tr = Tracker("combined_below_0.4_W", TOL_NORM, name, seed)
    tr.update(signed_violation(n_omega, 0.4 * n_w), wit)
    out.add(negative_control("negative_control_constant_too_small", tr.report()))
    return out


# ---------------------------------------------------------------------------
def suite_separating(fam, sample_spec=None, k_values=(0.5, 1.0, 2.0), t_range=(1e2, 1e6), decay=5.0):
    """Decay of ``R(Ghat(k t)) / G*(t)`` and exponents of the complementary function.

    ``R(t) = |t|^r / r`` with ``r`` from ``build_separating_power``.  The
    ratio must drop by a factor ``decay`` per decade of ``t`` over
    ``t_range``.  The complementary function must satisfy
    ``g~(g_plus) <= t G~'(t) / G~(t) <= g~(g_minus)`` on the sample grid.
    """
    spec = SampleSpec.coerce(sample_spec)
    name = fam.name
    out = SuiteReport("separating")
    x, _ = spec.points()
    xh = _hat_x(fam, x)
    sc = SobolevConjugate(fam, xh, spec.s)
    cand = build_separating_power(fam, spec.s, spec.d)
    n = len(x)
    decades = np.arange(np.log10(t_range[0]), np.log10(t_range[1]) + 0.5).astype(float)
    t = 10.0 ** decades

    def ratio(k, r_fn, tt):
        Xt = x[:, None, :] if not fam.x_independent else x[0]
        G = np.broadcast_to(fam.Ghat(Xt, k * tt), (n, tt.size))
        targ = tt[:, None] * np.ones(n) if sc.multi else tt
        gs = sc(targ)
        gs = gs.T if sc.multi else np.broadcast_to(gs, (n, tt.size))
        return r_fn(G) / gs

    def decay_tracker(label, r):
        tr = Tracker(label, 0.0, name, spec.seed, note=f"ratio drop per decade at least {decay:g}x, r={r:g}")
        for k in k_values:
            q = ratio(k, lambda G: np.power(G, r) / r, t)
            tr.update((q[:, 1:] / q[:, :-1] - 1.0 / decay).ravel(),
                      {"x": np.repeat(x, len(t) - 1, axis=0), "t": np.tile(t[:-1], n)},
                      {"k": k, "r": r})
        return tr

    tr = decay_tracker("separating_decay", cand.power)
    base = ratio(1.0, lambda G: np.power(G, cand.power) / cand.power, np.array([1.0]))
    tr.witness["baseline_k1_t1"] = base[:, 0].tolist()
    if not np.all(np.isfinite(base) & (base > 0)):
        tr.update([np.inf], extra={"baseline": "non-finite or non-positive"})
    out.add(tr.report())

    tt = spec.t_grid()
    val, tau = complementary(fam, xh if fam.x_independent else x[:, None, :], tt, return_argmax=True)
    val = np.broadcast_to(val, (n, tt.size))
    tau = np.broadcast_to(tau, (n, tt.size))
    q = tt * tau / val
    lo, hi = gtilde(fam.g_plus), gtilde(fam.g_minus)
    tr = Tracker("conjugate_exponents", TOL_SCALAR, name, spec.seed, note=f"within [{lo:g}, {hi:g}]")
    tr.update(np.maximum(signed_violation(lo, q), signed_violation(q, hi)).ravel(),
              {"t": np.tile(tt, n)}, {"bounds": [lo, hi]})
    out.add(tr.report())

    # R(Ghat) then grows at least like t^(1.5 g*+), faster than any G*
    bad_r = 1.5 * float(gstar(fam.g_plus, spec.d, spec.s)) / fam.g_minus
    out.add(negative_control("negative_control_exponent_above_gap",
                             decay_tracker("separating_decay_wrong_r", bad_r).report()))
    return out


# ---------------------------------------------------------------------------
def suite_char_bounds(fam, n_cases=10_000, seed=0, grid=None):
    """Norms of indicators of random node sets against their explicit brackets."""
    rng = _rng(seed)
    grid = grid or suite_grid()
    out = SuiteReport("char_bounds")
    N = grid.N
    sizes = rng.integers(1, N + 1, n_cases)
    keys = rng.random((n_cases, N))
    rank = np.argsort(np.argsort(keys, axis=1), axis=1)
    masks = rank < sizes[:, None]
    ev = evaluator(fam, grid)
    nrm, _ = _batch_norms(ev.Ghat, masks.astype(float), (fam.g_minus, fam.g_plus))
    measure = sizes * grid.cell
    lo, hi = char_function_bounds(fam, measure)
    tr = Tracker("indicator_norm_brackets", TOL_NORM, fam.name, seed)
    tr.update(np.maximum(signed_violation(lo, nrm), signed_violation(nrm, hi)),
              {"size": sizes, "measure": measure, "norm": nrm, "lower": lo, "upper": hi})
    out.add(tr.report())

    tr = Tracker("indicator_below_half_lower", TOL_NORM, fam.name, seed)
    tr.update(signed_violation(nrm, 0.5 * lo), {"size": sizes, "norm": nrm})
    out.add(negative_control("negative_control_halved_lower_bound", tr.report()))
    return out


# ---------------------------------------------------------------------------
def variational_grid():
    return DomainGrid(2, 3.0, 9, 0.5)


def default_problem(fam, grid, variable=True):
    """Problem data used by the variational checks.

    ``V = 1 + |x|^2``, ``b = exp(-|x|^2)``, ``delta = 2.2`` and
    ``p = 1.4 + 0.2 exp(-|x|^2)`` (or ``p = 1.5`` with ``variable=False``).
    """
    r2 = np.sum(grid.nodes ** 2, axis=-1)
    p = 1.4 + 0.2 * np.exp(-r2) if variable else 1.5
    return ProblemData(fam, grid, 1.0 + r2, 1.0, np.exp(-r2), p, 2.2)


def gradient_fd_errors(data, vals, rng, eps=1e-5, scale=1.0):
    """Relative errors of ``scale * grad I`` against central differences.

    One random direction and one random coordinate per function; ``scale``
    differs from 1 only for the negative control.
    """
    errs = []
    for u in vals:
        _, g = energy_and_gradient(data, u)
        g = scale * g
        e_dir = rng.standard_normal(u.size)
        e_dir /= np.linalg.norm(e_dir)
        e_node = np.zeros(u.size)
        e_node[int(rng.integers(u.size))] = 1.0
        row = []
        for e in (e_dir, e_node):
            fp = energy_and_gradient(data, u + eps * e)[0]
            fm = energy_and_gradient(data, u - eps * e)[0]
            fd = (fp - fm) / (2 * eps)
            an = float(g @ e)
            row.append(abs(fd - an) / max(abs(an), abs(fd), 1e-300))
        errs.append(row)
    return np.array(errs)


def suite_variational(fam, n_cases=200, seed=0, grid=None, n_gradient=20, data=None):
    """Checks around the energy: gradient, power-norm inequality, coercivity.

    * ``gradient_fd``: central differences agree with ``grad I`` to 1e-5
      (relative) along a random direction and a random coordinate.
    * ``power_norm``: ``|| |u|^p ||_delta <= ||u||_{p delta}^{p-} + ||u||_{p delta}^{p+}``.
    * ``coercivity``: ``I(u) >= 2^{-g+} min{||u||_E^{g-}, ||u||_E^{g+}}
      - (2 C ||b||_{delta'} / p-) (||u||_E^{p-} + ||u||_E^{p+})`` with ``C``
      the largest sampled ratio ``||u||_{p delta} / ||u||_E``.
    """
    rng = _rng(seed)
    name = fam.name
    grid = grid or variational_grid()
    data = data or default_problem(fam, grid)
    grid = data.grid
    out = SuiteReport("variational")

    u_fd = _scaled_corpus(grid, n_gradient, rng, 0.1, 1.0)
    errs = gradient_fd_errors(data, u_fd, rng)
    tr = Tracker("gradient_fd", TOL_FD, name, seed, note="relative error of grad I vs central differences")
    tr.update(errs.max(axis=1), {"u": u_fd, "direction_error": errs[:, 0], "node_error": errs[:, 1]})
    out.add(tr.report())

    u = bump_corpus(grid, n_cases, rng)
    pd = data.p * data.delta
    up = np.power(np.abs(u), data.p)
    lhs, _ = _batch_norms(lambda w: modular_power(w, data.delta, grid.cell), up,
                          (float(data.delta.min()), float(data.delta.max())))
    xi, _ = _batch_norms(lambda w: modular_power(w, pd, grid.cell), u, (float(pd.min()), float(pd.max())))
    rhs = np.power(xi, data.p_minus) + np.power(xi, data.p_plus)
    tr = Tracker("power_norm", TOL_NORM, name, seed)
    tr.update(signed_violation(lhs, rhs), {"u": u, "lhs": lhs, "norm_pdelta": xi})
    out.add(tr.report())

    ev = evaluator(fam, grid)
    g = (fam.g_minus, fam.g_plus)
    us = u * _loguniform(rng, 1e-2, 1e1, n_cases)[:, None]
    sem, _ = _batch_norms(ev.gagliardo, us, g)
    wnorm, _ = _batch_norms(lambda w: ev.weighted(w, data.V), us, g)
    nE = sem + wnorm
    xi_s, _ = _batch_norms(lambda w: modular_power(w, pd, grid.cell), us, (float(pd.min()), float(pd.max())))
    C = float(np.max(xi_s / nE))
    bn = data.b_norm()
    terms = np.array([energy_terms(data, w) for w in us])
    energy = terms[:, 0] + terms[:, 1] - terms[:, 2]
    low = (2.0 ** -fam.g_plus * np.minimum(nE ** fam.g_minus, nE ** fam.g_plus)
           - 2.0 * C * bn / data.p_minus * (nE ** data.p_minus + nE ** data.p_plus))
    tr = Tracker("coercivity", TOL_NORM, name, seed, note="lower bound with empirical embedding constant")
    tr.update(signed_violation(low, energy), {"u": us, "norm_E": nE, "energy": energy, "bound": low},
              {"C": C, "b_norm": bn})
    out.add(tr.report())

    bad = gradient_fd_errors(data, u_fd[: max(1, n_gradient // 4)], rng, scale=1.01)
    tr = Tracker("gradient_fd_scaled", TOL_FD, name, seed)
    tr.update(bad.max(axis=1))
    out.add(negative_control("negative_control_scaled_gradient", tr.report()))
    return out


SUITES = {
    "young_holder": suite_young_holder,
    "sandwich": suite_sandwich,
    "convexity": suite_convexity,
    "norm_equivalence": suite_norm_equivalence,
    "separating": suite_separating,
    "char_bounds": suite_char_bounds,
    "variational": suite_variational,
}


def run_suite(name, fam, seed=0, **kwargs):
    """Run a registered suite by name; ``separating`` takes a SampleSpec seed."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if name == "separating":
        spec = SampleSpec.coerce(kwargs.pop("sample_spec", None))
        spec = SampleSpec(**{**spec.__dict__, "seed": seed})
        return suite_separating(fam, spec, **kwargs)
    return SUITES[name](fam, seed=seed, **kwargs)
