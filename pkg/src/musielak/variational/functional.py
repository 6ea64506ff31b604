"""Weak form of the fractional operator, the energy and its gradient."""

import numpy as np

from ..exceptions import GridMismatchError, NumericError, PreconditionError
from ..spaces.grid import GridFunction, as_values
from ..spaces.modulars import evaluator


def _pair(u, v):
    if isinstance(u, GridFunction) and isinstance(v, GridFunction) and u.grid != v.grid:
        raise GridMismatchError("u and v live on different grids")
    grid, uv = as_values(u)
    _, vv = as_values(v, grid)
    return grid, uv, vv


def weak_form(fam, u, v):
    """``<J'(u), v>``: pair sum of ``g_ij(D_ij u) (v_i - v_j) h^2d / r^(d+s)``."""
    grid, uv, vv = _pair(u, v)
    return float(evaluator(fam, grid).pairs.weak(uv, vv))


def monotonicity_gap(fam, u, v):
    """``<J'(u) - J'(v), u - v>`` from two weak-form evaluations."""
    grid, uv, vv = _pair(u, v)
    w = uv - vv
    pk = evaluator(fam, grid).pairs
    return float(pk.weak(uv, w) - pk.weak(vv, w))


def source_nodes(data, vals):
    return data.b * np.power(np.abs(vals), data.p) / data.p


def energy_terms(data, u):
    """``(J_{s,G}(u), sum V Ghat(u) h^d, sum b |u|^p / p h^d)``."""
    _, vals = as_values(u, data.grid)
    ev = evaluator(data.fam, data.grid)
    cell = data.grid.cell
    return (float(ev.gagliardo(vals)), float(ev.weighted(vals, data.V)),
            float(np.sum(source_nodes(data, vals), axis=-1) * cell))


def energy_I(data, u):
    """Energy ``I(u) = J_{s,G}(u) + int V Ghat(u) - int b |u|^p / p``."""
    a, b, c = energy_terms(data, u)
    return a + b - c


def _local_gradient(data, vals):
    ev = evaluator(data.fam, data.grid)
    src = data.b * np.sign(vals) * np.power(np.abs(vals), data.p - 1.0)
    return (data.V * ev.ghat_nodes(vals) - src) * data.grid.cell


def gradient_I(data, u):
    """Nodal gradient of the discrete energy as a GridFunction."""
    _, vals = as_values(u, data.grid)
    grad = evaluator(data.fam, data.grid).pairs.gradient(vals) + _local_gradient(data, vals)
    return GridFunction(data.grid, grad)


def energy_and_gradient(data, vals):
    """``(I(u), grad I(u))`` for a raw value array, one pass over pairs."""
    ev = evaluator(data.fam, data.grid)
    cell = data.grid.cell
    J, g_pair = ev.pairs.energy_and_gradient(vals)
    local = float(np.sum(data.V * ev.Ghat_nodes(vals)) * cell) - float(np.sum(source_nodes(data, vals)) * cell)
    return J + local, g_pair + _local_gradient(data, vals)


def residual(data, grad):
    """Dual residual ``max_i |grad_i| / h^d``."""
    return float(np.max(np.abs(grad)) / data.grid.cell)


def nontriviality_seed(data, v, max_halvings=60):
    """First ``t = 1, 1/2, 1/4, ...`` with ``I(t v) < 0``; returns ``(t, I(t v))``."""
    _, vals = as_values(v, data.grid)
    overlap = float(np.sum(source_nodes(data, vals)) * data.grid.cell)
    if not overlap > 0:
        raise PreconditionError("int b |v|^p must be positive: v does not meet the support of positive b")
    t = 1.0
    for _ in range(max_halvings + 1):
        e = energy_I(data, t * vals)
        if e < 0:
            return t, e
        t *= 0.5
    raise NumericError(f"I(t v) >= 0 for all t down to 2^-{max_halvings}", iteration=max_halvings)


def verify_weak_solution(data, u, basis_spec=None):
    """Largest scaled weak-form residual of ``u``.

    Tests against every nodal hat (``max |grad_i| / h^d``) and against
    ``n_random`` Gaussian bumps ``e`` (``|<I'(u), e>| / ||e||_1``).
    Returns ``(max_residual, report)``.
    """
    spec = {"n_random": 8, "seed": 0}
    spec.update(basis_spec or {})
    grid = data.grid
    _, vals = as_values(u, grid)
    grad = gradient_I(data, vals).values
    nodal = residual(data, grad)
    rng = np.random.default_rng(spec["seed"])
    smooth = []
    for _ in range(int(spec["n_random"])):
        c = rng.uniform(-grid.R / 2, grid.R / 2, grid.d)
        w = rng.uniform(*sorted((3 * grid.h, grid.R / 4)))
        e = np.exp(-np.sum((grid.nodes - c) ** 2, axis=-1) / (2 * w * w))
        smooth.append(abs(float(grad @ e)) / (float(np.sum(np.abs(e))) * grid.cell))
    worst = max([nodal] + smooth)
    return worst, {"nodal": nodal, "smooth": smooth, "n_tests": grid.N + len(smooth)}
