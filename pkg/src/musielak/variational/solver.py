"""Direct minimization of the energy by gradient descent.

The step is a Barzilai-Borwein proposal safeguarded by Armijo
backtracking, so the energy history is non-increasing.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..exceptions import NumericError
from ..spaces.grid import GridFunction, as_values
from .functional import energy_and_gradient, energy_I, nontriviality_seed, residual


@dataclass
class SolverConfig:
    tol_res: float = 1e-6
    max_iter: int = 5000
    c1: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    bb: bool = True
    step0: float | None = None
    log_path: str | None = None


@dataclass
class MinimizeResult:
    """Solver output; ``history`` rows are ``(energy, residual, step)``."""

    u_star: GridFunction
    energy: float
    residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)

    def history_array(self):
        return np.array(self.history, dtype=float).reshape(-1, 3)

    def write_history(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["iter", "energy", "residual", "step"])
            for k, (e, r, s) in enumerate(self.history):
                w.writerow([k, repr(e), repr(r), repr(s)])


def minimize(data, u0, cfg=None):
    """Gradient descent with Armijo backtracking from ``u0``.

    Stops when the dual residual ``max |grad| / h^d`` drops below
    ``cfg.tol_res``; running out of iterations gives ``converged=False``.
    A non-finite energy raises NumericError carrying the iteration.
    """
    cfg = cfg or SolverConfig()
    _, u = as_values(u0, data.grid)
    u = np.array(u, dtype=float)
    E, g = energy_and_gradient(data, u)
    history = []
    log = open(cfg.log_path, "w", newline="") if cfg.log_path else None
    writer = csv.writer(log) if log else None
    if writer:
        writer.writerow(["iter", "energy", "residual", "step"])
    try:
        res = residual(data, g)
        step = cfg.step0 or 1.0 / data.grid.cell
        s_prev = y_prev = None
        it = 0
        converged = res <= cfg.tol_res
        history.append((E, res, 0.0))
        if writer:
            writer.writerow([0, repr(E), repr(res), repr(0.0)])
        while not converged and it < cfg.max_iter:
            it += 1
            if cfg.bb and s_prev is not None:
                sy = float(s_prev @ y_prev)
                if sy > 0:
                    step = sy / float(y_prev @ y_prev) if it % 2 else float(s_prev @ s_prev) / sy
            gg = float(g @ g)
            alpha = step
            for _ in range(cfg.max_backtracks):
                u_new = u - alpha * g
                E_new, g_new = energy_and_gradient(data, u_new)
                if not np.isfinite(E_new):
                    alpha *= cfg.shrink
                    continue
                if E_new <= E - cfg.c1 * alpha * gg:
                    break
                alpha *= cfg.shrink
            else:
                if not np.isfinite(E_new):
                    raise NumericError("energy is not finite", iteration=it)
                # no admissible step: stationary up to round-off
                history.append((E, res, 0.0))
                break
            s_prev = u_new - u
            y_prev = g_new - g
            u, E, g = u_new, E_new, g_new
            res = residual(data, g)
            if not np.isfinite(E):
                raise NumericError("energy is not finite", iteration=it)
            history.append((E, res, alpha))
            if writer:
                writer.writerow([it, repr(E), repr(res), repr(alpha)])
            converged = res <= cfg.tol_res
            step = alpha
    finally:
        if log:
            log.close()
    u_star = GridFunction(data.grid, u)
    return MinimizeResult(u_star, energy_I(data, u_star), res, it, bool(converged), history)


def default_direction(grid, width=1.0):
    """Centered Gaussian bump used as the default seed direction."""
    return grid.evaluate(lambda x: np.exp(-np.sum(x * x, axis=-1) / (2 * width * width)))


class MinimizerEstimator(BaseEstimator):
    """Estimator-style wrapper around ``minimize``.

    ``fit(data, u0=None)`` starts from ``u0`` or, by default, from the
    nontriviality seed ``t v`` with ``v`` a centered Gaussian bump.
    """

    def __init__(self, tol_res=1e-6, max_iter=5000, c1=1e-4, shrink=0.5, bb=True, seed_width=1.0, log_path=None):
        self.tol_res = tol_res
        self.max_iter = max_iter
        self.c1 = c1
        self.shrink = shrink
        self.bb = bb
        self.seed_width = seed_width
        self.log_path = log_path

    def _validate_params(self):
        if not self.tol_res > 0:
            raise ValueError("tol_res must be positive")
        if int(self.max_iter) < 0:
            raise ValueError("max_iter must be non-negative")
        if not 0 < self.c1 < 1:
            raise ValueError("c1 must lie in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")

    def fit(self, data, u0=None):
        self._validate_params()
        if u0 is None:
            v = default_direction(data.grid, self.seed_width)
            t, e = nontriviality_seed(data, v)
            self.seed_ = (t, e)
            u0 = t * v
        cfg = SolverConfig(tol_res=self.tol_res, max_iter=int(self.max_iter), c1=self.c1,
                           shrink=self.shrink, bb=self.bb, log_path=self.log_path)
        res = minimize(data, u0, cfg)
        self.result_ = res
        self.u_ = res.u_star
        self.energy_ = res.energy
        self.residual_ = res.residual
        self.n_iter_ = res.iterations
        self.converged_ = res.converged
        self.history_ = res.history_array()
        return self

    def predict(self, data=None):
        """The minimizer found by ``fit``."""
        check_is_fitted(self, "u_")
        return self.u_

    def score(self, data, u=None):
        """Negative energy of the fitted minimizer (higher is better)."""
        check_is_fitted(self, "u_")
        return -energy_I(data, self.u_ if u is None else u)
