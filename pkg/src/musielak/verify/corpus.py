"""Random test inputs: Gaussian bump corpora and the built-in family set."""

import copy
from dataclasses import dataclass

import numpy as np

from ..nfunction.families import DoublePhase, Orlicz, PowerVariable
from ..spaces.grid import DomainGrid


def variable_exponent(x, y):
    """Symmetric exponent ``2.5 + 0.5 sin(sum_k x_k + y_k)`` with range ``[2, 3]``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 2.5 + 0.5 * np.sin(np.sum(x + y, axis=-1))


def builtin_families():
    """The three built-in families used by the suites, keyed by short name."""
    return {
        "power_variable": PowerVariable(variable_exponent, 2.0, 3.0),
        "orlicz": Orlicz(),
        "double_phase": DoublePhase(),
    }


def with_declared(fam, g_minus=None, g_plus=None, c1=None, c2=None):
    """Shallow copy of ``fam`` with overridden declared constants.

    Used to build negative controls: the N-function is unchanged, only the
    bounds the checks compare against are wrong.
    """
    out = copy.copy(fam)
    for name, val in (("g_minus", g_minus), ("g_plus", g_plus), ("c1", c1), ("c2", c2)):
        if val is not None:
            setattr(out, name, float(val))
    return out


@dataclass
class CorpusSpec:
    """Random superpositions of Gaussian bumps.

    Widths are drawn from ``[3h, R/4]``; on grids too coarse for that range
    (``3h > R/4``) the range ``[h, R/2]`` is used instead.  ``h_ref``
    overrides the grid spacing so one corpus can be sampled on several
    refinements of the same domain.
    """

    n_bumps: tuple = (1, 5)
    amplitude: tuple = (-5.0, 5.0)
    center_frac: float = 0.5
    h_ref: float | None = None

    def width_range(self, grid):
        h = grid.h if self.h_ref is None else self.h_ref
        lo, hi = 3.0 * h, grid.R / 4.0
        if lo > hi:
            lo, hi = h, grid.R / 2.0
        return lo, hi

    def draw(self, grid, n, rng):
        """Bump parameters ``[(amps, centers, widths), ...]`` for ``n`` functions."""
        lo, hi = self.width_range(grid)
        c = self.center_frac * grid.R
        out = []
        for _ in range(n):
            k = int(rng.integers(self.n_bumps[0], self.n_bumps[1] + 1))
            amps = rng.uniform(*self.amplitude, k)
            centers = rng.uniform(-c, c, (k, grid.d))
            widths = rng.uniform(lo, hi, k)
            out.append((amps, centers, widths))
        return out


def evaluate_bumps(grid, params):
    """Nodal values ``(len(params), N)`` of bump superpositions."""
    nodes = grid.nodes
    vals = np.zeros((len(params), grid.N))
    for i, (amps, centers, widths) in enumerate(params):
        for a, c, w in zip(amps, centers, widths):
            diff = nodes - c
            vals[i] += a * np.exp(-np.sum(diff * diff, axis=-1) / (2.0 * w * w))
    return vals


def bump_corpus(grid, n, seed=0, spec=None):
    """``n`` random bump superpositions on ``grid`` as an ``(n, N)`` array."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    spec = spec or CorpusSpec()
    return evaluate_bumps(grid, spec.draw(grid, n, rng))


def suite_grid(n=7, R=2.0, d=2, s=0.5):
    """Small default grid for the bulk function-level checks."""
    return DomainGrid(d, R, n, s)
