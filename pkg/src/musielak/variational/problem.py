"""Data of the Schrodinger-type problem and its admissibility checks."""

import numpy as np

from ..exceptions import DomainError, PreconditionError
from ..nfunction.assumptions import gstar
from ..reports import SuiteReport, Tracker
from ..spaces.grid import DomainGrid, GridFunction
from ..spaces.norms import norm_power

CHAIN = "1 < p- <= p+ < g- <= g+ <= delta- p- <= delta(x) p(x) <= delta+ p+ <= g*-"


def _field(value, grid, name):
    if isinstance(value, GridFunction):
        vals = value.values
    elif callable(value):
        vals = np.asarray(value(grid.nodes), dtype=float)
    else:
        vals = np.asarray(value, dtype=float)
    vals = np.array(np.broadcast_to(vals, (grid.N,)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"{name} must be finite at every node")
    vals.setflags(write=False)
    return vals


class ProblemData:
    """Potential ``V``, weight ``b`` and exponents ``p(x)``, ``delta(x)``.

    Fields are nodal samples on ``grid`` (scalars, arrays, GridFunctions
    or callables of the node coordinates are accepted).  With
    ``validate=True`` construction fails with PreconditionError when
    ``check()`` reports a violated condition.
    """

    def __init__(self, fam, grid, V, V0, b, p, delta, validate=True):
        if not isinstance(grid, DomainGrid):
            raise TypeError("grid must be a DomainGrid")
        self.fam = fam
        self.grid = grid
        self.V = _field(V, grid, "V")
        self.V0 = float(V0)
        self.b = _field(b, grid, "b")
        self.p = _field(p, grid, "p")
        self.delta = _field(delta, grid, "delta")
        if np.any(self.delta <= 1):
            raise DomainError("delta must exceed 1 so that delta' = delta / (delta - 1) exists")
        self.delta_prime = self.delta / (self.delta - 1.0)
        self.delta_prime.setflags(write=False)
        if validate:
            rep = self.check()
            if not rep.passed:
                bad = [c for c in rep.checks if not c.passed]
                raise PreconditionError("; ".join(f"{c.suite}: {c.note}" for c in bad))

    def __repr__(self):
        return (f"ProblemData({self.fam.name}, d={self.grid.d}, n={self.grid.n}, "
                f"p in [{self.p.min():g}, {self.p.max():g}], delta in [{self.delta.min():g}, {self.delta.max():g}])")

    @property
    def p_minus(self):
        return float(self.p.min())

    @property
    def p_plus(self):
        return float(self.p.max())

    def b_norm(self):
        """Luxemburg norm of ``b`` for ``B_x(t) = |t|^{delta'(x)} / delta'(x)``."""
        return norm_power(self.b, self.delta_prime, grid=self.grid).value

    def sublevel_fractions(self, levels=None):
        """Fraction of nodes with ``V < L`` for each level ``L``."""
        if levels is None:
            levels = self.V0 * np.array([1.5, 2.0, 4.0, 8.0, 16.0])
        return {float(L): float(np.mean(self.V < L)) for L in levels}

    def check(self):
        """Admissibility report: (V1), (V2), the exponent chain, ``b`` in ``L^{delta'}``."""
        name = self.fam.name
        out = SuiteReport("problem")
        tr = Tracker("V1_lower_bound", 0.0, name, note="V(x) >= V0 > 0 at every node")
        tr.update([-self.V0], extra={"V0": self.V0})
        tr.update(self.V0 - self.V, {"node": np.arange(self.grid.N), "V": self.V})
        out.add(tr.report())

        tr = Tracker("V2_sublevels", 0.0, name, note="node fraction of {V < L} reported per level")
        fr = self.sublevel_fractions()
        tr.update([0.0], extra={"fractions": {f"{k:g}": v for k, v in fr.items()}})
        out.add(tr.report())

        fam = self.fam
        pm, pp = self.p_minus, self.p_plus
        dm, dp = float(self.delta.min()), float(self.delta.max())
        gs = float(gstar(fam.g_minus, self.grid.d, self.grid.s))
        dpx = self.delta * self.p
        tr = Tracker("exponent_chain", 0.0, name, note=f"exponent chain {CHAIN} violated")
        margins = {
            "1 < p-": 1.0 - pm,
            "p+ < g-": pp - fam.g_minus,
            "g+ <= delta- p-": fam.g_plus - dm * pm,
            "delta+ p+ <= g*-": dp * pp - gs,
        }
        for label, m in margins.items():
            strict = label in ("1 < p-", "p+ < g-")
            tr.update([m + (1e-15 if strict else 0.0)], extra={"condition": label, "p-": pm, "p+": pp,
                                                              "g-": fam.g_minus, "g+": fam.g_plus, "g*-": gs,
                                                              "delta-": dm, "delta+": dp})
        tr.update(dm * pm - dpx, {"node": np.arange(self.grid.N)}, {"condition": "delta- p- <= delta(x)p(x)"})
        out.add(tr.report())

        tr = Tracker("b_in_L_delta_prime", 0.0, name, note="b must have a finite L^{delta'} norm")
        try:
            bn = self.b_norm()
            tr.update([0.0 if np.isfinite(bn) else np.inf], extra={"norm": bn})
        except Exception as exc:  # an infinite modular means b is not in the space
            tr.update([np.inf], extra={"error": str(exc)})
        out.add(tr.report())
        return out
