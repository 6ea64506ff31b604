"""Empirical probes: embedding-constant curves and radial ball-modular decay."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DomainError
from ..nfunction.assumptions import gstar
from ..reports import PropertyReport, Tracker, signed_violation
from ..spaces.grid import DomainGrid, GridFunction
from ..spaces.modulars import evaluator
from .corpus import CorpusSpec, evaluate_bumps
from .suites import _batch_norms


@dataclass
class ProbeCurve:
    """A sampled curve with equal-length abscissa and ordinate.

    ``columns`` holds optional extra series of the same length (bounds,
    per-level values).  ``report`` is set by probes that also check an
    inequality along the curve.
    """

    abscissa_label: str
    abscissa: np.ndarray
    ordinate_label: str
    ordinate: np.ndarray
    metadata: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)
    report: PropertyReport | None = None

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.ordinate = np.asarray(self.ordinate, dtype=float)
        if self.abscissa.shape != self.ordinate.shape or self.abscissa.ndim != 1:
            raise ValueError("abscissa and ordinate must be 1-d arrays of equal length")
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        for k, v in self.columns.items():
            if v.shape != self.abscissa.shape:
                raise ValueError(f"column {k!r} has the wrong length")
        if not (np.all(np.isfinite(self.abscissa)) and np.all(np.isfinite(self.ordinate))):
            raise ValueError("probe curves must be finite")

    def __len__(self):
        return self.abscissa.size

    def to_csv(self, path, extra=False, header_lines=()):
        """Write ``abscissa,ordinate`` rows; ``extra=True`` appends ``columns``.

        Metadata and ``header_lines`` go into leading ``#`` comment lines.
        """
        names = [self.abscissa_label, self.ordinate_label] + (list(self.columns) if extra else [])
        cols = [self.abscissa, self.ordinate] + ([self.columns[k] for k in self.columns] if extra else [])
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            for k in sorted(self.metadata):
                fh.write(f"# {k}: {self.metadata[k]}\n")
            w = csv.writer(fh)
            w.writerow(names)
            for row in zip(*cols):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path):
        meta, rows = {}, []
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("# ") and ": " in line:
                k, v = line[2:].split(": ", 1)
                meta[k] = v
            elif not line.startswith("#"):
                body.append(line)
        reader = csv.reader(body)
        names = next(reader)
        rows = np.array([[float(v) for v in r] for r in reader], dtype=float).reshape(-1, len(names))
        extra = {n: rows[:, i] for i, n in enumerate(names[2:], start=2)}
        return cls(names[0], rows[:, 0], names[1], rows[:, 1], meta, extra)


# ---------------------------------------------------------------------------
def probe_embedding_constant(fam, corpus_spec=None, n_functions=200, levels=(17, 33), R=4.0, d=2, s=0.5,
                             seed=0):
    """Running maxima of ``||u||_{L^{G*}} / ||u||_(Omega)`` over a bump corpus.

    The same physical corpus (bump parameters drawn once, widths relative
    to the finest spacing) is sampled on every grid in ``levels``.  The
    ordinate is the running maximum on the finest grid; ``columns`` hold
    the per-level ratios and running maxima.
    """
    if gstar(fam.g_plus, d, s) == np.inf:
        raise DomainError("Sobolev conjugate undefined for this family and (d, s)")
    grids = [DomainGrid(d, R, n, s) for n in levels]
    spec = corpus_spec or CorpusSpec()
    if spec.h_ref is None:
        spec = CorpusSpec(spec.n_bumps, spec.amplitude, spec.center_frac, h_ref=min(g.h for g in grids))
    rng = np.random.default_rng(seed)
    params = spec.draw(grids[-1], n_functions, rng)
    g = (fam.g_minus, fam.g_plus)
    gs = (float(gstar(fam.g_minus, d, s)), float(gstar(fam.g_plus, d, s)))
    cols = {}
    for grid in grids:
        vals = evaluate_bumps(grid, params)
        keep = np.any(vals != 0, axis=-1)
        if not keep.all():
            raise DomainError("corpus produced a zero function")
        ev = evaluator(fam, grid)
        n_star, _ = _batch_norms(ev.sobolev_conjugate, vals, gs, chunk=50)
        n_omega, _ = _batch_norms(ev.combined, vals, g, chunk=50)
        ratio = n_star / n_omega
        cols[f"ratio_n{grid.n}"] = ratio
        cols[f"running_max_n{grid.n}"] = np.maximum.accumulate(ratio)
    finest = grids[-1].n
    meta = {"family": fam.name, "levels": list(levels), "R": R, "d": d, "s": s, "seed": seed,
            "n_functions": n_functions}
    return ProbeCurve("sample", np.arange(1, n_functions + 1), "running_max_ratio",
                      cols[f"running_max_n{finest}"], meta, cols)


# ---------------------------------------------------------------------------
def _fibonacci_sphere(m):
    k = np.arange(m) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / m)
    theta = math.pi * (1.0 + 5.0 ** 0.5) * k
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1)


def packing_count(d, r, rho, n_candidates=4000):
    """Certified lower bound on disjoint radius-``r`` balls centered on the sphere of radius ``rho``.

    Centers must be at angular distance at least ``2 arcsin(r / rho)``.
    For ``d = 2`` the greedy placement around the circle gives
    ``floor(pi / arcsin(r / rho))``; for ``d = 3`` candidates on a
    Fibonacci lattice are accepted greedily.  Returns at least 1.
    """
    if rho <= r:
        raise DomainError("packing count needs |y| > r")
    theta = 2.0 * math.asin(r / rho)
    if d == 1:
        return 2
    if d == 2:
        return max(1, int(math.floor(math.pi / math.asin(r / rho))))
    if d != 3:
        raise DomainError("packing count implemented for d <= 3")
    pts = _fibonacci_sphere(n_candidates)
    cos_min = math.cos(theta)
    chosen = []
    for p in pts:
        if all(float(p @ q) <= cos_min for q in chosen):
            chosen.append(p)
    return max(1, len(chosen))


def probe_radial_decay(fam, profile, r, centers_spec=None, grid=None):
    """Ball modulars of a radial function against the packing bound.

    For centers ``y = rho e`` (``e`` a unit direction, ``r < rho <= rho_max``)
    checks ``ball_modular(y) <= modular_Ghat(u) / gamma(rho) + tol_cell(y)``
    where ``tol_cell`` is the modular on the shell of half-width ``h sqrt(d)``
    around the sphere ``|x - y| = r``, which bounds the discretization error
    of the node ball.  Centers with ``rho <= r`` are skipped.

    ``centers_spec`` keys: ``rho_max`` (default ``0.8 R``), ``n_centers``
    (default: one per grid spacing), ``direction`` (default ``e_1``).
    """
    grid = grid or DomainGrid(2, 4.0, 65, 0.5)
    spec = {"rho_max": 0.8 * grid.R, "n_centers": None, "direction": None}
    spec.update(centers_spec or {})
    u = profile if isinstance(profile, GridFunction) else GridFunction.from_profile(grid, profile)
    vals = u.values
    e = np.zeros(grid.d)
    e[0] = 1.0
    if spec["direction"] is not None:
        e = np.asarray(spec["direction"], dtype=float)
        e = e / np.linalg.norm(e)
    rho_max = float(spec["rho_max"])
    n_c = spec["n_centers"] or max(1, int(math.floor((rho_max - r) / grid.h)))
    rho = np.linspace(r, rho_max, n_c + 1)[1:]
    rho = rho[rho > r]

    node_G = evaluator(fam, grid).Ghat_nodes(vals)
    total = float(np.sum(node_G) * grid.cell)
    width = grid.h * math.sqrt(grid.d)
    ball, tol, gamma = [], [], []
    for rh in rho:
        dist = np.linalg.norm(grid.nodes - rh * e, axis=-1)
        ball.append(float(np.sum(np.where(dist < r, node_G, 0.0)) * grid.cell))
        shell = (dist >= r - width) & (dist < r + width)
        tol.append(float(np.sum(np.where(shell, node_G, 0.0)) * grid.cell))
        gamma.append(packing_count(grid.d, r, rh))
    ball, tol, gamma = np.array(ball), np.array(tol), np.array(gamma, dtype=float)
    bound = total / gamma + tol
    tr = Tracker("radial_decay", 0.0, fam.name, note="ball modular <= total / gamma + shell modular")
    tr.update(signed_violation(ball, bound), {"rho": rho, "ball": ball, "bound": bound, "gamma": gamma},
              {"r": r, "total": total})
    meta = {"family": fam.name, "d": grid.d, "R": grid.R, "n": grid.n, "r": r}
    return ProbeCurve("abs_y", rho, "ball_modular", ball, meta,
                      {"bound": bound, "gamma": gamma, "cell_tolerance": tol}, report=tr.report())
