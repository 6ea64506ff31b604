"""Verdict records shared by the assumption checks and the property suites."""

import json
from dataclasses import asdict, dataclass, field

import numpy as np


def _plain(obj):
    """Convert numpy scalars/arrays inside a witness into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class PropertyReport:
    """Outcome of one sampled inequality check.

    ``worst_violation`` is the largest signed violation
    ``(lhs - rhs) / max(1, |rhs|)`` over the cases; the check passes iff it
    does not exceed ``tolerance``.
    """

    suite: str
    cases_run: int
    worst_violation: float
    witness: dict
    tolerance: float
    family: str = ""
    seed: int | None = None
    note: str = ""

    @property
    def verdict(self):
        w = self.worst_violation
        return "pass" if (w == w and w <= self.tolerance) else "fail"

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        out = asdict(self)
        out["verdict"] = self.verdict
        out["worst_violation"] = float(self.worst_violation)
        return _plain(out)


@dataclass
class SuiteReport:
    """A named collection of PropertyReports."""

    name: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def __getitem__(self, suite):
        for c in self.checks:
            if c.suite == suite:
                return c
        raise KeyError(suite)

    def add(self, report):
        self.checks.append(report)
        return report

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    def to_dict(self):
        return {"name": self.name, "verdict": self.verdict, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def summary(self):
        """Fixed-width human-readable table."""
        lines = [f"{'check':<42} {'cases':>8} {'worst':>12} {'tol':>9}  verdict"]
        for c in self.checks:
            lines.append(f"{c.suite:<42} {c.cases_run:>8d} {c.worst_violation:>12.3e} {c.tolerance:>9.1e}  {c.verdict}")
        return "\n".join(lines)


def signed_violation(lhs, rhs):
    """``(lhs - rhs) / max(1, |rhs|)``, elementwise."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    return (lhs - rhs) / np.maximum(1.0, np.abs(rhs))


class Tracker:
    """Running worst case with its witness.

    ``update`` takes arrays of violations and a dict of same-length input
    arrays; the witness keeps the inputs at the arg-max.  NaN violations
    count as infinitely bad.
    """

    def __init__(self, suite, tolerance, family="", seed=None, note=""):
        self.suite = suite
        self.tolerance = float(tolerance)
        self.family = family
        self.seed = seed
        self.note = note
        self.cases = 0
        self.worst = -np.inf
        self.witness = {}

    def update(self, violation, inputs=None, extra=None):
        v = np.atleast_1d(np.asarray(violation, dtype=float)).ravel()
        if v.size == 0:
            return
        self.cases += v.size
        v_eff = np.where(np.isnan(v), np.inf, v)
        i = int(np.argmax(v_eff))
        if np.isnan(self.worst):
            return
        if v_eff[i] > self.worst or self.cases == v.size:
            self.worst = float(v[i]) if not np.isnan(v[i]) else float("nan")
            wit = {}
            for k, arr in (inputs or {}).items():
                a = np.asarray(arr)
                if a.ndim and a.shape[0] == v.size:
                    wit[k] = a[i]
                elif a.ndim and a.size == v.size:
                    wit[k] = a.ravel()[i]
                else:
                    wit[k] = a
            if extra:
                wit.update(extra)
            self.witness = wit

    def report(self):
        worst = self.worst if self.cases else 0.0
        return PropertyReport(self.suite, self.cases, worst, _plain(self.witness), self.tolerance,
                              family=self.family, seed=self.seed, note=self.note)
