"""INI run configurations and the small expression language for fields."""

import ast
import configparser
import hashlib
import math
import operator
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError, DomainError
from ..nfunction.families import Custom, DoublePhase, Orlicz, PowerVariable
from ..spaces.grid import DomainGrid
from ..variational.problem import ProblemData
from ..verify.corpus import with_declared

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: np.power}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs, "sqrt": np.sqrt, "log": np.log,
          "tanh": np.tanh, "min": np.minimum, "max": np.maximum}
_CONSTS = {"pi": math.pi, "e": math.e}


class Expression:
    """Arithmetic expression over named variables, evaluated with numpy.

    Supports ``+ - * / ^`` (``^`` is power), unary minus, numbers, ``pi``,
    ``e`` and the functions sin, cos, exp, abs, sqrt, log, tanh, min, max.
    Anything else is rejected at parse time.
    """

    def __init__(self, text, variables, where=""):
        self.text = str(text).strip()
        self.variables = tuple(variables)
        self.where = where
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigurationError(f"{where}: cannot parse {self.text!r}: {exc.msg}") from None
        self._check(tree.body)
        self._tree = tree.body
        self.used = sorted({n.id for n in ast.walk(tree) if isinstance(n, ast.Name)} - set(_FUNCS) - set(_CONSTS))

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ConfigurationError(f"{self.where}: only numeric constants are allowed")
        elif isinstance(node, ast.Name):
            if node.id not in self.variables and node.id not in _CONSTS:
                raise ConfigurationError(f"{self.where}: unknown name {node.id!r} (allowed: "
                                         f"{', '.join(self.variables + tuple(_CONSTS))})")
        elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            self._check(node.operand)
        elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            if node.keywords or not node.args:
                raise ConfigurationError(f"{self.where}: bad call to {node.func.id}")
            for a in node.args:
                self._check(a)
        else:
            raise ConfigurationError(f"{self.where}: unsupported syntax {type(node).__name__} in {self.text!r}")

    @property
    def is_constant(self):
        return not self.used

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else _CONSTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        fn = _FUNCS[node.func.id]
        args = [self._eval(a, env) for a in node.args]
        if fn in (np.minimum, np.maximum):
            out = args[0]
            for a in args[1:]:
                out = fn(out, a)
            return out
        return fn(*args)

    def __call__(self, **env):
        with np.errstate(all="ignore"):
            return np.asarray(self._eval(self._tree, env), dtype=float)

    def value(self):
        """The value of a constant expression."""
        if not self.is_constant:
            raise ConfigurationError(f"{self.where}: expected a constant, got {self.text!r}")
        return float(self())

    def on_points(self, x, y=None):
        """Evaluate with ``x1..xd`` (and ``y1..yd``, ``r = |x|``) from point arrays."""
        x = np.asarray(x, dtype=float)
        env = {f"x{k + 1}": x[..., k] for k in range(x.shape[-1])}
        env["r"] = np.sqrt(np.sum(x * x, axis=-1))
        if y is not None:
            y = np.asarray(y, dtype=float)
            env.update({f"y{k + 1}": y[..., k] for k in range(y.shape[-1])})
        out = self(**env)
        shape = np.broadcast_shapes(x.shape[:-1], () if y is None else y.shape[:-1])
        return np.broadcast_to(out, shape)


def _point_vars(d, two=False):
    names = [f"x{k + 1}" for k in range(d)] + ["r"]
    if two:
        names += [f"y{k + 1}" for k in range(d)]
    return names


@dataclass
class RunConfig:
    """Parsed configuration; ``sha256`` is the hash of the raw file bytes."""

    path: str
    sha256: str
    sections: dict
    grid: DomainGrid
    family: object
    problem: dict | None = None
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)

    def problem_data(self, validate=True):
        if self.problem is None:
            raise ConfigurationError(f"{self.path}: no [problem] section")
        p = self.problem
        return ProblemData(self.family, self.grid, p["V"], p["V0"], p["b"], p["p"], p["delta"], validate=validate)


def _get(sec, key, name, required=True, default=None):
    if key in sec:
        return sec[key]
    if required:
        raise ConfigurationError(f"missing key '{key}' in [{name}]")
    return default


def _num(sec, key, name, required=True, default=None, kind=float):
    raw = _get(sec, key, name, required, None)
    if raw is None:
        return default
    try:
        return kind(Expression(raw, (), f"[{name}] {key}").value())
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"[{name}] {key}: {exc}") from None


def _family(sec, d):
    kind = _get(sec, "kind", "family")
    declared = {k: _num(sec, k, "family", required=False) for k in ("g_minus", "g_plus", "c1", "c2")}
    xy = _point_vars(d, two=True)
    try:
        if kind == "PowerVariable":
            pe = Expression(_get(sec, "p", "family"), xy, "[family] p")
            if pe.is_constant:
                fam = PowerVariable(pe.value())
            else:
                if declared["g_minus"] is None or declared["g_plus"] is None:
                    raise ConfigurationError("[family] variable p needs declared g_minus and g_plus")
                fam = PowerVariable(lambda x, y: pe.on_points(x, y), declared["g_minus"], declared["g_plus"])
                declared["g_minus"] = declared["g_plus"] = None
        elif kind == "DoublePhase":
            p = _num(sec, "p", "family", default=2.0, required=False)
            q = _num(sec, "q", "family", default=3.0, required=False)
            be = Expression(_get(sec, "b", "family", required=False, default="1"), xy, "[family] b")
            if be.is_constant:
                fam = DoublePhase(p, q, be.value())
            else:
                rng = (_num(sec, "b_min", "family"), _num(sec, "b_max", "family"))
                fam = DoublePhase(p, q, lambda x, y: be.on_points(x, y), b_range=rng)
        elif kind == "Orlicz":
            m = _get(sec, "m", "family", required=False, default="tlog")
            if m == "tlog":
                fam = Orlicz()
            else:
                me = Expression(m, ("t",), "[family] m")
                if declared["g_minus"] is None or declared["g_plus"] is None:
                    raise ConfigurationError("[family] custom m needs declared g_minus and g_plus")
                fam = Orlicz(lambda t: me(t=t), g_minus=declared["g_minus"], g_plus=declared["g_plus"],
                             c1=declared["c1"], c2=declared["c2"], label=m)
                declared = dict.fromkeys(declared)
        elif kind == "Custom":
            ae = Expression(_get(sec, "a", "family"), xy + ["t"], "[family] a")
            xi = str(_get(sec, "x_independent", "family", required=False, default="false")).lower() in ("1", "true",
                                                                                                        "yes")
            gm = _num(sec, "g_minus", "family")
            gp = _num(sec, "g_plus", "family")

            def a(x, y, t):
                x = np.asarray(x, float)
                env = {f"x{k + 1}": x[..., k] for k in range(x.shape[-1])}
                env.update({f"y{k + 1}": np.asarray(y, float)[..., k] for k in range(x.shape[-1])})
                env["r"] = np.sqrt(np.sum(x * x, axis=-1))
                return ae(t=t, **env)

            fam = Custom(a, gm, gp, declared["c1"], declared["c2"], x_independent=xi, label=ae.text)
            declared = dict.fromkeys(declared)
        else:
            raise ConfigurationError(f"[family] kind: unknown family {kind!r} "
                                     "(PowerVariable, DoublePhase, Orlicz, Custom)")
    except DomainError as exc:
        raise ConfigurationError(f"[family]: {exc}") from None
    if any(v is not None for v in declared.values()):
        fam = with_declared(fam, **declared)
    return fam


def _field(sec, key, d):
    e = Expression(_get(sec, key, "problem"), _point_vars(d), f"[problem] {key}")
    return e.value() if e.is_constant else (lambda nodes, e=e: e.on_points(nodes))


def load_config(path):
    """Parse an INI run configuration; errors raise ConfigurationError with section/key context."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(raw.decode("utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    sections = {s: dict(cp[s]) for s in cp.sections()}
    for s in ("family", "grid"):
        if s not in sections:
            raise ConfigurationError(f"{path}: missing section [{s}]")
    g = sections["grid"]
    try:
        grid = DomainGrid(_num(g, "d", "grid", kind=int), _num(g, "R", "grid"), _num(g, "n", "grid", kind=int),
                          _num(g, "s", "grid"))
    except DomainError as exc:
        raise ConfigurationError(f"[grid]: {exc}") from None
    fam = _family(sections["family"], grid.d)
    problem = None
    if "problem" in sections:
        ps = sections["problem"]
        problem = {k: _field(ps, k, grid.d) for k in ("V", "b", "p", "delta")}
        problem["V0"] = _num(ps, "V0", "problem")
    sv = sections.get("solver", {})
    solver = {
        "tol_res": _num(sv, "tol_res", "solver", required=False, default=1e-6),
        "max_iter": _num(sv, "max_iters", "solver", required=False, default=5000, kind=int),
        "c1": _num(sv, "c1", "solver", required=False, default=1e-4),
        "shrink": _num(sv, "shrink", "solver", required=False, default=0.5),
        "seed_width": _num(sv, "seed_width", "solver", required=False, default=1.0),
        "seed": _num(sv, "seed", "solver", required=False, default=0, kind=int),
    }
    return RunConfig(str(path), hashlib.sha256(raw).hexdigest(), sections, grid, fam, problem, solver,
                     dict(sections.get("output", {})), dict(sections.get("verify", {})))
