"""``musielak`` command-line driver.

Exit codes: 0 pass, 1 property or solve failure, 2 configuration or grid
error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__
from ..exceptions import (ConfigurationError, DomainError, GridMismatchError, MusielakError, NumericError,
                          PreconditionError)
from ..nfunction.assumptions import SampleSpec, check_assumptions, gstar
from ..nfunction.calculus import SobolevConjugate, complementary
from ..reports import SuiteReport, _plain
from ..spaces.grid import DomainGrid, GridFunction
from ..spaces.modulars import evaluator, potential_values
from ..spaces.norms import luxemburg_norm
from ..variational.functional import verify_weak_solution
from ..variational.solver import MinimizerEstimator
from ..verify.corpus import builtin_families
from ..verify.probes import probe_embedding_constant, probe_radial_decay
from ..verify.suites import SUITES, run_suite
from .config import Expression, load_config

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class Context:
    """Flags plus the loaded configuration, shared by every subcommand."""

    def __init__(self, args):
        self.args = args
        self.cfg = load_config(args.config) if args.config else None
        self.seed = args.seed if args.seed is not None else (self.cfg.solver["seed"] if self.cfg else 0)
        self.out = args.out
        self.fmt = args.format
        if self.out:
            os.makedirs(self.out, exist_ok=True)

    @property
    def sha256(self):
        return self.cfg.sha256 if self.cfg else "none"

    def header(self):
        return [f"musielak_version: {__version__}", f"config_sha256: {self.sha256}"]

    def stamp(self, payload):
        return {"musielak_version": __version__, "config_sha256": self.sha256, "seed": self.seed, **payload}

    def need_config(self, what):
        if self.cfg is None:
            raise ConfigurationError(f"{what} needs --config")
        return self.cfg

    def path(self, name):
        return os.path.join(self.out, name) if self.out else None

    def write_json(self, name, payload):
        text = json.dumps(_plain(self.stamp(payload)), indent=2, sort_keys=True) + "\n"
        p = self.path(name)
        if p:
            with open(p, "w") as fh:
                fh.write(text)
        return text

    def write_table(self, name, columns, rows):
        """Write ``rows`` as CSV (with ``#`` header) or JSON; returns the text."""
        if self.fmt == "json":
            text = json.dumps(_plain(self.stamp({"columns": columns, "rows": rows})), indent=2,
                              sort_keys=True) + "\n"
            name = os.path.splitext(name)[0] + ".json"
        else:
            buf = io.StringIO()
            for line in self.header():
                buf.write(f"# {line}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
            text = buf.getvalue()
        p = self.path(name)
        if p:
            with open(p, "w") as fh:
                fh.write(text)
        return text


# ---------------------------------------------------------------------------
def cmd_check(ctx):
    cfg = ctx.need_config("check")
    spec = SampleSpec(d=cfg.grid.d, s=cfg.grid.s, seed=ctx.seed)
    rep = check_assumptions(cfg.family, spec)
    if cfg.problem is not None:
        rep.extend(cfg.problem_data(validate=False).check())
    print(rep.summary())
    ctx.write_json("check.json", {"command": "check", "family": cfg.family.name, "report": rep.to_dict()})
    if not rep.passed:
        for c in rep.checks:
            if not c.passed:
                where = f" at {c.witness['condition']}" if "condition" in c.witness else ""
                print(f"FAIL {c.suite}: {c.note or 'worst violation'}{where} ({c.worst_violation:.3e})",
                      file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _potential(cfg):
    if cfg.problem is not None:
        return potential_values(cfg.problem["V"], cfg.grid)
    return np.ones(cfg.grid.N)


def cmd_norm(ctx):
    cfg = ctx.need_config("norm")
    u = GridFunction.from_csv(ctx.args.function, cfg.grid)
    fam, grid = cfg.family, cfg.grid
    ev = evaluator(fam, grid)
    V = _potential(cfg)
    ex = (fam.g_minus, fam.g_plus)
    parts = {
        "Ghat": (ev.Ghat, u),
        "gagliardo": (ev.gagliardo, u),
        "combined": (ev.combined, u),
        "weighted": (lambda w: ev.weighted(w, V), u),
    }
    cols, row = [], []
    vals = {}
    for key, (mod, f) in parts.items():
        nv = luxemburg_norm(mod, f, ex)
        vals[key] = nv
        cols += [f"norm_{key}", f"modular_{key}", f"iters_{key}", f"modular_at_norm_{key}"]
        row += [nv.value, float(mod(u.values[None, :])[0]), nv.bisection_iters, nv.modular_at_norm]
    norm_W = vals["Ghat"].value + vals["gagliardo"].value
    norm_E = vals["gagliardo"].value + vals["weighted"].value
    cols += ["norm_W", "norm_E", "converged"]
    row += [norm_W, norm_E, int(all(v.converged for v in vals.values()))]
    print(ctx.write_table("norm.csv", cols, [row]), end="")
    return EXIT_OK


def cmd_conjugate(ctx):
    cfg = ctx.need_config("conjugate")
    a = ctx.args
    fam, grid = cfg.family, cfg.grid
    t = np.logspace(math.log10(a.t_min), math.log10(a.t_max), a.n_t)
    x = np.zeros(grid.d)
    cols = ["t", "Ghat", "Gtilde"]
    data = [t, fam.Ghat(x, t), complementary(fam, x, t)]
    if np.isfinite(gstar(fam.g_plus, grid.d, grid.s)):
        sc = SobolevConjugate(fam, x, grid.s)
        cols += ["Gstar", "Gstar_inverse"]
        data += [sc(t), sc.inverse(t)]
    rows = [list(r) for r in zip(*[np.asarray(c, float).ravel() for c in data])]
    print(ctx.write_table("conjugate.csv", cols, rows), end="")
    return EXIT_OK


def cmd_solve(ctx):
    cfg = ctx.need_config("solve")
    data = cfg.problem_data()
    sv = cfg.solver
    est = MinimizerEstimator(tol_res=sv["tol_res"], max_iter=sv["max_iter"], c1=sv["c1"], shrink=sv["shrink"],
                             seed_width=sv["seed_width"])
    est.fit(data)
    res = est.result_
    weak, detail = verify_weak_solution(data, res.u_star, {"seed": ctx.seed})
    V = data.V
    ev = evaluator(cfg.family, cfg.grid)
    ex = (cfg.family.g_minus, cfg.family.g_plus)
    nE = (luxemburg_norm(ev.gagliardo, res.u_star, ex).value
          + luxemburg_norm(lambda w: ev.weighted(w, V), res.u_star, ex).value)
    hist = res.history_array()
    monotone = bool(np.all(np.diff(hist[:, 0]) <= 0))
    summary = {
        "command": "solve", "family": cfg.family.name, "converged": res.converged, "iterations": res.iterations,
        "energy": res.energy, "residual": res.residual, "weak_residual": weak, "weak_detail": detail,
        "norm_E": nE, "seed_t": est.seed_[0], "seed_energy": est.seed_[1], "monotone_energy": monotone,
    }
    if ctx.out:
        res.u_star.to_csv(ctx.path("u_star.csv"), header_lines=ctx.header())
        res.write_history(ctx.path("history.csv"), header_lines=ctx.header())
    print(ctx.write_json("solve.json", summary), end="")
    return EXIT_OK if res.converged else EXIT_FAIL


def _suite_kwargs(cfg, name):
    out = {}
    if cfg is None:
        return out
    for key, raw in cfg.verify.items():
        if key.startswith(name + "."):
            v = Expression(raw, (), f"[verify] {key}").value()
            out[key.split(".", 1)[1]] = int(v) if float(v).is_integer() else v
    return out


def cmd_verify(ctx):
    a = ctx.args
    names = sorted(SUITES) if a.suite in (None, "all") else [s.strip() for s in a.suite.split(",")]
    for n in names:
        if n not in SUITES:
            raise ConfigurationError(f"--suite: unknown suite {n!r} (choose from {', '.join(sorted(SUITES))}, all)")
    fams = {ctx.cfg.family.name: ctx.cfg.family} if ctx.cfg else builtin_families()
    results = {}
    ok = True
    for fname, fam in fams.items():
        for n in names:
            rep = run_suite(n, fam, seed=ctx.seed, **_suite_kwargs(ctx.cfg, n))
            results.setdefault(fname, {})[n] = rep.to_dict()
            ok &= rep.passed
            print(f"[{fname}] {n}: {rep.verdict}")
            print(rep.summary())
    ctx.write_json("verify.json", {"command": "verify", "suites": names, "results": results,
                                   "verdict": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_probe(ctx):
    a = ctx.args
    cfg = ctx.cfg
    fam = cfg.family if cfg else builtin_families()["double_phase"]
    ok = True
    if a.kind in ("radial", "all"):
        grid = cfg.grid if cfg else DomainGrid(2, 4.0, 65, 0.5)
        prof = Expression(a.profile, ("r",), "--profile")
        curve = probe_radial_decay(fam, lambda r: prof(r=r), a.radius, grid=grid)
        if ctx.out:
            curve.to_csv(ctx.path("probe_radial.csv"), extra=True, header_lines=ctx.header())
        print(curve.report and SuiteReport("radial", [curve.report]).summary())
        ok &= curve.report.passed
    if a.kind in ("embedding", "all"):
        d, s = (cfg.grid.d, cfg.grid.s) if cfg else (2, 0.5)
        curve = probe_embedding_constant(fam, n_functions=a.n_functions, d=d, s=s, seed=ctx.seed)
        if ctx.out:
            curve.to_csv(ctx.path("probe_embedding.csv"), extra=True, header_lines=ctx.header())
        print(f"embedding ratio running max: {curve.ordinate[-1]:.6g}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"check": cmd_check, "norm": cmd_norm, "conjugate": cmd_conjugate, "solve": cmd_solve,
            "verify": cmd_verify, "probe": cmd_probe}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: [solver] seed or 0)")
    common.add_argument("--threads", type=int, default=1, help="cap on BLAS/OpenMP worker threads")
    common.add_argument("--out", metavar="DIR", help="directory for output artifacts")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="table output format")
    common.add_argument("--suite", default=None, help="suite name, comma list or 'all' (verify)")

    p = argparse.ArgumentParser(prog="musielak", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"musielak {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="sampled assumption and problem-data checks")
    sp = sub.add_parser("norm", parents=[common], help="norms and modulars of a grid function file")
    sp.add_argument("function", help="grid function CSV")
    sp = sub.add_parser("conjugate", parents=[common], help="tabulate Ghat, its complement and G* at x = 0")
    sp.add_argument("--t-min", type=float, default=1e-3)
    sp.add_argument("--t-max", type=float, default=1e3)
    sp.add_argument("--n-t", type=int, default=61)
    sub.add_parser("solve", parents=[common], help="minimize the energy of the configured problem")
    sub.add_parser("verify", parents=[common], help="run property suites")
    sp = sub.add_parser("probe", parents=[common], help="radial decay and embedding-constant probes")
    sp.add_argument("--kind", choices=("radial", "embedding", "all"), default="radial")
    sp.add_argument("--profile", default="exp(-r^2)", help="radial profile as an expression in r")
    sp.add_argument("--radius", type=float, default=0.5, help="ball radius")
    sp.add_argument("--n-functions", type=int, default=50)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigurationError("--threads must be at least 1")
        with threadpool_limits(limits=args.threads):
            ctx = Context(args)
            return COMMANDS[args.command](ctx)
    except (ConfigurationError, GridMismatchError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        it = f" (iteration {exc.iteration})" if exc.iteration is not None else ""
        print(f"numerical error: {exc}{it}", file=sys.stderr)
        return EXIT_NUMERIC
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MusielakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
