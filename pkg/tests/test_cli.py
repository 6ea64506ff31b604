import hashlib
import json
import shutil

import numpy as np
import pytest

from musielak import __version__
from musielak.cli import Expression, build_parser, load_config, main
from musielak.exceptions import ConfigurationError
from musielak.spaces import DomainGrid

SMALL_PROBLEM = """\
[family]
kind = DoublePhase
p = 2
q = 3

[grid]
d = 2
R = 3
n = 9
s = 0.5

[problem]
V = 1 + x1^2 + x2^2
V0 = 1
b = exp(-(x1^2 + x2^2))
p = 1.5
delta = 2.2

[solver]
tol_res = 1e-6
seed = 0

[verify]
convexity.n_cases = 500
convexity.n_pairs = 10
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL_PROBLEM)
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExpression:
    def test_arithmetic(self):
        e = Expression("1 + x1^2 - 2*x2 / 4", ("x1", "x2", "r"))
        assert e(x1=3.0, x2=2.0) == 9.0
        assert Expression("max(1, 2, 3) + min(4, -1) + pi - pi", ()).value() == 2.0

    def test_points(self):
        e = Expression("exp(-r^2)", ("x1", "x2", "r"))
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        np.testing.assert_allclose(e.on_points(x), [1.0, np.exp(-1.0)])
        c = Expression("2", ("x1",))
        assert c.is_constant and c.on_points(x).shape == (2,)

    @pytest.mark.parametrize("text", ["__import__('os')", "x1.real", "[1]", "foo + 1", "1 +", "'a'",
                                      "lambda: 1", "exp(x=1)"])
    def test_rejected(self, text):
        with pytest.raises(ConfigurationError, match=r"\[problem\] V"):
            Expression(text, ("x1", "r"), "[problem] V")

    def test_constant_required(self):
        with pytest.raises(ConfigurationError):
            Expression("x1", ("x1",)).value()


class TestConfig:
    def test_shipped(self, configs):
        cfg = load_config(configs / "problem_p.cfg")
        assert cfg.grid == DomainGrid(2, 4.0, 33, 0.5)
        assert cfg.family.g_minus == 2.0 and cfg.family.g_plus == 3.0
        assert cfg.sha256 == hashlib.sha256((configs / "problem_p.cfg").read_bytes()).hexdigest()
        data = cfg.problem_data()
        assert data.V[0] == pytest.approx(1 + 2 * 16)
        assert cfg.solver["max_iter"] == 5000

    def test_declared_override(self, configs):
        cfg = load_config(configs / "negative_control.cfg")
        assert cfg.family.g_plus == 2.5
        assert cfg.verify == {"sandwich.n_cases": "1000"}

    @pytest.mark.parametrize("drop, match", [("V0 = 1\n", "missing key 'V0' in \\[problem\\]"),
                                             ("[grid]\n", "missing section|grid"),
                                             ("kind = DoublePhase\n", "missing key 'kind'")])
    def test_missing(self, tmp_path, drop, match):
        p = tmp_path / "c.cfg"
        p.write_text(SMALL_PROBLEM.replace(drop, ""))
        with pytest.raises(ConfigurationError, match=match):
            load_config(p)

    def test_bad_family(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text(SMALL_PROBLEM.replace("kind = DoublePhase", "kind = Zygmund"))
        with pytest.raises(ConfigurationError, match="unknown family"):
            load_config(p)

    def test_bad_grid(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text(SMALL_PROBLEM.replace("s = 0.5", "s = 1.5"))
        with pytest.raises(ConfigurationError, match=r"\[grid\]"):
            load_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "nope.cfg")


class TestCommands:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_check_ok(self, configs, tmp_path, capsys):
        code, out, _ = run(["check", "--config", configs / "power_p2.cfg", "--out", tmp_path], capsys)
        assert code == 0
        rep = json.loads((tmp_path / "check.json").read_text())
        assert rep["musielak_version"] == __version__
        assert rep["config_sha256"] == hashlib.sha256((configs / "power_p2.cfg").read_bytes()).hexdigest()

    def test_check_chain_violation(self, configs, tmp_path, capsys):
        code, _, err = run(["check", "--config", configs / "chain_violation.cfg", "--out", tmp_path], capsys)
        assert code == 1
        assert "delta+ p+ <= g*-" in err or "p+ < g-" in err

    def test_check_config_error(self, configs, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text((configs / "problem_p.cfg").read_text().replace("V0 = 1\n", ""))
        code, _, err = run(["check", "--config", bad], capsys)
        assert code == 2
        assert "V0" in err and "[problem]" in err

    def test_norm(self, configs, tmp_path, capsys):
        cfg = load_config(configs / "power_p2.cfg")
        f = tmp_path / "u.csv"
        cfg.grid.evaluate(lambda x: np.exp(-np.sum(x * x, axis=-1))).to_csv(f)
        code, out, _ = run(["norm", f, "--config", configs / "power_p2.cfg", "--out", tmp_path], capsys)
        assert code == 0
        lines = [line for line in out.splitlines() if not line.startswith("#")]
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        # ||u||_2^2 = pi/2 on R^2 for exp(-|x|^2), and ||u|| = ||u||_2 / sqrt(2)
        assert float(row["norm_Ghat"]) == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-6)
        assert (tmp_path / "norm.csv").exists()

    def test_norm_zero(self, configs, tmp_path, capsys):
        cfg = load_config(configs / "power_p2.cfg")
        f = tmp_path / "z.csv"
        cfg.grid.zeros().to_csv(f)
        code, _, _ = run(["norm", f, "--config", configs / "power_p2.cfg", "--out", tmp_path,
                          "--format", "json"], capsys)
        assert code == 0
        payload = json.loads((tmp_path / "norm.json").read_text())
        row = dict(zip(payload["columns"], payload["rows"][0]))
        assert payload["config_sha256"] == load_config(configs / "power_p2.cfg").sha256
        assert all(v == 0.0 for k, v in row.items() if k.startswith(("norm", "modular")))

    def test_norm_grid_mismatch(self, configs, tmp_path, capsys):
        f = tmp_path / "u.csv"
        DomainGrid(2, 4.0, 17, 0.5).zeros().to_csv(f)
        code, _, err = run(["norm", f, "--config", configs / "power_p2.cfg"], capsys)
        assert code == 2

    def test_conjugate(self, configs, tmp_path, capsys):
        code, _, _ = run(["conjugate", "--config", configs / "power_p2.cfg", "--out", tmp_path, "--n-t", 5,
                          "--t-min", 0.5, "--t-max", 2], capsys)
        assert code == 0
        text = (tmp_path / "conjugate.csv").read_text().splitlines()
        body = [line for line in text if not line.startswith("#")]
        assert body[0].split(",") == ["t", "Ghat", "Gtilde", "Gstar", "Gstar_inverse"]
        t, G, Gt = (float(v) for v in body[3].split(",")[:3])
        assert t == 1.0 and G == pytest.approx(0.5) and Gt == pytest.approx(0.5)

    def test_solve(self, small_cfg, tmp_path, capsys):
        code, out, _ = run(["solve", "--config", small_cfg, "--out", tmp_path], capsys)
        assert code == 0
        s = json.loads((tmp_path / "solve.json").read_text())
        assert s["converged"] and s["energy"] < 0 and s["norm_E"] > 0 and s["monotone_energy"]
        assert s["residual"] <= 1e-6
        for name in ("u_star.csv", "history.csv"):
            assert (tmp_path / name).read_text().startswith("# musielak_version")

    def test_verify_negative_control_config(self, configs, tmp_path, capsys):
        code, _, _ = run(["verify", "--config", configs / "negative_control.cfg", "--suite", "sandwich",
                          "--out", tmp_path], capsys)
        assert code == 1
        rep = json.loads((tmp_path / "verify.json").read_text())
        assert rep["suites"] == ["sandwich"]

    def test_verify_unknown_suite(self, small_cfg, capsys):
        code, _, _ = run(["verify", "--config", small_cfg, "--suite", "bogus"], capsys)
        assert code == 2

    def test_verify_deterministic(self, small_cfg, tmp_path, capsys):
        outs = []
        for k in range(2):
            d = tmp_path / f"run{k}"
            code, _, _ = run(["verify", "--config", small_cfg, "--suite", "convexity", "--seed", 5, "--out", d],
                             capsys)
            assert code == 0
            outs.append((d / "verify.json").read_bytes())
        assert outs[0] == outs[1]

    def test_probe(self, tmp_path, capsys):
        code, _, _ = run(["probe", "--out", tmp_path, "--radius", 0.5], capsys)
        assert code == 0
        text = (tmp_path / "probe_radial.csv").read_text()
        assert "config_sha256: none" in text

    def test_probe_bad_profile(self, capsys):
        code, _, err = run(["probe", "--profile", "exp(-z)"], capsys)
        assert code == 2

    def test_missing_config(self, capsys):
        code, _, _ = run(["solve"], capsys)
        assert code == 2

    def test_copy_changes_hash_only_with_bytes(self, configs, tmp_path):
        dst = tmp_path / "copy.cfg"
        shutil.copy(configs / "power_p2.cfg", dst)
        assert load_config(dst).sha256 == load_config(configs / "power_p2.cfg").sha256
