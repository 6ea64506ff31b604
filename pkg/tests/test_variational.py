import math

import numpy as np
import pytest

from musielak.exceptions import DomainError, GridMismatchError, PreconditionError
from musielak.spaces import DomainGrid, GridFunction, modular_gagliardo
from musielak.variational import (CHAIN, MinimizerEstimator, ProblemData, SolverConfig, default_direction,
                                  energy_and_gradient, energy_I, energy_terms, gradient_I, minimize,
                                  monotonicity_gap, nontriviality_seed, verify_weak_solution, weak_form)
from musielak.verify.suites import default_problem, variational_grid
from oracles import central_difference


@pytest.fixture
def grid():
    return DomainGrid(2, 2.0, 9, 0.5)


@pytest.fixture
def data(dp, grid):
    return default_problem(dp, grid)


def bump(grid, c=(0.0, 0.0), w=0.7, a=1.0):
    c = np.asarray(c, float)
    return grid.evaluate(lambda x: a * np.exp(-np.sum((x - c) ** 2, axis=-1) / (2 * w * w)))


def p2_weak_loop(grid, u, v):
    """Literal ordered-pair sum ``(u_i - u_j)(v_i - v_j) h^2d / r^(d+2s)``."""
    X, d, s = grid.nodes, grid.d, grid.s
    total = 0.0
    for i in range(grid.N):
        for j in range(grid.N):
            if i != j:
                r = math.sqrt(float(np.sum((X[i] - X[j]) ** 2)))
                total += (u[i] - u[j]) * (v[i] - v[j]) * grid.h ** (2 * d) / r ** (d + 2 * s)
    return total


class TestWeakForm:
    def test_constant_test_function(self, family, grid):
        u = bump(grid)
        c = grid.evaluate(lambda x: np.full(len(x), 1.3))
        assert weak_form(family, u, c) == pytest.approx(0.0, abs=1e-14)

    def test_p2_matches_pair_loop(self, p2):
        g = DomainGrid(2, 1.0, 5, 0.5)
        rng = np.random.default_rng(3)
        u, v = rng.standard_normal((2, g.N))
        assert weak_form(p2, GridFunction(g, u), GridFunction(g, v)) == pytest.approx(p2_weak_loop(g, u, v),
                                                                                      rel=1e-12)

    def test_directional_derivative(self, family, grid):
        u, v = bump(grid, (0.3, -0.2), 0.6), bump(grid, (-0.4, 0.1), 0.8)
        fd = central_difference(lambda w: modular_gagliardo(family, GridFunction(grid, w)), u.values, v.values, 1e-5)
        assert weak_form(family, u, v) == pytest.approx(fd, rel=1e-6)

    def test_lower_bound(self, family, grid):
        u = bump(grid, a=1.7)
        assert weak_form(family, u, u) >= family.g_minus * modular_gagliardo(family, u) * (1 - 1e-12)
        assert weak_form(family, u, u) <= family.g_plus * modular_gagliardo(family, u) * (1 + 1e-12)

    def test_grid_mismatch(self, p2, grid):
        with pytest.raises(GridMismatchError):
            weak_form(p2, grid.zeros(), DomainGrid(2, 2.0, 7, 0.5).zeros())


    def test_p2_symmetric(self, p2, grid):
        u, v = bump(grid, (0.5, 0.0)), bump(grid, (-0.5, 0.2), 0.4)
        assert weak_form(p2, u, v) == pytest.approx(weak_form(p2, v, u), rel=1e-12)


class TestMonotonicity:
    def test_equal_arguments(self, family, grid):
        u = bump(grid)
        assert monotonicity_gap(family, u, u) == 0.0

    def test_p2_is_quadratic_form(self, p2, grid):
        u, v = bump(grid, (0.5, 0.0)), bump(grid, (-0.5, 0.2), 0.4)
        assert monotonicity_gap(p2, u, v) == pytest.approx(weak_form(p2, u - v, u - v), rel=1e-12)

    def test_nonnegative(self, family, grid, rng):
        for _ in range(20):
            a, b = (GridFunction(grid, w) for w in rng.standard_normal((2, grid.N)) * rng.uniform(0.1, 5))
            assert monotonicity_gap(family, a, b) >= -1e-9 * max(1.0, abs(weak_form(family, a, a)))


class TestEnergy:
    def test_zero(self, data):
        assert energy_I(data, data.grid.zeros()) == 0.0

    def test_split(self, data):
        u = bump(data.grid, a=0.4)
        J, W, S = energy_terms(data, u)
        assert J == pytest.approx(modular_gagliardo(data.fam, u), rel=1e-13)
        assert energy_I(data, u) == pytest.approx(J + W - S, rel=1e-15)
        assert S == pytest.approx(float(np.sum(data.b * np.abs(u.values) ** data.p / data.p)) * data.grid.cell,
                                  rel=1e-14)

    def test_nonnegative_without_source(self, dp, grid):
        data = ProblemData(dp, grid, 1.0, 1.0, 0.0, 1.5, 2.2)
        for a in (0.1, 1.0, 10.0):
            assert energy_I(data, bump(grid, a=a)) > 0

    def test_energy_and_gradient_consistent(self, data):
        u = bump(data.grid, a=0.3)
        E, g = energy_and_gradient(data, u.values)
        assert E == pytest.approx(energy_I(data, u), rel=1e-13)
        np.testing.assert_allclose(g, gradient_I(data, u).values, rtol=1e-12, atol=1e-15)

    def test_gradient_zero_at_origin(self, data):
        assert np.all(gradient_I(data, data.grid.zeros()).values == 0.0)

    def test_gradient_finite_difference(self, family, rng):
        g = variational_grid()
        data = default_problem(family, g)
        u = bump(g, (0.2, -0.1), 0.9, 0.5).values
        grad = gradient_I(data, u).values
        for _ in range(5):
            e = rng.standard_normal(g.N)
            e /= np.linalg.norm(e)
            fd = central_difference(lambda w: energy_I(data, w), u, e, 1e-5)
            assert abs(fd - grad @ e) <= 1e-5 * max(1.0, abs(fd))

    def test_negative_direction_exists(self, data):
        v = default_direction(data.grid)
        t, e = nontriviality_seed(data, v)
        assert e < 0
        assert e == energy_I(data, t * v)
        assert 0 < t <= 1

    def test_seed_needs_overlap(self, dp, grid):
        data = ProblemData(dp, grid, 1.0, 1.0, grid.evaluate(lambda x: (x[:, 0] > 1).astype(float)), 1.5, 2.2)
        v = grid.evaluate(lambda x: (x[:, 0] < 0).astype(float))
        with pytest.raises(PreconditionError):
            nontriviality_seed(data, v)


class TestProblemData:
    def test_valid(self, data):
        rep = data.check()
        assert rep.passed
        assert {c.suite for c in rep.checks} == {"V1_lower_bound", "V2_sublevels", "exponent_chain",
                                                "b_in_L_delta_prime"}
        assert "g*-" in CHAIN

    def test_potential_below_floor(self, dp, grid):
        with pytest.raises(PreconditionError, match="V1_lower_bound|problem"):
            ProblemData(dp, grid, 0.5, 1.0, 1.0, 1.5, 2.2)

    def test_chain_violation_reports_condition(self, dp, grid):
        data = ProblemData(dp, grid, 1.0, 1.0, 1.0, 2.5, 2.2, validate=False)
        rep = data.check()
        chain = next(c for c in rep.checks if c.suite == "exponent_chain")
        assert not chain.passed
        assert "condition" in chain.witness
        with pytest.raises(PreconditionError):
            ProblemData(dp, grid, 1.0, 1.0, 1.0, 2.5, 2.2)

    def test_delta_must_exceed_one(self, dp, grid):
        with pytest.raises(DomainError):
            ProblemData(dp, grid, 1.0, 1.0, 1.0, 1.5, 1.0, validate=False)

    def test_nonfinite_field(self, dp, grid):
        with pytest.raises(DomainError):
            ProblemData(dp, grid, np.inf, 1.0, 1.0, 1.5, 2.2)

    def test_fields_read_only(self, data):
        with pytest.raises(ValueError):
            data.V[0] = 3.0

    def test_callable_fields(self, dp, grid):
        a = ProblemData(dp, grid, lambda x: 1 + np.sum(x * x, axis=-1), 1.0, 1.0, 1.5, 2.2)
        b = ProblemData(dp, grid, 1 + np.sum(grid.nodes ** 2, axis=-1), 1.0, 1.0, 1.5, 2.2)
        np.testing.assert_array_equal(a.V, b.V)


class TestSolver:
    def test_no_source_goes_to_zero(self, dp, grid):
        data = ProblemData(dp, grid, 1.0, 1.0, 0.0, 1.5, 2.2)
        res = minimize(data, bump(grid, a=0.5), SolverConfig(tol_res=1e-8, max_iter=5000))
        assert res.converged
        assert np.max(np.abs(res.u_star.values)) < 1e-3
        assert res.energy >= 0

    def test_history_monotone(self, data):
        res = minimize(data, bump(data.grid, a=0.2), SolverConfig(tol_res=1e-6, max_iter=2000))
        e = res.history_array()[:, 0]
        assert np.all(np.diff(e) <= 1e-12 * np.maximum(1.0, np.abs(e[:-1])))

    def test_estimator(self, data, tmp_path):
        est = MinimizerEstimator(tol_res=1e-6, max_iter=3000, log_path=str(tmp_path / "log.csv")).fit(data)
        assert est.converged_
        assert est.energy_ < 0
        assert est.seed_[1] < 0
        assert est.score(data) == -est.energy_
        assert est.predict() is est.u_
        worst, detail = verify_weak_solution(data, est.u_, {"n_random": 4, "seed": 1})
        assert worst <= 1e-6
        assert detail["n_tests"] == data.grid.N + 4
        lines = (tmp_path / "log.csv").read_text().splitlines()
        assert lines[0] == "iter,energy,residual,step"
        assert len(lines) == len(est.history_) + 1

    def test_history_file(self, data, tmp_path):
        res = minimize(data, bump(data.grid, a=0.2), SolverConfig(max_iter=5))
        res.write_history(tmp_path / "h.csv", ["config_sha256: none"])
        text = (tmp_path / "h.csv").read_text().splitlines()
        assert text[0] == "# config_sha256: none"
        assert text[1] == "iter,energy,residual,step"
        assert len(text) == 2 + len(res.history)

    @pytest.mark.parametrize("kw", [{"tol_res": 0}, {"c1": 1.5}, {"shrink": 1.0}, {"max_iter": -1}])
    def test_estimator_validation(self, data, kw):
        with pytest.raises(ValueError):
            MinimizerEstimator(**kw).fit(data)

    def test_unfitted(self):
        from sklearn.exceptions import NotFittedError
        with pytest.raises(NotFittedError):
            MinimizerEstimator().predict()

    def test_max_iter_zero(self, data):
        res = minimize(data, bump(data.grid, a=0.2), SolverConfig(max_iter=0))
        assert not res.converged and res.iterations == 0
