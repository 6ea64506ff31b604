import math

import numpy as np
import pytest

from musielak.exceptions import DomainError, GridMismatchError, NotInSpaceError
from musielak.spaces import (DomainGrid, GridFunction, ball_modular, char_function_bounds, char_function_norm,
                             holder_pair, luxemburg_norm, modular_gagliardo, modular_Ghat, modular_weighted,
                             norm_combined, norm_E, norm_Ghat, norm_W, norm_weighted, seminorm_gagliardo)
from musielak.spaces.modulars import evaluator
from musielak.verify import bump_corpus
from oracles import gagliardo_double_loop


def gaussian(grid, w=1.0, c=0.0):
    return grid.evaluate(lambda x: np.exp(-np.sum((x - c) ** 2, axis=-1) / (2 * w * w)))


def tent(grid):
    return grid.evaluate(lambda x: np.maximum(0.0, 1.0 - np.max(np.abs(x), axis=-1)))


class TestGrid:
    def test_basic_geometry(self):
        g = DomainGrid(2, 1.0, 21, 0.5)
        assert g.h == pytest.approx(0.1)
        assert g.N == 441
        assert g.nodes.shape == (441, 2)
        assert g.cell == pytest.approx(0.01)

    @pytest.mark.parametrize("args", [(2, 1.0, 2, 0.5), (2, 1.0, 9, 1.0), (2, 1.0, 9, 0.0), (4, 1.0, 5, 0.5),
                                      (2, -1.0, 9, 0.5)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            DomainGrid(*args)

    def test_wrong_length(self, small_grid):
        with pytest.raises(GridMismatchError):
            GridFunction(small_grid, np.zeros(5))

    def test_non_finite(self, small_grid):
        v = np.zeros(small_grid.N)
        v[3] = np.nan
        with pytest.raises(DomainError):
            GridFunction(small_grid, v)

    def test_radial_flag(self, small_grid):
        u = GridFunction.from_profile(small_grid, lambda r: np.exp(-r * r))
        assert u.radial
        with pytest.raises(DomainError):
            GridFunction(small_grid, small_grid.nodes[:, 0], radial=True)

    def test_profile_samples(self, small_grid):
        r = np.linspace(0, 3, 31)
        u = GridFunction.from_profile(small_grid, np.exp(-r), r_samples=r)
        np.testing.assert_allclose(u.values, np.exp(-small_grid.radii), atol=2e-3)

    def test_arithmetic_grid_mismatch(self, small_grid):
        other = DomainGrid(2, 2.0, 11, 0.5)
        with pytest.raises(GridMismatchError):
            small_grid.zeros() + other.zeros()

    @pytest.mark.parametrize("suffix", [".csv", ".mskg"])
    def test_round_trip(self, tmp_path, small_grid, suffix, rng):
        u = GridFunction(small_grid, rng.standard_normal(small_grid.N))
        path = tmp_path / f"u{suffix}"
        u.save(path)
        back = GridFunction.load(path, small_grid)
        np.testing.assert_array_equal(back.values, u.values)

    def test_binary_header(self, tmp_path, small_grid):
        path = tmp_path / "u.bin"
        small_grid.zeros().to_binary(path)
        assert path.read_bytes()[:4] == b"MSKG"

    def test_csv_header_comments(self, tmp_path, small_grid):
        path = tmp_path / "u.csv"
        small_grid.zeros().to_csv(path, header_lines=["config_sha256: abc"])
        assert path.read_text().startswith("# config_sha256: abc\nd,R,n,s\n")
        assert GridFunction.from_csv(path).is_zero()

    def test_file_grid_mismatch(self, tmp_path, small_grid):
        path = tmp_path / "u.csv"
        small_grid.zeros().to_csv(path)
        with pytest.raises(GridMismatchError):
            GridFunction.from_csv(path, DomainGrid(2, 2.0, 11, 0.5))


class TestModulars:
    def test_zero(self, family, small_grid):
        z = small_grid.zeros()
        assert modular_Ghat(family, z) == 0.0
        assert modular_gagliardo(family, z) == 0.0

    def test_constant_one_p2(self, p2):
        g = DomainGrid(2, 1.0, 21, 0.5)
        one = g.evaluate(lambda x: np.ones(len(x)))
        m = modular_Ghat(p2, one)
        assert m == pytest.approx(0.5 * g.N * g.cell, rel=1e-14)
        # node cells overhang the square by h/2 on every side
        assert abs(m - 2.0) <= 0.5 * (4 * (1 + g.h / 2) ** 2 - 4) + 1e-12

    def test_scaling_bracket(self, family, small_grid):
        u = gaussian(small_grid, 0.8)
        m1, m2 = modular_Ghat(family, u), modular_Ghat(family, 2 * u)
        assert 2 ** family.g_minus * m1 * (1 - 1e-12) <= m2 <= 2 ** family.g_plus * m1 * (1 + 1e-12)

    def test_gagliardo_constant(self, family, small_grid):
        c = small_grid.evaluate(lambda x: np.full(len(x), 3.0))
        assert modular_gagliardo(family, c) == 0.0

    def test_gagliardo_even(self, family, small_grid):
        u = gaussian(small_grid, 0.7, 0.3)
        assert modular_gagliardo(family, -u) == pytest.approx(modular_gagliardo(family, u), rel=1e-13)

    def test_gagliardo_matches_double_loop_exactly(self, p2):
        grid = DomainGrid(2, 1.0, 9, 0.5)
        u = tent(grid)
        ref = gagliardo_double_loop(grid.axis.tolist(), 2, 0.5, u.values, lambda q: abs(q) * abs(q) / 2.0)
        assert modular_gagliardo(p2, u) == ref

    def test_gagliardo_double_loop_double_phase(self, dp):
        grid = DomainGrid(2, 1.0, 7, 0.3)
        u = gaussian(grid, 0.5)
        ref = gagliardo_double_loop(grid.axis.tolist(), 2, 0.3, u.values,
                                    lambda q: abs(q) * abs(q) / 2.0 + abs(q) * abs(q) * abs(q) / 3.0)
        assert modular_gagliardo(dp, u) == ref

    def test_fast_order_close_to_canonical(self, family, small_grid):
        u = gaussian(small_grid, 0.6, 0.2)
        assert modular_gagliardo(family, u, order="fast") == pytest.approx(modular_gagliardo(family, u), rel=1e-12)
        with pytest.raises(ValueError):
            modular_gagliardo(family, u, order="random")

    def test_weighted(self, p2, small_grid, rng):
        u = GridFunction(small_grid, rng.standard_normal(small_grid.N))
        assert modular_weighted(p2, u, 1.0) == pytest.approx(modular_Ghat(p2, u), rel=1e-15)
        assert modular_weighted(p2, u, 2.0) == 2.0 * modular_Ghat(p2, u)
        assert modular_weighted(p2, small_grid.zeros(), 1.0) == 0.0

    def test_weighted_rejects_nonpositive_potential(self, p2, small_grid):
        with pytest.raises(DomainError):
            modular_weighted(p2, small_grid.zeros(), lambda x: x[:, 0])

    def test_midpoint_first_order(self, p2):
        # int exp(-|x|^2)^2 / 2 over R^2 = pi / 4
        errs = []
        for n in (9, 17, 33):
            g = DomainGrid(2, 4.0, n, 0.5)
            errs.append(abs(modular_Ghat(p2, gaussian(g, 1 / math.sqrt(2))) - math.pi / 4))
        assert errs[-1] < 1e-6
        assert errs[1] <= errs[0]


class TestBall:
    def test_large_radius(self, family, small_grid):
        u = gaussian(small_grid, 0.7)
        assert ball_modular(family, u, np.zeros(2), 100.0) == pytest.approx(modular_Ghat(family, u), rel=1e-14)

    def test_outside_support(self, family, small_grid):
        u = small_grid.evaluate(lambda x: np.where(x[:, 0] > 1.0, 1.0, 0.0))
        assert ball_modular(family, u, np.array([-1.5, 0.0]), 0.9) == 0.0

    def test_partition(self, dp, small_grid):
        u = gaussian(small_grid, 0.9, 0.4)
        # disjoint balls of radius h/2 (strict inequality) cover every node exactly once
        h = small_grid.h
        parts = sum(ball_modular(dp, u, x, 0.5 * h * 1.0000001) for x in small_grid.nodes)
        assert parts == pytest.approx(modular_Ghat(dp, u), rel=1e-12)


class TestNorms:
    def test_zero(self, family, small_grid):
        z = small_grid.zeros()
        assert norm_Ghat(family, z).value == 0.0
        assert norm_combined(family, z).value == 0.0
        assert norm_W(family, z) == 0.0
        assert norm_E(family, z, 1.0) == 0.0

    def test_p2_closed_form(self, p2):
        g = DomainGrid(2, 4.0, 33, 0.5)
        u = gaussian(g, 0.8)
        ref = math.sqrt(float(np.sum(u.values ** 2)) * g.cell) / math.sqrt(2)
        nv = norm_Ghat(p2, u)
        assert nv.value == pytest.approx(ref, rel=1e-6)
        assert 1 - 1e-8 <= nv.modular_at_norm <= 1.0
        assert nv.converged

    def test_luxemburg_sandwich(self, family, small_grid, rng):
        vals = bump_corpus(small_grid, 30, rng) * np.exp(rng.uniform(-4, 2, 30))[:, None]
        ev = evaluator(family, small_grid)
        for v in vals:
            nv = luxemburg_norm(ev.Ghat, v, (family.g_minus, family.g_plus), grid=small_grid)
            m = float(ev.Ghat(v))
            lo = min(nv.value ** family.g_minus, nv.value ** family.g_plus)
            hi = max(nv.value ** family.g_minus, nv.value ** family.g_plus)
            assert lo * (1 - 1e-7) <= m <= hi * (1 + 1e-7)

    def test_seminorm_constant_and_homogeneous(self, family, small_grid):
        c = small_grid.evaluate(lambda x: np.full(len(x), 2.0))
        assert seminorm_gagliardo(family, c).value == 0.0
        u = gaussian(small_grid, 0.6)
        assert seminorm_gagliardo(family, 3.7 * u).value == pytest.approx(
            3.7 * seminorm_gagliardo(family, u).value, rel=1e-7)

    def test_W_of_constant(self, family, small_grid):
        c = small_grid.evaluate(lambda x: np.full(len(x), 0.4))
        assert norm_W(family, c) == pytest.approx(norm_Ghat(family, c).value, rel=1e-15)

    def test_equivalence(self, family, small_grid, rng):
        for v in bump_corpus(small_grid, 10, rng):
            u = GridFunction(small_grid, v)
            w = norm_W(family, u)
            c = norm_combined(family, u)
            assert 0.5 * w <= c.value * (1 + 1e-7) and c.value <= 2 * w * (1 + 1e-7)
            assert evaluator(family, small_grid).combined(v / c.value) <= 1.0

    def test_triangle(self, dp, small_grid, rng):
        a, b = bump_corpus(small_grid, 2, rng)
        u, v = GridFunction(small_grid, a), GridFunction(small_grid, b)
        assert norm_combined(dp, u + v).value <= (norm_combined(dp, u).value
                                                  + norm_combined(dp, v).value) * (1 + 1e-7)

    def test_E_with_unit_potential(self, family, small_grid):
        u = gaussian(small_grid, 0.5)
        assert norm_weighted(family, u, 1.0).value == pytest.approx(norm_Ghat(family, u).value, rel=1e-12)

    def test_weighted_sandwich(self, dp, small_grid):
        V = lambda x: 1.0 + np.sum(x * x, axis=-1)
        u = 2.5 * gaussian(small_grid, 0.5)
        n = norm_weighted(dp, u, V).value
        m = modular_weighted(dp, u, V)
        assert min(n ** 2, n ** 3) * (1 - 1e-7) <= m <= max(n ** 2, n ** 3) * (1 + 1e-7)

    def test_not_in_space(self, small_grid):
        bad = lambda v: np.full(np.shape(v)[:-1], np.inf)
        with pytest.raises(NotInSpaceError):
            luxemburg_norm(bad, gaussian(small_grid), (2.0, 3.0))


class TestHolderAndIndicators:
    def test_holder_zero(self, dp, small_grid):
        assert holder_pair(dp, gaussian(small_grid), small_grid.zeros()) == (0.0, 0.0)

    def test_holder_p2_is_cauchy_schwarz(self, p2, small_grid, rng):
        a, b = rng.standard_normal((2, small_grid.N))
        pairing, bound = holder_pair(p2, GridFunction(small_grid, a), GridFunction(small_grid, b))
        cs = math.sqrt(np.sum(a * a) * small_grid.cell) * math.sqrt(np.sum(b * b) * small_grid.cell)
        assert bound == pytest.approx(cs, rel=1e-7)
        assert abs(pairing) <= bound

    def test_holder_double_phase(self, dp, rng):
        g = DomainGrid(2, 2.0, 15, 0.5)
        for _ in range(5):
            a, b = rng.standard_normal((2, g.N))
            pairing, bound = holder_pair(dp, GridFunction(g, a), GridFunction(g, b))
            assert abs(pairing) <= bound * (1 + 1e-7)

    def test_indicator_p2(self, p2, small_grid, rng):
        mask = rng.random(small_grid.N) < 0.3
        measure = mask.sum() * small_grid.cell
        assert char_function_norm(p2, small_grid, mask).value == pytest.approx(math.sqrt(measure / 2), rel=1e-7)

    def test_indicator_empty(self, p2, small_grid):
        assert char_function_norm(p2, small_grid, np.zeros(small_grid.N, bool)).value == 0.0

    def test_indicator_bounds(self, dp, small_grid, rng):
        for k in (1, 5, 40, small_grid.N):
            idx = rng.choice(small_grid.N, k, replace=False)
            nv = char_function_norm(dp, small_grid, idx).value
            lo, hi = char_function_bounds(dp, k * small_grid.cell)
            assert lo * (1 - 1e-7) <= nv <= hi * (1 + 1e-7)
