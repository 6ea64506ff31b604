"""Property-based tests over generated scalars and grid functions."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from musielak.cli import Expression
from musielak.nfunction import complementary, inverse_Ghat
from musielak.spaces import DomainGrid, GridFunction, norm_combined, norm_Ghat
from musielak.verify import builtin_families

FAMS = builtin_families()
X0 = np.zeros((1, 2))
GRID = DomainGrid(2, 2.0, 7, 0.5)
SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])

positive = st.floats(min_value=1e-4, max_value=1e4, allow_nan=False, allow_infinity=False)
family_name = st.sampled_from(sorted(FAMS))


def Ghat(fam, t):
    return float(fam.Ghat(X0, np.array([t]))[0])


@SETTINGS
@given(family_name, positive, positive)
def test_young(name, t, tau):
    fam = FAMS[name]
    lhs = t * tau
    rhs = Ghat(fam, tau) + float(complementary(fam, X0, np.array([t]))[0])
    assert (lhs - rhs) / max(1.0, abs(rhs)) <= 1e-9


@SETTINGS
@given(family_name, positive, st.floats(min_value=1e-3, max_value=1e3))
def test_scalar_sandwich(name, t, lam):
    fam = FAMS[name]
    base, val = Ghat(fam, t), Ghat(fam, lam * t)
    lo = min(lam ** fam.g_minus, lam ** fam.g_plus) * base
    hi = max(lam ** fam.g_minus, lam ** fam.g_plus) * base
    assert (lo - val) / max(1.0, val) <= 1e-7
    assert (val - hi) / max(1.0, hi) <= 1e-7


@SETTINGS
@given(family_name, positive)
def test_inverse_round_trip(name, t):
    fam = FAMS[name]
    v = Ghat(fam, t)
    assert float(inverse_Ghat(fam, X0, np.array([v]))[0]) == pytest.approx(t, rel=1e-9)


values = arrays(np.float64, GRID.N, elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False))


@SETTINGS
@given(values)
def test_csv_round_trip(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("rt") / "u.csv"
    u = GridFunction(GRID, vals)
    u.to_csv(path)
    np.testing.assert_array_equal(GridFunction.from_csv(path, GRID).values, vals)


@SETTINGS
@given(values)
def test_binary_round_trip(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("rt") / "u.mskg"
    GridFunction(GRID, vals).to_binary(path)
    np.testing.assert_array_equal(GridFunction.from_binary(path, GRID).values, vals)


@settings(max_examples=25, deadline=None)
@given(family_name, arrays(np.float64, GRID.N, elements=st.floats(-5, 5, allow_nan=False)),
       st.floats(min_value=0.05, max_value=20))
def test_norm_homogeneity(name, vals, alpha):
    fam = FAMS[name]
    u = GridFunction(GRID, vals)
    a = norm_Ghat(fam, u).value
    b = norm_Ghat(fam, alpha * u).value
    assert b == pytest.approx(alpha * a, rel=1e-7, abs=1e-300)
    c = norm_combined(fam, u).value
    assert c >= a * (1 - 1e-7)


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(["x1", "x2", "1.5", "2", "pi"]))
    op = draw(st.sampled_from(["+", "-", "*", "fn"]))
    a = draw(expressions(depth=depth - 1))
    if op == "fn":
        return f"{draw(st.sampled_from(['sin', 'cos', 'tanh', 'exp']))}({a})"
    b = draw(expressions(depth=depth - 1))
    return f"({a} {op} {b})"


@SETTINGS
@given(expressions(), st.floats(-2, 2), st.floats(-2, 2))
def test_expression_matches_python(text, x1, x2):
    got = float(Expression(text, ("x1", "x2", "r"))(x1=np.float64(x1), x2=np.float64(x2)))
    ref = eval(text, {"sin": math.sin, "cos": math.cos, "tanh": math.tanh, "exp": math.exp, "pi": math.pi},
               {"x1": x1, "x2": x2})
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)
