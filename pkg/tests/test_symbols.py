import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from stcg.symbols import (
    TAU,
    FreqExpr,
    GaussianFilter,
    TableFilter,
    scalar_eval,
)

names = st.sampled_from(["wa", "wb", "wc", "wp"])
fractions = st.fractions(
    min_value=Fraction(-8), max_value=Fraction(8), max_denominator=6
)
freq_exprs = st.dictionaries(names, fractions, max_size=3).map(FreqExpr)


class TestFreqExpr:
    def test_parse_examples(self):
        assert FreqExpr.parse("wc + wa") == FreqExpr.symbol(
            "wc"
        ) + FreqExpr.symbol("wa")
        assert FreqExpr.parse("-2*wp") == -2 * FreqExpr.symbol("wp")
        assert FreqExpr.parse("5/6*wd") == FreqExpr(
            {"wd": Fraction(5, 6)}
        )
        assert FreqExpr.parse("0").is_zero
        with pytest.raises(ValueError):
            FreqExpr.parse("wa + + wb")

    @given(freq_exprs)
    def test_str_round_trip(self, f):
        assert FreqExpr.parse(str(f)) == f

    @given(freq_exprs, freq_exprs)
    def test_additive_group(self, a, b):
        assert (a + b) - b == a
        assert a + (-a) == FreqExpr.zero()
        assert (a - b) == -(b - a)

    @given(freq_exprs)
    def test_evaluate_matches_sympy(self, f):
        point = {name: 0.5 + idx for idx, name in enumerate(sorted(f.symbols))}
        direct = f.evaluate(point)
        via_sympy = float(
            f.to_sympy().subs(
                {sp.Symbol(k, real=True): v for k, v in point.items()}
            )
        )
        assert direct == pytest.approx(via_sympy, abs=1e-12)

    def test_evaluate_requires_all_symbols(self):
        with pytest.raises(KeyError):
            FreqExpr.parse("wa + wb").evaluate({"wa": 1.0})


class TestGaussianFilter:
    def test_unit_at_zero(self):
        assert GaussianFilter()(FreqExpr.zero()) == 1

    def test_profile(self):
        f = GaussianFilter()
        w = FreqExpr.symbol("w")
        ws = sp.Symbol("w", real=True)
        assert sp.simplify(f(w) - sp.exp(-(ws**2) * TAU**2 / 2)) == 0

    def test_numeric_tau(self):
        f = GaussianFilter(0.5)
        val = float(f(FreqExpr.symbol("w")).subs(sp.Symbol("w", real=True), 2))
        assert val == pytest.approx(math.exp(-(2**2) * 0.25 / 2))

    def test_zero_tau_is_transparent(self):
        f = GaussianFilter(0)
        assert sp.simplify(f(FreqExpr.symbol("w")) - 1) == 0

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            GaussianFilter(-1.0)


class TestTableFilter:
    def test_interpolation(self):
        f = TableFilter([(-1.0, 0.5), (0.0, 1.0), (1.0, 0.5)])
        assert f.value_at(0.5) == pytest.approx(0.75)
        with pytest.raises(ValueError):
            f.value_at(2.0)

    def test_eval_atoms(self):
        f = TableFilter([(-1.0, 0.5), (0.0, 1.0), (1.0, 0.5)])
        expr = f(FreqExpr.symbol("w"))
        numeric = expr.subs(sp.Symbol("w", real=True), sp.Rational(1, 2))
        assert float(f.eval_atoms(numeric)) == pytest.approx(0.75)


class TestScalarEval:
    def test_basic(self):
        g = sp.Symbol("g", real=True)
        value = scalar_eval(sp.I * g * TAU**2, {"g": 2.0, "tau": 3.0})
        assert value == pytest.approx(18j)

    def test_filter_atoms(self):
        f = TableFilter([(0.0, 1.0), (2.0, 0.25)])
        expr = 2 * f(FreqExpr.symbol("w"))
        assert scalar_eval(expr, {"w": 1.0}, f) == pytest.approx(1.25)
