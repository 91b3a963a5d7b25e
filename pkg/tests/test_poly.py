from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qlambda import poly as P
from qlambda.errors import ParseError

x = sympy.Symbol("x")


def to_sympy(p):
    return sum(sympy.Rational(c) * x ** i for i, c in enumerate(p))


class TestParse:
    def test_examples(self):
        assert P.parse_poly("x^3-7*x+1") == (1, -7, 0, 1)
        assert P.parse_poly(" x^2 + x - 1 ") == (-1, 1, 1)
        assert P.parse_poly("3x^2") == (0, 0, 3)
        assert P.parse_poly("-x") == (0, -1)

    def test_round_trip(self):
        for text in ["x^4-3*x^3+1", "x^3+2*x^2-5*x-1", "-x^2+1"]:
            assert P.format_poly(P.parse_poly(text)) == text

    @pytest.mark.parametrize("bad", ["", "x^", "x**2", "2x x", "y+1", "x^2+"])
    def test_malformed(self, bad):
        with pytest.raises(ParseError):
            P.parse_poly(bad)


class TestArithmetic:
    @given(st.lists(st.integers(-9, 9), min_size=1, max_size=6),
           st.lists(st.integers(-9, 9), min_size=1, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_divmod_matches_sympy(self, a, b):
        a, b = P.trim(a), P.trim(b)
        if not b:
            return
        q, r = P.divmod_poly(a, b)
        sq, sr = sympy.div(to_sympy(a), to_sympy(b), x)
        assert sympy.expand(to_sympy(q) - sq) == 0
        assert sympy.expand(to_sympy(r) - sr) == 0

    def test_gcd_and_squarefree(self):
        assert P.gcd((-1, 0, 1), (1, 1)) == (1, 1)
        assert not P.is_squarefree(P.mul((1, 1), (1, 1)))
        assert P.is_squarefree((-1, 1, 1))


class TestRoots:
    @given(st.lists(st.integers(-6, 6), min_size=2, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_count_matches_sympy(self, coeffs):
        p = P.trim(coeffs)
        if len(p) < 2:
            return
        # sympy lists repeated roots with multiplicity, so count distinct ones
        expected = len({r for r in sympy.Poly(to_sympy(p), x).real_roots() if 0 <= r <= 1})
        assert P.count_roots(p, 0, 1) == expected

    def test_isolation_golden(self):
        (lo, hi), = P.isolate_roots((-1, 1, 1))
        assert lo < Fraction(618034, 10 ** 6) < hi

    def test_isolation_separates(self):
        p = P.mul(P.mul((-1, 3), (-2, 3)), (-1, 2))  # roots 1/3, 2/3, 1/2
        ivs = P.isolate_roots(p)
        assert len(ivs) == 3
        for lo, hi in ivs:
            assert P.count_roots(p, lo, hi) == 1


class TestFactorSearch:
    def test_finds_quadratic_factor(self):
        factor, exhaustive = P.find_factor(P.parse_poly("x^4+x^2+1"))
        assert factor is not None and exhaustive
        assert P.divmod_poly(P.parse_poly("x^4+x^2+1"), factor)[1] == ()

    def test_irreducible_quartic(self):
        assert P.find_factor(P.parse_poly("x^4-3x^3+1")) == (None, True)

    def test_budget(self):
        assert P.find_factor(P.parse_poly("x^6+x^5-x+1"), budget=3)[1] is False
