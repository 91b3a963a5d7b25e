from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qlambda.errors import InvalidSpec, ParseError, PrecisionExhausted, SpecMismatch, WrongCase
from qlambda.gamma import (AlgebraicIntegerSpec, CScalar, RationalSpec,
                           SqrtReciprocalSpec, TranscendentalSpec, algebraic_specs_for, approx,
                           format_gamma, gamma_compare, gamma_lambda, gamma_mul_lambda_pow,
                           gamma_sign, lambda_matrix, parse_gamma, parse_spec, validate_spec)

from conftest import REFERENCE_SPECS

LAURENT = st.dictionaries(st.integers(-3, 3),
                          st.fractions(min_value=-5, max_value=5, max_denominator=7),
                          max_size=4)


def build(spec, terms):
    x = spec.zero()
    for e, c in terms.items():
        x = x + spec.lam_pow(e) * c
    return x


def sympy_value(spec, terms):
    """Exact value of sum c_e * lambda^e using sympy's algebraic numbers."""
    if isinstance(spec, RationalSpec):
        lam = sympy.Rational(spec.p, spec.q)
    elif isinstance(spec, SqrtReciprocalSpec):
        lam = 1 / sympy.sqrt(spec.n)
    else:
        x = sympy.Symbol("x")
        poly = sum(c * x ** i for i, c in enumerate(spec.coeffs))
        lam, = [r for r in sympy.Poly(poly, x).real_roots()
                if spec.iso_lo <= r <= spec.iso_hi]
    return sum(sympy.Rational(c.numerator, c.denominator) * lam ** e for e, c in terms.items())


def exact_sign(value):
    value = sympy.radsimp(sympy.expand(value))
    if sympy.simplify(value) == 0:
        return 0
    return 1 if value.evalf(60) > 0 else -1


class TestSpecs:
    def test_parse_round_trip(self):
        for text in REFERENCE_SPECS.values():
            assert parse_spec(text).to_text() == text

    def test_kinds(self):
        assert isinstance(parse_spec("rat:2/3"), RationalSpec)
        assert isinstance(parse_spec("sqrt:5"), SqrtReciprocalSpec)
        assert isinstance(parse_spec(REFERENCE_SPECS["golden"]), AlgebraicIntegerSpec)
        assert isinstance(parse_spec(REFERENCE_SPECS["trans"]), TranscendentalSpec)

    @pytest.mark.parametrize("text", ["rat:1/", "foo:1", "alg:x^2+;root=[0,1]", "sqrt:x"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_spec(text)

    def test_all_reference_specs_valid(self):
        for text in REFERENCE_SPECS.values():
            assert validate_spec(parse_spec(text)).ok, text

    @pytest.mark.parametrize("text,code", [
        ("rat:2/4", "NOT_LOWEST_TERMS"),
        ("rat:3/2", "RANGE"),
        ("sqrt:1", "RANGE"),
        ("alg:x^2+x+1;root=[0,1]", "ROOT_COUNT"),
        ("alg:x^2-3x+2;root=[1/2,3/2]", "NONUNIT_CONSTANT"),
        ("alg:2x^2+x-1;root=[1/3,2/3]", "NOT_MONIC"),
    ])
    def test_violation_codes(self, text, code):
        report = validate_spec(parse_spec(text))
        assert not report.ok
        assert code in report.codes

    def test_ensure_valid_raises(self):
        with pytest.raises(InvalidSpec):
            parse_spec("rat:3/2").ensure_valid()

    def test_report_json_round_trip(self):
        report = validate_spec(parse_spec("alg:x^2-3x+2;root=[1/2,3/2]"))
        assert type(report).from_json(report.to_json()) == report

    def test_specs_for_polynomial(self):
        specs = algebraic_specs_for((-1, 1, 1))
        assert len(specs) == 1 and validate_spec(specs[0]).ok


class TestArithmetic:
    @pytest.mark.parametrize("name", ["half", "third", "golden", "sqrt2"])
    @given(a=LAURENT, b=LAURENT)
    @settings(max_examples=30, deadline=None)
    def test_ring_ops_match_sympy(self, name, a, b):
        spec = parse_spec(REFERENCE_SPECS[name])
        x, y = build(spec, a), build(spec, b)
        va, vb = sympy_value(spec, a), sympy_value(spec, b)
        prod = x * y
        assert gamma_sign(prod) == exact_sign(va * vb)
        assert gamma_compare(x, y) == exact_sign(va - vb)

    @given(a=LAURENT, b=LAURENT, c=LAURENT)
    @settings(max_examples=40, deadline=None)
    def test_trans_ring_axioms(self, a, b, c):
        spec = parse_spec(REFERENCE_SPECS["trans"])
        x, y, z = build(spec, a), build(spec, b), build(spec, c)
        assert (x + y) * z == x * z + y * z
        assert (x * y) * z == x * (y * z)
        assert x - x == spec.zero()

    def test_lambda_inverse(self, exact_spec):
        lam = gamma_lambda(exact_spec)
        assert lam * exact_spec.lam_pow(-1) == exact_spec.one()
        assert gamma_mul_lambda_pow(lam, -1) == exact_spec.one()
        assert 0 < lam < 1

    def test_golden_identity(self, golden):
        lam = golden.lam()
        assert lam * lam + lam == golden.one()
        assert lam.sign() == 1 and (lam * 2 - 1).sign() == 1

    def test_sqrt_identity(self):
        spec = SqrtReciprocalSpec(2)
        lam = spec.lam()
        assert lam * lam == spec.const(Fraction(1, 2))
        assert lam.is_gamma() and spec.lam_pow(-1).is_gamma()
        # 1/2 = lambda^2 is a unit here, but 3 is not
        assert (lam * Fraction(1, 2)).is_gamma()
        assert not (lam * Fraction(1, 3)).is_gamma()

    def test_gamma_membership(self):
        half = RationalSpec(1, 2)
        assert half.const(Fraction(3, 8)).is_gamma()
        assert not half.const(Fraction(1, 3)).is_gamma()
        assert RationalSpec(2, 3).const(Fraction(5, 6)).is_gamma()

    def test_mismatched_specs(self):
        with pytest.raises(SpecMismatch):
            RationalSpec(1, 2).one() + RationalSpec(1, 3).one()

    def test_pow(self, golden):
        lam = golden.lam()
        assert lam ** 3 == lam * lam * lam
        assert lam ** 0 == golden.one()


class TestSignsAndApprox:
    def test_trans_decidable_and_not(self, trans):
        lam = trans.lam()
        assert (lam * 2 - 1).sign() == -1
        assert (lam - Fraction(2, 5)).sign() == -1
        with pytest.raises(PrecisionExhausted):
            (lam - Fraction(39, 100)).sign()

    def test_approx_golden(self, golden):
        value = approx(golden.lam(), 80)
        exact = (sympy.sqrt(5) - 1) / 2
        assert abs(sympy.Rational(value.numerator, value.denominator) - exact) < sympy.Rational(1, 2 ** 79)

    def test_approx_trans_too_wide(self, trans):
        with pytest.raises(PrecisionExhausted):
            approx(trans.lam(), 64)

    def test_lambda_matrix(self, golden):
        m = lambda_matrix(golden)
        assert m.to_list() in ([[0, 1], [1, -1]], [[0, 1], [1, -1]][::-1], [[0, 1], [1, -1]])
        assert abs(m.det()) == 1
        with pytest.raises(WrongCase):
            lambda_matrix(RationalSpec(1, 2))


class TestTextForms:
    @given(a=LAURENT)
    @settings(max_examples=40, deadline=None)
    def test_format_parse_round_trip(self, a):
        for name in ("half", "golden", "sqrt2", "trans"):
            spec = parse_spec(REFERENCE_SPECS[name])
            x = build(spec, a)
            assert parse_gamma(format_gamma(x), spec) == x

    def test_parse_examples(self, golden):
        assert parse_gamma("1+L", golden) == golden.lam_pow(-1)
        assert parse_gamma("L^-1 - 1", golden) == golden.lam()
        assert parse_gamma("(1/2)*L^2", golden) == golden.lam_pow(2) * Fraction(1, 2)

    def test_parse_error_position(self, golden):
        with pytest.raises(ParseError) as info:
            parse_gamma("1 + L^", golden)
        assert info.value.column >= 6

    def test_sqrt_symbol_only_for_sqrt(self, golden):
        with pytest.raises(ParseError):
            parse_gamma("R", golden)

    def test_cscalar(self):
        spec = RationalSpec(1, 2)
        z = CScalar.of(spec, 1, 2)
        assert (z * z.conj()).is_real()
        assert (z * z.conj()).re == spec.const(5)
        assert z.to_text()


class TestIntegralSubring:
    def test_rational(self):
        spec = RationalSpec(2, 3)
        assert spec.const(Fraction(5, 9)).in_z_lambda()
        assert not spec.const(Fraction(1, 2)).in_z_lambda()
        assert spec.const(Fraction(1, 2)).is_gamma()

    def test_unit_constant_cases(self, golden):
        assert golden.lam_pow(-3).in_z_lambda()
        assert SqrtReciprocalSpec(3).lam_pow(-1).in_z_lambda()

    def test_transcendental(self, trans):
        assert (trans.lam() * 3 + 1).in_z_lambda()
        assert not trans.lam_pow(-1).in_z_lambda()
