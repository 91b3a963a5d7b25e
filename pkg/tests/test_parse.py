import pytest

from qlambda.algebra import chi, make_S, unit_e
from qlambda.errors import ParseError
from qlambda.gamma import CScalar, parse_spec
from qlambda.modular import MatrixElement, build_u_double_index
from qlambda.parse import parse_algebra_expr, parse_unitary, unitary_formula_text


@pytest.fixture
def spec():
    return parse_spec("alg:x^2+x-1;root=[1/2,2/3]")


class TestExpressions:
    def test_atoms(self, spec):
        assert parse_algebra_expr("e", spec) == unit_e(spec)
        assert parse_algebra_expr("S(1,0)", spec) == make_S(spec, 1, 0)
        assert parse_algebra_expr("Sstar(2,1)", spec) == make_S(spec, 2, 1).adjoint()
        assert parse_algebra_expr("chi(0, L)", spec) == chi(spec, 0, spec.lam())

    def test_products_and_sums(self, spec):
        got = parse_algebra_expr("S(1,0)*Sstar(1,0) + S(1,1)*Sstar(1,1)", spec)
        assert got == unit_e(spec)
        got = parse_algebra_expr("2*e - e", spec)
        assert got == unit_e(spec)

    def test_complex_coefficient(self, spec):
        got = parse_algebra_expr("(1+2i)*e", spec)
        assert got == unit_e(spec).scale(CScalar.of(spec, 1, 2))

    def test_group_element(self, spec):
        got = parse_algebra_expr("chi(0,1)*d(0;0)", spec)
        assert got == unit_e(spec)

    def test_matrix(self, spec):
        m = parse_algebra_expr("[e, S(1,0); Sstar(1,0), e]", spec)
        assert isinstance(m, MatrixElement) and m.r == 2

    @pytest.mark.parametrize("text,column", [
        ("S(1,", 5),
        ("chi(0, L", 8),
        ("foo", 1),
        ("e +", 4),
        ("[e, e]", 1),
    ])
    def test_errors_report_position(self, spec, text, column):
        with pytest.raises(ParseError) as info:
            parse_algebra_expr(text, spec)
        assert info.value.line == 1
        assert info.value.column >= column
        assert "^" in info.value.caret()

    def test_bare_group_element_rejected(self, spec):
        with pytest.raises(ParseError):
            parse_algebra_expr("d(1;0)", spec)


class TestUnitaries:
    def test_builder(self, spec):
        assert parse_unitary("ukm(2,0;1,0)", spec) == build_u_double_index(spec, 2, 0, 1, 0)

    def test_malformed_builder(self, spec):
        with pytest.raises(ParseError):
            parse_unitary("ukm(2,0)", spec)

    def test_formula_text(self):
        assert unitary_formula_text("ukm(2,0;1,0)") == "(1)*(L - L^2)"
        assert unitary_formula_text("ujk(1,3)").startswith("(2)*(L - L^3)")
        assert unitary_formula_text("[e]") == ""
