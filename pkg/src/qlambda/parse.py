"""Parser for algebra expressions, 2x2 (or larger) matrices and unitary builder names.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := [coeff '*'] atom ('*' atom)*
    atom   := 'chi(' gamma ',' gamma ')' | 'd(' int ';' gamma ')'
            | 'S(' int ',' int ')' | 'Sstar(' int ',' int ')' | 'e'
    coeff  := rational | '(' rational ('+'|'-') rational 'i' ')'
    matrix := '[' expr (',' expr)* (';' expr (',' expr)*)* ']'

``d(n;c)`` is the group element [lambda^n : c]; it must be multiplied into a
finitely supported factor, e.g. ``chi(0,1)*d(0;0)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .algebra import AlgebraElement, GroupElement, chi, delta_left, delta_right, make_S, unit_e
from .errors import ParseError
from .gamma import CScalar, LambdaSpec, parse_gamma
from .modular import MatrixElement, build_u_double_index, build_u_leftover

_INT = re.compile(r"[+-]?\d+")
_RAT = re.compile(r"(\d+)(?:/(\d+))?")
_IDENT = re.compile(r"[A-Za-z_]+")


class _ExprParser:
    def __init__(self, text: str, spec: LambdaSpec):
        self.s = text
        self.i = 0
        self.spec = spec

    # lexical helpers ------------------------------------------------------
    def error(self, msg, pos=None):
        raise ParseError(msg, self.s, self.i if pos is None else pos)

    def peek(self) -> str:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = self.peek()
            self.error(f"expected {ch!r}, got {got!r}" if got else f"expected {ch!r} at end of input")
        self.i += 1

    def integer(self) -> int:
        self.peek()
        m = _INT.match(self.s, self.i)
        if not m:
            self.error("expected an integer")
        self.i = m.end()
        return int(m.group())

    def rational(self) -> Fraction:
        self.peek()
        m = _RAT.match(self.s, self.i)
        if not m:
            self.error("expected a rational number")
        self.i = m.end()
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            self.error("zero denominator", m.start(2))
        return Fraction(int(m.group(1)), den)

    def gamma_until(self, stops: str):
        """Parse a ring element that ends at one of ``stops`` at parenthesis depth 0."""
        self.peek()
        start, depth, j = self.i, 0, self.i
        while j < len(self.s):
            c = self.s[j]
            if c == "(":
                depth += 1
            elif c == ")" and depth:
                depth -= 1
            elif depth == 0 and c in stops:
                break
            j += 1
        if j == len(self.s):
            self.error(f"unterminated argument, expected one of {stops!r}", start)
        if not self.s[start:j].strip():
            self.error("empty argument", start)
        value = parse_gamma(self.s[start:j], self.spec, offset=start, full_text=self.s)
        self.i = j
        return value

    # grammar --------------------------------------------------------------
    def parse_toplevel(self) -> Union[AlgebraElement, MatrixElement]:
        if self.peek() == "[":
            v = self.matrix()
        else:
            v = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return v

    def matrix(self) -> MatrixElement:
        self.expect("[")
        rows = [[self.expr()]]
        while True:
            c = self.peek()
            if c == ",":
                self.i += 1
                rows[-1].append(self.expr())
            elif c == ";":
                self.i += 1
                rows.append([self.expr()])
            elif c == "]":
                self.i += 1
                break
            else:
                self.error("expected ',', ';' or ']' in matrix")
        n = len(rows)
        if any(len(r) != n for r in rows):
            self.error("matrix must be square")
        return MatrixElement(self.spec, rows)

    def expr(self) -> AlgebraElement:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.s[self.i] == "-" else 1
            self.i += 1
        v = self.term()
        if sign < 0:
            v = -v
        while self.peek() in ("+", "-"):
            op = self.s[self.i]
            self.i += 1
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def coeff(self):
        c = self.peek()
        if c.isdigit():
            return CScalar.of(self.spec, self.rational())
        if c == "(":
            self.i += 1
            neg_re = False
            if self.peek() in ("+", "-"):
                neg_re = self.s[self.i] == "-"
                self.i += 1
            re_part = self.rational() * (-1 if neg_re else 1)
            op = self.peek()
            if op not in ("+", "-"):
                self.error("expected '+' or '-' in complex coefficient")
            self.i += 1
            im_part = self.rational() * (-1 if op == "-" else 1)
            self.expect("i")
            self.expect(")")
            return CScalar.of(self.spec, re_part, im_part)
        return None

    def term(self) -> AlgebraElement:
        start = self.i
        scalar = self.coeff()
        factors = []
        if scalar is not None:
            if self.peek() != "*":
                # a bare scalar is scalar * e
                factors.append(unit_e(self.spec))
            else:
                self.i += 1
                factors.append(self.atom())
        else:
            factors.append(self.atom())
        while self.peek() == "*":
            self.i += 1
            factors.append(self.atom())
        acc = factors[0]
        for f in factors[1:]:
            if isinstance(acc, GroupElement) and isinstance(f, GroupElement):
                acc = acc * f
            elif isinstance(acc, GroupElement):
                acc = delta_left(acc, f)
            elif isinstance(f, GroupElement):
                acc = delta_right(acc, f)
            else:
                acc = acc * f
        if isinstance(acc, GroupElement):
            self.error("d(n;c) must be multiplied by a finitely supported factor", start)
        return acc.scale(scalar) if scalar is not None else acc

    def atom(self):
        self.peek()
        m = _IDENT.match(self.s, self.i)
        if not m:
            c = self.peek()
            self.error(f"unexpected {c!r}" if c else "unexpected end of input")
        name, pos = m.group(), self.i
        self.i = m.end()
        if name == "e":
            return unit_e(self.spec)
        if name == "chi":
            self.expect("(")
            a = self.gamma_until(",")
            self.expect(",")
            b = self.gamma_until(")")
            self.expect(")")
            return chi(self.spec, a, b)
        if name == "d":
            self.expect("(")
            n = self.integer()
            self.expect(";")
            c = self.gamma_until(")")
            self.expect(")")
            return GroupElement(n, c)
        if name in ("S", "Sstar"):
            self.expect("(")
            k = self.integer()
            self.expect(",")
            mm = self.integer()
            self.expect(")")
            s = make_S(self.spec, k, mm)
            return s if name == "S" else s.adjoint()
        self.error(f"unknown symbol {name!r}", pos)


def parse_algebra_expr(text: str, spec: LambdaSpec) -> Union[AlgebraElement, MatrixElement]:
    """Parse an algebra expression (or a bracketed matrix of them)."""
    return _ExprParser(text, spec).parse_toplevel()


_UKM = re.compile(r"\s*ukm\(\s*(\d+)\s*,\s*(\d+)\s*;\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_UJK = re.compile(r"\s*ujk\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*")


def parse_unitary(text: str, spec: LambdaSpec) -> MatrixElement:
    """``ukm(k,m;j,n)``, ``ujk(j,k)`` or an explicit matrix expression."""
    m = _UKM.fullmatch(text)
    if m:
        k, mm, j, n = map(int, m.groups())
        return build_u_double_index(spec, k, mm, j, n)
    m = _UJK.fullmatch(text)
    if m:
        j, k = map(int, m.groups())
        return build_u_leftover(spec, j, k)
    if text.lstrip().startswith(("ukm", "ujk")):
        raise ParseError("malformed unitary builder", text, len(text) - len(text.lstrip()))
    v = parse_algebra_expr(text, spec)
    return v if isinstance(v, MatrixElement) else MatrixElement.scalar(v)


def unitary_formula_text(text: str) -> str:
    """The closed-form expression for a builder name, in terms of L."""
    m = _UKM.fullmatch(text)
    if m:
        k, _, j, _ = map(int, m.groups())
        return f"({k - j})*(L^{j} - L^{k})".replace("L^1 ", "L ").replace("L^1)", "L)")
    m = _UJK.fullmatch(text)
    if m:
        j, k = map(int, m.groups())
        return f"({k - j})*(L^{j} - L^{k})*min(L^-{j}-m_{j}, L^-{k}-m_{k})".replace("L^1 ", "L ")
    return ""
