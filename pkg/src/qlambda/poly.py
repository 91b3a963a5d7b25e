"""Dense univariate polynomials over Q, Sturm sequences and root isolation.

Polynomials are tuples of coefficients ordered from the constant term up,
``(a_0, a_1, ..., a_d)``.  Coefficients are ``int`` or ``Fraction``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Optional, Sequence, Tuple

from .errors import ParseError

Poly = Tuple


def trim(p: Iterable) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Poly) -> int:
    return len(trim(p)) - 1


def evaluate(p: Poly, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return trim(i * c for i, c in enumerate(p) if i > 0)


def sub(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def divmod_poly(p: Poly, q: Poly) -> Tuple[Poly, Poly]:
    """Euclidean division over Q."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(len(r) - dq, 1)
    while len(r) - 1 >= dq and r:
        shift = len(r) - 1 - dq
        c = r[-1] / lead
        quot[shift] = c
        for i, qc in enumerate(q):
            r[shift + i] -= c * qc
        r = list(trim(r))
    return trim(_norm(c) for c in quot), trim(_norm(c) for c in r)


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over Q."""
    a, b = trim(p), trim(q)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return ()
    lead = Fraction(a[-1])
    return tuple(_norm(Fraction(c) / lead) for c in a)


def is_squarefree(p: Poly) -> bool:
    return degree(gcd(p, derivative(p))) == 0


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------

def sturm_sequence(p: Poly) -> list:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return [s for s in seq if s]


def _sign_changes(seq, x) -> int:
    signs = []
    for s in seq:
        v = evaluate(s, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Poly, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        return 0
    p = trim(p)
    if len(p) <= 1:
        return 0
    seq = sturm_sequence(p)
    n = _sign_changes(seq, lo) - _sign_changes(seq, hi)
    if evaluate(p, lo) == 0:
        n += 1
    return n


def isolate_roots(p: Poly, lo=0, hi=1, open_interval: bool = True) -> list:
    """Disjoint rational intervals ``(a, b)`` each holding exactly one root.

    With ``open_interval`` the endpoints ``lo``/``hi`` themselves are
    excluded from the search.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    p = trim(p)
    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count_roots(p, a, b)
        if open_interval:
            n -= (a == lo and evaluate(p, a) == 0) + (b == hi and evaluate(p, b) == 0)
        if n == 0:
            continue
        if n == 1 and not (open_interval and ((a == lo and evaluate(p, a) == 0) or
                                               (b == hi and evaluate(p, b) == 0))):
            out.append((a, b))
            continue
        m = (a + b) / 2
        if evaluate(p, m) == 0:
            out.append((m, m))
            eps = (b - a) / 64
            while count_roots(p, m - eps, m + eps) > 1:
                eps /= 2
            stack.append((a, m - eps))
            stack.append((m + eps, b))
        else:
            stack.append((a, m))
            stack.append((m, b))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Bounded factor search for monic integer polynomials with unit constant term
# ---------------------------------------------------------------------------

def cauchy_bound(p: Poly) -> int:
    """Integer bound on the absolute value of every complex root of monic ``p``."""
    p = trim(p)
    return 1 + max(abs(c) for c in p[:-1])


def find_factor(p: Poly, budget: int = 200_000) -> Tuple[Optional[Poly], bool]:
    """Search for a monic integer factor of degree 1..deg/2.

    Returns ``(factor, exhaustive)``.  ``exhaustive`` is True when every
    candidate allowed by the root bound was tried, so ``None`` then proves
    irreducibility over Z (for monic ``p`` with constant term +-1).
    """
    p = trim(p)
    d = len(p) - 1
    bound = cauchy_bound(p)
    tried = 0
    for k in range(1, d // 2 + 1):
        # coefficient of x^(k-j) is +-e_j(roots), |e_j| <= C(k,j) bound^j
        ranges = [range(-comb(k, j) * bound ** j, comb(k, j) * bound ** j + 1) for j in range(1, k)]
        for const in (1, -1):
            for middle in product(*ranges):
                tried += 1
                if tried > budget:
                    return None, False
                g = (const,) + tuple(reversed(middle)) + (1,)
                if divmod_poly(p, g)[1] == ():
                    return g, True
    return None, True


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)(\d+)?(\*)?(x(?:\^(\d+))?)?")


def parse_poly(text: str) -> Poly:
    """Parse an integer polynomial in ``x`` such as ``"x^3-7*x+1"``."""
    s = "".join(text.split())
    if not s:
        raise ParseError("empty polynomial", text, 0)
    coeffs: dict = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        digits, star, mono = m.group(2), m.group(3), m.group(4)
        if (not digits and not mono) or (star and not (digits and mono)):
            raise ParseError(f"unexpected {s[m.end()] if m.end() < len(s) else 'end'!r} in polynomial",
                             s, m.end())
        if pos > 0 and not m.group(1):
            raise ParseError("expected '+' or '-' between terms", s, pos)
        sign = -1 if m.group(1) == "-" else 1
        c = int(digits) if digits else 1
        e = (int(m.group(5)) if m.group(5) else 1) if mono else 0
        coeffs[e] = coeffs.get(e, 0) + sign * c
        pos = m.end()
    top = max(coeffs)
    return trim(coeffs.get(i, 0) for i in range(top + 1))


def format_poly(p: Sequence, var: str = "x") -> str:
    parts = []
    for e in range(len(p) - 1, -1, -1):
        c = p[e]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out
