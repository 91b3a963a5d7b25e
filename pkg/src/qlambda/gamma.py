"""Exact arithmetic in the ring Gamma_lambda = Z[lambda, lambda^-1] and its Q-span.

A :class:`LambdaSpec` says which lambda in (0, 1) is meant.  Four cases are
supported, each with its own normal form for ring elements:

* ``RationalSpec(p, q)``: lambda = p/q and Gamma = Z[1/pq].  Elements are
  stored as a single ``Fraction``.
* ``AlgebraicIntegerSpec(coeffs, iso_lo, iso_hi)``: lambda is the unique root
  of the monic polynomial with constant term +-1 inside the isolating
  interval.  Elements are coordinate tuples in the basis 1, lambda, ...,
  lambda^(d-1).
* ``SqrtReciprocalSpec(n)``: lambda = 1/sqrt(n).  Elements are pairs
  ``(a, b)`` meaning a + b*sqrt(n).
* ``TranscendentalSpec(surrogate, eps)``: lambda is only known to lie within
  ``eps`` of ``surrogate``; elements are Laurent polynomials in lambda stored
  as sorted ``(exponent, coefficient)`` pairs.

Values with rational (rather than integer) coordinates form the Q-span of
Gamma and are represented by the same :class:`LambdaNumber` class;
:meth:`LambdaNumber.is_gamma` tells the two apart.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple

from . import poly as P
from .errors import (InvalidSpec, ParseError, PrecisionExhausted, SpecMismatch,
                     WrongCase)

DEFAULT_PRECISION = 64
DEFAULT_MAX_DEPTH = 4000


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _n(x):
    """Store integral rationals as ``int`` so coordinates compare and hash uniformly."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def format_rational(x) -> str:
    x = _q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?", text)
    if not m:
        raise ParseError(f"expected a rational number, got {text!r}", text, 0)
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError("zero denominator", text, text.index("/") + 1)
    return Fraction(int(m.group(1)), den)


# ---------------------------------------------------------------------------
# Validation report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    ok: bool
    violations: List[Violation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    irreducibility: Optional[str] = None

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"code": v.code, "message": v.message} for v in self.violations],
            "notes": list(self.notes),
            "irreducibility": self.irreducibility,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ValidationReport":
        return cls(d["ok"], [Violation(v["code"], v["message"]) for v in d["violations"]],
                   list(d["notes"]), d.get("irreducibility"))


# ---------------------------------------------------------------------------
# Spec classes.  Each implements the ring on raw coordinate tuples.
# ---------------------------------------------------------------------------

class LambdaSpec:
    """Base class.  Subclasses are frozen dataclasses, hence hashable."""

    kind = "abstract"

    # ring backend (coordinate tuples) ------------------------------------
    def c_zero(self) -> tuple: raise NotImplementedError
    def c_const(self, r: Fraction) -> tuple: raise NotImplementedError
    def c_lambda_pow(self, k: int) -> tuple: raise NotImplementedError
    def c_add(self, x, y) -> tuple: raise NotImplementedError
    def c_neg(self, x) -> tuple: raise NotImplementedError
    def c_mul(self, x, y) -> tuple: raise NotImplementedError
    def c_scale(self, x, r: Fraction) -> tuple: raise NotImplementedError
    def c_is_gamma(self, x) -> bool: raise NotImplementedError
    def c_as_rational(self, x) -> Optional[Fraction]: raise NotImplementedError
    def c_sign(self, x, max_depth: int) -> int: raise NotImplementedError
    def c_enclose(self, x, bits: int) -> Tuple[Fraction, Fraction]: raise NotImplementedError
    def c_format(self, x) -> str: raise NotImplementedError

    def c_in_z_lambda(self, x) -> bool:
        # lambda^-1 is a polynomial in lambda for the algebraic and sqrt cases
        return self.c_is_gamma(x)

    def c_mul_lambda_pow(self, x, k: int) -> tuple:
        if k == 0:
            return x
        return self.c_mul(x, _lambda_pow_coords(self, k))

    def violations(self) -> Tuple[List[Violation], List[str], Optional[str]]:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    # conveniences --------------------------------------------------------
    def ensure_valid(self) -> "LambdaSpec":
        report = validate_spec(self)
        if not report.ok:
            raise InvalidSpec(report)
        return self

    def zero(self) -> "LambdaNumber":
        return LambdaNumber(self, self.c_zero())

    def one(self) -> "LambdaNumber":
        return self.const(1)

    def const(self, r) -> "LambdaNumber":
        return LambdaNumber(self, self.c_const(_q(r)))

    def lam(self) -> "LambdaNumber":
        return self.lam_pow(1)

    def lam_pow(self, k: int) -> "LambdaNumber":
        self.ensure_valid()
        return LambdaNumber(self, self.c_lambda_pow(k))

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class RationalSpec(LambdaSpec):
    p: int
    q: int
    kind = "rational"

    def c_zero(self): return (0,)
    def c_const(self, r): return (_n(_q(r)),)
    def c_lambda_pow(self, k): return (_n(Fraction(self.p, self.q) ** k),)
    def c_add(self, x, y): return (_n(_q(x[0]) + y[0]),)
    def c_neg(self, x): return (-x[0],)
    def c_mul(self, x, y): return (_n(_q(x[0]) * y[0]),)
    def c_scale(self, x, r): return (_n(_q(x[0]) * r),)
    def c_as_rational(self, x): return _q(x[0])

    def c_in_z_lambda(self, x):
        # Z[p/q] = Z[1/q] when gcd(p, q) = 1
        return RationalSpec(1, self.q).c_is_gamma(x)

    def c_is_gamma(self, x):
        den = _q(x[0]).denominator
        base = self.p * self.q
        while den > 1:
            g = gcd(den, base)
            if g == 1:
                return False
            den //= g
        return True

    def c_sign(self, x, max_depth):
        return (x[0] > 0) - (x[0] < 0)

    def c_enclose(self, x, bits):
        return _q(x[0]), _q(x[0])

    def c_format(self, x):
        return format_rational(x[0])

    def violations(self):
        out = []
        if gcd(self.p, self.q) != 1:
            out.append(Violation("NOT_LOWEST_TERMS", f"gcd({self.p},{self.q}) != 1"))
        if not 0 < self.p < self.q:
            out.append(Violation("RANGE", f"need 0 < p < q, got p={self.p}, q={self.q}"))
        return out, [], None

    def to_text(self):
        return f"rat:{self.p}/{self.q}"


@dataclass(frozen=True)
class AlgebraicIntegerSpec(LambdaSpec):
    coeffs: Tuple[int, ...]
    iso_lo: Fraction
    iso_hi: Fraction
    kind = "algebraic"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "iso_lo", _q(self.iso_lo))
        object.__setattr__(self, "iso_hi", _q(self.iso_hi))

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    def c_zero(self): return (0,) * self.d

    def c_const(self, r):
        return (_n(r),) + (0,) * (self.d - 1)

    def c_lambda_pow(self, k):
        return _alg_lambda_pow(self, k)

    def c_add(self, x, y): return tuple(_n(_q(a) + b) for a, b in zip(x, y))
    def c_neg(self, x): return tuple(-a for a in x)
    def c_scale(self, x, r): return tuple(_n(_q(a) * r) for a in x)

    def c_mul(self, x, y):
        d = self.d
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        f = self.coeffs
        # x^i = x^(i-d) * (-(a_0 + ... + a_{d-1} x^{d-1})) for i >= d
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c:
                prod[i] = Fraction(0)
                for j in range(d):
                    prod[i - d + j] -= c * f[j]
        return tuple(_n(c) for c in prod[:d])

    def c_is_gamma(self, x):
        return all(_q(a).denominator == 1 for a in x)

    def c_as_rational(self, x):
        return _q(x[0]) if not any(x[1:]) else None

    def c_sign(self, x, max_depth):
        if not any(x):
            return 0
        if not any(x[1:]):
            return (x[0] > 0) - (x[0] < 0)
        self.ensure_valid()
        level = 0
        while True:
            lo, hi = _alg_value_range(x, *_alg_interval(self, level))
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if level >= max_depth:
                raise PrecisionExhausted("sign undecided at maximum refinement depth",
                                         depth=level)
            level = min(max_depth, max(level * 2, level + 8))

    def c_enclose(self, x, bits):
        if not any(x[1:]):
            return _q(x[0]), _q(x[0])
        self.ensure_valid()
        target = Fraction(1, 2 ** bits)
        level = 0
        while True:
            lo, hi = _alg_value_range(x, *_alg_interval(self, level))
            if hi - lo <= target:
                return lo, hi
            level += 8

    def c_format(self, x):
        return _format_terms((i, c) for i, c in enumerate(x))

    def violations(self):
        out, notes = [], []
        f = P.trim(self.coeffs)
        d = len(f) - 1
        verdict = None
        if d < 2:
            out.append(Violation("DEGREE", f"degree must be at least 2, got {d}"))
        if not f or f[-1] != 1:
            out.append(Violation("NOT_MONIC", "leading coefficient must be 1"))
        if not f or abs(f[0]) != 1:
            out.append(Violation("NONUNIT_CONSTANT",
                                 f"constant term must be +1 or -1, got {f[0] if f else 0}"))
        if not self.iso_lo < self.iso_hi or self.iso_lo <= 0 or self.iso_hi >= 1:
            out.append(Violation("RANGE", f"isolating interval [{format_rational(self.iso_lo)}, "
                                          f"{format_rational(self.iso_hi)}] must lie inside (0,1)"))
        if d >= 1:
            n_roots = P.count_roots(f, self.iso_lo, self.iso_hi)
            if n_roots != 1:
                out.append(Violation("ROOT_COUNT",
                                     f"Sturm count on the isolating interval is {n_roots}, not 1"))
            squarefree = P.is_squarefree(f)
            notes.append("squarefree" if squarefree else "not squarefree")
            rational_roots = [r for r in (1, -1) if P.evaluate(f, r) == 0]
            if rational_roots or not squarefree:
                verdict = "reducible"
                why = (f"rational root {rational_roots[0]}" if rational_roots
                       else "repeated factor")
                out.append(Violation("REDUCIBLE", f"polynomial is reducible ({why})"))
            elif d >= 2 and f[-1] == 1 and abs(f[0]) == 1:
                factor, exhaustive = P.find_factor(f)
                if factor is not None:
                    verdict = "reducible"
                    out.append(Violation("REDUCIBLE",
                                         f"factor {P.format_poly(factor)} divides the polynomial"))
                elif exhaustive:
                    verdict = "irreducible"
                else:
                    verdict = "asserted by caller"
                    notes.append("irreducibility asserted by caller (factor search budget exceeded)")
        return out, notes, verdict

    def to_text(self):
        return (f"alg:{P.format_poly(self.coeffs)};root=[{format_rational(self.iso_lo)},"
                f"{format_rational(self.iso_hi)}]")


@dataclass(frozen=True)
class SqrtReciprocalSpec(LambdaSpec):
    n: int
    kind = "sqrt"

    def c_zero(self): return (0, 0)
    def c_const(self, r): return (_n(r), 0)

    def c_lambda_pow(self, k):
        # lambda^(2j) = n^-j, lambda^(2j+1) = n^-(j+1) * sqrt(n)
        j, odd = divmod(k, 2)
        if odd:
            return (0, _n(Fraction(1, self.n) ** (j + 1)))
        return (_n(Fraction(1, self.n) ** j), 0)

    def c_add(self, x, y): return (_n(_q(x[0]) + y[0]), _n(_q(x[1]) + y[1]))
    def c_neg(self, x): return (-x[0], -x[1])
    def c_scale(self, x, r): return (_n(_q(x[0]) * r), _n(_q(x[1]) * r))

    def c_mul(self, x, y):
        a, b = _q(x[0]), _q(x[1])
        c, e = y
        return (_n(a * c + self.n * b * e), _n(a * e + b * c))

    def c_is_gamma(self, x):
        r = RationalSpec(1, self.n)
        return r.c_is_gamma((x[0],)) and r.c_is_gamma((x[1],))

    def c_as_rational(self, x):
        return _q(x[0]) if x[1] == 0 else None

    def c_sign(self, x, max_depth):
        a, b = _q(x[0]), _q(x[1])
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa if sa else sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with n b^2
        diff = a * a - self.n * b * b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def c_enclose(self, x, bits):
        a, b = _q(x[0]), _q(x[1])
        if b == 0:
            return a, a
        target = Fraction(1, 2 ** bits)
        k = bits + abs(b).numerator.bit_length() + 2
        while True:
            r = isqrt(self.n * 4 ** k)
            lo_s, hi_s = Fraction(r, 2 ** k), Fraction(r + 1, 2 ** k)
            ends = sorted((a + b * lo_s, a + b * hi_s))
            if ends[1] - ends[0] <= target:
                return ends[0], ends[1]
            k += 8

    def c_format(self, x):
        return _format_terms([(0, x[0]), (1, x[1])], var="R")

    def violations(self):
        out = []
        if self.n < 2:
            out.append(Violation("RANGE", f"need n >= 2, got {self.n}"))
        elif any(self.n % (k * k) == 0 for k in range(2, isqrt(self.n) + 1)):
            out.append(Violation("NOT_SQUAREFREE_N", f"n={self.n} is not square-free"))
        return out, [], None

    def to_text(self):
        return f"sqrt:{self.n}"


@dataclass(frozen=True)
class TranscendentalSpec(LambdaSpec):
    surrogate: Fraction
    eps: Fraction
    kind = "transcendental"

    def __post_init__(self):
        object.__setattr__(self, "surrogate", _q(self.surrogate))
        object.__setattr__(self, "eps", _q(self.eps))

    def c_zero(self): return ()

    def c_const(self, r):
        return ((0, _n(r)),) if r else ()

    def c_lambda_pow(self, k):
        return ((k, 1),)

    @staticmethod
    def _pack(d: Dict[int, Fraction]) -> tuple:
        return tuple((e, _n(c)) for e, c in sorted(d.items()) if c)

    def c_add(self, x, y):
        d = dict(x)
        for e, c in y:
            d[e] = _q(d.get(e, 0)) + c
        return self._pack(d)

    def c_neg(self, x): return tuple((e, -c) for e, c in x)
    def c_scale(self, x, r): return self._pack({e: _q(c) * r for e, c in x})

    def c_mul(self, x, y):
        d: Dict[int, Fraction] = {}
        for e1, c1 in x:
            for e2, c2 in y:
                d[e1 + e2] = d.get(e1 + e2, 0) + _q(c1) * c2
        return self._pack(d)

    def c_mul_lambda_pow(self, x, k):
        return tuple((e + k, c) for e, c in x)

    def c_in_z_lambda(self, x):
        return all(e >= 0 and _q(c).denominator == 1 for e, c in x)

    def c_is_gamma(self, x):
        return all(_q(c).denominator == 1 for _, c in x)

    def c_as_rational(self, x):
        if not x:
            return Fraction(0)
        if len(x) == 1 and x[0][0] == 0:
            return _q(x[0][1])
        return None

    def interval(self) -> Tuple[Fraction, Fraction]:
        return self.surrogate - self.eps, self.surrogate + self.eps

    def c_sign(self, x, max_depth):
        if not x:
            return 0
        if len(x) == 1:
            c = x[0][1]
            return 1 if c > 0 else -1
        # multiply through by lambda^-emin to get an ordinary polynomial;
        # its sign on the surrogate interval is decided iff it has no root there
        emin = x[0][0]
        coeffs = [Fraction(0)] * (x[-1][0] - emin + 1)
        for e, c in x:
            coeffs[e - emin] = _q(c)
        lo, hi = self.interval()
        if P.count_roots(tuple(coeffs), lo, hi) > 0:
            raise PrecisionExhausted(
                f"sign of {self.c_format(x)} is not determined by lambda in "
                f"[{format_rational(lo)}, {format_rational(hi)}]", value=self.c_format(x))
        v = P.evaluate(tuple(coeffs), self.surrogate)
        return 1 if v > 0 else -1

    def c_enclose(self, x, bits):
        r = self.c_as_rational(x)
        if r is not None:
            return r, r
        lo, hi = self.interval()
        best = None
        pieces = 1
        while pieces <= 1024:
            step = (hi - lo) / pieces
            ranges = [_laurent_range(x, lo + i * step, lo + (i + 1) * step) for i in range(pieces)]
            best = (min(a for a, _ in ranges), max(b for _, b in ranges))
            if best[1] - best[0] <= Fraction(1, 2 ** bits):
                break
            pieces *= 4
        return best

    def c_format(self, x):
        return _format_terms(x)

    def violations(self):
        out = []
        if self.eps <= 0:
            out.append(Violation("RANGE", "surrogate error must be positive"))
        if not (0 < self.surrogate - self.eps and self.surrogate + self.eps < 1):
            out.append(Violation("RANGE", "surrogate interval must lie inside (0,1)"))
        return out, ["arithmetic is exact; signs are decided on the surrogate interval"], None

    def to_text(self):
        return f"trans:approx={format_rational(self.surrogate)};eps={format_rational(self.eps)}"


# ---------------------------------------------------------------------------
# Helpers for the algebraic and transcendental cases
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _lambda_pow_coords(spec: LambdaSpec, k: int) -> tuple:
    return spec.c_lambda_pow(k)


@lru_cache(maxsize=4096)
def _alg_lambda_pow(spec: AlgebraicIntegerSpec, k: int) -> tuple:
    d = spec.d
    if k == 0:
        return spec.c_const(1)
    if k == 1:
        return (0, 1) + (0,) * (d - 2)
    if k == -1:
        # lambda^-1 = -a_0 (lambda^(d-1) + a_{d-1} lambda^(d-2) + ... + a_1)
        a = spec.coeffs
        return tuple(-a[0] * a[i + 1] for i in range(d))
    base = _alg_lambda_pow(spec, 1 if k > 0 else -1)
    half = _alg_lambda_pow(spec, abs(k) // 2 * (1 if k > 0 else -1))
    out = spec.c_mul(half, half)
    return spec.c_mul(out, base) if k % 2 else out


_interval_lock = threading.Lock()
_interval_cache: Dict[AlgebraicIntegerSpec, List[Tuple[Fraction, Fraction]]] = {}


def _alg_interval(spec: AlgebraicIntegerSpec, level: int) -> Tuple[Fraction, Fraction]:
    """Isolating interval for lambda after ``level`` bisection steps."""
    with _interval_lock:
        chain = _interval_cache.setdefault(spec, [(spec.iso_lo, spec.iso_hi)])
        f = spec.coeffs
        while len(chain) <= level:
            lo, hi = chain[-1]
            mid = (lo + hi) / 2
            fm = P.evaluate(f, mid)
            if fm == 0:
                chain.append((mid, mid))
            elif (fm > 0) == (P.evaluate(f, lo) > 0):
                chain.append((mid, hi))
            else:
                chain.append((lo, mid))
        return chain[level]


def _alg_value_range(x, a: Fraction, b: Fraction) -> Tuple[Fraction, Fraction]:
    """Enclosure of sum x_i t^i for t in [a, b] with 0 < a."""
    lo = hi = Fraction(0)
    pa = pb = Fraction(1)
    for c in x:
        if c:
            u, v = c * pa, c * pb
            if u <= v:
                lo, hi = lo + u, hi + v
            else:
                lo, hi = lo + v, hi + u
        pa, pb = pa * a, pb * b
    return lo, hi


def _laurent_range(x, a: Fraction, b: Fraction) -> Tuple[Fraction, Fraction]:
    lo = hi = Fraction(0)
    for e, c in x:
        u, v = c * a ** e, c * b ** e
        if u <= v:
            lo, hi = lo + u, hi + v
        else:
            lo, hi = lo + v, hi + u
    return lo, hi


def _format_terms(terms, var: str = "L") -> str:
    parts = []
    for e, c in terms:
        if not c:
            continue
        c = _q(c)
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def validate_spec(spec: LambdaSpec) -> ValidationReport:
    violations, notes, verdict = spec.violations()
    return ValidationReport(not violations, violations, notes, verdict)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

class LambdaNumber:
    """An exact element of Q-span(Gamma_lambda).

    Immutable; supports ``+ - *`` with other elements of the same spec and
    with ``int``/``Fraction`` scalars, ordering via exact sign tests, and
    division by nonzero rationals.
    """

    __slots__ = ("spec", "coords", "_hash")

    def __init__(self, spec: LambdaSpec, coords: tuple):
        self.spec = spec
        self.coords = coords
        self._hash = None

    # coercion -------------------------------------------------------------
    def _other(self, y) -> Optional[tuple]:
        if isinstance(y, LambdaNumber):
            if y.spec != self.spec:
                raise SpecMismatch(f"{y.spec} vs {self.spec}")
            return y.coords
        if isinstance(y, (int, Fraction)):
            return self.spec.c_const(_q(y))
        return None

    def __add__(self, y):
        c = self._other(y)
        if c is None:
            return NotImplemented
        return LambdaNumber(self.spec, self.spec.c_add(self.coords, c))

    __radd__ = __add__

    def __neg__(self):
        return LambdaNumber(self.spec, self.spec.c_neg(self.coords))

    def __sub__(self, y):
        c = self._other(y)
        if c is None:
            return NotImplemented
        return LambdaNumber(self.spec, self.spec.c_add(self.coords, self.spec.c_neg(c)))

    def __rsub__(self, y):
        return (-self) + y

    def __mul__(self, y):
        if isinstance(y, (int, Fraction)):
            return LambdaNumber(self.spec, self.spec.c_scale(self.coords, _q(y)))
        c = self._other(y)
        if c is None:
            return NotImplemented
        return LambdaNumber(self.spec, self.spec.c_mul(self.coords, c))

    __rmul__ = __mul__

    def __truediv__(self, y):
        if isinstance(y, LambdaNumber):
            r = y.as_rational()
            if r is None:
                raise ValueError("division only by rational values")
            y = r
        y = _q(y)
        if y == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / y)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers only for lambda (use mul_lambda_pow)")
        out = LambdaNumber(self.spec, self.spec.c_const(Fraction(1)))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_lambda_pow(self, k: int) -> "LambdaNumber":
        if k < 0:
            self.spec.ensure_valid()
        return LambdaNumber(self.spec, self.spec.c_mul_lambda_pow(self.coords, k))

    # predicates -------------------------------------------------------------
    def is_zero(self) -> bool:
        # every backend stores zero as all-zero (or empty) coordinates
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def is_gamma(self) -> bool:
        return self.spec.c_is_gamma(self.coords)

    def in_z_lambda(self) -> bool:
        """Membership in the subring Z[lambda] of Gamma."""
        return self.spec.c_in_z_lambda(self.coords)

    def as_rational(self) -> Optional[Fraction]:
        return self.spec.c_as_rational(self.coords)

    def sign(self, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
        return _sign(self.spec, self.coords, max_depth)

    # comparisons ----------------------------------------------------------
    def __eq__(self, y):
        if isinstance(y, LambdaNumber):
            return self.spec == y.spec and self.coords == y.coords
        if isinstance(y, (int, Fraction)):
            return self.coords == self.spec.c_const(_q(y))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.coords))
        return self._hash

    def __lt__(self, y): return (self - y).sign() < 0
    def __le__(self, y): return (self - y).sign() <= 0
    def __gt__(self, y): return (self - y).sign() > 0
    def __ge__(self, y): return (self - y).sign() >= 0

    # rendering --------------------------------------------------------------
    def enclose(self, bits: int = DEFAULT_PRECISION) -> Tuple[Fraction, Fraction]:
        return self.spec.c_enclose(self.coords, bits)

    def approx(self, bits: int = DEFAULT_PRECISION) -> Fraction:
        return approx(self, bits)

    def to_text(self) -> str:
        return self.spec.c_format(self.coords)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"LambdaNumber({self.spec.to_text()!r}, {self.to_text()!r})"


GammaElement = LambdaNumber
LambdaScalar = LambdaNumber


@lru_cache(maxsize=65536)
def _sign(spec: LambdaSpec, coords: tuple, max_depth: int) -> int:
    return spec.c_sign(coords, max_depth)


# ---------------------------------------------------------------------------
# Functional interface
# ---------------------------------------------------------------------------

def _check_same(x: LambdaNumber, y: LambdaNumber):
    if x.spec != y.spec:
        raise SpecMismatch(f"{x.spec} vs {y.spec}")


def gamma_zero(spec: LambdaSpec) -> LambdaNumber:
    return spec.ensure_valid().zero()


def gamma_one(spec: LambdaSpec) -> LambdaNumber:
    return spec.ensure_valid().one()


def gamma_from_int(spec: LambdaSpec, m: int) -> LambdaNumber:
    return spec.ensure_valid().const(int(m))


def gamma_lambda(spec: LambdaSpec) -> LambdaNumber:
    return spec.lam()


def gamma_add(x: LambdaNumber, y: LambdaNumber) -> LambdaNumber:
    _check_same(x, y)
    return x + y


def gamma_neg(x: LambdaNumber) -> LambdaNumber:
    return -x


def gamma_mul(x: LambdaNumber, y: LambdaNumber) -> LambdaNumber:
    _check_same(x, y)
    return x * y


def gamma_mul_lambda_pow(x: LambdaNumber, k: int) -> LambdaNumber:
    return x.mul_lambda_pow(k)


def gamma_sign(x: LambdaNumber, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    return x.sign(max_depth)


def gamma_compare(x: LambdaNumber, y: LambdaNumber, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    """-1, 0 or +1 as x is less than, equal to or greater than y."""
    _check_same(x, y)
    return (x - y).sign(max_depth)


def approx(x: LambdaNumber, bits: int = DEFAULT_PRECISION) -> Fraction:
    """A rational within 2^-bits of x.

    Raises PrecisionExhausted when lambda is not known precisely enough
    (transcendental case).
    """
    lo, hi = x.enclose(bits + 1)
    if hi - lo > Fraction(2, 2 ** (bits + 1)):
        raise PrecisionExhausted(
            f"value known only to within {float(hi - lo):.3g}", lo=lo, hi=hi)
    return (lo + hi) / 2


def lambda_matrix(spec: LambdaSpec):
    """Matrix of multiplication by lambda on the basis 1, lambda, ..., lambda^(d-1)."""
    from .ktheory import IntMatrix

    if not isinstance(spec, AlgebraicIntegerSpec):
        raise WrongCase(f"lambda_matrix needs an algebraic-integer spec, got {spec.kind}")
    spec.ensure_valid()
    d = spec.d
    cols = []
    for j in range(d):
        basis = tuple(1 if i == j else 0 for i in range(d))
        cols.append(spec.c_mul_lambda_pow(basis, 1))
    return IntMatrix([[int(cols[j][i]) for j in range(d)] for i in range(d)])


# ---------------------------------------------------------------------------
# Text forms
# ---------------------------------------------------------------------------

_SPEC_RE = {
    "rat": re.compile(r"rat:\s*(\d+)\s*/\s*(\d+)\s*"),
    "sqrt": re.compile(r"sqrt:\s*(\d+)\s*"),
    "alg": re.compile(r"alg:(?P<poly>[^;]+);\s*root\s*=\s*\[(?P<lo>[^,\]]+),(?P<hi>[^\]]+)\]\s*"),
    "trans": re.compile(r"trans:\s*approx\s*=\s*(?P<s>[^;]+);\s*eps\s*=\s*(?P<e>.+)"),
}


def parse_spec(text: str) -> LambdaSpec:
    """Parse ``rat:p/q``, ``alg:<poly>;root=[lo,hi]``, ``sqrt:n`` or
    ``trans:approx=r;eps=r``.  Validation is separate (:func:`validate_spec`)."""
    s = text.strip()
    head = s.split(":", 1)[0]
    rx = _SPEC_RE.get(head)
    if rx is None:
        raise ParseError(f"unknown spec kind {head!r} (expected rat, alg, sqrt or trans)", text, 0)
    m = rx.fullmatch(s)
    if not m:
        raise ParseError(f"malformed {head} spec", text, len(head) + 1)
    if head == "rat":
        return RationalSpec(int(m.group(1)), int(m.group(2)))
    if head == "sqrt":
        return SqrtReciprocalSpec(int(m.group(1)))
    if head == "alg":
        try:
            coeffs = P.parse_poly(m.group("poly"))
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" at line", 1)[0], text, m.start("poly") + exc.pos) from None
        return AlgebraicIntegerSpec(coeffs, parse_rational(m.group("lo")), parse_rational(m.group("hi")))
    return TranscendentalSpec(parse_rational(m.group("s")), parse_rational(m.group("e")))


class _GammaParser:
    """Recursive descent over sums of products of rationals, L, R and parentheses."""

    def __init__(self, text: str, spec: LambdaSpec, offset: int = 0, full_text: str = None):
        self.s = text
        self.i = 0
        self.spec = spec
        self.offset = offset
        self.full = full_text if full_text is not None else text

    def error(self, msg):
        raise ParseError(msg, self.full, self.offset + self.i)

    def peek(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def parse(self) -> LambdaNumber:
        v = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return v

    def expr(self):
        neg = False
        if self.peek() in ("+", "-"):
            neg = self.s[self.i] == "-"
            self.i += 1
        v = self.term()
        if neg:
            v = -v
        while self.peek() in ("+", "-") and self.peek():
            op = self.s[self.i]
            self.i += 1
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def term(self):
        v = self.factor()
        while self.peek() in ("*", "/") and self.peek():
            op = self.s[self.i]
            self.i += 1
            f = self.factor()
            if op == "*":
                v = v * f
            else:
                r = f.as_rational()
                if r is None or r == 0:
                    self.error("can only divide by a nonzero rational")
                v = v / r
        return v

    def exponent(self):
        if self.peek() != "^":
            return None
        self.i += 1
        self.peek()
        m = re.compile(r"[+-]?\d+").match(self.s, self.i)
        if not m:
            self.error("expected integer exponent")
        self.i = m.end()
        return int(m.group())

    def factor(self):
        c = self.peek()
        if c == "(":
            self.i += 1
            v = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            k = self.exponent()
            if k is not None:
                if k < 0:
                    self.error("negative exponent only allowed on L")
                v = v ** k
            return v
        if c == "-":
            self.i += 1
            return -self.factor()
        if c.isdigit():
            m = re.compile(r"\d+").match(self.s, self.i)
            self.i = m.end()
            return self.spec.const(int(m.group()))
        if c == "L":
            self.i += 1
            k = self.exponent()
            return self.spec.lam_pow(1 if k is None else k)
        if c == "R":
            if not isinstance(self.spec, SqrtReciprocalSpec):
                self.error("symbol R is only defined for sqrt specs")
            self.i += 1
            k = self.exponent()
            return self.spec.lam_pow(-(1 if k is None else k))
        self.error(f"unexpected {c!r}" if c else "unexpected end of input")


def parse_gamma(text: str, spec: LambdaSpec, offset: int = 0, full_text: str = None) -> LambdaNumber:
    """Parse a Laurent polynomial in ``L`` (and ``R`` = sqrt(n) for sqrt specs)."""
    return _GammaParser(text, spec, offset, full_text).parse()


def format_gamma(x: LambdaNumber) -> str:
    return x.to_text()


# ---------------------------------------------------------------------------
# Gaussian scalars
# ---------------------------------------------------------------------------

class CScalar:
    """re + i*im with both parts in Q-span(Gamma_lambda)."""

    __slots__ = ("re", "im")

    def __init__(self, re: LambdaNumber, im: Optional[LambdaNumber] = None):
        self.re = re
        self.im = im if im is not None else re.spec.zero()

    @classmethod
    def of(cls, spec: LambdaSpec, re=0, im=0) -> "CScalar":
        def lift(v):
            return v if isinstance(v, LambdaNumber) else spec.const(v)
        return cls(lift(re), lift(im))

    @property
    def spec(self):
        return self.re.spec

    def _lift(self, y):
        if isinstance(y, CScalar):
            return y
        if isinstance(y, (LambdaNumber, int, Fraction)):
            return CScalar.of(self.spec, y)
        return None

    def __add__(self, y):
        y = self._lift(y)
        if y is None:
            return NotImplemented
        return CScalar(self.re + y.re, self.im + y.im)

    __radd__ = __add__

    def __sub__(self, y):
        y = self._lift(y)
        if y is None:
            return NotImplemented
        return CScalar(self.re - y.re, self.im - y.im)

    def __rsub__(self, y):
        return (-self) + y

    def __neg__(self):
        return CScalar(-self.re, -self.im)

    def __mul__(self, y):
        y = self._lift(y)
        if y is None:
            return NotImplemented
        if not self.im and not y.im:
            return CScalar(self.re * y.re, self.im)
        return CScalar(self.re * y.re - self.im * y.im, self.re * y.im + self.im * y.re)

    __rmul__ = __mul__

    def conj(self) -> "CScalar":
        return CScalar(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def __eq__(self, y):
        y = self._lift(y) if not isinstance(y, CScalar) else y
        if y is None:
            return NotImplemented
        return self.re == y.re and self.im == y.im

    def __hash__(self):
        return hash((self.re, self.im))

    def to_text(self) -> str:
        if self.im.is_zero():
            return self.re.to_text()
        if self.re.is_zero():
            return f"({self.im.to_text()})i"
        return f"({self.re.to_text()})+({self.im.to_text()})i"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"CScalar({self.to_text()!r})"


def algebraic_specs_for(coeffs) -> List[AlgebraicIntegerSpec]:
    """One spec per real root of ``coeffs`` in (0, 1), with isolating intervals strictly inside."""
    f = P.trim(coeffs)
    out = []
    for lo, hi in P.isolate_roots(f, 0, 1, open_interval=True):
        if lo == hi:
            continue  # rational root; such a polynomial is reducible anyway
        while lo <= 0 or hi >= 1:
            mid = (lo + hi) / 2
            if P.evaluate(f, mid) == 0:
                break
            if P.count_roots(f, lo, mid) - (lo == 0 and P.evaluate(f, lo) == 0) > 0:
                hi = mid
            else:
                lo = mid
        out.append(AlgebraicIntegerSpec(tuple(f), lo, hi))
    return out
