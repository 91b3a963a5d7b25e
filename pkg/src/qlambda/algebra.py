"""Symbolic calculus in the crossed product C_0^lambda(R) x G_lambda.

An element is a finite sum of terms ``f . delta_g`` where ``g = [lambda^n : c]``
acts on the line by ``t -> lambda^n t + c`` and ``f`` is a step function with
breakpoints in Gamma_lambda and Gaussian-scalar values.  Products and
adjoints follow the usual crossed-product rules

    (x y)(g) = sum_h x(h) alpha_h(y(h^-1 g)),     x*(g) = alpha_g(x(g^-1)^*),

with ``alpha_h(f)(t) = f(h^-1 t)``.  The corner ``Q = e A e`` with
``e = chi_[0,1) . delta_1`` and its gauge-fixed subalgebra ``F`` are handled
through membership predicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import IndexRange, NotInQ, SpecMismatch
from .gamma import CScalar, LambdaNumber, LambdaSpec, RationalSpec


@dataclass(frozen=True)
class GroupElement:
    """g = [lambda^n : c], the affine map t -> lambda^n t + c."""

    n: int
    c: LambdaNumber

    @classmethod
    def identity(cls, spec: LambdaSpec) -> "GroupElement":
        return cls(0, spec.zero())

    @property
    def spec(self) -> LambdaSpec:
        return self.c.spec

    @property
    def grade(self) -> int:
        return self.n

    def is_identity(self) -> bool:
        return self.n == 0 and self.c.is_zero()

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        # [lambda^n : a][lambda^m : b] = [lambda^(n+m) : lambda^n b + a]
        return GroupElement(self.n + other.n, other.c.mul_lambda_pow(self.n) + self.c)

    def inverse(self) -> "GroupElement":
        return GroupElement(-self.n, -self.c.mul_lambda_pow(-self.n))

    def apply(self, t: LambdaNumber) -> LambdaNumber:
        return t.mul_lambda_pow(self.n) + self.c

    def to_text(self) -> str:
        return f"[L^{self.n} : {self.c.to_text()}]"

    def _sort_key(self):
        return (self.n, self.c.to_text())


class StepFunction:
    """Finite step function: value ``values[i]`` on ``[bps[i], bps[i+1])``, zero elsewhere.

    Always stored in canonical form (equal neighbours merged, zero ends
    stripped), so equality is structural.
    """

    __slots__ = ("spec", "bps", "values", "_hash")

    def __init__(self, spec: LambdaSpec, bps: Sequence[LambdaNumber] = (),
                 values: Sequence[CScalar] = (), canonical: bool = False):
        self.spec = spec
        if not canonical:
            bps, values = _canonical(spec, list(bps), list(values))
        self.bps: Tuple[LambdaNumber, ...] = tuple(bps)
        self.values: Tuple[CScalar, ...] = tuple(values)
        self._hash = None

    @classmethod
    def chi(cls, a: LambdaNumber, b: LambdaNumber, value: Optional[CScalar] = None) -> "StepFunction":
        spec = a.spec
        if value is None:
            value = CScalar.of(spec, 1)
        if (b - a).sign() <= 0:
            return cls(spec)
        return cls(spec, [a, b], [value])

    def is_zero(self) -> bool:
        return not self.values

    def __bool__(self):
        return bool(self.values)

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.bps == other.bps and self.values == other.values

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.bps, self.values))
        return self._hash

    def intervals(self):
        for i, v in enumerate(self.values):
            yield self.bps[i], self.bps[i + 1], v

    def combine(self, other: "StepFunction", op) -> "StepFunction":
        """Pointwise ``op(f(t), g(t))`` for an ``op`` sending (0, 0) to 0."""
        pts = _merge_points(self.bps, other.bps)
        zero = CScalar.of(self.spec, 0)
        vals = []
        fi = gi = 0
        for t in pts[:-1]:
            if fi < len(self.bps) and self.bps[fi] == t:
                fi += 1
            if gi < len(other.bps) and other.bps[gi] == t:
                gi += 1
            fv = self.values[fi - 1] if 0 < fi <= len(self.values) else zero
            gv = other.values[gi - 1] if 0 < gi <= len(other.values) else zero
            vals.append(op(fv, gv))
        return StepFunction(self.spec, pts, vals)

    def __add__(self, other):
        return self.combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self.combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        if not self.values or not other.values:
            return StepFunction(self.spec)
        return self.combine(other, lambda a, b: a * b)

    def scale(self, s: CScalar) -> "StepFunction":
        return StepFunction(self.spec, self.bps, [v * s for v in self.values])

    def conj(self) -> "StepFunction":
        return StepFunction(self.spec, self.bps, [v.conj() for v in self.values], canonical=True)

    def transform(self, g: GroupElement) -> "StepFunction":
        """alpha_g(f) = f(g^-1 t): breakpoints b -> g(b), order preserved."""
        if g.is_identity():
            return self
        return StepFunction(self.spec, [g.apply(b) for b in self.bps], self.values, canonical=True)

    def restrict(self, a: LambdaNumber, b: LambdaNumber) -> "StepFunction":
        return self * StepFunction.chi(a, b)

    def integral(self) -> CScalar:
        total = CScalar.of(self.spec, 0)
        for a, b, v in self.intervals():
            total = total + v * (b - a)
        return total

    def is_projection(self) -> bool:
        one = CScalar.of(self.spec, 1)
        return all(v == one for v in self.values)

    def support(self) -> Optional[Tuple[LambdaNumber, LambdaNumber]]:
        return (self.bps[0], self.bps[-1]) if self.values else None

    def to_text(self) -> str:
        if not self.values:
            return "0"
        parts = []
        for a, b, v in self.intervals():
            if v:
                parts.append(f"({v.to_text()})*chi[{a.to_text()},{b.to_text()})")
        return " + ".join(parts)


def _merge_points(a: Sequence[LambdaNumber], b: Sequence[LambdaNumber]) -> List[LambdaNumber]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
            continue
        s = (a[i] - b[j]).sign()
        if s < 0:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _canonical(spec, bps: List[LambdaNumber], values: List[CScalar]):
    if not values:
        return [], []
    nb, nv = [bps[0]], []
    for i, v in enumerate(values):
        if nv and nv[-1] == v:
            nb[-1] = bps[i + 1]
        else:
            nv.append(v)
            nb.append(bps[i + 1])
    lo, hi = 0, len(nv)
    while lo < hi and nv[lo].is_zero():
        lo += 1
    while hi > lo and nv[hi - 1].is_zero():
        hi -= 1
    if lo == hi:
        return [], []
    return nb[lo:hi + 1], nv[lo:hi]


class AlgebraElement:
    """Finitely supported map GroupElement -> StepFunction (zero values never stored)."""

    __slots__ = ("spec", "terms", "_hash")

    def __init__(self, spec: LambdaSpec, terms: Optional[Mapping[GroupElement, StepFunction]] = None):
        self.spec = spec
        self.terms: Dict[GroupElement, StepFunction] = {
            g: f for g, f in (terms or {}).items() if not f.is_zero()}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, spec: LambdaSpec) -> "AlgebraElement":
        return cls(spec)

    @classmethod
    def generator(cls, f: StepFunction, g: GroupElement) -> "AlgebraElement":
        return cls(f.spec, {g: f})

    # structure ----------------------------------------------------------
    def _check(self, other: "AlgebraElement"):
        if other.spec != self.spec:
            raise SpecMismatch(f"{other.spec} vs {self.spec}")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.spec == other.spec and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def grades(self) -> List[int]:
        return sorted({g.n for g in self.terms})

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for g, f in other.terms.items():
            out[g] = out[g] + f if g in out else f
        return AlgebraElement(self.spec, out)

    def __neg__(self):
        return self.scale(CScalar.of(self.spec, -1))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "AlgebraElement":
        if not isinstance(s, CScalar):
            s = CScalar.of(self.spec, s)
        return AlgebraElement(self.spec, {g: f.scale(s) for g, f in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check(other)
        out: Dict[GroupElement, StepFunction] = {}
        for h, fx in self.terms.items():
            for k, fy in other.terms.items():
                prod = fx * fy.transform(h)
                if prod.is_zero():
                    continue
                hk = h * k
                out[hk] = out[hk] + prod if hk in out else prod
        return AlgebraElement(self.spec, out)

    def __rmul__(self, s):
        return self.scale(s)

    def adjoint(self) -> "AlgebraElement":
        out = {}
        for g, f in self.terms.items():
            gi = g.inverse()
            out[gi] = f.conj().transform(gi)
        return AlgebraElement(self.spec, out)

    @property
    def star(self) -> "AlgebraElement":
        return self.adjoint()

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for g in sorted(self.terms, key=GroupElement._sort_key):
            parts.append(f"{{{self.terms[g].to_text()}}}.d{g.to_text()}")
        return " + ".join(parts)

    def __repr__(self):
        return f"AlgebraElement({self.to_text()})"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def group(spec: LambdaSpec, n: int, c=0) -> GroupElement:
    if not isinstance(c, LambdaNumber):
        c = spec.const(c)
    return GroupElement(n, c)


def chi(spec: LambdaSpec, a, b, g: Optional[GroupElement] = None, value=None) -> AlgebraElement:
    """chi_[a,b) . delta_g (delta_1 when ``g`` is omitted)."""
    a = a if isinstance(a, LambdaNumber) else spec.const(a)
    b = b if isinstance(b, LambdaNumber) else spec.const(b)
    if value is not None and not isinstance(value, CScalar):
        value = CScalar.of(spec, value)
    g = g if g is not None else GroupElement.identity(spec)
    return AlgebraElement.generator(StepFunction.chi(a, b, value), g)


def delta_left(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    """delta_g x, which is again finitely supported."""
    return AlgebraElement(x.spec, {g * h: f.transform(g) for h, f in x.terms.items()})


def delta_right(x: AlgebraElement, g: GroupElement) -> AlgebraElement:
    """x delta_g."""
    return AlgebraElement(x.spec, {h * g: f for h, f in x.terms.items()})


def unit_e(spec: LambdaSpec) -> AlgebraElement:
    return chi(spec, 0, 1)


def alg_add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x + y


def alg_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x * y


def alg_adjoint(x: AlgebraElement) -> AlgebraElement:
    return x.adjoint()


def alg_scale(x: AlgebraElement, s: CScalar) -> AlgebraElement:
    return x.scale(s)


# ---------------------------------------------------------------------------
# Corner, fixed points and predicates
# ---------------------------------------------------------------------------

def compress_e(x: AlgebraElement) -> AlgebraElement:
    """e x e, i.e. x(g) restricted to [0,1) intersected with [g(0), g(1))."""
    spec = x.spec
    zero, one = spec.zero(), spec.one()
    out = {}
    for g, f in x.terms.items():
        a, b = g.c, g.apply(one)
        lo = a if a.sign() > 0 else zero
        hi = b if (b - one).sign() < 0 else one
        out[g] = f.restrict(lo, hi)
    return AlgebraElement(spec, out)


def is_in_Q(x: AlgebraElement) -> bool:
    return compress_e(x) == x


def is_in_F(x: AlgebraElement) -> bool:
    return is_in_Q(x) and all(g.n == 0 for g in x.terms)


def is_projection(x: AlgebraElement) -> bool:
    return x == x.adjoint() and x * x == x


def is_partial_isometry(x: AlgebraElement) -> bool:
    return x * x.adjoint() * x == x


def is_unitary_in_Q(x: AlgebraElement) -> bool:
    e = unit_e(x.spec)
    return x.adjoint() * x == e and x * x.adjoint() == e


# ---------------------------------------------------------------------------
# Grading, expectations and the KMS state
# ---------------------------------------------------------------------------

def grade_decompose(x: AlgebraElement) -> Dict[int, AlgebraElement]:
    parts: Dict[int, Dict[GroupElement, StepFunction]] = {}
    for g, f in x.terms.items():
        parts.setdefault(g.n, {})[g] = f
    return {k: AlgebraElement(x.spec, t) for k, t in sorted(parts.items())}


def phi_k(x: AlgebraElement, k: int) -> AlgebraElement:
    return AlgebraElement(x.spec, {g: f for g, f in x.terms.items() if g.n == k})


def expectation_F(x: AlgebraElement) -> AlgebraElement:
    return phi_k(x, 0)


def state_psi(x: AlgebraElement) -> CScalar:
    """Lebesgue integral of the identity component."""
    for g, f in x.terms.items():
        if g.is_identity():
            return f.integral()
    return CScalar.of(x.spec, 0)


def kms_check(x: AlgebraElement, y: AlgebraElement) -> bool:
    """lambda^k psi(x y_k) == psi(y_k x) for every grade-k part y_k of y."""
    for k, yk in grade_decompose(y).items():
        lhs = state_psi(x * yk)
        lhs = CScalar(lhs.re.mul_lambda_pow(k), lhs.im.mul_lambda_pow(k))
        if lhs != state_psi(yk * x):
            return False
    return True


# ---------------------------------------------------------------------------
# The partial isometries S_{k,m}
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def m_k(spec: LambdaSpec, k: int) -> int:
    """The integer m with m lambda^k < 1 <= (m+1) lambda^k."""
    if k < 1:
        raise IndexRange(f"m_k needs k >= 1, got {k}")
    spec.ensure_valid()
    lk = spec.lam_pow(k)

    def below_one(m):
        return (lk * m - 1).sign() < 0

    if k == 1:
        hi = 2
        while below_one(hi):
            hi *= 2
    else:
        hi = (m_k(spec, 1) + 1) ** k
    lo = 1
    # invariant: below_one(lo) and not below_one(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below_one(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _g_km(spec: LambdaSpec, k: int, m: int) -> GroupElement:
    return GroupElement(k, spec.lam_pow(k) * m)


@lru_cache(maxsize=4096)
def make_S(spec: LambdaSpec, k: int, m: int) -> AlgebraElement:
    """S_{k,m} = chi_[m lambda^k, (m+1) lambda^k) . delta_[lambda^k : m lambda^k], compressed by e.

    The compression only matters for m = m_k, where the interval sticks out of
    [0,1) unless (m_k+1) lambda^k = 1.
    """
    if k < 1 or m < 0 or m > m_k(spec, k):
        raise IndexRange(f"S_{{k,m}} needs k >= 1 and 0 <= m <= m_k, got k={k}, m={m}")
    lk = spec.lam_pow(k)
    x = chi(spec, lk * m, lk * (m + 1), _g_km(spec, k, m))
    return compress_e(x)


def make_P(spec: LambdaSpec, k: int, m: int) -> AlgebraElement:
    s = make_S(spec, k, m)
    return s * s.adjoint()


def cuntz_generators(n: int) -> List[AlgebraElement]:
    """S_0, ..., S_{n-1} generating O_n inside Q^{1/n}."""
    spec = RationalSpec(1, n)
    spec.ensure_valid()
    return [make_S(spec, 1, m) for m in range(n)]


def rank_one(x: AlgebraElement, y: AlgebraElement, z: AlgebraElement) -> AlgebraElement:
    """Theta_{x,y} z = x Phi(y* z)."""
    for name, v in (("x", x), ("y", y), ("z", z)):
        if not is_in_Q(v):
            raise NotInQ(f"{name} is not in Q^lambda")
    return x * expectation_F(y.adjoint() * z)


def stable_V(spec: LambdaSpec, n: int, k: int) -> AlgebraElement:
    """V_{n,k} = chi_[n,n+1) . delta_[1 : n-k]; V V* = e_n and V* V = e_k."""
    return chi(spec, n, n + 1, group(spec, 0, n - k))


def e_n(spec: LambdaSpec, n: int) -> AlgebraElement:
    return chi(spec, n, n + 1)
