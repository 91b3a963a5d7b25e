"""Modular partial isometries, modular unitaries and exact spectral-flow values.

The spectral flow attached to a modular partial isometry (or unitary) ``v``
is computed as the algebraic value

    sf(v) = sum_i psi( (v [D, v*])_ii ),

where ``[D, x]`` multiplies the grade-k part of ``x`` by ``k`` and ``psi`` is
the KMS state.  Matrices over Q^lambda are dense arrays of AlgebraElements
and the matrix trace is not normalised.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .algebra import (AlgebraElement, grade_decompose, is_in_F, m_k, make_P,
                      make_S, phi_k, state_psi, unit_e)
from .errors import IndexRange, NotModular, NotPartialIsometry
from .gamma import CScalar, LambdaNumber, LambdaSpec


class MatrixElement:
    """r x r matrix with AlgebraElement entries, all over one spec."""

    __slots__ = ("spec", "r", "entries")

    def __init__(self, spec: LambdaSpec, entries: Sequence[Sequence[AlgebraElement]]):
        self.spec = spec
        self.entries = tuple(tuple(row) for row in entries)
        self.r = len(self.entries)
        if any(len(row) != self.r for row in self.entries):
            raise ValueError("MatrixElement must be square")

    @classmethod
    def scalar(cls, x: AlgebraElement) -> "MatrixElement":
        return cls(x.spec, [[x]])

    @classmethod
    def identity(cls, spec: LambdaSpec, r: int) -> "MatrixElement":
        e, z = unit_e(spec), AlgebraElement.zero(spec)
        return cls(spec, [[e if i == j else z for j in range(r)] for i in range(r)])

    @classmethod
    def zero(cls, spec: LambdaSpec, r: int) -> "MatrixElement":
        z = AlgebraElement.zero(spec)
        return cls(spec, [[z] * r for _ in range(r)])

    def __getitem__(self, ij) -> AlgebraElement:
        i, j = ij
        return self.entries[i][j]

    def map(self, fn) -> "MatrixElement":
        return MatrixElement(self.spec, [[fn(x) for x in row] for row in self.entries])

    def __add__(self, other: "MatrixElement") -> "MatrixElement":
        return MatrixElement(self.spec, [[a + b for a, b in zip(r1, r2)]
                                         for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixElement") -> "MatrixElement":
        return MatrixElement(self.spec, [[a - b for a, b in zip(r1, r2)]
                                         for r1, r2 in zip(self.entries, other.entries)])

    def __mul__(self, other) -> "MatrixElement":
        if not isinstance(other, MatrixElement):
            return self.map(lambda x: x.scale(other))
        n = self.r
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = AlgebraElement.zero(self.spec)
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixElement(self.spec, out)

    def adjoint(self) -> "MatrixElement":
        n = self.r
        return MatrixElement(self.spec, [[self.entries[j][i].adjoint() for j in range(n)]
                                         for i in range(n)])

    def __eq__(self, other):
        return isinstance(other, MatrixElement) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def grades(self) -> List[int]:
        return sorted({k for row in self.entries for x in row for k in x.grades()})

    def grade_part(self, k: int) -> "MatrixElement":
        return self.map(lambda x: phi_k(x, k))

    def trace_psi(self) -> CScalar:
        total = CScalar.of(self.spec, 0)
        for i in range(self.r):
            total = total + state_psi(self.entries[i][i])
        return total

    def to_text(self) -> str:
        return "[" + "; ".join(", ".join(x.to_text() for x in row) for row in self.entries) + "]"


def as_matrix(x) -> MatrixElement:
    return x if isinstance(x, MatrixElement) else MatrixElement.scalar(x)


def block(spec: LambdaSpec, blocks: Sequence[Sequence[MatrixElement]]) -> MatrixElement:
    """Assemble a block matrix from square blocks of equal size."""
    r = blocks[0][0].r
    rows = []
    for brow in blocks:
        for i in range(r):
            rows.append([x for b in brow for x in b.entries[i]])
    return MatrixElement(spec, rows)


# ---------------------------------------------------------------------------
# The commutator with D and the modular condition
# ---------------------------------------------------------------------------

def _d_entry(x: AlgebraElement) -> AlgebraElement:
    out = AlgebraElement.zero(x.spec)
    for k, part in grade_decompose(x).items():
        if k:
            out = out + part.scale(k)
    return out


def d_commutator(x) -> MatrixElement:
    """[D, x]: the grade-k part of every entry is multiplied by k."""
    return as_matrix(x).map(_d_entry)


def is_partial_isometry_matrix(v: MatrixElement) -> bool:
    return v * v.adjoint() * v == v


def _grades_orthogonal(v: MatrixElement) -> bool:
    """v_k v_l* = 0 and v_k* v_l = 0 for distinct grades k, l (the adjoints cover l, k)."""
    parts = [v.grade_part(k) for k in v.grades()]
    for i, vk in enumerate(parts):
        for vl in parts[i + 1:]:
            if not (vk * vl.adjoint()).is_zero() or not (vk.adjoint() * vl).is_zero():
                return False
    return True


def is_modular_pi(v) -> bool:
    """Partial isometry with range and source in F and vanishing cross-grade products.

    Anything that is not a partial isometry is reported as not modular;
    :func:`require_modular_pi` raises the specific error instead.
    """
    v = as_matrix(v)
    vs = v.adjoint()
    rng = v * vs
    if rng * v != v:
        return False
    for p in (rng, vs * v):
        if not all(is_in_F(x) for row in p.entries for x in row):
            return False
    return _grades_orthogonal(v)


def require_modular_pi(v) -> MatrixElement:
    v = as_matrix(v)
    if not is_partial_isometry_matrix(v):
        raise NotPartialIsometry("v v* v != v")
    if not is_modular_pi(v):
        raise NotModular("v is not a modular partial isometry")
    return v


def is_unitary(u: MatrixElement) -> bool:
    one = MatrixElement.identity(u.spec, u.r)
    return u.adjoint() * u == one and u * u.adjoint() == one


def modular_unitary_from_pi(v) -> MatrixElement:
    """u_v = [[1 - v*v, v*], [v, 1 - vv*]]."""
    v = require_modular_pi(v)
    one = MatrixElement.identity(v.spec, v.r)
    vs = v.adjoint()
    return block(v.spec, [[one - vs * v, vs], [v, one - v * vs]])


# ---------------------------------------------------------------------------
# Spectral flow
# ---------------------------------------------------------------------------

def _sf_value(v: MatrixElement) -> LambdaNumber:
    val = (v * d_commutator(v.adjoint())).trace_psi()
    if not val.is_real():
        raise AssertionError(f"spectral flow has imaginary part {val.im.to_text()}")
    return val.re


def sf_partial_isometry(v) -> LambdaNumber:
    v = require_modular_pi(v)
    return _sf_value(v)


def sf_unitary(u) -> LambdaNumber:
    u = as_matrix(u)
    if not is_unitary(u):
        raise NotModular("u is not unitary")
    # a unitary is a partial isometry whose range and source are 1, so only
    # the grading condition is left to check
    if not _grades_orthogonal(u):
        raise NotModular("u is not a modular unitary")
    return _sf_value(u)


# ---------------------------------------------------------------------------
# The example families
# ---------------------------------------------------------------------------

def build_v_double_index(spec: LambdaSpec, k: int, m: int, j: int, n: int) -> AlgebraElement:
    if not (0 <= m < m_k(spec, k) and 0 <= n < m_k(spec, j)):
        raise IndexRange(f"need m < m_k and n < m_j, got k={k}, m={m}, j={j}, n={n}")
    return make_S(spec, j, n) * make_S(spec, k, m).adjoint()


def build_u_double_index(spec: LambdaSpec, k: int, m: int, j: int, n: int) -> MatrixElement:
    """u_v for v = S_{j,n} S_{k,m}^*."""
    return modular_unitary_from_pi(build_v_double_index(spec, k, m, j, n))


def build_v_leftover(spec: LambdaSpec, j: int, k: int) -> AlgebraElement:
    if j < 1 or k < 1:
        raise IndexRange(f"need j, k >= 1, got j={j}, k={k}")
    return make_S(spec, j, m_k(spec, j)) * make_S(spec, k, m_k(spec, k)).adjoint()


def build_u_leftover(spec: LambdaSpec, j: int, k: int) -> MatrixElement:
    """u_v for v = S_{j,m_j} S_{k,m_k}^*."""
    return modular_unitary_from_pi(build_v_leftover(spec, j, k))


def tau_P(spec: LambdaSpec, k: int, m: int) -> LambdaNumber:
    return state_psi(make_P(spec, k, m)).re


def leftover_gap(spec: LambdaSpec, k: int) -> LambdaNumber:
    """c_k = lambda^-k - m_k, the length of the source interval of S_{k,m_k}."""
    return spec.lam_pow(-k) - m_k(spec, k)


def sf_formula_double_index(spec: LambdaSpec, k: int, j: int) -> LambdaNumber:
    """(k - j)(lambda^j - lambda^k)."""
    return (spec.lam_pow(j) - spec.lam_pow(k)) * (k - j)


def sf_formula_leftover_published(spec: LambdaSpec, j: int, k: int) -> LambdaNumber:
    """(k - j)[lambda^j (lambda^-k - m_k) - lambda^k (lambda^-j - m_j)], as published."""
    return (spec.lam_pow(j) * leftover_gap(spec, k) - spec.lam_pow(k) * leftover_gap(spec, j)) * (k - j)


def sf_formula_leftover(spec: LambdaSpec, j: int, k: int) -> LambdaNumber:
    """(k - j)(lambda^j - lambda^k) min(c_j, c_k).

    Range and source of v = S_{j,m_j} S_{k,m_k}^* both have length
    min(c_j, c_k) before rescaling, which gives this value.  It agrees with
    the published formula exactly when c_j = c_k.
    """
    cj, ck = leftover_gap(spec, j), leftover_gap(spec, k)
    c = cj if (cj - ck).sign() <= 0 else ck
    return sf_formula_double_index(spec, k, j) * c


# ---------------------------------------------------------------------------
# Mapping cone projection
# ---------------------------------------------------------------------------

def mapping_cone_projection(v, t) -> MatrixElement:
    """e_v(t) = [[1 - vv*/(1+t^2), -i v t/(1+t^2)], [i v* t/(1+t^2), v*v/(1+t^2)]]."""
    v = require_modular_pi(v)
    t = Fraction(t)
    spec = v.spec
    s = Fraction(1) / (1 + t * t)
    r = t * s
    one = MatrixElement.identity(spec, v.r)
    vs = v.adjoint()
    return block(spec, [
        [one - (v * vs) * CScalar.of(spec, s), v * CScalar.of(spec, 0, -r)],
        [vs * CScalar.of(spec, 0, r), (vs * v) * CScalar.of(spec, s)],
    ])


def is_projection_matrix(p: MatrixElement) -> bool:
    return p == p.adjoint() and p * p == p
