"""K-groups of Q^lambda: Smith normal form, exterior powers and Pimsner-Voiculescu assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, gcd
from typing import List, Optional, Sequence, Tuple, Union

from .errors import IndexRange, UnsupportedSpec
from .gamma import (AlgebraicIntegerSpec, LambdaSpec, RationalSpec, SqrtReciprocalSpec,
                    TranscendentalSpec, lambda_matrix)

COUNTABLY_INFINITE = "inf"


class IntMatrix:
    """Dense integer matrix stored as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[int]], cols: Optional[int] = None):
        self.entries = tuple(tuple(int(v) for v in row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else (cols or 0)
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMatrix":
        return cls([[0] * c for _ in range(r)], c)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and (self.rows, self.cols, self.entries) == \
            (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols_b = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in cols_b]
                          for row in self.entries], other.cols)

    def __sub__(self, other):
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                         self.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix([list(c) for c in zip(*self.entries)], self.rows)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.entries])

    def to_list(self) -> List[List[int]]:
        return [list(r) for r in self.entries]

    def __repr__(self):
        return f"IntMatrix({self.to_list()})"


def _bareiss_det(a: List[List[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def block_diag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    out = [[0] * m for _ in range(n)]
    r = c = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[r + i][c + j] = b[i, j]
        r += b.rows
        c += b.cols
    return IntMatrix(out, m)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SNFResult:
    P: IntMatrix
    D: IntMatrix
    Q: IntMatrix

    def diagonal(self) -> List[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d)


def snf(M: IntMatrix) -> SNFResult:
    """Unimodular P, Q with P M Q = D diagonal, d_1 | d_2 | ..., zeros last.

    Pivot rule: the nonzero entry of smallest absolute value in the remaining
    block, first in row-major order.
    """
    r, c = M.rows, M.cols
    A = [list(row) for row in M.entries]
    Pm = [[int(i == j) for j in range(r)] for i in range(r)]
    Qm = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        Pm[i], Pm[j] = Pm[j], Pm[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in Qm:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f * row src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        Pm[dst] = [a + f * b for a, b in zip(Pm[dst], Pm[src])]

    def add_col(src, dst, f):  # col dst += f * col src
        for row in A:
            row[dst] += f * row[src]
        for row in Qm:
            row[dst] += f * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            # bring the smallest entry of row t / column t to the pivot, then reduce
            while True:
                cand = [(abs(A[i][t]), 0, i) for i in range(t, r) if A[i][t]]
                cand += [(abs(A[t][j]), 1, j) for j in range(t + 1, c) if A[t][j]]
                _, axis, idx = min(cand)
                if axis == 0:
                    swap_rows(t, idx)
                else:
                    swap_cols(t, idx)
                piv = A[t][t]
                for i in range(t + 1, r):
                    if A[i][t]:
                        add_row(t, i, -(A[i][t] // piv))
                for j in range(t + 1, c):
                    if A[t][j]:
                        add_col(t, j, -(A[t][j] // piv))
                if not any(A[i][t] for i in range(t + 1, r)) and not any(A[t][j] for j in range(t + 1, c)):
                    break
            # divisibility: the pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            Pm[t] = [-a for a in Pm[t]]
        t += 1
    return SNFResult(IntMatrix(Pm, r), IntMatrix(A, c), IntMatrix(Qm, c))


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------

Rank = Union[int, str]


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: Rank = 0
    invariant_factors: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(self.invariant_factors))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> Optional[int]:
        if not self.is_finite():
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def has_z2_summand(self) -> bool:
        """True iff Z/2 is a direct summand (some invariant factor is exactly 2 mod 4 = 2 * odd)."""
        return any(d % 2 == 0 and d % 4 != 0 for d in self.invariant_factors)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, d: dict) -> "FGAbelianGroup":
        return cls(d["free_rank"], tuple(d["invariant_factors"]))

    def to_text(self) -> str:
        parts = []
        if self.free_rank == COUNTABLY_INFINITE:
            parts.append("Z^inf")
        elif self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_text()


def canonicalize(cyclic_orders: Sequence[int], rank: Rank = 0) -> FGAbelianGroup:
    """Invariant-factor form of Z^rank + sum Z/n_i.

    Orders are taken in absolute value; 0 means a copy of Z and 1 is dropped.
    Uses repeated gcd/lcm exchange, which yields the same chain as prime-power
    regrouping without factoring.
    """
    extra = 0
    orders = []
    for n in cyclic_orders:
        n = abs(int(n))
        if n == 0:
            extra += 1
        elif n > 1:
            orders.append(n)
    if rank != COUNTABLY_INFINITE:
        rank = rank + extra
    # (a, b) -> (gcd, lcm) until the sorted list is a divisibility chain
    changed = True
    while changed:
        changed = False
        orders.sort()
        for i in range(len(orders)):
            for j in range(i + 1, len(orders)):
                a, b = orders[i], orders[j]
                if b % a:
                    g = gcd(a, b)
                    orders[i], orders[j] = g, a * b // g
                    changed = True
        orders = [o for o in orders if o > 1]
    return FGAbelianGroup(rank, tuple(sorted(orders)))


def coker_group(M: IntMatrix) -> FGAbelianGroup:
    """Z^rows / M Z^cols."""
    res = snf(M)
    diag = res.diagonal()
    rank = sum(1 for d in diag if d)
    return canonicalize([d for d in diag if d], M.rows - rank)


def ker_rank(M: IntMatrix) -> int:
    return M.cols - snf(M).rank()


# ---------------------------------------------------------------------------
# Exterior powers
# ---------------------------------------------------------------------------

def exterior_power(L: IntMatrix, k: int) -> IntMatrix:
    """Matrix of the k-th exterior power: k x k minors indexed by sorted k-subsets (lex order)."""
    d = L.rows
    if L.rows != L.cols:
        raise ValueError("exterior power of a non-square matrix")
    if not 0 <= k <= d:
        raise IndexRange(f"exterior power index {k} outside 0..{d}")
    subsets = list(combinations(range(d), k))
    out = []
    for rows in subsets:
        out.append([_bareiss_det([[L[i, j] for j in cols] for i in rows]) for cols in subsets])
    return IntMatrix(out, len(subsets))


# ---------------------------------------------------------------------------
# K-groups
# ---------------------------------------------------------------------------

CLOSED_FORM_RATIONAL = "CLOSED_FORM_RATIONAL"
SNF_PV = "SNF_PV"
CLOSED_FORM_SQRT = "CLOSED_FORM_SQRT"
CLOSED_FORM_TRANSCENDENTAL = "CLOSED_FORM_TRANSCENDENTAL"


@dataclass
class KTheoryResult:
    k0: FGAbelianGroup
    k1: FGAbelianGroup
    method: str
    intermediates: dict = field(default_factory=dict)

    def to_json(self, with_intermediates: bool = True) -> dict:
        out = {"k0": self.k0.to_json(), "k1": self.k1.to_json(), "method": self.method}
        if with_intermediates and self.intermediates:
            out["intermediates"] = self.intermediates
        return out

    @classmethod
    def from_json(cls, d: dict) -> "KTheoryResult":
        return cls(FGAbelianGroup.from_json(d["k0"]), FGAbelianGroup.from_json(d["k1"]),
                   d["method"], d.get("intermediates", {}))


def _snf_audit(M: IntMatrix, res: SNFResult) -> dict:
    return {"M": M.to_list(), "P": res.P.to_list(), "D": res.D.to_list(), "Q": res.Q.to_list()}


def k_groups(spec: LambdaSpec) -> KTheoryResult:
    spec.ensure_valid()
    if isinstance(spec, RationalSpec):
        return KTheoryResult(canonicalize([spec.q - spec.p]), FGAbelianGroup(), CLOSED_FORM_RATIONAL)
    if isinstance(spec, SqrtReciprocalSpec):
        g = canonicalize([spec.n - 1])
        return KTheoryResult(g, g, CLOSED_FORM_SQRT)
    if isinstance(spec, TranscendentalSpec):
        g = FGAbelianGroup(COUNTABLY_INFINITE)
        return KTheoryResult(g, g, CLOSED_FORM_TRANSCENDENTAL)
    if not isinstance(spec, AlgebraicIntegerSpec):
        raise UnsupportedSpec(f"no K-theory for spec kind {spec.kind}")

    L = lambda_matrix(spec)
    d = L.rows
    odd = [exterior_power(L, k) for k in range(1, d + 1, 2)]
    even = [exterior_power(L, k) for k in range(2, d + 1, 2)]
    # K_0(A_0) carrier: odd exterior powers; K_1(A_0): even powers >= 2 (the Z.1 in degree 0 quotiented)
    m_odd = IntMatrix.identity(sum(b.rows for b in odd)) - block_diag(odd)
    m_even_size = sum(b.rows for b in even)
    m_even = IntMatrix.identity(m_even_size) - block_diag(even) if even else IntMatrix.zeros(0, 0)
    s_odd, s_even = snf(m_odd), snf(m_even)
    coker_odd, coker_even = coker_group(m_odd), coker_group(m_even)
    ker_odd, ker_even = ker_rank(m_odd), ker_rank(m_even)
    k0 = canonicalize(list(coker_odd.invariant_factors), coker_odd.free_rank + ker_even)
    k1 = canonicalize(list(coker_even.invariant_factors), coker_even.free_rank + ker_odd)
    inter = {
        "L": L.to_list(),
        "odd": _snf_audit(m_odd, s_odd),
        "even": _snf_audit(m_even, s_even),
        "splitting": "PV extensions split: the kernels are subgroups of free groups, hence free",
    }
    return KTheoryResult(k0, k1, SNF_PV, inter)


@dataclass
class ClassificationReport:
    stable_O_n: Optional[int] = None
    unital_O_n: Optional[int] = None
    is_Q_N: bool = False
    cuntz_krieger_possible: bool = False
    notes: str = ""

    def to_json(self) -> dict:
        return {"stable_O_n": self.stable_O_n, "unital_O_n": self.unital_O_n, "is_Q_N": self.is_Q_N,
                "cuntz_krieger_possible": self.cuntz_krieger_possible, "notes": self.notes}

    @classmethod
    def from_json(cls, d: dict) -> "ClassificationReport":
        return cls(d["stable_O_n"], d["unital_O_n"], d["is_Q_N"], d["cuntz_krieger_possible"],
                   d["notes"])


def classify(result: KTheoryResult, spec: LambdaSpec) -> ClassificationReport:
    k0, k1 = result.k0, result.k1
    rep = ClassificationReport()
    notes = []
    if k1.is_trivial() and k0.is_finite() and len(k0.invariant_factors) <= 1:
        rep.stable_O_n = k0.order() + 1
        notes.append(f"K-groups of O_{rep.stable_O_n}; stably isomorphic by Kirchberg-Phillips")
        if isinstance(spec, AlgebraicIntegerSpec):
            n = rep.stable_O_n
            notes.append(f"O_{n}: n = {n} is {'' if n % 4 == 3 else 'not '}congruent to 3 mod 4")
    if isinstance(spec, RationalSpec):
        rep.unital_O_n = spec.q - spec.p + 1
        notes.append("the unit generates K_0, so the isomorphism with O_n is unital")
    rep.is_Q_N = (k0.free_rank == COUNTABLY_INFINITE and not k0.invariant_factors
                  and k1.free_rank == COUNTABLY_INFINITE and not k1.invariant_factors)
    if rep.is_Q_N:
        notes.append("K-groups of Q_N")
    rep.cuntz_krieger_possible = not k1.invariant_factors and k1.free_rank != COUNTABLY_INFINITE
    if k1.invariant_factors:
        notes.append("K_1 has torsion, so not a Cuntz-Krieger algebra")
    rep.notes = "; ".join(notes)
    return rep


def exterior_ranks(d: int) -> Tuple[int, int]:
    """(rank of the even part, rank of the odd part) of the exterior algebra on Z^d."""
    return (sum(comb(d, k) for k in range(0, d + 1, 2)), sum(comb(d, k) for k in range(1, d + 1, 2)))
