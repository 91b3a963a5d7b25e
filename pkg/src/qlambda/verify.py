"""Randomised verification suites, shared by the CLI ``verify`` command and the tests.

Every suite takes a spec, a ``random.Random`` and a case budget and returns a
:class:`SuiteResult`.  Cases whose signs cannot be decided for a
transcendental spec are counted as skipped rather than failed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

from .algebra import (AlgebraElement, GroupElement, chi, compress_e, e_n, expectation_F,
                      grade_decompose, is_partial_isometry, kms_check, m_k, make_S, phi_k,
                      rank_one, stable_V, state_psi, unit_e)
from .errors import PrecisionExhausted
from .gamma import (AlgebraicIntegerSpec, CScalar, LambdaNumber, LambdaSpec, RationalSpec,
                    SqrtReciprocalSpec, algebraic_specs_for, approx, lambda_matrix, validate_spec)
from .ktheory import IntMatrix, coker_group, exterior_ranks, k_groups, snf
from .modular import (MatrixElement, build_v_double_index, d_commutator,
                      modular_unitary_from_pi, sf_formula_double_index, sf_partial_isometry,
                      sf_unitary)

SUITES = ("ring", "algebra", "cuntz", "kms", "smusub", "phiformula", "snf", "ranks", "sfpos")


@dataclass
class SuiteResult:
    name: str
    status: str  # "pass", "fail" or "skip"
    checked: int = 0
    skipped: int = 0
    counterexample: Optional[str] = None
    message: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "checked": self.checked,
                "skipped": self.skipped, "counterexample": self.counterexample,
                "message": self.message}

    @classmethod
    def from_json(cls, d: dict) -> "SuiteResult":
        return cls(d["name"], d["status"], d["checked"], d["skipped"], d["counterexample"],
                   d["message"])


class _Counter:
    """Collects checks; the first failing check becomes the counterexample."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.skipped = 0
        self.failure: Optional[str] = None

    def check(self, ok: bool, describe: Callable[[], str]):
        self.checked += 1
        if not ok and self.failure is None:
            self.failure = describe()

    def result(self, message: str = "") -> SuiteResult:
        status = "fail" if self.failure else "pass"
        return SuiteResult(self.name, status, self.checked, self.skipped, self.failure, message)


# ---------------------------------------------------------------------------
# Random generators
# ---------------------------------------------------------------------------

def random_gamma(spec: LambdaSpec, rng: random.Random, terms: int = 3, span: int = 3,
                 coeff: int = 9) -> LambdaNumber:
    """Random integer combination of powers of lambda."""
    x = spec.zero()
    for _ in range(rng.randint(1, terms)):
        x = x + spec.lam_pow(rng.randint(-span, span)) * rng.randint(-coeff, coeff)
    return x


def random_scalar(spec: LambdaSpec, rng: random.Random, complex_ok: bool = True) -> CScalar:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    im = Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if complex_ok and rng.random() < 0.5 else 0
    if re == 0 and im == 0:
        re = Fraction(1)
    return CScalar.of(spec, re, im)


def grid(spec: LambdaSpec, j: int) -> List[LambdaNumber]:
    """The points m lambda^j in [0,1) together with 1."""
    lj = spec.lam_pow(j)
    return [lj * m for m in range(m_k(spec, j) + 1)] + [spec.one()]


def random_generator(spec: LambdaSpec, rng: random.Random, grade: Optional[int] = None,
                     max_level: int = 3, tries: int = 50) -> AlgebraElement:
    """Random nonzero ``e (c chi_[a,b) delta_g) e`` with grid breakpoints.

    Raises PrecisionExhausted if no decidable sample turns up within ``tries``.
    """
    last = None
    for _ in range(tries):
        try:
            n = rng.randint(-2, 2) if grade is None else grade
            j = rng.randint(1, max_level)
            pts = grid(spec, j)
            a, b = sorted(rng.sample(range(len(pts)), 2))
            src, dst = rng.choice(pts[:-1]), rng.choice(pts[:-1])
            # g maps src to dst
            g = GroupElement(n, dst - src.mul_lambda_pow(n))
            x = chi(spec, pts[a], pts[b], g, random_scalar(spec, rng))
            x = compress_e(x)
            if not x.is_zero():
                return x
        except PrecisionExhausted as exc:
            last = exc
    raise last or PrecisionExhausted("no nonzero random generator found")


def random_element(spec: LambdaSpec, rng: random.Random, terms: int = 3) -> AlgebraElement:
    x = AlgebraElement.zero(spec)
    for _ in range(rng.randint(1, terms)):
        x = x + random_generator(spec, rng)
    return x


def random_int_matrix(rng: random.Random, max_size: int = 6, bound: int = 9) -> IntMatrix:
    r, c = rng.randint(1, max_size), rng.randint(1, max_size)
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)], c)


def random_algebraic_spec(rng: random.Random, max_degree: int = 5, bound: int = 6,
                          tries: int = 1000) -> AlgebraicIntegerSpec:
    """Random valid monic polynomial with unit constant term and a root in (0,1)."""
    for _ in range(tries):
        d = rng.randint(2, max_degree)
        coeffs = (rng.choice((1, -1)),) + tuple(rng.randint(-bound, bound) for _ in range(d - 1)) + (1,)
        specs = algebraic_specs_for(coeffs)
        if not specs:
            continue
        spec = rng.choice(specs)
        rep = validate_spec(spec)
        if rep.ok and rep.irreducibility == "irreducible":
            return spec
    raise RuntimeError("could not sample a valid algebraic spec")


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _skip(name, why) -> SuiteResult:
    return SuiteResult(name, "skip", message=why)


def suite_ring(spec, rng, cases) -> SuiteResult:
    c = _Counter("ring")
    for _ in range(cases):
        x, y, z = (random_gamma(spec, rng) for _ in range(3))
        c.check((x * y) * z == x * (y * z), lambda: f"associativity fails for {x}, {y}, {z}")
        c.check(x * y == y * x, lambda: f"commutativity fails for {x}, {y}")
        c.check(x * (y + z) == x * y + x * z, lambda: f"distributivity fails for {x}, {y}, {z}")
        k = rng.randint(-8, 8)
        c.check(x.mul_lambda_pow(k).mul_lambda_pow(-k) == x, lambda: f"lambda^{k} round trip fails on {x}")
        if isinstance(spec, RationalSpec):
            lam = Fraction(spec.p, spec.q)
            a, b = rng.randint(-50, 50), rng.randint(-3, 3)
            lhs = (spec.const(a) * spec.lam_pow(b)).as_rational()
            c.check(lhs == a * lam ** b, lambda: f"rational oracle mismatch for {a}*lambda^{b}")
        if isinstance(spec, SqrtReciprocalSpec):
            a, b, cc, e = (Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(4))
            u = spec.const(a) + spec.lam_pow(-1) * b
            v = spec.const(cc) + spec.lam_pow(-1) * e
            want = spec.const(a * cc + spec.n * b * e) + spec.lam_pow(-1) * (a * e + b * cc)
            c.check(u * v == want, lambda: f"sqrt product mismatch for {u}, {v}")
        try:
            s = x.sign()
            if s:
                bits = 8
                while True:
                    a = approx(x, bits)
                    if Fraction(1, 2 ** bits) < abs(a):
                        break
                    bits *= 2
                c.check((a > 0) == (s > 0), lambda: f"sign/approx disagree on {x}")
        except PrecisionExhausted:
            c.skipped += 1
    if isinstance(spec, AlgebraicIntegerSpec):
        lam = spec.lam()
        val = spec.zero()
        for i, a in enumerate(spec.coeffs):
            val = val + lam ** i * a
        c.check(val.is_zero(), lambda: "lambda is not a root of its minimal polynomial")
    return c.result()


def suite_algebra(spec, rng, cases) -> SuiteResult:
    c = _Counter("algebra")
    e = unit_e(spec)
    for _ in range(cases):
        try:
            x, y, z = (random_element(spec, rng, 2) for _ in range(3))
            c.check((x * y) * z == x * (y * z), lambda: f"associativity fails for {x}, {y}, {z}")
            c.check((x * y).adjoint() == y.adjoint() * x.adjoint(), lambda: f"(xy)* != y*x* for {x}, {y}")
            c.check(e * x == x and x * e == x, lambda: f"e is not a unit for {x}")
            p = state_psi(x.adjoint() * x)
            c.check(p.is_real() and p.re.sign() >= 0, lambda: f"psi(x*x) = {p} for {x}")
            parts = grade_decompose(x)
            total = AlgebraElement.zero(spec)
            for k, xk in parts.items():
                total = total + phi_k(x, k)
                c.check(phi_k(xk, k) == xk, lambda: f"phi_{k} not idempotent on {x}")
                for l in parts:
                    if l != k:
                        c.check(phi_k(xk, l).is_zero(), lambda: f"phi_{l} phi_{k} != 0 on {x}")
            c.check(total == x, lambda: f"grades do not sum to {x}")
            hx, hy = random_generator(spec, rng), random_generator(spec, rng)
            lhs = d_commutator(hx * hy)
            rhs = d_commutator(hx) * MatrixElement.scalar(hy) + MatrixElement.scalar(hx) * d_commutator(hy)
            c.check(lhs == rhs, lambda: f"[D, .] is not a derivation on {hx}, {hy}")
        except PrecisionExhausted:
            c.skipped += 1
    for n in range(-3, 4):
        for k in range(-3, 4):
            v = stable_V(spec, n, k)
            c.check(v * v.adjoint() == e_n(spec, n) and v.adjoint() * v == e_n(spec, k),
                    lambda: f"V_{{{n},{k}}} relations fail")
    return c.result()


def suite_cuntz(spec, rng, cases) -> SuiteResult:
    if not (isinstance(spec, RationalSpec) and spec.p == 1):
        return _skip("cuntz", "Cuntz relations apply to lambda = 1/n only")
    c = _Counter("cuntz")
    n = spec.q
    e = unit_e(spec)
    gens = [make_S(spec, 1, m) for m in range(n)]
    total = AlgebraElement.zero(spec)
    for m, s in enumerate(gens):
        c.check(s.adjoint() * s == e, lambda: f"S_{m}* S_{m} != e")
        total = total + s * s.adjoint()
    c.check(total == e, lambda: "sum S_m S_m* != e")
    for _ in range(cases):
        k = rng.randint(1, 3)
        word = [rng.randrange(n) for _ in range(k)]
        prod = gens[word[0]]
        idx = word[0]
        for w in word[1:]:
            prod = prod * gens[w]
            idx = idx * n + w
        c.check(prod == make_S(spec, k, idx), lambda: f"S-word {word} != S_{{{k},{idx}}}")
    return c.result()


def suite_kms(spec, rng, cases) -> SuiteResult:
    c = _Counter("kms")
    for _ in range(cases):
        try:
            x = random_generator(spec, rng)
            y = random_generator(spec, rng)
            c.check(kms_check(x, y), lambda: f"KMS identity fails for x={x}, y={y}")
        except PrecisionExhausted:
            c.skipped += 1
    return c.result()


def suite_smusub(spec, rng, cases, max_k: int = 3) -> SuiteResult:
    c = _Counter("smusub")
    e = unit_e(spec)
    for k in range(1, max_k + 1):
        try:
            mk = m_k(spec, k)
        except PrecisionExhausted:
            c.skipped += 1
            continue
        total = AlgebraElement.zero(spec)
        for m in range(mk + 1):
            s = make_S(spec, k, m)
            c.check(is_partial_isometry(s), lambda: f"S_{{{k},{m}}} is not a partial isometry")
            if m < mk:
                c.check(s.adjoint() * s == e, lambda: f"S_{{{k},{m}}}* S_{{{k},{m}}} != e")
            else:
                gap = spec.lam_pow(-k) - mk
                c.check(s.adjoint() * s == chi(spec, 0, gap),
                        lambda: f"S_{{{k},{m}}}* S_{{{k},{m}}} != chi_[0, lambda^-{k} - m_{k})")
            total = total + s * s.adjoint()
        c.check(total == e, lambda: f"sum_m S_{{{k},m}} S_{{{k},m}}* != e")
    return c.result()


def phiformula_checks(spec, z: AlgebraElement, c: _Counter, max_k: int = 3):
    e = unit_e(spec)
    c.check(rank_one(e, e, z) == expectation_F(z), lambda: f"Theta_(e,e) != Phi_0 on {z}")
    for k in range(1, max_k + 1):
        mk = m_k(spec, k)
        total = AlgebraElement.zero(spec)
        for m in range(mk + 1):
            s = make_S(spec, k, m)
            total = total + rank_one(s, s, z)
        c.check(total == phi_k(z, k), lambda: f"sum Theta_(S,S) != Phi_{k} on {z}")
        exact = spec.lam_pow(-k) == mk + 1
        for m in range(mk + 1 if exact else mk):
            s = make_S(spec, k, m).adjoint()
            c.check(rank_one(s, s, z) == phi_k(z, -k),
                    lambda: f"Theta_(S*_{{{k},{m}}}, S*) != Phi_-{k} on {z}")


def suite_phiformula(spec, rng, cases) -> SuiteResult:
    c = _Counter("phiformula")
    for _ in range(cases):
        try:
            z = random_element(spec, rng, 3)
            phiformula_checks(spec, z, c)
        except PrecisionExhausted:
            c.skipped += 1
    return c.result()


def snf_checks(M: IntMatrix, c: _Counter):
    res = snf(M)
    P_, D, Q = res.P, res.D, res.Q
    c.check(P_ @ M @ Q == D, lambda: f"PMQ != D for {M}")
    c.check(abs(P_.det()) == 1 and abs(Q.det()) == 1, lambda: f"P or Q not unimodular for {M}")
    diag = res.diagonal()
    off = all(D[i, j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)
    c.check(off, lambda: f"D not diagonal for {M}")
    nz = [d for d in diag if d]
    chain = all(d > 0 for d in nz) and all(b % a == 0 for a, b in zip(nz, nz[1:]))
    zeros_last = all(d == 0 for d in diag[len(nz):])
    c.check(chain and zeros_last, lambda: f"divisibility/ordering fails, diagonal {diag} for {M}")
    if M.rows == M.cols:
        det = M.det()
        if det:
            c.check(coker_group(M).order() == abs(det), lambda: f"|coker| != |det| for {M}")


def suite_snf(spec, rng, cases, max_size: int = 8) -> SuiteResult:
    c = _Counter("snf")
    for _ in range(cases):
        snf_checks(random_int_matrix(rng, max_size), c)
    return c.result()


def structural_checks(spec: AlgebraicIntegerSpec, c: _Counter):
    r = k_groups(spec)
    d, a0 = spec.d, spec.coeffs[0]
    desc = spec.to_text()
    c.check(r.k0.free_rank == r.k1.free_rank, lambda: f"free ranks differ for {desc}: {r.k0}, {r.k1}")
    c.check(lambda_matrix(spec).det() in (1, -1), lambda: f"det L not a unit for {desc}")
    even, odd = exterior_ranks(d)
    c.check(even == odd == 2 ** (d - 1), lambda: f"exterior ranks wrong for d={d}")
    if d % 2 and a0 == 1:
        c.check(r.k0.has_z2_summand(), lambda: f"no Z/2 summand in K_0 for {desc}: {r.k0}")
    elif d % 2 and a0 == -1:
        c.check(r.k0.free_rank >= 1, lambda: f"K_0 has no free part for {desc}: {r.k0}")
    elif a0 == 1:
        c.check(r.k1.free_rank >= 1, lambda: f"K_1 has no free part for {desc}: {r.k1}")
    else:
        c.check(r.k1.has_z2_summand(), lambda: f"no Z/2 summand in K_1 for {desc}: {r.k1}")


def suite_ranks(spec, rng, cases) -> SuiteResult:
    c = _Counter("ranks")
    if isinstance(spec, AlgebraicIntegerSpec):
        structural_checks(spec, c)
    for _ in range(cases):
        structural_checks(random_algebraic_spec(rng), c)
    return c.result()


def suite_sfpos(spec, rng, cases, max_k: int = 3) -> SuiteResult:
    c = _Counter("sfpos")
    for k in range(1, max_k + 1):
        for j in range(1, max_k + 1):
            if j == k:
                continue
            try:
                mk, mj = m_k(spec, k), m_k(spec, j)
                m, n = rng.randrange(mk), rng.randrange(mj)
                v = build_v_double_index(spec, k, m, j, n)
                u = modular_unitary_from_pi(v)
                val = sf_unitary(u)
                want = sf_formula_double_index(spec, k, j)
                c.check(val == want, lambda: f"sf(u) = {val}, formula {want} (k={k},m={m},j={j},n={n})")
                c.check(val.sign() > 0, lambda: f"sf(u) = {val} not positive (k={k}, j={j})")
                c.check(val.is_gamma(), lambda: f"sf(u) = {val} not in Gamma")
                split = sf_partial_isometry(v) + sf_partial_isometry(v.adjoint())
                c.check(val == split, lambda: f"sf(u_v) != sf(v) + sf(v*) for k={k}, j={j}")
                c.check(sf_unitary(modular_unitary_from_pi(v.adjoint())) == val,
                        lambda: f"sf(u_v*) != sf(u_v) for k={k}, j={j}")
            except PrecisionExhausted:
                c.skipped += 1
    return c.result()


_RUNNERS = {
    "ring": suite_ring, "algebra": suite_algebra, "cuntz": suite_cuntz, "kms": suite_kms,
    "smusub": suite_smusub, "phiformula": suite_phiformula, "snf": suite_snf,
    "ranks": suite_ranks, "sfpos": suite_sfpos,
}


def run_suite(name: str, spec: LambdaSpec, seed: int = 0, cases: int = 20) -> List[SuiteResult]:
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        rng = random.Random(f"{seed}:{n}")
        out.append(_RUNNERS[n](spec, rng, cases))
    return out
