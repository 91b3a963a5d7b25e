"""Result records printed by the CLI, with exact JSON round-tripping.

Exact values are serialised in the ring text form (parseable by
:func:`qlambda.gamma.parse_gamma`); decimal renderings always come with an
explicit error bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import ceil, log10
from typing import List, Tuple

from .gamma import CScalar, LambdaNumber, LambdaSpec, ValidationReport, parse_gamma, parse_spec
from .ktheory import ClassificationReport, KTheoryResult
from .verify import SuiteResult

SCHEMA = "qlambda/1"


def render_decimal(x: LambdaNumber, bits: int) -> Tuple[str, str]:
    """(decimal string, error bound string) for x using ``bits`` of precision."""
    lo, hi = x.enclose(bits)
    mid = (lo + hi) / 2
    digits = max(1, ceil(bits * log10(2)))
    with localcontext() as ctx:
        ctx.prec = digits + 30
        dec = (Decimal(mid.numerator) / Decimal(mid.denominator)).quantize(Decimal(1).scaleb(-digits))
        text = format(dec.normalize(), "f") if dec else "0"
    rounding = abs(Fraction(dec) - mid)
    bound = (hi - lo) / 2 + rounding
    return text, _fmt_bound(bound)


def _fmt_bound(b: Fraction) -> str:
    if b == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = 3
        return format(Decimal(b.numerator) / Decimal(b.denominator), "E")


@dataclass
class KTheoryOutput:
    spec: LambdaSpec
    result: KTheoryResult
    classification: ClassificationReport
    command = "ktheory"

    def to_json(self) -> dict:
        d = {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text()}
        d.update(self.result.to_json())
        d["classification"] = self.classification.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "KTheoryOutput":
        return cls(parse_spec(d["spec"]), KTheoryResult.from_json(d),
                   ClassificationReport.from_json(d["classification"]))

    def to_text(self) -> str:
        c = self.classification
        lines = [f"spec    {self.spec.to_text()}",
                 f"K_0     {self.result.k0}",
                 f"K_1     {self.result.k1}",
                 f"method  {self.result.method}"]
        if c.unital_O_n is not None:
            lines.append(f"unital  O_{c.unital_O_n}")
        if c.stable_O_n is not None:
            lines.append(f"stably  O_{c.stable_O_n}")
        if c.is_Q_N:
            lines.append("stably  Q_N")
        lines.append(f"Cuntz-Krieger possible: {'yes' if c.cuntz_krieger_possible else 'no'}")
        if c.notes:
            lines.append(f"notes   {c.notes}")
        return "\n".join(lines)


@dataclass
class StateOutput:
    spec: LambdaSpec
    expr: str
    value: CScalar
    decimal: str
    error_bound: str
    command = "state"

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text(),
                "expr": self.expr, "value": {"re": self.value.re.to_text(), "im": self.value.im.to_text()},
                "decimal": self.decimal, "error_bound": self.error_bound}

    @classmethod
    def from_json(cls, d: dict) -> "StateOutput":
        spec = parse_spec(d["spec"])
        v = CScalar(parse_gamma(d["value"]["re"], spec), parse_gamma(d["value"]["im"], spec))
        return cls(spec, d["expr"], v, d["decimal"], d["error_bound"])

    def to_text(self) -> str:
        return f"{self.value.to_text()} (= {self.decimal})"


@dataclass
class SfOutput:
    spec: LambdaSpec
    unitary: str
    value: LambdaNumber
    formula: str
    decimal: str
    error_bound: str
    command = "sf"

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text(),
                "unitary": self.unitary, "value": self.value.to_text(), "formula": self.formula,
                "decimal": self.decimal, "error_bound": self.error_bound}

    @classmethod
    def from_json(cls, d: dict) -> "SfOutput":
        spec = parse_spec(d["spec"])
        return cls(spec, d["unitary"], parse_gamma(d["value"], spec), d["formula"], d["decimal"],
                   d["error_bound"])

    def to_text(self) -> str:
        lines = [f"{self.value.to_text()}"]
        if self.formula:
            lines.append(f"formula {self.formula}")
        lines.append(f"~ {self.decimal} (error <= {self.error_bound})")
        return "\n".join(lines)


@dataclass
class MkOutput:
    spec: LambdaSpec
    k: int
    m_k: int
    command = "mk"

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text(),
                "k": self.k, "m_k": self.m_k}

    @classmethod
    def from_json(cls, d: dict) -> "MkOutput":
        return cls(parse_spec(d["spec"]), d["k"], d["m_k"])

    def to_text(self) -> str:
        return str(self.m_k)


@dataclass
class ValidateOutput:
    spec: LambdaSpec
    report: ValidationReport
    command = "validate"

    def to_json(self) -> dict:
        d = {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text()}
        d.update(self.report.to_json())
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ValidateOutput":
        return cls(parse_spec(d["spec"]), ValidationReport.from_json(d))

    def to_text(self) -> str:
        r = self.report
        lines = ["ok" if r.ok else "invalid"]
        lines += [f"{v.code}: {v.message}" for v in r.violations]
        if r.irreducibility:
            lines.append(f"irreducibility: {r.irreducibility}")
        lines += [f"note: {n}" for n in r.notes]
        return "\n".join(lines)


@dataclass
class VerifyOutput:
    spec: LambdaSpec
    suite: str
    seed: int
    cases: int
    results: List[SuiteResult] = field(default_factory=list)
    command = "verify"

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "spec": self.spec.to_text(),
                "suite": self.suite, "seed": self.seed, "cases": self.cases, "ok": self.ok,
                "results": [r.to_json() for r in self.results]}

    @classmethod
    def from_json(cls, d: dict) -> "VerifyOutput":
        return cls(parse_spec(d["spec"]), d["suite"], d["seed"], d["cases"],
                   [SuiteResult.from_json(r) for r in d["results"]])

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            extra = f", {r.skipped} skipped" if r.skipped else ""
            msg = f" ({r.message})" if r.message else ""
            lines.append(f"{r.name:<11} {r.status.upper():<5} {r.checked} checks{extra}{msg}")
            if r.counterexample:
                lines.append(f"  counterexample: {r.counterexample}")
        return "\n".join(lines)


_TYPES = {cls.command: cls for cls in (KTheoryOutput, StateOutput, SfOutput, MkOutput,
                                       ValidateOutput, VerifyOutput)}


def result_from_json(d: dict):
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {d.get('schema')!r}")
    return _TYPES[d["command"]].from_json(d)
