"""Ingestion of Jacobian / abelian-variety point counts and the gcd harness.

The bundled fixture (data/jacobian_counts.csv) carries, for each small prime
level p, the point counts |J(F_q)| over the primes q = +-1 mod p (label "J"),
and for p = 29 and 31 additionally one per-newform-class gcd row per class
(labels f1..f6, g1..g4).  The harness computes, per label, the gcd across the
listed q and compares against the cuspidal class group order: the J-level gcd
equals the order for 11 <= p <= 23 and four times the order for p = 29, 31,
where the per-newform product of gcds recovers the order exactly.

Values may be given either in decimal or factored as ``2^2*3*11``; the file
format is data-driven so the harness extends to user exports from any
modular-forms database.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .arith import Primality, is_prime

J_LABEL = "J"

_HEADER = ("p", "q", "label", "value")
_FACTORED_RE = re.compile(r"^\d+(\^\d+)?(\*\d+(\^\d+)?)*$")


def parse_value(text: str) -> int:
    """Decimal integer or factored expression like ``2^2*3*11``."""
    s = text.strip().replace(" ", "")
    if not _FACTORED_RE.match(s):
        raise ValueError(f"bad value syntax: {text!r}")
    out = 1
    for part in s.split("*"):
        base, _, exp = part.partition("^")
        out *= int(base) ** (int(exp) if exp else 1)
    return out


@dataclass(frozen=True)
class CrosscheckRecord:
    p: int
    q: int
    label: str
    value: int


@dataclass
class LoadReport:
    records: list[CrosscheckRecord] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def for_p(self, p: int) -> list[CrosscheckRecord]:
        return [r for r in self.records if r.p == p]

    def levels(self) -> list[int]:
        return sorted({r.p for r in self.records})


def bundled_fixture_path() -> Path:
    return Path(resources.files("cuspidal").joinpath("data/jacobian_counts.csv"))


def load_records(path, fmt: str = "csv") -> LoadReport:
    """Parse a counts file; malformed rows are reported with their line
    number and skipped, the rest of the load continues."""
    if fmt != "csv":
        raise ValueError(f"unsupported format: {fmt!r}")
    report = LoadReport()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [f.strip() for f in line.split(",")]
        if tuple(parts) == _HEADER:
            continue
        if len(parts) != 4:
            report.errors.append(f"line {lineno}: expected 4 fields, got {len(parts)}")
            continue
        try:
            p, q = int(parts[0]), int(parts[1])
            value = parse_value(parts[3])
        except ValueError as exc:
            report.errors.append(f"line {lineno}: {exc}")
            continue
        label = parts[2]
        if not label:
            report.errors.append(f"line {lineno}: empty label")
            continue
        if is_prime(p) is Primality.COMPOSITE:
            report.errors.append(f"line {lineno}: p = {p} is not prime")
            continue
        if is_prime(q) is Primality.COMPOSITE:
            report.errors.append(f"line {lineno}: q = {q} is not prime")
            continue
        if q % p not in (1, p - 1):
            report.errors.append(f"line {lineno}: q = {q} is not +-1 mod {p}")
            continue
        if value < 1:
            report.errors.append(f"line {lineno}: value must be >= 1")
            continue
        report.records.append(CrosscheckRecord(p=p, q=q, label=label, value=value))
    return report


@dataclass(frozen=True)
class RecordCheck:
    record: CrosscheckRecord
    divisible: bool


@dataclass
class HarnessReport:
    p: int
    order: int
    j_gcd: int | None
    j_ratio: Fraction | None
    newform_gcds: dict[str, int]
    newform_product: int | None
    newform_ratio: Fraction | None
    record_checks: list[RecordCheck]

    def all_j_divisible(self) -> bool:
        return all(
            c.divisible for c in self.record_checks if c.record.label == J_LABEL
        )


def gcd_harness(
    p: int, records: Sequence[CrosscheckRecord], order: int
) -> HarnessReport:
    """Group records by label, gcd across q within each label, and compare
    against the given class group order.

    Divisibility of the order into each value is the injection consequence;
    it applies to the J-label point counts (per-newform rows carry gcds whose
    product, not each factor, recovers the order)."""
    if not records:
        raise ValueError("empty record set")
    if any(r.p != p for r in records):
        raise ValueError("records for a different level were passed in")
    if order < 1:
        raise ValueError("order must be positive")

    by_label: dict[str, list[CrosscheckRecord]] = {}
    for r in records:
        by_label.setdefault(r.label, []).append(r)

    j_gcd = j_ratio = None
    if J_LABEL in by_label:
        j_gcd = math.gcd(*(r.value for r in by_label[J_LABEL]))
        j_ratio = Fraction(j_gcd, order)

    newform_gcds: dict[str, int] = {}
    for label, rows in sorted(by_label.items()):
        if label == J_LABEL:
            continue
        g = rows[0].value
        for r in rows[1:]:
            g = math.gcd(g, r.value)
        newform_gcds[label] = g

    newform_product = newform_ratio = None
    if newform_gcds:
        newform_product = math.prod(newform_gcds.values())
        newform_ratio = Fraction(newform_product, order)

    checks = [RecordCheck(r, r.value % order == 0) for r in records]
    return HarnessReport(
        p=p,
        order=order,
        j_gcd=j_gcd,
        j_ratio=j_ratio,
        newform_gcds=newform_gcds,
        newform_product=newform_product,
        newform_ratio=newform_ratio,
        record_checks=checks,
    )


# Identities the bundled fixture must reproduce: J-level gcd / order ratio,
# and (where per-newform rows exist) product of newform gcds / order = 1.
FIXTURE_J_RATIOS = {11: 1, 13: 1, 17: 1, 19: 1, 23: 1, 29: 4, 31: 4}


def fixture_identities_ok(report: HarnessReport) -> tuple[bool, list[str]]:
    problems: list[str] = []
    want = FIXTURE_J_RATIOS.get(report.p)
    if want is not None and report.j_ratio != want:
        problems.append(
            f"p={report.p}: J-level gcd/order = {report.j_ratio}, expected {want}"
        )
    if report.newform_gcds and report.newform_ratio != 1:
        problems.append(
            f"p={report.p}: newform product/order = {report.newform_ratio}, expected 1"
        )
    if not report.all_j_divisible():
        problems.append(f"p={report.p}: some J-level value is not divisible by the order")
    return not problems, problems
