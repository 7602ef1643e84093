"""Checked claims and their aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

PASS_EPS = 1e-12


@dataclass(frozen=True)
class InequalityRecord:
    """One checked claim ``lhs <relation> rhs`` with signed margin ``rhs - lhs``.

    Claims of the form ``x > y`` are stored with the sides swapped so that a
    positive margin always means the claim holds. Strict claims need a margin
    above rounding level (``PASS_EPS`` relative to the larger side); non-strict
    claims tolerate a deficit of that size (at least ``PASS_EPS`` absolute).
    """

    name: str
    params: dict
    lhs: float
    rhs: float
    relation: str
    margin: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": dict(self.params),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "margin": self.margin,
            "pass": self.passed,
            "detail": dict(self.detail),
        }

    @property
    def case_id(self) -> str:
        return self.name + "[" + ",".join(f"{k}={v}" for k, v in self.params.items()) + "]"


def compare(name: str, params: dict, lhs: float, rhs: float, relation: str = "<", **detail):
    """Record ``lhs < rhs`` (or ``<=``)."""
    if relation not in ("<", "<="):
        raise ValueError(f"relation must be '<' or '<=', got {relation!r}")
    lhs, rhs = float(lhs), float(rhs)
    margin = rhs - lhs
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        passed = False
    elif relation == "<":
        passed = margin > PASS_EPS * max(abs(lhs), abs(rhs))
    else:
        passed = margin >= -PASS_EPS * max(1.0, abs(lhs), abs(rhs))
    return InequalityRecord(name, dict(params), lhs, rhs, relation, margin, passed, detail)


def greater(name: str, params: dict, big: float, small: float, strict: bool = True, **detail):
    """Record ``big > small`` (stored as ``small < big``)."""
    return compare(name, params, small, big, "<" if strict else "<=", **detail)


def match(name: str, params: dict, measured: float, expected: float, tol: float, relative=False):
    """Record ``|measured - expected| < tol`` (relative to |expected| if asked)."""
    err = abs(float(measured) - float(expected))
    if relative:
        err = err / abs(float(expected))
    return compare(
        name,
        params,
        err,
        tol,
        "<",
        measured=float(measured),
        expected=float(expected),
        error=err,
        relative=relative,
    )


@dataclass
class DiscrepancyLedger:
    name: str
    records: list[InequalityRecord]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.records:
            raise ValueError(f"ledger {self.name!r} has no records")

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[InequalityRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def summary(self) -> dict[str, Any]:
        errors = [r.detail["error"] for r in self.records if "error" in r.detail]
        worst = min(self.records, key=lambda r: r.margin)
        return {
            "max_abs_error": max(errors) if errors else None,
            "worst_case_id": worst.case_id,
            "worst_margin": worst.margin,
            "pass_count": sum(r.passed for r in self.records),
            "fail_count": sum(not r.passed for r in self.records),
        }

    def extend(self, other: DiscrepancyLedger) -> DiscrepancyLedger:
        return DiscrepancyLedger(self.name, self.records + other.records, self.config)

    def as_dict(self) -> dict[str, Any]:
        return {
            "campaign": self.name,
            "config": dict(self.config),
            "summary": self.summary,
            "records": [r.as_dict() for r in self.records],
        }
