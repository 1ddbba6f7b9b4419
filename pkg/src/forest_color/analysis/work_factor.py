"""Branching work factors and per-vertex rates."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from pydantic import BaseModel, field_validator

# Per-variable base of the (3,2)-CSP algorithm the analysis builds on
CSP_BASE = 1.36443

# Per-vertex base charged to vertices covered by chromatic trees
CHROMATIC_BASE = 1.34004

_TOLERANCE = 1e-12
_MAX_BISECTIONS = 400

# Vertex classes per bushy-forest root in the worst-case structure
WORST_CASE_PER_ROOT: Mapping[str, float] = {
    "R": 1,
    "L": 4,
    "N2": 1,
    "N3_6": 6,
    "U0": 11.2,
    "U_prime": 2,
}


class BranchVector(BaseModel):
    """Instance-size reductions of each branch of a branching rule."""

    reductions: list[float]

    @field_validator("reductions")
    @classmethod
    def _positive(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("branch vector must have at least one entry")
        if any(not math.isfinite(r) or r <= 0 for r in v):
            raise ValueError("branch vector entries must be positive and finite")
        return v


def work_factor(bv: BranchVector | Sequence[float]) -> float:
    """Largest root of ``1 - sum(x ** -r)``, found by bisection.

    A single branch never grows the search tree, so its work factor is 1.
    """
    if not isinstance(bv, BranchVector):
        bv = BranchVector(reductions=list(bv))
    rs = bv.reductions
    if len(rs) == 1:
        return 1.0

    def f(x: float) -> float:
        return 1.0 - sum(x ** (-r) for r in rs)

    lo = 1.0
    hi = len(rs) ** (1.0 / min(rs)) + 1.0
    for _ in range(_MAX_BISECTIONS):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < _TOLERANCE:
            break
    return (lo + hi) / 2


@dataclass(frozen=True)
class RateTerm:
    """One summand ``coefficient * base ** exponent`` of a rate expression."""

    coefficient: float
    base: float
    exponent: float

    @property
    def value(self) -> float:
        return self.coefficient * self.base**self.exponent


_NUMBER = r"[0-9.]+(?:[eE]-?[0-9]+)?"
_TERM = re.compile(
    rf"^\s*(?:(?P<coef>{_NUMBER})\s*\*\s*)?"
    rf"(?P<base>{_NUMBER})"
    rf"(?:\s*\^\s*(?P<exp>-?{_NUMBER}))?\s*$"
)


def parse_rate_terms(text: str) -> list[RateTerm]:
    """Parse ``"3*1.36443^2 + 6*1.36443"`` into terms.

    Raises:
        ValueError: on a malformed summand.
    """
    terms: list[RateTerm] = []
    for chunk in text.split("+"):
        m = _TERM.match(chunk)
        if m is None:
            raise ValueError(f"cannot parse rate term {chunk.strip()!r}")
        terms.append(
            RateTerm(
                coefficient=float(m["coef"] or 1),
                base=float(m["base"]),
                exponent=float(m["exp"] or 1),
            )
        )
    return terms


def rate(terms: Sequence[RateTerm | tuple[float, float, float]], vertices: float) -> float:
    """Per-vertex rate ``(sum c * b ** e) ** (1 / vertices)``."""
    if vertices <= 0:
        raise ValueError(f"vertices must be positive, got {vertices}")
    total = sum((t if isinstance(t, RateTerm) else RateTerm(*t)).value for t in terms)
    if total <= 0:
        raise ValueError("rate expression must be positive")
    return float(total ** (1.0 / vertices))


def schedule_rate(grandchildren: int) -> float:
    """Per-vertex rate of a chromatic tree with the given number of grandchildren.

    Up to four grandchildren the root is branched on and the grandchildren
    become CSP variables. With five, two children are branched on jointly.
    """
    if not 0 <= grandchildren <= 5:
        raise ValueError(f"chromatic trees carry 0..5 grandchildren, got {grandchildren}")
    if grandchildren <= 4:
        return rate([(3, CSP_BASE, grandchildren)], 4 + grandchildren)
    return rate([(3, CSP_BASE, 2), (6, CSP_BASE, 1)], 9)


def per_root_base(counts: Mapping[str, float] = WORST_CASE_PER_ROOT) -> float:
    """Runtime base implied by the vertex classes charged to one bushy root.

    ``counts`` uses partition class names (R, I, L, N1, N2, N3_i, U_j, U_prime).
    """
    get = counts.get
    n3 = {i: get(f"N3_{i}", 0.0) for i in range(1, 9)}
    n = get("N1", 0.0) + get("N2", 0.0) + sum(n3.values())
    u = sum(get(f"U{j}", 0.0) for j in range(8)) + get("U_prime", 0.0)
    n_star = n - 0.6 * n3[5] - n3[6] - n3[7] - n3[8]
    u_star = u + 0.6 * n3[5] + n3[6]
    total = get("R", 0.0) + get("I", 0.0) + get("L", 0.0) + n + u
    log_work = (
        get("R", 0.0) * math.log(3)
        + get("I", 0.0) * math.log(2)
        + n_star * math.log(CSP_BASE)
        + u_star * math.log(CHROMATIC_BASE)
    )
    return math.exp(log_work / total)
