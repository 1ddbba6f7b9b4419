"""(3,2)-constraint satisfaction backend.

Variables carry at most three colors; constraints forbid pairs of
variable-color choices. Variables with one or two colors left are eliminated
in polynomial time before any branching happens:

* one color: commit it and strike every conflicting choice;
* two colors ``{a, b}``: resolve. Any choice conflicting with ``(v, a)`` and any
  choice conflicting with ``(v, b)`` become directly conflicting, since together
  they would leave ``v`` without a color. A choice conflicting with both is
  simply struck.

Each elimination is recorded so ``CspReduction.back_substitute`` can recover
the eliminated variables from a solution of the reduced instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import structlog

from forest_color.base import COLORS, Color, VertexId
from forest_color.reduce import Instance

logger = structlog.get_logger(__name__)

VarId = VertexId
Choice = tuple[VarId, Color]
Conflict = tuple[Choice, Choice]


def _norm(p: Choice, q: Choice) -> Conflict:
    return (p, q) if p < q else (q, p)


@dataclass(frozen=True)
class CspInstance:
    """Immutable (3,2)-CSP. ``is_unsat`` marks an instance with an emptied domain."""

    domains: Mapping[VarId, frozenset[Color]]
    conflicts: frozenset[Conflict]
    is_unsat: bool = False

    @classmethod
    def unsat(cls) -> CspInstance:
        return cls(domains={}, conflicts=frozenset(), is_unsat=True)

    @classmethod
    def build(
        cls, domains: Mapping[VarId, Iterable[Color]], conflicts: Iterable[Conflict]
    ) -> CspInstance:
        """Normalize domains and conflicts; stale and same-variable conflicts are dropped."""
        doms = {v: frozenset(Color(c) for c in cs) for v, cs in domains.items()}
        if any(not cs for cs in doms.values()):
            return cls.unsat()
        if any(len(cs) > 3 for cs in doms.values()):
            raise ValueError("domains hold at most three colors")
        kept: set[Conflict] = set()
        for (v, c), (w, d) in conflicts:
            if v == w:
                continue
            if c in doms.get(v, ()) and d in doms.get(w, ()):
                kept.add(_norm((v, Color(c)), (w, Color(d))))
        return cls(domains=doms, conflicts=frozenset(kept))

    @property
    def variables(self) -> frozenset[VarId]:
        return frozenset(self.domains)

    def restrict(self, var: VarId, color: Color) -> CspInstance:
        """Copy with ``var`` pinned to ``color``."""
        if color not in self.domains[var]:
            return CspInstance.unsat()
        domains = dict(self.domains)
        domains[var] = frozenset({color})
        conflicts = frozenset(
            (p, q)
            for p, q in self.conflicts
            if not ((p[0] == var and p[1] != color) or (q[0] == var and q[1] != color))
        )
        return CspInstance(domains=domains, conflicts=conflicts)

    def incident_counts(self) -> dict[VarId, int]:
        counts = dict.fromkeys(self.domains, 0)
        for (v, _), (w, _) in self.conflicts:
            counts[v] += 1
            counts[w] += 1
        return counts

    def satisfied_by(self, assignment: Mapping[VarId, Color]) -> bool:
        """Independent checker: total, in-domain, and no conflict fully selected."""
        if self.is_unsat:
            return False
        for v, cs in self.domains.items():
            if assignment.get(v) not in cs:
                return False
        return not any(
            assignment[v] == c and assignment[w] == d for (v, c), (w, d) in self.conflicts
        )


@dataclass(frozen=True)
class CspSolution:
    assignment: Mapping[VarId, Color]


# ---------------------------------------------------------------------------
# Small-domain elimination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Committed:
    var: VarId
    color: Color


@dataclass(frozen=True)
class Resolved:
    var: VarId
    first: Color
    first_blockers: frozenset[Choice]
    second: Color


EliminationStep = Union[Committed, Resolved]


@dataclass(frozen=True)
class CspReduction:
    """Result of ``eliminate_small_domains``: the reduced instance and how to undo it."""

    instance: CspInstance
    steps: tuple[EliminationStep, ...]

    def back_substitute(self, assignment: Mapping[VarId, Color]) -> dict[VarId, Color]:
        out = dict(assignment)
        for step in reversed(self.steps):
            if isinstance(step, Committed):
                out[step.var] = step.color
            elif any(out.get(w) == c for w, c in step.first_blockers):
                out[step.var] = step.second
            else:
                out[step.var] = step.first
        return out


class _Workspace:
    """Mutable adjacency over live choices used while eliminating."""

    def __init__(self, csp: CspInstance) -> None:
        self.domains: dict[VarId, set[Color]] = {v: set(cs) for v, cs in csp.domains.items()}
        self.adj: dict[Choice, set[Choice]] = {
            (v, c): set() for v, cs in self.domains.items() for c in cs
        }
        self.unsat = False
        for p, q in csp.conflicts:
            self.add_conflict(p, q)

    def add_conflict(self, p: Choice, q: Choice) -> None:
        if p[0] == q[0] or p not in self.adj or q not in self.adj:
            return
        self.adj[p].add(q)
        self.adj[q].add(p)

    def strike(self, choice: Choice) -> None:
        var, color = choice
        if color not in self.domains.get(var, ()):
            return
        self.domains[var].discard(color)
        for q in self.adj.pop(choice):
            self.adj[q].discard(choice)
        if not self.domains[var]:
            self.unsat = True

    def drop_var(self, var: VarId) -> None:
        for c in self.domains.pop(var):
            for q in self.adj.pop((var, c)):
                self.adj[q].discard((var, c))

    def smallest(self) -> VarId | None:
        best: tuple[int, VarId] | None = None
        for v, cs in self.domains.items():
            if len(cs) <= 2 and (best is None or (len(cs), v) < best):
                best = (len(cs), v)
        return None if best is None else best[1]

    def freeze(self) -> CspInstance:
        conflicts = frozenset(_norm(p, q) for p, qs in self.adj.items() for q in qs)
        return CspInstance(
            domains={v: frozenset(cs) for v, cs in self.domains.items()}, conflicts=conflicts
        )


def eliminate_small_domains(csp: CspInstance) -> CspReduction:
    """Eliminate every variable with one or two colors, to a fixpoint."""
    if csp.is_unsat:
        return CspReduction(instance=csp, steps=())
    work = _Workspace(csp)
    steps: list[EliminationStep] = []
    while not work.unsat:
        var = work.smallest()
        if var is None:
            break
        colors = sorted(work.domains[var])
        if len(colors) == 1:
            (color,) = colors
            blockers = set(work.adj[(var, color)])
            work.drop_var(var)
            for choice in sorted(blockers):
                work.strike(choice)
            steps.append(Committed(var=var, color=color))
            continue
        first, second = colors
        against_first = set(work.adj[(var, first)])
        against_second = set(work.adj[(var, second)])
        work.drop_var(var)
        for choice in sorted(against_first & against_second):
            work.strike(choice)
        for p in sorted(against_first):
            for q in sorted(against_second):
                if p != q:
                    work.add_conflict(p, q)
        steps.append(
            Resolved(
                var=var, first=first, first_blockers=frozenset(against_first), second=second
            )
        )
    if work.unsat:
        return CspReduction(instance=CspInstance.unsat(), steps=tuple(steps))
    return CspReduction(instance=work.freeze(), steps=tuple(steps))


# ---------------------------------------------------------------------------
# Construction and search
# ---------------------------------------------------------------------------


def from_partial_coloring(inst: Instance) -> CspInstance:
    """One variable per uncolored vertex; adjacent uncolored vertices conflict per color."""
    g = inst.graph
    fixed = inst.fixed
    for v, c in fixed.items():
        if any(fixed.get(w) == c for w in g.neighbors(v)):
            return CspInstance.unsat()
    domains: dict[VarId, frozenset[Color]] = {}
    for v in g.vertices:
        if v in fixed:
            continue
        taken = {fixed[w] for w in g.neighbors(v) if w in fixed}
        domains[v] = frozenset(c for c in COLORS if c not in taken)
    conflicts = [
        ((u, c), (v, c))
        for u, v in g.edges()
        if u in domains and v in domains
        for c in domains[u] & domains[v]
    ]
    return CspInstance.build(domains, conflicts)


def solve(csp: CspInstance, *, on_node: Callable[[], None] | None = None) -> CspSolution | None:
    """Return a satisfying assignment, or ``None`` when the instance is UNSAT.

    Small domains are eliminated first; the search then branches on the
    variable with the most incident conflicts (smallest id on ties).
    """
    if on_node is not None:
        on_node()
    reduction = eliminate_small_domains(csp)
    reduced = reduction.instance
    if reduced.is_unsat:
        return None
    if not reduced.domains:
        return CspSolution(assignment=reduction.back_substitute({}))
    counts = reduced.incident_counts()
    var = min(reduced.domains, key=lambda v: (-counts[v], v))
    for color in sorted(reduced.domains[var]):
        found = solve(reduced.restrict(var, color), on_node=on_node)
        if found is not None:
            return CspSolution(assignment=reduction.back_substitute(found.assignment))
    return None
