"""Linear program bounding the running time over all vertex partitions.

Every variable is the size of a partition class as a fraction of ``n``. The
objective is the log of the number of CSP leaves per vertex; its optimum,
exponentiated, is the per-vertex base of the whole algorithm.
"""

from __future__ import annotations

import math
from typing import Literal, Mapping

import numpy as np
import structlog
from pydantic import BaseModel, Field

from forest_color.analysis.simplex import maximize
from forest_color.analysis.work_factor import CHROMATIC_BASE, CSP_BASE

logger = structlog.get_logger(__name__)

FEASIBILITY_TOLERANCE = 1e-9

N3_NAMES = tuple(f"N3_{i}" for i in range(1, 9))
U_NAMES = tuple(f"U{j}" for j in range(8))
VARIABLES: tuple[str, ...] = (
    ("R", "I", "L", "N", "U", "N1", "N2", "N3") + N3_NAMES + U_NAMES + ("U_prime",)
)


class LinearConstraint(BaseModel):
    """``sum(coefficients[v] * x[v]) <sense> rhs``."""

    name: str
    coefficients: dict[str, float]
    sense: Literal["<=", "=="]
    rhs: float = 0.0

    def lhs(self, point: Mapping[str, float]) -> float:
        return sum(c * point.get(v, 0.0) for v, c in self.coefficients.items())

    def slack(self, point: Mapping[str, float]) -> float:
        """Non-negative when satisfied (for ``==`` the negated absolute residual)."""
        residual = self.rhs - self.lhs(point)
        return residual if self.sense == "<=" else -abs(residual)


class LpModel(BaseModel):
    variables: list[str]
    objective: dict[str, float]
    constraints: list[LinearConstraint]

    def objective_value(self, point: Mapping[str, float]) -> float:
        return sum(c * point.get(v, 0.0) for v, c in self.objective.items())

    def violations(
        self, point: Mapping[str, float], *, tol: float = FEASIBILITY_TOLERANCE
    ) -> list[str]:
        """Names of constraints ``point`` violates, plus negative variables."""
        out = [f"{v} >= 0" for v in self.variables if point.get(v, 0.0) < -tol]
        out.extend(c.name for c in self.constraints if c.slack(point) < -tol)
        return out

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(c, A_ub, b_ub, A_eq, b_eq)`` in ``self.variables`` order."""
        index = {v: k for k, v in enumerate(self.variables)}
        c = np.zeros(len(self.variables))
        for v, coef in self.objective.items():
            c[index[v]] = coef

        def rows(sense: str) -> tuple[np.ndarray, np.ndarray]:
            picked = [k for k in self.constraints if k.sense == sense]
            A = np.zeros((len(picked), len(self.variables)))
            for r, con in enumerate(picked):
                for v, coef in con.coefficients.items():
                    A[r, index[v]] = coef
            return A, np.array([k.rhs for k in picked], dtype=float)

        A_ub, b_ub = rows("<=")
        A_eq, b_eq = rows("==")
        return c, A_ub, b_ub, A_eq, b_eq


def n_star(point: Mapping[str, float]) -> float:
    """Neighbors still charged to the CSP after high-magnitude discounts."""
    g = point.get
    return g("N", 0.0) - 0.6 * g("N3_5", 0.0) - g("N3_6", 0.0) - g("N3_7", 0.0) - g("N3_8", 0.0)


def u_star(point: Mapping[str, float]) -> float:
    """Vertices charged at the chromatic-forest rate."""
    g = point.get
    return g("U", 0.0) + 0.6 * g("N3_5", 0.0) + g("N3_6", 0.0)


def edge_capacity(point: Mapping[str, float]) -> float:
    """Edges available from N2 and high-magnitude vertices into the unreached class."""
    g = point.get
    return 2 * g("N2", 0.0) + 3 * g("N3", 0.0) - 3 * g("U_prime", 0.0)


SHARED_LEAF_CAP = 5


def build_lp(*, literal: bool = False) -> LpModel:
    """The partition LP with ``n`` normalized to 1.

    ``N*`` and ``U*`` are affine in the other variables, so they are folded
    into the objective rather than carried as variables of their own.

    By default two charges tie the sparse classes to the edges and leaf slots
    they use up:

    * every ``N1`` vertex spends one edge of the unreached-edges budget, since
      its component loses one outgoing edge to ``L`` for it;
    * a high-magnitude vertex on a tree with at most ``SHARED_LEAF_CAP`` of
      them meets its partners through leaves, so it takes two leaf slots.

    With ``literal=True`` both charges are dropped. That model admits a denser
    worst case (``N1`` paired with ``N3_4``, base about 1.32702).
    """
    n1_edges = 0.0 if literal else 1.0
    hm_slots = {} if literal else {f"N3_{i}": 1.0 for i in range(1, SHARED_LEAF_CAP + 1)}
    ln_a, ln_b = math.log(CSP_BASE), math.log(CHROMATIC_BASE)
    objective = {
        "R": math.log(3),
        "I": math.log(2),
        "N": ln_a,
        "U": ln_b,
        "N3_5": 0.6 * (ln_b - ln_a),
        "N3_6": ln_b - ln_a,
        "N3_7": -ln_a,
        "N3_8": -ln_a,
    }
    constraints = [
        LinearConstraint(
            name="forest-leaves", coefficients={"R": 4, "I": 2, "L": -1}, sense="<="
        ),
        LinearConstraint(
            name="leaf-slots",
            coefficients={"N1": 1, "N2": 2, "N3": 1, "L": -2, **hm_slots},
            sense="<=",
        ),
        LinearConstraint(
            name="shared-neighbors",
            coefficients={"N3_5": 1 / 5, "N3_6": 2 / 6, "N3_7": 5 / 7, "N3_8": 1, "U_prime": -1},
            sense="<=",
        ),
        LinearConstraint(
            name="unreached-edges",
            coefficients={
                **{f"U{j}": (10 - j) / (8 - j) for j in range(8)},
                "N1": n1_edges,
                "N2": -2,
                **{name: -3 for name in N3_NAMES},
                "U_prime": 3,
            },
            sense="<=",
        ),
        LinearConstraint(
            name="hm-per-root",
            coefficients={**{f"N3_{i}": 8 / i for i in range(1, 9)}, "R": -8},
            sense="<=",
        ),
        LinearConstraint(
            name="normalization",
            coefficients={"R": 1, "I": 1, "L": 1, "N": 1, "U": 1},
            sense="==",
            rhs=1.0,
        ),
        LinearConstraint(
            name="n-split", coefficients={"N1": 1, "N2": 1, "N3": 1, "N": -1}, sense="=="
        ),
        LinearConstraint(
            name="n3-split", coefficients={**dict.fromkeys(N3_NAMES, 1.0), "N3": -1}, sense="=="
        ),
        LinearConstraint(
            name="u-split",
            coefficients={**dict.fromkeys(U_NAMES, 1.0), "U_prime": 1, "U": -1},
            sense="==",
        ),
    ]
    return LpModel(variables=list(VARIABLES), objective=objective, constraints=constraints)


# Per-root counts of the worst case; the total is 25.2 vertices per root.
_REFERENCE_COUNTS = {
    "R": 1.0,
    "L": 4.0,
    "N": 7.0,
    "U": 13.2,
    "N2": 1.0,
    "N3": 6.0,
    "N3_6": 6.0,
    "U0": 11.2,
    "U_prime": 2.0,
}
REFERENCE_SCALE = sum(_REFERENCE_COUNTS[k] for k in ("R", "L", "N", "U"))


def reference_point() -> dict[str, float]:
    """The worst-case optimum, every class divided by the 25.2 vertices per root."""
    point = dict.fromkeys(VARIABLES, 0.0)
    for name, count in _REFERENCE_COUNTS.items():
        point[name] = count / REFERENCE_SCALE
    return point


class AnalysisReport(BaseModel):
    """Optimum of the partition LP and what it implies."""

    values: dict[str, float]
    n_star: float
    u_star: float
    edge_capacity: float
    objective: float
    base: float
    duals: dict[str, float] = Field(default_factory=dict)
    max_reduced_cost: float = 0.0
    duality_gap: float = 0.0
    exact_verified: bool | None = None
    iterations: int = 0

    def rows(self) -> list[tuple[str, float]]:
        """Table rows in class order, ``|E|`` being the edge-capacity expression."""
        order = ["R", "I", "L", "N", "U", "N1", "N2", "N3", *N3_NAMES, *U_NAMES, "U_prime"]
        out = [(f"|{name}|", self.values[name]) for name in order]
        out.append(("|N*|", self.n_star))
        out.append(("|U*|", self.u_star))
        out.append(("|E|", self.edge_capacity))
        return out

    def table(self) -> str:
        width = max(len(label) for label, _ in self.rows())
        lines = [f"{label:<{width}}  {value:.7f}" for label, value in self.rows()]
        lines.append(f"{'objective':<{width}}  {self.objective:.7f}")
        lines.append(f"{'base':<{width}}  {self.base:.5f}")
        if self.exact_verified is not None:
            lines.append(f"{'exact':<{width}}  {'verified' if self.exact_verified else 'FAILED'}")
        return "\n".join(lines)


def solve_lp(model: LpModel | None = None, *, exact: bool = True) -> AnalysisReport:
    """Maximize the model and report the optimum with its duals.

    Raises:
        LpInfeasibleError: if no point satisfies the constraints.
        LpUnboundedError: if the objective is unbounded.
    """
    model = model or build_lp()
    c, A_ub, b_ub, A_eq, b_eq = model.arrays()
    result = maximize(c, A_ub, b_ub, A_eq, b_eq, exact=exact)
    values = {v: max(float(x), 0.0) for v, x in zip(model.variables, result.x)}
    ub_names = [k.name for k in model.constraints if k.sense == "<="]
    eq_names = [k.name for k in model.constraints if k.sense == "=="]
    duals = {
        **{n: float(y) for n, y in zip(ub_names, result.duals_ub)},
        **{n: float(y) for n, y in zip(eq_names, result.duals_eq)},
    }
    report = AnalysisReport(
        values=values,
        n_star=n_star(values),
        u_star=u_star(values),
        edge_capacity=edge_capacity(values),
        objective=result.objective,
        base=math.exp(result.objective),
        duals=duals,
        max_reduced_cost=result.max_reduced_cost,
        duality_gap=result.duality_gap,
        exact_verified=result.exact_verified,
        iterations=result.iterations,
    )
    logger.info("Partition LP solved", base=round(report.base, 6), iterations=result.iterations)
    return report
