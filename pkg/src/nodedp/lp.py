"""Dense/sparse linear programming surface used by the projection machinery.

Problems are stored in a solver-agnostic form (objective, typed constraint
rows, per-variable bounds) and solved with HiGHS via scipy. Constraint rows
accept either a dense coefficient vector or a {index: coeff} dict, so the
truncation LPs (n + |E| variables) stay sparse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

FEAS_TOL = 1e-8

RELATIONS = ("<=", "=", ">=")


@dataclass
class LpProblem:
    objective: np.ndarray
    sense: str = "min"  # "min" or "max"
    rows: list = field(default_factory=list)  # (coeffs, relation, rhs)
    bounds: list = field(default_factory=list)  # (lo, hi), None = unbounded

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=np.float64)
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        if not self.bounds:
            self.bounds = [(0.0, None)] * self.objective.size

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def add_row(self, coeffs, relation: str, rhs: float) -> None:
        if relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}")
        self.rows.append((coeffs, relation, rhs))

    def _row_items(self, coeffs):
        if isinstance(coeffs, dict):
            return list(coeffs.items())
        arr = np.asarray(coeffs, dtype=np.float64)
        idx = np.nonzero(arr)[0]
        return [(int(i), float(arr[i])) for i in idx]

    def dump(self) -> str:
        """Textual debug format."""
        lines = [f"{self.sense} {' + '.join(f'{c:g} x{i}' for i, c in enumerate(self.objective) if c)}"]
        for coeffs, rel, rhs in self.rows:
            terms = " + ".join(f"{c:g} x{i}" for i, c in self._row_items(coeffs))
            lines.append(f"  {terms or '0'} {rel} {rhs:g}")
        for i, (lo, hi) in enumerate(self.bounds):
            lines.append(f"  x{i} in [{'-inf' if lo is None else lo:g}, {'inf' if hi is None else hi}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded" | "failed"
    x: np.ndarray | None
    objective: float | None
    residual: float = 0.0
    message: str = ""


def _assemble(problem: LpProblem):
    n = problem.n_vars
    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    for coeffs, rel, rhs in problem.rows:
        items = problem._row_items(coeffs)
        if rel == "<=":
            ub_rows.append((items, 1.0))
            ub_rhs.append(rhs)
        elif rel == ">=":
            ub_rows.append((items, -1.0))
            ub_rhs.append(-rhs)
        else:
            eq_rows.append(items)
            eq_rhs.append(rhs)

    def to_csr(rows, signs=None):
        data, ri, ci = [], [], []
        for r, entry in enumerate(rows):
            items, sign = entry if signs else (entry, 1.0)
            for i, c in items:
                ri.append(r)
                ci.append(i)
                data.append(sign * c)
        return sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))

    A_ub = to_csr(ub_rows, signs=True) if ub_rows else None
    A_eq = to_csr(eq_rows) if eq_rows else None
    return A_ub, np.array(ub_rhs), A_eq, np.array(eq_rhs)


def solve_lp(problem: LpProblem) -> LpSolution:
    """Solve an LP; on 'optimal' the solution satisfies all constraints to
    within FEAS_TOL and the objective is the optimum for the stated sense."""
    c = problem.objective if problem.sense == "min" else -problem.objective
    A_ub, b_ub, A_eq, b_eq = _assemble(problem)
    res = linprog(
        c,
        A_ub=A_ub, b_ub=b_ub if A_ub is not None else None,
        A_eq=A_eq, b_eq=b_eq if A_eq is not None else None,
        bounds=problem.bounds,
        method="highs",
    )
    if res.status == 2:
        return LpSolution("infeasible", None, None, message=res.message)
    if res.status == 3:
        return LpSolution("unbounded", None, None, message=res.message)
    if res.status != 0:
        return LpSolution("failed", None, None, message=res.message)
    x = np.asarray(res.x)
    residual = 0.0
    if A_ub is not None and b_ub.size:
        residual = max(residual, float(np.max(A_ub @ x - b_ub, initial=0.0)))
    if A_eq is not None and b_eq.size:
        residual = max(residual, float(np.max(np.abs(A_eq @ x - b_eq), initial=0.0)))
    obj = float(problem.objective @ x)
    return LpSolution("optimal", x, obj, residual=residual)
