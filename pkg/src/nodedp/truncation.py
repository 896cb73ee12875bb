"""Degree truncation and the Lipschitz-extension score.

The projection maps an arbitrary graph onto the set of graphs with maximum
degree at most 2D by solving a fractional node-removal LP; it comes with a
smooth distance surrogate d_T whose node sensitivity is at most 4, and a
privately released high-probability upper bound L_hat on the local
sensitivity of the projection. The extension score generalizes the PCA score
Tr(V' A^2 V) + Tr(A^2 J) to unbounded-degree graphs without inflating its
sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, WeightedGraph, max_degree
from .lp import LpProblem, solve_lp
from .mechanisms import laplace
from .rng import SeedLike

# LP vertex solutions sit at exact rational thresholds only by coincidence;
# this slack keeps the strict/weak comparisons stable under solver noise.
_THRESH_TOL = 1e-9


class LpFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncationCertificate:
    truncated: Graph | WeightedGraph
    d_T: float
    L_hat: float
    budget_used: tuple[float, float]  # (eps1, delta1)

    def __post_init__(self):
        if self.L_hat < 0.5:
            raise ValueError("L_hat is clamped at 1/2")
        if self.d_T < 0:
            raise ValueError("d_T is nonnegative")


def lipschitz_extension_score(
    g: Graph, V: np.ndarray, D: float, force_lp: bool = False
) -> float:
    """Extension score s_hat_{A^2}(V): the optimum of

        max_C Tr(C (VV' + J))  s.t.  C = C', 0 <= C_ij <= (A^2)_ij,
                                      every row sum of |C| <= D^2.

    Equals Tr(V' A^2 V) + Tr(A^2 J) whenever all row sums of A^2 are at most
    D^2 (in particular whenever max degree <= D); that case is answered
    directly unless force_lp is set.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != g.n:
        raise ValueError("V must have n rows")
    if not np.allclose(V.T @ V, np.eye(V.shape[1]), atol=1e-10):
        raise ValueError("V must have orthonormal columns")
    if D <= 0:
        raise ValueError("D must be positive")
    A = g.as_float()
    A2 = A @ A
    D2 = float(D) * float(D)
    if not force_lp and float(np.max(A2.sum(axis=1), initial=0.0)) <= D2:
        return float(np.trace(V.T @ A2 @ V) + A2.sum())

    # Weight matrix of the objective; entries are >= 0 since VV' >= -1.
    Wobj = V @ V.T + np.ones((g.n, g.n))
    iu, ju = np.nonzero(np.triu(A2 > 0))
    if iu.size == 0:
        return 0.0
    # One variable per pair i <= j with (A^2)_ij > 0; C is symmetric.
    coef = np.where(iu == ju, Wobj[iu, ju], 2.0 * Wobj[iu, ju])
    bounds = [(0.0, float(A2[i, j])) for i, j in zip(iu, ju)]
    prob = LpProblem(objective=coef, sense="max", bounds=bounds)
    rows_of = [dict() for _ in range(g.n)]
    for p, (i, j) in enumerate(zip(iu, ju)):
        rows_of[i][p] = rows_of[i].get(p, 0.0) + 1.0
        if j != i:
            rows_of[j][p] = rows_of[j].get(p, 0.0) + 1.0
    for i in range(g.n):
        if rows_of[i]:
            prob.add_row(rows_of[i], "<=", D2)
    sol = solve_lp(prob)
    if sol.status != "optimal":
        raise LpFailure(f"extension LP ended with status {sol.status}: {sol.message}")
    return float(sol.objective)


def degree_truncate(g: Graph, D: int) -> tuple[Graph, float]:
    """Project g onto max degree <= 2D.

    Solves  min sum_u x_u  s.t.  x_u >= 0, 0 <= w_uv <= a_uv,
    w_uv >= a_uv - x_u - x_v, sum_v w_uv <= D per node; then removes every
    edge (u, v), u < v, with x*_u > 1/4 or x*_v >= 1/4. Returns the truncated
    graph and d_T = 4 sum_u x*_u. Graphs already of max degree <= D are
    returned unchanged with d_T = 0 (the all-zero x is optimal there).
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    if max_degree(g) <= D:
        return g, 0.0
    n = g.n
    iu, ju = np.nonzero(np.triu(g.adj, k=1))
    m = iu.size
    # Variables: x_0..x_{n-1}, then w_e for each present edge e.
    obj = np.concatenate([np.ones(n), np.zeros(m)])
    bounds = [(0.0, None)] * n + [(0.0, 1.0)] * m
    prob = LpProblem(objective=obj, sense="min", bounds=bounds)
    for e, (u, v) in enumerate(zip(iu, ju)):
        # w_uv >= 1 - x_u - x_v
        prob.add_row({int(u): 1.0, int(v): 1.0, n + e: 1.0}, ">=", 1.0)
    deg_rows = [dict() for _ in range(n)]
    for e, (u, v) in enumerate(zip(iu, ju)):
        deg_rows[u][n + e] = 1.0
        deg_rows[v][n + e] = 1.0
    for u in range(n):
        if deg_rows[u]:
            prob.add_row(deg_rows[u], "<=", float(D))
    sol = solve_lp(prob)
    if sol.status != "optimal":
        raise LpFailure(f"truncation LP ended with status {sol.status}: {sol.message}")
    x = sol.x[:n]
    d_T = 4.0 * float(np.sum(x))
    # Removal rule follows the strict/weak asymmetry of the definition with
    # (u, v) ordered by node index.
    keep = ~((x[iu] > 0.25 + _THRESH_TOL) | (x[ju] >= 0.25 - _THRESH_TOL))
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[iu[keep], ju[keep]] = 1
    return Graph(n, adj | adj.T), d_T


def weighted_degree_truncate(g: WeightedGraph, D: int) -> tuple[WeightedGraph, float]:
    """Binarize, truncate, then restore the surviving original weights."""
    binary = g.binarize()
    truncated, d_T = degree_truncate(binary, D)
    return WeightedGraph(g.n, g.weights * truncated.adj), d_T


def private_sensitivity_bound(
    d_T: float,
    eps1: float,
    delta1: float,
    seed: SeedLike,
    noise_off: bool = False,
) -> float:
    """Private high-probability bound on the local sensitivity of T_D:

        L_hat = max{1/2, 5 + 2 d_T + Lap(8/eps1) + 8 log(1/delta1)/eps1}.
    """
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    if not (0.0 < delta1 < 1.0):
        raise ValueError("delta1 must lie in (0, 1)")
    noise = 0.0 if noise_off else laplace(8.0 / eps1, seed)
    return max(0.5, 5.0 + 2.0 * d_T + noise + 8.0 * math.log(1.0 / delta1) / eps1)


def truncate_with_certificate(
    g: Graph | WeightedGraph,
    D: int,
    eps1: float,
    delta1: float,
    seed: SeedLike,
    noise_off: bool = False,
) -> TruncationCertificate:
    """Run the smooth-projection step end to end: truncate, then privately
    bound its local sensitivity. The certificate costs (eps1, 0) node-DP."""
    if isinstance(g, WeightedGraph):
        truncated, d_T = weighted_degree_truncate(g, D)
    else:
        truncated, d_T = degree_truncate(g, D)
    L_hat = private_sensitivity_bound(d_T, eps1, delta1, seed, noise_off=noise_off)
    return TruncationCertificate(truncated=truncated, d_T=d_T, L_hat=L_hat,
                                 budget_used=(eps1, delta1))
