"""Estimator registry: direct pipeline runners and bounded-degree adapters.

Adapters convert a node-level privacy budget on graphs of max degree <= 2D
into each mechanism's internal parameter: a rewired node in that class
touches at most 4D edge slots, so edge-level mechanisms run at eps/(4D)
(5D for the chunked subspace method, matching its analysis), and the
deflation pipeline splits its budget over 2k releases.
"""

from __future__ import annotations

import numpy as np

from .estimators import (
    BoundedDegreeEstimator,
    EstimatorOutput,
    ef_spectral,
    eigvec_deflation_cluster,
    matrix_estimation,
    private_pca_lipschitz,
    subspace_estimation,
    two_community_convex,
)
ESTIMATOR_IDS = (
    "ef_spectral",
    "pca_lipschitz",
    "eig_deflation",
    "two_community",
    "matrix_estimation",
    "subspace_estimation",
)


def _n_scaled_pair(graph, params):
    """(B11, B12) in the n-scaled convention (n times the edge probabilities)."""
    if "B11" in params and "B12" in params:
        return float(params["B11"]), float(params["B12"])
    B = np.asarray(params["B"], dtype=float)
    return graph.n * float(B[0, 0]), graph.n * float(B[0, 1])


def run_pipeline(estimator_id, graph, params, seed, noise_off=False) -> EstimatorOutput:
    """Run one pipeline directly with explicit mechanism-level parameters."""
    p = dict(params)
    k = int(p.get("k", 2))
    gamma = float(p.get("gamma", 1.0))
    eps = float(p.get("eps", 1.0))
    if estimator_id == "ef_spectral":
        return ef_spectral(graph, k, eps, gamma=gamma, seed=seed, noise_off=noise_off)
    if estimator_id == "pca_lipschitz":
        return private_pca_lipschitz(
            graph, float(p["D"]), eps, gamma=gamma, seed=seed, noise_off=noise_off
        )
    if estimator_id == "eig_deflation":
        return eigvec_deflation_cluster(
            graph, k, float(p["D"]), eps,
            use_lipschitz=bool(p.get("use_lipschitz", False)),
            gamma=gamma, seed=seed, noise_off=noise_off,
        )
    if estimator_id == "two_community":
        B11, B12 = _n_scaled_pair(graph, p)
        return two_community_convex(
            graph, B11, B12, eps, float(p.get("delta", 1e-6)),
            seed=seed, noise_off=noise_off, gamma=gamma,
            tol=float(p.get("tol", 1e-8)), max_iter=int(p.get("max_iter", 5000)),
        )
    if estimator_id == "matrix_estimation":
        return matrix_estimation(
            graph, k, eps, float(p.get("delta", 1e-6)), gamma=gamma,
            seed=seed, L=p.get("L"), noise_off=noise_off,
        )
    if estimator_id == "subspace_estimation":
        return subspace_estimation(
            graph, k, eps, float(p.get("delta", 1e-6)),
            zeta=float(p.get("zeta", 0.1)), seed=seed, noise_off=noise_off,
            gamma=gamma, C1=float(p.get("C1", 1.0)),
            Cprime=float(p.get("Cprime", 3.0)), r_mult=float(p.get("r_mult", 1.0)),
        )
    raise KeyError(f"unknown estimator id {estimator_id!r}")


def make_bounded_base(estimator_id, k, D, params) -> BoundedDegreeEstimator:
    """Adapter: (eps, delta) interpreted as a node-DP budget on max degree
    <= 2D graphs, converted to the mechanism's own parameter."""
    p = dict(params)
    gamma = float(p.get("gamma", 1.0))

    if estimator_id == "ef_spectral":
        def run(graph, eps, delta, seed, noise_off=False):
            return ef_spectral(
                graph, k, eps / (4.0 * D), gamma=gamma, seed=seed, noise_off=noise_off
            )
        return BoundedDegreeEstimator("ef_spectral", "pure", run)

    if estimator_id == "pca_lipschitz":
        def run(graph, eps, delta, seed, noise_off=False):
            return private_pca_lipschitz(
                graph, D, eps / 2.0, gamma=gamma, seed=seed, noise_off=noise_off
            )
        return BoundedDegreeEstimator("pca_lipschitz", "pure", run)

    if estimator_id == "eig_deflation":
        def run(graph, eps, delta, seed, noise_off=False):
            return eigvec_deflation_cluster(
                graph, k, D, eps / (2.0 * k),
                use_lipschitz=bool(p.get("use_lipschitz", False)),
                gamma=gamma, seed=seed, noise_off=noise_off,
            )
        return BoundedDegreeEstimator("eig_deflation", "pure", run)

    if estimator_id == "two_community":
        def run(graph, eps, delta, seed, noise_off=False):
            B11, B12 = _n_scaled_pair(graph, p)
            return two_community_convex(
                graph, B11, B12, eps / (4.0 * D), delta,
                seed=seed, noise_off=noise_off, gamma=gamma,
                tol=float(p.get("tol", 1e-8)), max_iter=int(p.get("max_iter", 5000)),
            )
        return BoundedDegreeEstimator("two_community", "approx", run)

    if estimator_id == "matrix_estimation":
        def run(graph, eps, delta, seed, noise_off=False):
            return matrix_estimation(
                graph, k, eps / (4.0 * D), delta, gamma=gamma,
                seed=seed, L=p.get("L"), noise_off=noise_off,
            )
        return BoundedDegreeEstimator("matrix_estimation", "approx", run)

    if estimator_id == "subspace_estimation":
        def run(graph, eps, delta, seed, noise_off=False):
            return subspace_estimation(
                graph, k, eps / (5.0 * D), delta,
                zeta=float(p.get("zeta", 0.1)), seed=seed, noise_off=noise_off,
                gamma=gamma, C1=float(p.get("C1", 1.0)),
                Cprime=float(p.get("Cprime", 3.0)), r_mult=float(p.get("r_mult", 1.0)),
            )
        return BoundedDegreeEstimator("subspace_estimation", "approx", run)

    raise KeyError(f"unknown estimator id {estimator_id!r}")
