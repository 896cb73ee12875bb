"""Noise and sampling primitives.

Laplace and Gaussian noise, the symmetric edge-flip randomized response for
adjacency matrices, and exact rejection sampling from exponential-mechanism
densities on the unit sphere (Bingham-type laws) using an angular central
Gaussian envelope.

The Laplace sampler uses a plain inverse-CDF transform of a 64-bit uniform;
it is a research artifact and carries no floating-point side-channel
hardening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .graphs import Graph
from .rng import SeedLike, as_generator


class RejectionCapExceeded(RuntimeError):
    """Raised when the sphere sampler exhausts its trial budget.

    Exceeding the cap is surfaced as an error rather than returning a biased
    sample; the worst-case runtime off the bounded-degree set is exponential.
    """

    def __init__(self, trials: int, cap: int):
        super().__init__(f"rejection sampler exceeded {cap} trials ({trials} attempted)")
        self.trials = trials
        self.cap = cap


DEFAULT_TRIAL_CAP = 10_000_000


def laplace(scale: float, seed: SeedLike) -> float:
    """Draw a symmetric Laplace variate with the given scale (inverse CDF)."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = as_generator(seed)
    u = rng.random() - 0.5  # in [-0.5, 0.5)
    # log1p keeps precision near u = 0; the open endpoint avoids log(0).
    return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


def gaussian_vec(dim: int, sigma: float, seed: SeedLike) -> np.ndarray:
    """i.i.d. N(0, sigma^2) vector; sigma = 0 yields the exact zero vector."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return np.zeros(dim)
    rng = as_generator(seed)
    return sigma * rng.standard_normal(dim)


def edge_flip(g: Graph, eps: float, seed: SeedLike) -> Graph:
    """Symmetric edge-flip randomized response.

    Each upper-triangular entry is independently flipped with probability
    1/(1 + e^eps) and kept with probability e^eps/(1 + e^eps); the result is
    symmetrized. eps = inf returns the input unchanged. Satisfies
    (eps, 0)-edge DP.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if math.isinf(eps):
        return g
    rng = as_generator(seed)
    n = g.n
    p_flip = 1.0 / (1.0 + math.exp(eps))
    flips = np.triu(rng.random((n, n)) < p_flip, k=1)
    upper = np.triu(g.adj, k=1) ^ flips
    return Graph(n, (upper | upper.T).astype(np.uint8))


def debias_flip(m: np.ndarray, eps: float) -> np.ndarray:
    """Recenter a flipped adjacency matrix: M - (e^eps+1)^{-1} (11^T - I).

    eps = inf is the identity map.
    """
    m = np.asarray(m, dtype=np.float64)
    if math.isinf(eps):
        return m.copy()
    n = m.shape[0]
    return m - (np.ones((n, n)) - np.eye(n)) / (math.exp(eps) + 1.0)


@dataclass(frozen=True)
class SphereSample:
    """A unit vector drawn by rejection sampling plus the trial count used."""

    v: np.ndarray
    accepted_after: int


def _envelope(Q: np.ndarray, concentration: float):
    """Angular-central-Gaussian envelope for density exp(c * v'Qv) on the sphere.

    Returns (Abar, L, log_bound) where Abar = c (lmax I - Q) >= 0, the
    envelope is ACG with inverse covariance Omega = I + Abar (Cholesky factor
    L), and log_bound bounds log of exp(-v'Abar v) * (v'Omega v)^{n/2}.
    """
    n = Q.shape[0]
    evals = np.linalg.eigvalsh(Q)
    lmax, lmin = float(evals[-1]), float(evals[0])
    Abar = concentration * (lmax * np.eye(n) - Q)
    Omega = np.eye(n) + Abar
    L = cholesky(Omega, lower=True)
    # sup_w [-w + (n/2) log(1+w)] over the achievable range of w = v'Abar v.
    wmax = concentration * (lmax - lmin)
    wstar = min(max(n / 2.0 - 1.0, 0.0), wmax)
    log_bound = -wstar + 0.5 * n * math.log1p(wstar)
    return Abar, lmax, L, log_bound


def _rejection_sample(score_shifted, Q, concentration, rng, trial_cap, batch):
    """Core rejection loop.

    score_shifted(V) must return log-target values <= -diag(V Abar V') for the
    rows of V, i.e. the caller pre-shifts so the target is bounded by the
    quadratic envelope.
    """
    n = Q.shape[0]
    Abar, lmax, L, log_bound = _envelope(Q, concentration)
    trials = 0
    while trials < trial_cap:
        m = min(batch, trial_cap - trials)
        z = rng.standard_normal((m, n))
        # z ~ N(0, Omega^{-1}): solve L^T x = z^T.
        x = solve_triangular(L.T, z.T, lower=False).T
        v = x / np.linalg.norm(x, axis=1, keepdims=True)
        quad = np.einsum("ij,jk,ik->i", v, Abar, v)
        logu = np.log(rng.random(m))
        for i in range(m):
            trials += 1
            log_target = score_shifted(v[i])
            log_accept = log_target + 0.5 * n * math.log1p(quad[i]) - log_bound
            if logu[i] < log_accept:
                return SphereSample(v=v[i], accepted_after=trials)
    raise RejectionCapExceeded(trials, trial_cap)


def sample_sphere_exp(
    M: np.ndarray,
    concentration: float,
    seed: SeedLike,
    trial_cap: int = DEFAULT_TRIAL_CAP,
) -> SphereSample:
    """Exact sample from density proportional to exp(concentration * v'Mv) on
    the unit sphere, by rejection from the angular central Gaussian envelope
    with inverse covariance I + concentration (lmax(M) I - M)."""
    M = np.asarray(M, dtype=np.float64)
    if concentration < 0:
        raise ValueError("concentration must be nonnegative")
    if not np.allclose(M, M.T, atol=1e-10):
        raise ValueError("M must be symmetric")
    rng = as_generator(seed)
    evmax = float(np.linalg.eigvalsh(M)[-1])

    def score_shifted(v):
        return concentration * (v @ M @ v - evmax)

    return _rejection_sample(score_shifted, M, concentration, rng, trial_cap, batch=256)


def sample_lipschitz_exp(
    score,
    upper_bound_quadratic: np.ndarray,
    concentration: float,
    seed: SeedLike,
    upper_bound_constant: float = 0.0,
    trial_cap: int = DEFAULT_TRIAL_CAP,
) -> SphereSample:
    """Exact sample from density proportional to exp(concentration * score(v)).

    The caller guarantees score(v) <= v' Q v + upper_bound_constant for all
    unit v, where Q = upper_bound_quadratic; the envelope is built from Q
    exactly as in sample_sphere_exp, so the acceptance ratio stays bounded
    even when score is only an extension of the quadratic form.
    """
    Q = np.asarray(upper_bound_quadratic, dtype=np.float64)
    if concentration < 0:
        raise ValueError("concentration must be nonnegative")
    if not np.allclose(Q, Q.T, atol=1e-10):
        raise ValueError("upper_bound_quadratic must be symmetric")
    rng = as_generator(seed)
    evmax = float(np.linalg.eigvalsh(Q)[-1])
    shift = evmax + upper_bound_constant

    def score_shifted(v):
        return concentration * (score(v) - shift)

    return _rejection_sample(score_shifted, Q, concentration, rng, trial_cap, batch=64)
