"""Simulated decision-maker: Gumbel-corrupted responses and noise calibration.

The Gumbel-argmax construction makes simulated winner frequencies match the
softmax choice model exactly, so responses generated here are distributed
precisely as the likelihood the surrogates assume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Query, Response
from .errors import CalibrationError, ConfigError
from .scalarization import ScalarizationWeights, chebyshev
from .testbed import TestProblem


@dataclass(frozen=True)
class NoiseProfile:
    """Per-objective Gumbel noise scales of the simulated DM."""

    lambda_true: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lambda_true, dtype=np.float64, copy=True)
        if lam.ndim != 1 or np.any(lam <= 0.0):
            raise ConfigError("noise scales must be a positive length-m vector")
        lam.flags.writeable = False
        object.__setattr__(self, "lambda_true", lam)

    @property
    def m(self) -> int:
        return self.lambda_true.shape[0]


def gumbel_noise(rng: np.random.Generator, scale, size) -> np.ndarray:
    """Gumbel(0, scale) via -scale*ln(-ln U), U clamped away from {0, 1}."""
    u = np.clip(rng.random(size), 1e-12, 1.0 - 1e-12)
    return -np.asarray(scale) * np.log(-np.log(u))


def respond(
    query: Query, f, noise: NoiseProfile, rng: np.random.Generator
) -> Response:
    """Per-objective winner indices of the noise-corrupted values."""
    values = np.asarray([f(x) for x in query.designs], dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[1] != noise.m:
        raise ConfigError("oracle objective count != noise profile length")
    eps = gumbel_noise(rng, noise.lambda_true, values.shape)
    return Response(np.argmax(values + eps, axis=0) + 1)


def respond_scalarized(
    query: Query,
    f,
    noise: NoiseProfile,
    w: ScalarizationWeights,
    rng: np.random.Generator,
) -> int:
    """Single 1-based winner of the scalarized noise-corrupted vectors."""
    values = np.asarray([f(x) for x in query.designs], dtype=np.float64)
    eps = gumbel_noise(rng, noise.lambda_true, values.shape)
    return int(np.argmax(chebyshev(values + eps, w))) + 1


def pairwise_mistake_rate(deltas: np.ndarray, lam: float) -> float:
    """Mean probability of preferring the worse design of each pair.

    For a pair with value gap delta > 0 the Gumbel model picks the worse
    design with probability 1 / (1 + exp(delta / lam)).
    """
    return float(np.mean(1.0 / (1.0 + np.exp(deltas / lam))))


def _top_pool(vals: np.ndarray, top_fraction: float) -> np.ndarray:
    """Values of the top top_fraction designs, grown past any tie plateau.

    Objectives with a large constant plateau at the maximum (e.g. a
    constraint-violation objective that is exactly zero on the feasible
    region) would otherwise yield an all-tie pool; the pool is doubled
    until it contains at least two distinct values.
    """
    n = vals.size
    k = max(int(np.ceil(top_fraction * n)), 2)
    svals = np.sort(vals)
    while True:
        pool = svals[n - k :]
        if pool[0] < pool[-1] or k >= n:
            return pool
        k = min(2 * k, n)


def calibrate_noise(
    problem: TestProblem,
    objective_index: int,
    target_rate: float = 0.2,
    top_fraction: float = 0.01,
    rng: np.random.Generator | None = None,
    n_designs: int = 100_000,
    n_pairs: int = 10_000,
    n_steps: int = 40,
    lam_lo: float = 1e-4,
    lam_hi: float = 1e3,
) -> float:
    """Gumbel scale at which top-design comparisons miss at target_rate.

    Samples n_designs uniformly, keeps the top_fraction by the objective,
    draws n_pairs random distinct-value pairs from that set once, and
    bisects the noise scale on a log grid until the mean closed-form
    mistake probability over those pairs hits the target.
    """
    if not 0.0 < target_rate < 0.5:
        raise ConfigError("target_rate must lie in (0, 0.5)")
    if not 0.0 < top_fraction < 1.0:
        raise ConfigError("top_fraction must lie in (0, 1)")
    rng = rng or np.random.default_rng()
    X = problem.space.sample_uniform(rng, n_designs)
    vals = problem.evaluate_many(X)[:, objective_index]
    top = _top_pool(vals, top_fraction)
    ii = rng.integers(top.size, size=n_pairs)
    jj = rng.integers(top.size, size=n_pairs)
    deltas = np.abs(top[ii] - top[jj])
    deltas = deltas[deltas > 0.0]  # exact ties carry no mistake information
    if deltas.size == 0:
        raise CalibrationError(
            f"objective {objective_index} is constant on its top set"
        )
    lo, hi = np.log(lam_lo), np.log(lam_hi)
    if pairwise_mistake_rate(deltas, lam_hi) < target_rate:
        raise CalibrationError("target rate unreachable within the scale bounds")
    for _ in range(n_steps):
        mid = 0.5 * (lo + hi)
        if pairwise_mistake_rate(deltas, np.exp(mid)) < target_rate:
            lo = mid
        else:
            hi = mid
    lam = float(np.exp(0.5 * (lo + hi)))
    achieved = pairwise_mistake_rate(deltas, lam)
    if abs(achieved - target_rate) > 0.01:
        raise CalibrationError(
            f"calibration stalled at rate {achieved:.4f} for target {target_rate}"
        )
    return lam


def estimate_mistake_rate(
    problem: TestProblem,
    objective_index: int,
    lam: float,
    rng: np.random.Generator,
    top_fraction: float = 0.01,
    n_designs: int = 100_000,
    n_pairs: int = 100_000,
) -> float:
    """Simulated mistake rate of a Gumbel(0, lam) DM on fresh top pairs.

    Independent of the calibration path: draws a fresh design sample and
    actually simulates the noisy comparisons instead of averaging the
    closed-form pair probabilities.
    """
    X = problem.space.sample_uniform(rng, n_designs)
    vals = problem.evaluate_many(X)[:, objective_index]
    top = _top_pool(vals, top_fraction)
    ii = rng.integers(top.size, size=n_pairs)
    jj = rng.integers(top.size, size=n_pairs)
    keep = top[ii] != top[jj]
    a, b = top[ii][keep], top[jj][keep]
    if a.size == 0:
        raise CalibrationError(
            f"objective {objective_index} is constant on its top set"
        )
    eps = gumbel_noise(rng, lam, (a.size, 2))
    first_wins = a + eps[:, 0] > b + eps[:, 1]
    return float(np.mean(np.where(first_wins, a < b, b < a)))


def calibrate_profile(
    problem: TestProblem,
    target_rate: float = 0.2,
    top_fraction: float = 0.01,
    rng: np.random.Generator | None = None,
    **kwargs,
) -> NoiseProfile:
    """Calibrated noise scales for every objective of a problem."""
    rng = rng or np.random.default_rng()
    lams = [
        calibrate_noise(
            problem, j, target_rate, top_fraction, rng=rng, **kwargs
        )
        for j in range(problem.m)
    ]
    return NoiseProfile(np.asarray(lams))
