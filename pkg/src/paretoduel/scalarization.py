"""Augmented Chebyshev scalarization and uniform weight-simplex sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError

DEFAULT_RHO = 0.05


@dataclass(frozen=True)
class ScalarizationWeights:
    theta: np.ndarray
    rho: float = DEFAULT_RHO

    def __post_init__(self):
        t = np.array(self.theta, dtype=np.float64, copy=True)
        if t.ndim != 1 or t.shape[0] < 1:
            raise DimensionError("theta must be a length-m vector")
        if np.any(t < 0.0):
            raise ConfigError("theta components must be nonnegative")
        if abs(t.sum() - 1.0) > 1e-12:
            raise ConfigError("theta must sum to 1 within 1e-12")
        if self.rho <= 0.0:
            raise ConfigError("rho must be positive")
        t.flags.writeable = False
        object.__setattr__(self, "theta", t)

    @property
    def m(self) -> int:
        return self.theta.shape[0]


def chebyshev(y, w: ScalarizationWeights):
    """s(y; theta) = min_j theta_j y_j + rho * sum_j theta_j y_j.

    Accepts a single length-m vector or an (n, m) batch.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-1] != w.m:
        raise DimensionError(f"objective vector length != m = {w.m}")
    weighted = y * w.theta
    return weighted.min(axis=-1) + w.rho * weighted.sum(axis=-1)


def chebyshev_grad_y(y, w: ScalarizationWeights) -> np.ndarray:
    """Subgradient of chebyshev w.r.t. y; one-hot at the active minimum.

    Shape matches y; ties pick the lowest objective index.
    """
    y = np.asarray(y, dtype=np.float64)
    weighted = y * w.theta
    jmin = np.argmin(weighted, axis=-1)
    grad = np.broadcast_to(w.rho * w.theta, y.shape).copy()
    if y.ndim == 1:
        grad[jmin] += w.theta[jmin]
    else:
        grad[np.arange(y.shape[0]), jmin] += w.theta[jmin]
    return grad


def sample_weights(
    rng: np.random.Generator, m: int, rho: float = DEFAULT_RHO
) -> ScalarizationWeights:
    """theta uniform over the (m-1)-simplex via normalized exponentials."""
    if m < 1:
        raise DimensionError("m must be >= 1")
    draws = rng.standard_exponential(m)
    return ScalarizationWeights(theta=draws / draws.sum(), rho=rho)
