"""Hypervolume indicator: exact for m <= 4, Monte-Carlo oracle, HV traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import InteractionDataset, non_dominated_filter
from .errors import DimensionError, UnsupportedError


@dataclass(frozen=True)
class FrontApproximation:
    """A finite Pareto-front approximation against a fixed reference point.

    Points below the reference in any coordinate are clipped to the
    reference, so they contribute zero volume instead of being rejected.
    """

    points: np.ndarray
    reference: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        ref = np.asarray(self.reference, dtype=np.float64)
        if pts.size and pts.shape[1] != ref.shape[0]:
            raise DimensionError("front points and reference disagree on m")
        pts = np.maximum(pts, ref)
        pts.flags.writeable = False
        ref = ref.copy()
        ref.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "reference", ref)

    @property
    def m(self) -> int:
        return self.reference.shape[0]


def hypervolume_exact(front: FrontApproximation) -> float:
    """Lebesgue measure of the union of boxes [reference, point]."""
    if front.m > 4:
        raise UnsupportedError("exact hypervolume supports m <= 4; use MC")
    if front.points.shape[0] == 0:
        return 0.0
    return float(_kernels.hv_exact(front.points, front.reference))


def hypervolume_mc(
    front: FrontApproximation, n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Uniform-sampling estimate and its binomial standard error."""
    pts = front.points
    ref = front.reference
    if pts.shape[0] == 0:
        return 0.0, 0.0
    hi = pts.max(axis=0)
    box = np.prod(hi - ref)
    if box <= 0.0:
        return 0.0, 0.0
    hits = 0
    done = 0
    chunk = 200_000
    while done < n_samples:
        k = min(chunk, n_samples - done)
        u = ref + (hi - ref) * rng.random((k, ref.shape[0]))
        dominated = np.zeros(k, dtype=bool)
        for p in pts:
            dominated |= np.all(u <= p, axis=1)
            if dominated.all():
                break
        hits += int(dominated.sum())
        done += k
    p_hat = hits / n_samples
    se = float(box * np.sqrt(p_hat * (1.0 - p_hat) / n_samples))
    return float(box * p_hat), se


def running_hv_trace(
    dataset: InteractionDataset, f, reference
) -> np.ndarray:
    """Hypervolume of the true-objective front of all designs shown so far.

    Simulation-mode metric: evaluates the oracle at every shown design and
    reports one value per record (monotone by construction).
    """
    reference = np.asarray(reference, dtype=np.float64)
    values: list[np.ndarray] = []
    trace = []
    for query, _ in dataset.records:
        for x in query.designs:
            values.append(np.asarray(f(x), dtype=np.float64))
        arr = np.asarray(values)
        nd = arr[non_dominated_filter(arr)]
        trace.append(hypervolume_exact(FrontApproximation(nd, reference)))
    return np.asarray(trace)
