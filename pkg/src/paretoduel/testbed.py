"""Synthetic multi-objective test problems in maximization form.

All suite problems are minimization in their published form; the engine
maximizes, so every objective is negated here (one global convention).
Design coordinates are always the normalized unit box [0, 1]^d and are
mapped affinely onto each problem's native variable bounds.

The fixed hypervolume reference points were computed once as the
componentwise minimum objective over 1e5 uniform design samples, expanded
by 1% of the per-coordinate sampled range, and frozen below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DesignSpace
from .errors import ConfigError

__all__ = [
    "TestProblem",
    "get_problem",
    "problem_names",
    "dtlz1",
    "dtlz2",
    "vehicle_safety",
    "car_side_impact",
]


@dataclass(frozen=True)
class TestProblem:
    name: str
    space: DesignSpace
    m: int
    hv_reference: np.ndarray
    _batch_eval: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, x) -> np.ndarray:
        """Objective vector (length m) at one normalized design."""
        x = self.space.check(x)
        return self._batch_eval(x[None, :])[0]

    def evaluate_many(self, X) -> np.ndarray:
        """(n, m) objective values at an (n, d) batch of designs."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.space.dim:
            raise ConfigError(f"batch must be (n, {self.space.dim})")
        return self._batch_eval(X)

    @property
    def d(self) -> int:
        return self.space.dim


def _dtlz1_batch(X: np.ndarray) -> np.ndarray:
    # m=2, d=6, k=5 position variables
    xm = X[:, 1:] - 0.5
    g = 100.0 * (5.0 + np.sum(xm**2 - np.cos(20.0 * np.pi * xm), axis=1))
    f1 = 0.5 * X[:, 0] * (1.0 + g)
    f2 = 0.5 * (1.0 - X[:, 0]) * (1.0 + g)
    return -np.stack([f1, f2], axis=1)


def _dtlz2_batch(X: np.ndarray) -> np.ndarray:
    # m=2, d=3, k=2 position variables
    g = np.sum((X[:, 1:] - 0.5) ** 2, axis=1)
    angle = 0.5 * np.pi * X[:, 0]
    f1 = (1.0 + g) * np.cos(angle)
    f2 = (1.0 + g) * np.sin(angle)
    return -np.stack([f1, f2], axis=1)


_VEHICLE_BOUNDS = np.array([[1.0, 3.0]] * 5)


def _vehicle_safety_batch(X: np.ndarray) -> np.ndarray:
    # crashworthiness design: mass, acceleration, toe-board intrusion
    lo, hi = _VEHICLE_BOUNDS[:, 0], _VEHICLE_BOUNDS[:, 1]
    x1, x2, x3, x4, x5 = (lo + (hi - lo) * X).T
    f1 = (
        1640.2823
        + 2.3573285 * x1
        + 2.3220035 * x2
        + 4.5688768 * x3
        + 7.7213633 * x4
        + 4.4559504 * x5
    )
    f2 = (
        6.5856
        + 1.15 * x1
        - 1.0427 * x2
        + 0.9738 * x3
        + 0.8364 * x4
        - 0.3695 * x1 * x4
        + 0.0861 * x1 * x5
        + 0.3628 * x2 * x4
        - 0.1106 * x1**2
        - 0.3437 * x3**2
        + 0.1764 * x4**2
    )
    f3 = (
        -0.0551
        + 0.0181 * x1
        + 0.1024 * x2
        + 0.0421 * x3
        - 0.0073 * x1 * x2
        + 0.024 * x2 * x3
        - 0.0118 * x2 * x4
        - 0.0204 * x3 * x4
        - 0.008 * x3 * x5
        - 0.0241 * x3**2
        + 0.0109 * x4**2
    )
    return -np.stack([f1, f2, f3], axis=1)


_CAR_BOUNDS = np.array(
    [
        [0.5, 1.5],
        [0.45, 1.35],
        [0.5, 1.5],
        [0.5, 1.5],
        [0.875, 2.625],
        [0.4, 1.2],
        [0.4, 1.2],
    ]
)


def _car_side_impact_batch(X: np.ndarray) -> np.ndarray:
    # structural weight, pubic force, averaged velocity, constraint violation
    lo, hi = _CAR_BOUNDS[:, 0], _CAR_BOUNDS[:, 1]
    x1, x2, x3, x4, x5, x6, x7 = (lo + (hi - lo) * X).T
    f1 = (
        1.98
        + 4.9 * x1
        + 6.67 * x2
        + 6.98 * x3
        + 4.01 * x4
        + 1.78 * x5
        + 0.00001 * x6
        + 2.73 * x7
    )
    f2 = 4.72 - 0.5 * x4 - 0.19 * x2 * x3
    v_mbp = 10.58 - 0.674 * x1 * x2 - 0.67275 * x2
    v_fd = 16.45 - 0.489 * x3 * x7 - 0.843 * x5 * x6
    f3 = 0.5 * (v_mbp + v_fd)
    g = np.stack(
        [
            1.0 - (1.16 - 0.3717 * x2 * x4 - 0.0092928 * x3),
            0.32
            - (
                0.261
                - 0.0159 * x1 * x2
                - 0.06486 * x1
                - 0.019 * x2 * x7
                + 0.0144 * x3 * x5
                + 0.0154464 * x6
            ),
            0.32
            - (
                0.214
                + 0.00817 * x5
                - 0.045195 * x1
                - 0.0135168 * x1
                + 0.03099 * x2 * x6
                - 0.018 * x2 * x7
                + 0.007176 * x3
                + 0.023232 * x3
                - 0.00364 * x5 * x6
                - 0.018 * x2**2
            ),
            0.32
            - (0.74 - 0.61 * x2 - 0.031296 * x3 - 0.031872 * x7 + 0.227 * x2**2),
            32.0 - (28.98 + 3.818 * x3 - 4.2 * x1 * x2 + 1.27296 * x6 - 2.68065 * x7),
            32.0
            - (
                33.86
                + 2.95 * x3
                - 5.057 * x1 * x2
                - 3.795 * x2
                - 3.4431 * x7
                + 1.45728
            ),
            32.0 - (46.36 - 9.9 * x2 - 4.4505 * x1),
            4.0 - f2,
            9.9 - v_mbp,
            15.7 - v_fd,
        ],
        axis=1,
    )
    f4 = np.sum(np.maximum(-g, 0.0), axis=1)
    return -np.stack([f1, f2, f3, f4], axis=1)


# frozen per-problem reference points (see module docstring; sampled with
# numpy default_rng(2024), 1e5 designs per problem)
_HV_REFERENCES = {
    "dtlz1": np.array([-507.90835853, -514.46124602]),
    "dtlz2": np.array([-1.50740116, -1.50505542]),
    "vehicle_safety": np.array([-1.70295924e03, -1.17232071e01, -2.96309126e-01]),
    "car_side_impact": np.array([-41.00245170, -4.42892601, -13.03564256, -12.88559489]),
}


def _make(name: str, d: int, m: int, batch: Callable) -> TestProblem:
    return TestProblem(
        name=name,
        space=DesignSpace.unit_box(d),
        m=m,
        hv_reference=_HV_REFERENCES[name],
        _batch_eval=batch,
    )


def dtlz1() -> TestProblem:
    return _make("dtlz1", 6, 2, _dtlz1_batch)


def dtlz2() -> TestProblem:
    return _make("dtlz2", 3, 2, _dtlz2_batch)


def vehicle_safety() -> TestProblem:
    return _make("vehicle_safety", 5, 3, _vehicle_safety_batch)


def car_side_impact() -> TestProblem:
    return _make("car_side_impact", 7, 4, _car_side_impact_batch)


_REGISTRY = {
    "dtlz1": dtlz1,
    "dtlz2": dtlz2,
    "vehicle_safety": vehicle_safety,
    "car_side_impact": car_side_impact,
}


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> TestProblem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ConfigError(
            f"unknown problem {name!r}; available: {problem_names()}"
        ) from None
