"""Foundational types: design spaces, queries, responses, Pareto relations.

All types are immutable value objects and all operations are pure functions.
Winner indices are 1-based everywhere they are stored or serialized; an
entry of 0 marks an objective whose feedback is a direct measurement rather
than a preference (mixed-visibility runs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    EmptyInputError,
    UnsupportedError,
)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DesignSpace:
    """Either a continuous box or an explicit finite list of designs."""

    dim: int
    bounds: np.ndarray | None = None  # (d, 2) lo/hi, continuous-box spaces
    points: np.ndarray | None = None  # (n, d), finite spaces

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("design space needs dim >= 1")
        if (self.bounds is None) == (self.points is None):
            raise DimensionError("exactly one of bounds/points must be given")
        if self.bounds is not None:
            b = _freeze(self.bounds)
            if b.shape != (self.dim, 2):
                raise DimensionError(f"bounds must be ({self.dim}, 2)")
            if np.any(b[:, 0] >= b[:, 1]):
                raise DimensionError("each coordinate needs lo < hi")
            object.__setattr__(self, "bounds", b)
        else:
            p = _freeze(self.points)
            if p.ndim != 2 or p.shape[1] != self.dim:
                raise DimensionError(f"points must be (n, {self.dim})")
            if p.shape[0] == 0:
                raise EmptyInputError("finite design space is empty")
            if len({pt.tobytes() for pt in p}) != p.shape[0]:
                raise DimensionError("finite design space has duplicate points")
            object.__setattr__(self, "points", p)

    @classmethod
    def unit_box(cls, dim: int) -> "DesignSpace":
        return cls(dim=dim, bounds=np.repeat([[0.0, 1.0]], dim, axis=0))

    @classmethod
    def finite(cls, points) -> "DesignSpace":
        points = np.asarray(points, dtype=np.float64)
        return cls(dim=points.shape[1], points=points)

    @property
    def kind(self) -> str:
        return "continuous-box" if self.bounds is not None else "finite"

    @property
    def n_points(self) -> int:
        if self.points is None:
            raise UnsupportedError("continuous space has no point count")
        return self.points.shape[0]

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            return False
        if self.bounds is not None:
            lo, hi = self.bounds[:, 0], self.bounds[:, 1]
            return bool(np.all(x >= lo - tol) and np.all(x <= hi + tol))
        return bool(np.any(np.max(np.abs(self.points - x), axis=1) <= tol))

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if not self.contains(x):
            raise DomainError(f"design {x} outside {self.kind} space")
        return x

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n designs drawn uniformly (box) or with replacement (finite)."""
        if self.bounds is not None:
            lo, hi = self.bounds[:, 0], self.bounds[:, 1]
            return lo + (hi - lo) * rng.random((n, self.dim))
        idx = rng.integers(self.n_points, size=n)
        return self.points[idx]


@dataclass(frozen=True)
class Query:
    """q designs presented together, stored as a (q, d) array."""

    designs: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.designs, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] < 2:
            raise DimensionError("a query needs a (q, d) array with q >= 2")
        object.__setattr__(self, "designs", _freeze(d))

    @property
    def q(self) -> int:
        return self.designs.shape[0]


@dataclass(frozen=True)
class Response:
    """Per-objective 1-based winner indices; 0 = measured, not compared."""

    winners: np.ndarray

    def __post_init__(self):
        w = np.array(self.winners, dtype=np.int64, copy=True)
        if w.ndim != 1 or w.shape[0] < 1:
            raise DimensionError("winners must be a length-m vector")
        if np.any(w < 0):
            raise DimensionError("winner indices are 1-based (0 = measured)")
        w.flags.writeable = False
        object.__setattr__(self, "winners", w)

    def validate_for(self, q: int):
        active = self.winners[self.winners > 0]
        if np.any(active > q):
            raise DimensionError(f"winner index exceeds q = {q}")

    @property
    def m(self) -> int:
        return self.winners.shape[0]


@dataclass
class InteractionDataset:
    """Ordered (query, response) records plus direct measurements.

    ``observations`` maps an observable objective index to a list of
    (design, measured value) pairs; observable indices never appear as
    active winner entries in the records.
    """

    records: list[tuple[Query, Response]] = field(default_factory=list)
    observations: dict[int, list[tuple[np.ndarray, float]]] = field(
        default_factory=dict
    )

    def append(self, query: Query, response: Response):
        response.validate_for(query.q)
        if self.records:
            q0, r0 = self.records[0]
            if query.q != q0.q or response.m != r0.m:
                raise DimensionError("all records must share the same q and m")
        for j in self.observations:
            if j < response.m and response.winners[j] > 0:
                raise DimensionError(
                    f"objective {j} is observable; no winner index allowed"
                )
        self.records.append((query, response))

    def add_observation(self, objective: int, design, value: float):
        design = np.asarray(design, dtype=np.float64)
        self.observations.setdefault(objective, []).append(
            (design, float(value))
        )

    @property
    def n_records(self) -> int:
        return len(self.records)

    @property
    def q(self) -> int:
        if not self.records:
            raise EmptyInputError("dataset has no records")
        return self.records[0][0].q

    @property
    def m(self) -> int:
        if not self.records:
            raise EmptyInputError("dataset has no records")
        return self.records[0][1].m

    def shown_designs(self) -> np.ndarray:
        """All designs shown so far, in presentation order, with repeats."""
        if not self.records:
            return np.zeros((0, 0))
        return np.vstack([q.designs for q, _ in self.records])


# ---------------------------------------------------------------------------
# Pareto relations (maximization convention throughout)
# ---------------------------------------------------------------------------


def pareto_dominates(a, b) -> bool:
    """True iff a >= b componentwise with at least one strict inequality."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError("objective vectors must share one length m")
    return bool(np.all(a >= b) and np.any(a > b))


def non_dominated_filter(points) -> np.ndarray:
    """Indices of points not dominated by any other point in the list.

    Duplicates of a non-dominated value are all retained (weak-dominance
    ties are not pruned).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInputError("non_dominated_filter needs a non-empty list")
    n = pts.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        ge = np.all(pts >= pts[i], axis=1)
        gt = np.any(pts > pts[i], axis=1)
        if np.any(ge & gt):
            keep[i] = False
    return np.flatnonzero(keep)


def pareto_set_finite(space: DesignSpace, f) -> np.ndarray:
    """Exact Pareto-optimal subset of a finite space under oracle f."""
    if space.kind != "finite":
        raise UnsupportedError("exact Pareto set needs a finite space")
    values = np.asarray([np.asarray(f(x), dtype=np.float64) for x in space.points])
    if values.ndim == 1:
        values = values[:, None]
    return space.points[non_dominated_filter(values)]


# ---------------------------------------------------------------------------
# Canonical JSON forms (trace files and the HTTP API)
# ---------------------------------------------------------------------------


def design_to_json(x) -> dict:
    return {"coords": [float(v) for v in np.asarray(x).ravel()]}


def design_from_json(obj) -> np.ndarray:
    return np.asarray(obj["coords"], dtype=np.float64)


def query_to_json(query: Query) -> dict:
    return {"designs": [design_to_json(x) for x in query.designs]}


def query_from_json(obj) -> Query:
    return Query(np.asarray([d["coords"] for d in obj["designs"]]))


def response_to_json(response: Response) -> dict:
    return {
        "winners": [int(w) if w > 0 else None for w in response.winners]
    }


def response_from_json(obj) -> Response:
    return Response(np.asarray([0 if w is None else w for w in obj["winners"]]))


def dataset_to_json(dataset: InteractionDataset) -> dict:
    return {
        "records": [
            {**query_to_json(q), **response_to_json(r)}
            for q, r in dataset.records
        ],
        "observations": [
            {"objective": j, "coords": design_to_json(x)["coords"], "value": v}
            for j, obs in sorted(dataset.observations.items())
            for x, v in obs
        ],
    }


def dataset_from_json(obj) -> InteractionDataset:
    ds = InteractionDataset()
    for rec in obj["records"]:
        ds.append(query_from_json(rec), response_from_json(rec))
    for o in obj.get("observations", []):
        ds.add_observation(o["objective"], o["coords"], o["value"])
    return ds
