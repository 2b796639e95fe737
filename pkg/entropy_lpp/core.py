# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Domain geometry and the entropy functional.

A path is represented by the finite set of points it is pinned through,
read from the implicit origin ``(0, 0)``. Its entropy is

    Ent = 1/2 * sum_i (x_i - x_{i-1})**2 / (t_i - t_{i-1})

which is also the entropy of the piecewise-linear interpolation of the
points, so no other path representation is needed.

>>> entropy([TimeSpacePoint(1, 2)])
2.0
>>> entropy([TimeSpacePoint(0.3, 0), TimeSpacePoint(0.3, 5)])
inf
"""

from dataclasses import dataclass, field
import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from entropy_lpp.errors import InvalidParameterError, UnsortedPointsError

CONTINUOUS = "continuous"
LATTICE = "lattice"
BOX_MODES = (CONTINUOUS, LATTICE)


class TimeSpacePoint(NamedTuple):
    t: float
    x: float


ORIGIN = TimeSpacePoint(0, 0)


@dataclass(frozen=True)
class Box:
    """Continuous box [0, t_max] x [-x_max, x_max] or lattice box
    [[1, t_max]] x [[-x_max, x_max]]."""

    mode: str
    t_max: float
    x_max: float

    def __post_init__(self):
        if self.mode not in BOX_MODES:
            raise InvalidParameterError(
                f"box mode must be one of {BOX_MODES}, got {self.mode!r}"
            )
        # a lattice box of half-width 0 is the single column x = 0
        x_ok = self.x_max >= 0 if self.mode == LATTICE else self.x_max > 0
        if not (self.t_max > 0 and x_ok):
            raise InvalidParameterError(
                f"box extents out of range, got {self.t_max}, {self.x_max}"
            )
        if self.mode == LATTICE and not (
            float(self.t_max).is_integer() and float(self.x_max).is_integer()
        ):
            raise InvalidParameterError("lattice box extents must be integers")

    @property
    def is_lattice(self) -> bool:
        return self.mode == LATTICE

    @property
    def cardinality(self) -> int:
        """Number of lattice sites (lattice boxes only)."""
        if not self.is_lattice:
            raise InvalidParameterError("continuous boxes have no cardinality")
        return int(self.t_max) * (2 * int(self.x_max) + 1)

    def contains(self, point: TimeSpacePoint) -> bool:
        if self.is_lattice:
            return (
                float(point.t).is_integer()
                and float(point.x).is_integer()
                and 1 <= point.t <= self.t_max
                and abs(point.x) <= self.x_max
            )
        return 0 <= point.t <= self.t_max and abs(point.x) <= self.x_max

    def to_dict(self) -> dict:
        return {"mode": self.mode, "t_max": self.t_max, "x_max": self.x_max}


def step_cost(start: TimeSpacePoint, end: TimeSpacePoint) -> float:
    """Entropy of the straight segment from ``start`` to ``end``.

    >>> step_cost(TimeSpacePoint(0, 0), TimeSpacePoint(1, 2))
    2.0
    >>> step_cost(TimeSpacePoint(0.5, 1), TimeSpacePoint(0.5, 3))
    inf
    """
    dt = end.t - start.t
    if not dt > 0:
        return math.inf
    dx = end.x - start.x
    return 0.5 * dx * dx / dt


def step_costs(
    t_from: np.ndarray | float,
    x_from: np.ndarray | float,
    t_to: np.ndarray | float,
    x_to: np.ndarray | float,
) -> np.ndarray:
    """Vectorized :func:`step_cost`; same floating-point operation order."""
    dt = np.subtract(t_to, t_from, dtype=np.float64)
    dx = np.subtract(x_to, x_from, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = 0.5 * dx * dx / dt
    return np.where(dt > 0, cost, np.inf)


def _check_time_sorted(points: Sequence[TimeSpacePoint]) -> None:
    for prev, cur in zip(points, points[1:]):
        if cur.t < prev.t:
            raise UnsortedPointsError(
                f"points are not sorted by time: {prev} precedes {cur}"
            )


def entropy(points: Sequence[TimeSpacePoint]) -> float:
    """Entropy of a time-sorted point sequence read from the origin.

    >>> entropy([TimeSpacePoint(0.5, 1), TimeSpacePoint(1, 1)])
    1.0
    >>> entropy([])
    0.0
    """
    points = [TimeSpacePoint(*p) for p in points]
    _check_time_sorted(points)
    total = 0.0
    prev = ORIGIN
    for cur in points:
        total += step_cost(prev, cur)
        prev = cur
    return total


def canonical_order(
    points: Sequence[TimeSpacePoint],
) -> list[TimeSpacePoint]:
    """Sort by time, then space, then original index.

    >>> canonical_order([TimeSpacePoint(1, 3), TimeSpacePoint(1, -2)])
    [TimeSpacePoint(t=1, x=-2), TimeSpacePoint(t=1, x=3)]
    """
    return [points[i] for i in canonical_indices(points)]


def canonical_indices(points: Sequence[TimeSpacePoint]) -> list[int]:
    return sorted(
        range(len(points)), key=lambda i: (points[i][0], points[i][1], i)
    )


def reflect(points: Iterable[TimeSpacePoint]) -> list[TimeSpacePoint]:
    return [TimeSpacePoint(p[0], -p[1]) for p in points]


def scale_points(
    points: Iterable[TimeSpacePoint],
    time_factor: float = 1.0,
    space_factor: float = 1.0,
) -> list[TimeSpacePoint]:
    """Entropy picks up a factor ``space_factor**2 / time_factor``."""
    return [
        TimeSpacePoint(p[0] * time_factor, p[1] * space_factor)
        for p in points
    ]


def interpolate(
    points: Sequence[TimeSpacePoint], times: Sequence[float]
) -> np.ndarray:
    """Positions of the piecewise-linear path through the origin and
    ``points`` at ``times``; the path stays put after its last point."""
    points = [TimeSpacePoint(*p) for p in points]
    _check_time_sorted(points)
    ts = np.array([0.0] + [p.t for p in points], dtype=np.float64)
    xs = np.array([0.0] + [p.x for p in points], dtype=np.float64)
    return np.interp(np.asarray(times, dtype=np.float64), ts, xs)


@dataclass(frozen=True)
class DeltaPath:
    """A strictly time-increasing set of points with its cached entropy."""

    points: tuple[TimeSpacePoint, ...] = ()
    entropy: float = field(default=0.0)

    @classmethod
    def from_points(cls, points: Iterable[TimeSpacePoint]) -> "DeltaPath":
        pts = tuple(TimeSpacePoint(*p) for p in points)
        return cls(points=pts, entropy=entropy(pts))

    def __len__(self) -> int:
        return len(self.points)

    def recompute_entropy(self) -> float:
        return entropy(self.points)

    def as_lists(self) -> list[list[float]]:
        return [[p.t, p.x] for p in self.points]
