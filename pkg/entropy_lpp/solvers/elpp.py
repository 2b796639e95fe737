# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Exact entropy-controlled last passage values.

The solver keeps, per endpoint ``j`` (canonical order) and per point count
``k``, the smallest entropy of a time-increasing chain of ``k`` cloud points
ending at ``j``:

    F[j, 1] = cost(origin -> j)
    F[j, k] = min_i F[i, k - 1] + cost(i -> j)

Steps with equal times cost ``inf`` so they never enter a finite state. The
value for a budget ``B`` is the largest ``k`` with some ``F[j, k] <= B``.

Sums are formed in path order, the same order :func:`entropy_lpp.core.entropy`
uses, so comparisons against ``B`` agree exactly with the brute-force oracle.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np

from entropy_lpp.config import current_config
from entropy_lpp.core import (
    DeltaPath,
    ORIGIN,
    TimeSpacePoint,
    step_cost,
    step_costs,
)
from entropy_lpp.environment import Environment
from entropy_lpp.errors import GuardExceededError, InvalidParameterError

logger = logging.getLogger(__name__)

ORIGIN_INDEX = -1

_INITIAL_COLUMNS = 32


@dataclass(frozen=True)
class ParetoFrontier:
    """Minimal entropies per (endpoint, count).

    ``min_ent[j, k - 1]`` and ``back[j, k - 1]`` refer to canonical index
    ``j``; ``order[j]`` maps it back to the environment entry. Columns past
    ``min_ent.shape[1]`` are implicitly ``inf``.
    """

    order: np.ndarray
    t: np.ndarray
    x: np.ndarray
    min_ent: np.ndarray
    back: np.ndarray
    k_max: int
    budget: Optional[float] = None

    @property
    def size(self) -> int:
        return int(self.order.size)

    @property
    def max_count(self) -> int:
        """Largest count with a finite state."""
        finite = np.isfinite(self.min_ent).any(axis=0)
        return int(np.flatnonzero(finite)[-1] + 1) if finite.any() else 0

    def column(self, k: int) -> np.ndarray:
        if k < 1 or k > self.min_ent.shape[1]:
            return np.full(self.size, math.inf)
        return self.min_ent[:, k - 1]

    def best_for_count(self, k: int) -> tuple[float, int]:
        """Smallest entropy over endpoints for ``k`` points and the lowest
        canonical endpoint attaining it (``-1`` when infeasible)."""
        col = self.column(k)
        if col.size == 0:
            return math.inf, ORIGIN_INDEX
        j = int(np.argmin(col))
        value = float(col[j])
        return (value, j) if math.isfinite(value) else (math.inf, ORIGIN_INDEX)

    def chain(self, j: int, k: int) -> list[int]:
        """Canonical indices of the optimal ``k``-chain ending at ``j``."""
        out = []
        while k > 0 and j != ORIGIN_INDEX:
            out.append(j)
            j = int(self.back[j, k - 1])
            k -= 1
        out.reverse()
        return out

    def path(self, j: int, k: int) -> DeltaPath:
        points = [
            TimeSpacePoint(float(self.t[i]), float(self.x[i]))
            for i in self.chain(j, k)
        ]
        return DeltaPath.from_points(points)


def _canonical_arrays(env: Environment):
    order = np.lexsort((np.arange(len(env)), env.x, env.t))
    return order, np.asarray(env.t[order]), np.asarray(env.x[order])


def build_frontier(
    env: Environment,
    k_max: Optional[int] = None,
    budget: Optional[float] = None,
) -> ParetoFrontier:
    """Run the frontier recursion over every endpoint.

    Args:
        env: The point cloud. Weights are ignored.
        k_max: Stop tracking counts above this value. Defaults to
            ``ELPP_K_MAX`` from the configuration, and to no cap when that is
            unset.
        budget: If given, states whose entropy exceeds it are dropped. Every
            state at or under the budget keeps its exact value, so the
            frontier stays exact for queries at that budget.

    Returns:
        The :class:`ParetoFrontier`. Column storage grows with the largest
        count actually reached, not with the cloud size.
    """
    m = len(env)
    if m < 1:
        raise InvalidParameterError("the frontier needs at least one point")
    if k_max is None:
        k_max = current_config.ELPP_K_MAX
    cap_limit = m if k_max is None else max(1, min(m, int(k_max)))

    order, t, x = _canonical_arrays(env)
    cols = min(cap_limit, _INITIAL_COLUMNS)
    min_ent = np.full((m, cols), math.inf)
    back = np.full((m, cols), ORIGIN_INDEX, dtype=np.int64)
    reached = 0

    for j in range(m):
        first = step_cost(TimeSpacePoint(0.0, 0.0), TimeSpacePoint(t[j], x[j]))
        if budget is not None and first > budget:
            first = math.inf
        min_ent[j, 0] = first
        top = min(cap_limit, j + 1, reached + 1)
        if top > 1:
            if top > cols:
                grow = min(cap_limit, 2 * cols) - cols
                min_ent = np.hstack([min_ent, np.full((m, grow), math.inf)])
                back = np.hstack(
                    [back, np.full((m, grow), ORIGIN_INDEX, dtype=np.int64)]
                )
                cols += grow
            costs = step_costs(t[:j], x[:j], t[j], x[j])
            candidates = min_ent[:j, : top - 1] + costs[:, None]
            best = np.argmin(candidates, axis=0)
            values = candidates[best, np.arange(top - 1)]
            if budget is not None:
                values = np.where(values > budget, math.inf, values)
            min_ent[j, 1:top] = values
            back[j, 1:top] = best
        finite = np.flatnonzero(np.isfinite(min_ent[j, :top]))
        if finite.size:
            reached = max(reached, int(finite[-1]) + 1)

    logger.debug(
        "frontier over %d points reached count %d (cap %d)",
        m,
        reached,
        cap_limit,
    )
    return ParetoFrontier(
        order=order,
        t=t,
        x=x,
        min_ent=min_ent[:, : max(reached, 1)],
        back=back[:, : max(reached, 1)],
        k_max=cap_limit,
        budget=budget,
    )


@dataclass(frozen=True)
class ElppResult:
    value: int
    witness: DeltaPath
    budget: float
    frontier: Optional[ParetoFrontier] = None

    @property
    def entropy_of_witness(self) -> float:
        return self.witness.entropy

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness.as_lists(),
            "B": self.budget,
            "entropy_of_witness": self.entropy_of_witness,
        }


def _check_budget(budget: float) -> None:
    if math.isnan(budget) or budget < 0:
        raise InvalidParameterError(
            f"entropy budget must be nonnegative, got {budget}"
        )


def elpp_value(
    env: Environment,
    budget: float,
    k_max: Optional[int] = None,
    retain_frontier: bool = False,
) -> ElppResult:
    """Largest number of cloud points on a path of entropy at most ``budget``.

    >>> from entropy_lpp.environment import Environment
    >>> env = Environment.from_points([(0.5, 1), (1, 2)])
    >>> elpp_value(env, 2.0).value
    2
    >>> elpp_value(env, 1.5).witness.as_lists()
    [[0.5, 1.0]]
    """
    _check_budget(budget)
    if len(env) == 0:
        return ElppResult(value=0, witness=DeltaPath(), budget=budget)

    frontier = build_frontier(
        env, k_max=k_max, budget=None if math.isinf(budget) else budget
    )
    value = frontier.max_count
    if value:
        _, endpoint = frontier.best_for_count(value)
        witness = frontier.path(endpoint, value)
    else:
        witness = DeltaPath()
    if value == frontier.k_max and value < len(env):
        logger.warning(
            "E-LPP value hit the count cap %d; the true value may be larger",
            frontier.k_max,
        )
    return ElppResult(
        value=value,
        witness=witness,
        budget=budget,
        frontier=frontier if retain_frontier else None,
    )


def min_entropy_for_count(env: Environment, k: int) -> float:
    """Smallest entropy of a path collecting ``k`` cloud points.

    >>> from entropy_lpp.environment import Environment
    >>> env = Environment.from_points([(0.5, 1), (1, 2)])
    >>> min_entropy_for_count(env, 2), min_entropy_for_count(env, 1)
    (2.0, 1.0)
    """
    if not (1 <= k <= len(env)):
        raise InvalidParameterError(
            f"count must lie in [1, {len(env)}], got {k}"
        )
    frontier = build_frontier(env, k_max=k)
    return frontier.best_for_count(k)[0]


def min_entropy_profile(
    env: Environment, k_max: Optional[int] = None
) -> np.ndarray:
    """``min_entropy_for_count`` for every ``k`` up to ``k_max`` from a
    single frontier pass; infeasible counts are ``inf``."""
    if len(env) == 0:
        return np.empty(0)
    frontier = build_frontier(env, k_max=k_max)
    return np.array(
        [frontier.best_for_count(k)[0] for k in range(1, frontier.k_max + 1)]
    )


def brute_force_elpp(env: Environment, budget: float) -> int:
    """Exhaustive oracle over the time-increasing subsets of the cloud.

    Subsets are grown along canonical order; a branch is abandoned once its
    running entropy passes the budget, which no extension can undo since
    step costs are nonnegative.
    """
    _check_budget(budget)
    m = len(env)
    if m > current_config.ELPP_BRUTE_FORCE_MAX:
        raise GuardExceededError(
            f"brute force is limited to {current_config.ELPP_BRUTE_FORCE_MAX}"
            f" points, got {m}"
        )
    _, t, x = _canonical_arrays(env)
    points = [TimeSpacePoint(float(a), float(b)) for a, b in zip(t, x)]
    best = 0
    # (last index, count, running entropy)
    stack = [(ORIGIN_INDEX, 0, 0.0)]
    while stack:
        last, count, total = stack.pop()
        best = max(best, count)
        prev = ORIGIN if last == ORIGIN_INDEX else points[last]
        for nxt in range(last + 1, m):
            running = total + step_cost(prev, points[nxt])
            if running <= budget and running < math.inf:
                stack.append((nxt, count + 1, running))
    return best


def lipschitz_lpp_value(env: Environment, slope: float = 1.0) -> int:
    """Longest chain from the origin with ``|dx| <= slope * dt`` and strictly
    increasing times.

    A slope-``s`` chain over times in ``[0, n]`` has entropy at most
    ``s**2 * n / 2``, so this value never exceeds ``elpp_value`` at that
    budget.

    >>> from entropy_lpp.environment import Environment
    >>> lipschitz_lpp_value(Environment.from_points([(1, 1), (2, 0), (3, 2)]))
    2
    """
    if not slope > 0:
        raise InvalidParameterError(f"slope must be positive, got {slope}")
    m = len(env)
    if m == 0:
        return 0
    _, t, x = _canonical_arrays(env)
    length = np.full(m, -np.inf)
    for j in range(m):
        if abs(x[j]) > slope * t[j] or not t[j] > 0:
            continue
        dt = t[j] - t[:j]
        ok = (dt > 0) & (np.abs(x[j] - x[:j]) <= slope * dt)
        prior = length[:j][ok]
        prior = prior[np.isfinite(prior)]
        length[j] = 1 + (prior.max() if prior.size else 0)
    best = length.max()
    return int(best) if np.isfinite(best) else 0


def scale_of(m: int, budget: float, t: float, x: float) -> float:
    """Typical E-LPP size ``min((B t / x**2)**(1/4) * sqrt(m), m)``.

    >>> scale_of(100, 1, 1, 1)
    10.0
    """
    return min((budget * t / (x * x)) ** 0.25 * math.sqrt(m), float(m))


def tail_bound(
    k: int | np.ndarray, m: int, budget: float, t: float, x: float, c0: float
) -> float | np.ndarray:
    """Upper-bound curve ``(c0 * (B t / x**2)**(1/2) * m / k**2)**k``."""
    k = np.asarray(k, dtype=np.float64)
    base = c0 * math.sqrt(budget * t / (x * x)) * m / (k * k)
    out = np.power(base, k)
    return float(out) if out.ndim == 0 else out
