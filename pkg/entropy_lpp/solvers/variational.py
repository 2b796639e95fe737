# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Energy-entropy variational problems over finitely many weights.

For a weighted cloud the problem ``sup_D beta * energy(D) - entropy(D)``
is a longest path in the DAG of time-increasing chains, since both terms add
up along the chain:

    best[j] = beta * w_j + max(-cost(origin -> j),
                               max_i best[i] - cost(i -> j))

The empty chain is admissible, so the value is ``max(0, max_j best[j])``.
The continuum problem truncated to its ``ell`` largest records is solved
the same way after sampling the records.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional, Sequence

import numpy as np

from entropy_lpp.config import current_config
from entropy_lpp.core import DeltaPath, TimeSpacePoint, step_cost, step_costs
from entropy_lpp.environment import Environment, SeedSpec, sample_ppp_ordered
from entropy_lpp.errors import (
    CurveShapeError,
    GuardExceededError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

CONVEXITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VariationalResult:
    value: float
    argmax: DeltaPath
    ell_used: int
    beta: float
    energy: float = 0.0
    indices: tuple[int, ...] = ()
    argmax_weights: tuple[float, ...] = ()

    @property
    def entropy(self) -> float:
        return self.argmax.entropy

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [
                [w, p.t, p.x]
                for w, p in zip(self.argmax_weights, self.argmax.points)
            ],
            "beta": self.beta,
            "ell": self.ell_used,
        }


def _check_beta(beta: float) -> None:
    if math.isnan(beta) or beta < 0:
        raise InvalidParameterError(f"beta must be nonnegative, got {beta}")


def _empty_result(beta: float, ell: int) -> VariationalResult:
    return VariationalResult(
        value=0.0, argmax=DeltaPath(), ell_used=ell, beta=beta
    )


def _longest_chain(
    env: Environment, beta: float, offset: int, ell_used: int
) -> VariationalResult:
    """DAG longest path over every entry of ``env``; entry ``r`` of ``env``
    is reported as index ``offset + r``."""
    m = len(env)
    if m == 0:
        return _empty_result(beta, ell_used)
    order = np.lexsort((np.arange(m), env.x, env.t))
    t, x, w = env.t[order], env.x[order], env.weights[order]

    best = np.full(m, -np.inf)
    back = np.full(m, -1, dtype=np.int64)
    for j in range(m):
        gain = -step_cost(TimeSpacePoint(0.0, 0.0), TimeSpacePoint(t[j], x[j]))
        if j:
            with np.errstate(invalid="ignore"):
                via = best[:j] - step_costs(t[:j], x[:j], t[j], x[j])
            i = int(np.argmax(via))
            if via[i] > gain:
                gain = float(via[i])
                back[j] = i
        best[j] = beta * w[j] + gain

    j = int(np.argmax(best))
    if not best[j] > 0:
        return _empty_result(beta, ell_used)
    chain = []
    while j != -1:
        chain.append(j)
        j = int(back[j])
    chain.reverse()

    path = DeltaPath.from_points(
        TimeSpacePoint(float(t[i]), float(x[i])) for i in chain
    )
    weights = tuple(float(w[i]) for i in chain)
    return VariationalResult(
        value=float(best[chain[-1]]),
        argmax=path,
        ell_used=ell_used,
        beta=beta,
        energy=float(sum(weights)),
        indices=tuple(sorted(offset + int(order[i]) for i in chain)),
        argmax_weights=weights,
    )


def solve_variational(
    env: Environment, beta: float, ell: int
) -> VariationalResult:
    """Maximize ``beta * energy - entropy`` over the ``ell`` heaviest entries.

    ``ell = 0`` is admissible and yields the empty maximizer.

    >>> from entropy_lpp.environment import Environment
    >>> env = Environment.from_points([(0.5, 1)], weights=[1.0])
    >>> solve_variational(env, 4.0, 1).value
    3.0
    >>> len(solve_variational(env, 0.5, 1).argmax)
    0
    """
    _check_beta(beta)
    if not (0 <= ell <= len(env)):
        raise InvalidParameterError(
            f"ell must lie in [0, {len(env)}], got {ell}"
        )
    if ell == 0:
        return _empty_result(beta, 0)
    return _longest_chain(env.head(ell), beta, 0, ell)


def solve_tail(env: Environment, beta: float, ell: int) -> VariationalResult:
    """Same problem restricted to entries of rank greater than ``ell``."""
    _check_beta(beta)
    if not (0 <= ell < len(env)):
        raise InvalidParameterError(
            f"ell must lie in [0, {len(env) - 1}] to leave a tail, got {ell}"
        )
    return _longest_chain(env.beyond(ell), beta, ell, ell)


def solve_all(env: Environment, beta: float) -> VariationalResult:
    return solve_variational(env, beta, len(env))


def continuum_T_truncated(
    alpha: float, nu: float, q: float, ell: int, seed: SeedSpec
) -> VariationalResult:
    """Continuum problem with intensity ``nu`` on ``[0,1] x [-q,q]``, kept to
    the ``ell`` largest records of the weight process.

    Between records the optimal path is straight, so the finite problem is
    exact for the truncated process.
    """
    _check_beta(nu)
    env = sample_ppp_ordered(ell, alpha, q, seed)
    return solve_variational(env, nu, ell)


@dataclass(frozen=True)
class BetaSweep:
    betas: tuple[float, ...]
    values: tuple[float, ...]
    argmax_ids: tuple[tuple[int, ...], ...]

    @property
    def is_monotone(self) -> bool:
        return all(b >= a for a, b in zip(self.values, self.values[1:]))

    @property
    def is_convex(self) -> bool:
        """Slopes between consecutive distinct betas never decrease."""
        slopes = []
        for (b0, v0), (b1, v1) in zip(
            zip(self.betas, self.values), zip(self.betas[1:], self.values[1:])
        ):
            if b1 > b0:
                slopes.append((v1 - v0) / (b1 - b0))
        scale = max([1.0] + [abs(v) for v in self.values])
        return all(
            s1 - s0 >= -CONVEXITY_TOLERANCE * scale
            for s0, s1 in zip(slopes, slopes[1:])
        )

    def rows(self) -> list[dict]:
        return [
            {"beta": b, "value": v, "argmax_size": len(ids)}
            for b, v, ids in zip(self.betas, self.values, self.argmax_ids)
        ]


def beta_sweep(
    env: Environment, betas: Sequence[float], ell: int
) -> BetaSweep:
    """Solve at every beta of an ascending grid and check the curve shape.

    The value is a maximum of finitely many affine functions of beta, so it
    must come out nondecreasing and convex; a violation raises
    :class:`CurveShapeError`.
    """
    betas = tuple(float(b) for b in betas)
    if any(b < 0 for b in betas) or any(
        b1 < b0 for b0, b1 in zip(betas, betas[1:])
    ):
        raise InvalidParameterError("betas must be nonnegative and ascending")
    logger.debug("beta sweep over %d betas at ell=%d", len(betas), ell)
    results = [solve_variational(env, b, ell) for b in betas]
    sweep = BetaSweep(
        betas=betas,
        values=tuple(r.value for r in results),
        argmax_ids=tuple(r.indices for r in results),
    )
    if not (sweep.is_monotone and sweep.is_convex):
        raise CurveShapeError(
            f"beta sweep lost its shape (monotone={sweep.is_monotone}, "
            f"convex={sweep.is_convex}) over betas {list(betas)} with "
            f"values {list(sweep.values)}"
        )
    return sweep


def _chains(env: Environment, beta: float):
    """Every time-increasing chain of ``env`` as ``(value, indices)``,
    the empty chain included."""
    m = len(env)
    order = np.lexsort((np.arange(m), env.x, env.t))
    points = [TimeSpacePoint(float(env.t[i]), float(env.x[i])) for i in order]
    weights = [float(env.weights[i]) for i in order]
    stack = [(-1, 0.0, 0.0, ())]
    while stack:
        last, energy, ent, members = stack.pop()
        ids = tuple(sorted(int(order[i]) for i in members))
        yield beta * energy - ent, ids
        prev = TimeSpacePoint(0.0, 0.0) if last == -1 else points[last]
        for nxt in range(last + 1, m):
            cost = step_cost(prev, points[nxt])
            if math.isfinite(cost):
                stack.append(
                    (nxt, energy + weights[nxt], ent + cost, members + (nxt,))
                )


def brute_force_variational(
    env: Environment, beta: float, ell: int
) -> tuple[float, tuple[int, ...]]:
    """Exhaustive maximum over the subsets of the ``ell`` heaviest entries.

    Ties go to the chain found first, the empty one included.
    """
    _check_beta(beta)
    if ell > current_config.ELPP_BRUTE_FORCE_MAX:
        raise GuardExceededError(
            f"exhaustive search is limited to "
            f"{current_config.ELPP_BRUTE_FORCE_MAX} entries, got {ell}"
        )
    best_value, best_ids = 0.0, ()
    for value, ids in _chains(env.head(ell), beta):
        if value > best_value:
            best_value, best_ids = value, ids
    return best_value, best_ids


@dataclass(frozen=True)
class UniquenessReport:
    unique: bool
    value: float
    maximizers: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "unique": self.unique,
            "value": self.value,
            "maximizers": [list(ids) for ids in self.maximizers],
        }


def check_maximizer_unique(
    env: Environment,
    beta: float,
    ell: int,
    tolerance: Optional[float] = None,
) -> UniquenessReport:
    """Enumerate all subsets of the ``ell`` heaviest entries and report every
    subset attaining the maximum.

    Values within ``tolerance`` (default ``1e-12`` times the value scale) of
    the maximum count as ties.
    """
    _check_beta(beta)
    if ell > current_config.ELPP_UNIQUENESS_MAX:
        raise GuardExceededError(
            f"uniqueness check is limited to "
            f"{current_config.ELPP_UNIQUENESS_MAX} entries, got {ell}"
        )
    if not (0 <= ell <= len(env)):
        raise InvalidParameterError(
            f"ell must lie in [0, {len(env)}], got {ell}"
        )
    scored = list(_chains(env.head(ell), beta))
    top = max(v for v, _ in scored)
    if tolerance is None:
        tolerance = 1e-12 * max(1.0, abs(top))
    maximizers = tuple(
        sorted(ids for v, ids in scored if v >= top - tolerance)
    )
    return UniquenessReport(
        unique=len(maximizers) == 1, value=top, maximizers=maximizers
    )
