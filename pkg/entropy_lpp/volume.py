# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Volume of the entropy body and its discrete counterpart.

The entropy body of order ``k`` over ``[0, t]`` with budget ``B`` is the set
of ``k``-tuples ``(t_i, x_i)`` with ``0 < t_1 < ... < t_k < t`` and entropy at
most ``B``. Its volume is

    C_k * B**(k/2) * t**(3k/2),   C_k = (pi / sqrt(2))**k
                                        / (Gamma(k/2 + 1) Gamma(3k/2 + 1))

evaluated in log space. A Monte Carlo estimator provides an independent check
and an exhaustive counter checks the lattice bound on small boxes.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln

from entropy_lpp.config import current_config
from entropy_lpp.environment import SeedSpec, derive_stream
from entropy_lpp.errors import GuardExceededError, InvalidParameterError
from entropy_lpp.experiments.stats import PooledMoments

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 12
EXHAUSTIVE_MAX_K = 3
MC_MIN_SAMPLES = 1000


def _check_positive(k: int, t: float, budget: float) -> None:
    if k < 1:
        raise InvalidParameterError(f"k must be at least 1, got {k}")
    if not (t > 0 and budget > 0):
        raise InvalidParameterError(
            f"t and B must be positive, got t={t}, B={budget}"
        )


def log_c_k(k: int) -> float:
    # each inner Gaussian integral contributes pi / sqrt(2)
    return float(
        k * math.log(math.pi / math.sqrt(2.0))
        - gammaln(k / 2 + 1)
        - gammaln(3 * k / 2 + 1)
    )


def volume_exact(k: int, t: float, budget: float) -> float:
    """Closed-form volume of the entropy body.

    >>> round(volume_exact(1, 1.0, 1.0), 7)
    1.8856181
    >>> round(volume_exact(2, 1.0, 1.0), 6)
    0.822467
    """
    _check_positive(k, t, budget)
    return math.exp(
        log_c_k(k) + 0.5 * k * math.log(budget) + 1.5 * k * math.log(t)
    )


def stirling_bound(
    k: int, t: float, budget: float, c: Optional[float] = None
) -> float:
    """``(c * B**(1/2) * t**(3/2) / k**2)**k``; ``c`` defaults to
    ``ELPP_STIRLING_C``."""
    _check_positive(k, t, budget)
    if c is None:
        c = current_config.ELPP_STIRLING_C
    return (c * math.sqrt(budget) * t**1.5 / (k * k)) ** k


@dataclass(frozen=True)
class VolumeEstimate:
    k: int
    t: float
    B: float
    exact: float
    mc_mean: float
    mc_stderr: float
    samples: int
    seed: Optional[SeedSpec] = None

    @property
    def deviation(self) -> float:
        """``|mc_mean - exact|`` in units of the standard error."""
        if self.mc_stderr == 0:
            return 0.0 if self.mc_mean == self.exact else math.inf
        return abs(self.mc_mean - self.exact) / self.mc_stderr

    def to_row(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "B": self.B,
            "exact": self.exact,
            "mc_mean": self.mc_mean,
            "mc_stderr": self.mc_stderr,
            "samples": self.samples,
            "seed": None if self.seed is None else self.seed.master_seed,
        }


def _accepted(
    rng: np.random.Generator, k: int, t: float, budget: float, size: int
) -> np.ndarray:
    """Draw ``size`` unordered tuples from the sampling box and flag those
    that lie in the body once sorted by time."""
    half_width = math.sqrt(2.0 * budget * t)
    times = rng.random((size, k)) * t
    xs = (2.0 * rng.random((size, k)) - 1.0) * half_width
    order = np.argsort(times, axis=1)
    times = np.take_along_axis(times, order, axis=1)
    xs = np.take_along_axis(xs, order, axis=1)
    dt = np.diff(times, axis=1, prepend=0.0)
    dx = np.diff(xs, axis=1, prepend=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.where(dt > 0, 0.5 * dx * dx / dt, np.inf)
    return steps.sum(axis=1) <= budget


def volume_mc(
    k: int,
    t: float,
    budget: float,
    samples: int,
    seed: SeedSpec,
    batch: Optional[int] = None,
) -> VolumeEstimate:
    """Monte Carlo estimate of the body volume.

    Tuples are drawn unordered in ``([0, t] x [-r, r])**k`` with
    ``r = sqrt(2 B t)``, which contains every feasible point. The acceptance
    rate times the box volume is divided by ``k!`` to undo the ordering.
    """
    _check_positive(k, t, budget)
    if k > current_config.ELPP_VOLUME_MC_MAX_K:
        raise GuardExceededError(
            f"Monte Carlo volume is limited to k <= "
            f"{current_config.ELPP_VOLUME_MC_MAX_K}, got {k}"
        )
    if samples < MC_MIN_SAMPLES:
        raise InvalidParameterError(
            f"need at least {MC_MIN_SAMPLES} samples, got {samples}"
        )
    batch = batch or current_config.ELPP_MC_BATCH
    scale = math.exp(
        k * math.log(2.0 * t * math.sqrt(2.0 * budget * t))
        - gammaln(k + 1)
    )
    rng = derive_stream(seed)
    moments = PooledMoments()
    remaining = samples
    while remaining:
        size = min(batch, remaining)
        hits = _accepted(rng, k, t, budget, size).astype(np.float64) * scale
        moments = moments.merge(PooledMoments.from_values(hits))
        remaining -= size
    estimate = VolumeEstimate(
        k=k,
        t=t,
        B=budget,
        exact=volume_exact(k, t, budget),
        mc_mean=moments.mean,
        mc_stderr=moments.stderr,
        samples=samples,
        seed=seed,
    )
    logger.debug(
        "volume k=%d t=%g B=%g: exact %.6g, mc %.6g +- %.2g",
        k,
        t,
        budget,
        estimate.exact,
        estimate.mc_mean,
        estimate.mc_stderr,
    )
    return estimate


def count_bound_discrete(k: int, n: int, budget: float) -> float:
    """``2**k * C_k * B**(k/2) * n**(3k/2)``.

    >>> count_bound_discrete(1, 1, 0.4) > 1
    True
    """
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    return 2.0**k * volume_exact(k, float(n), budget)


@dataclass(frozen=True)
class DiscreteCount:
    k: int
    n: int
    B: float
    count: int
    bound: float

    @property
    def holds(self) -> bool:
        return self.count <= self.bound


def _count_chains(n: int, start_t: int, k: int, left: float) -> int:
    # only increments matter, so the current position is not tracked
    if k == 0:
        return 1
    total = 0
    for t in range(start_t + 1, n + 1):
        dt = t - start_t
        reach = int(math.floor(math.sqrt(2.0 * left * dt)))
        for dx in range(-reach, reach + 1):
            cost = 0.5 * dx * dx / dt
            if cost <= left:
                total += _count_chains(n, t, k - 1, left - cost)
    return total


def count_lattice_body(k: int, n: int, budget: float) -> DiscreteCount:
    """Exhaustively count integer tuples ``0 < t_1 < ... < t_k <= n``,
    ``x_i`` integer, with entropy at most ``B``, next to the bound."""
    if k < 1 or n < 1 or not budget > 0:
        raise InvalidParameterError("k, n and B must be positive")
    if n > EXHAUSTIVE_MAX_N or k > EXHAUSTIVE_MAX_K:
        raise GuardExceededError(
            f"exhaustive counting is limited to n <= {EXHAUSTIVE_MAX_N} and "
            f"k <= {EXHAUSTIVE_MAX_K}, got n={n}, k={k}"
        )
    return DiscreteCount(
        k=k,
        n=n,
        B=budget,
        count=_count_chains(n, 0, k, budget),
        bound=count_bound_discrete(k, n, budget),
    )
