# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Random environments under deterministic seeding.

Every sampler is a pure function of its parameters and a :class:`SeedSpec`.
Environments are stored in ordered-statistic form: entry ``r`` holds the
``r``-th largest weight and its location. Unweighted clouds carry weight 1
at every entry.

Heavy-tailed weights follow the pure Pareto law ``P(w > y) = y**-alpha`` for
``y >= 1``, so the quantile ``m(x) = x**(1/alpha)`` is exact.
"""

from dataclasses import dataclass, field
import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from entropy_lpp.config import current_config
from entropy_lpp.core import (
    Box,
    CONTINUOUS,
    LATTICE,
    TimeSpacePoint,
)
from entropy_lpp.errors import (
    BoxCapacityError,
    EnvironmentFormatError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

UNIFORM_CLOUD = "uniform-cloud"
LATTICE_CLOUD = "lattice-cloud"
LATTICE_FIELD = "lattice-field"
PPP = "ppp"
MANUAL = "manual"
KINDS = (UNIFORM_CLOUD, LATTICE_CLOUD, LATTICE_FIELD, PPP, MANUAL)

FIELD_METHODS = ("auto", "full", "order-statistic")

UINT64_LIMIT = 2**64

GENERATOR_ID = (
    f"numpy-{np.__version__}:PCG64"
    ":SeedSequence(entropy=master_seed,spawn_key=(stream_index,))"
)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not (
                0 <= value < UINT64_LIMIT
            ):
                raise InvalidParameterError(
                    f"{name} must be a 64-bit unsigned integer, got {value!r}"
                )

    def to_dict(self) -> dict:
        return {
            "master": int(self.master_seed),
            "stream": int(self.stream_index),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SeedSpec":
        return cls(int(data["master"]), int(data["stream"]))


def derive_stream(seed: SeedSpec) -> np.random.Generator:
    """Deterministic generator for one ``(master_seed, stream_index)`` pair.

    The pair is hashed by numpy's ``SeedSequence`` (the stream index goes
    in as the spawn key), which feeds a PCG64 bit generator.

    >>> a = derive_stream(SeedSpec(7, 0)).random()
    >>> a == derive_stream(SeedSpec(7, 0)).random()
    True
    >>> a == derive_stream(SeedSpec(7, 1)).random()
    False
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed.master_seed), spawn_key=(int(seed.stream_index),)
    )
    return np.random.Generator(np.random.PCG64(sequence))


def standard_exponentials(rng: np.random.Generator, size: int) -> np.ndarray:
    """Exp(1) draws by inversion, ``-log(1 - U)``."""
    return -np.log1p(-rng.random(size))


def _check_alpha(alpha: float) -> None:
    if not (0 < alpha < 2):
        raise InvalidParameterError(
            f"tail exponent alpha must lie in (0, 2), got {alpha}"
        )


def m_of(x: float, alpha: float) -> float:
    """The ``1 - 1/x`` quantile of the Pareto(alpha) weight law.

    >>> m_of(100, 2)
    10.0
    >>> m_of(1, 0.7)
    1.0
    """
    if x < 1:
        raise InvalidParameterError(f"m(x) needs x >= 1, got {x}")
    return float(x) ** (1.0 / alpha)


def beta_for_nu(nu: float, n: int, h: int, alpha: float) -> float:
    """Solve ``n/h**2 * beta * m(n h) = nu`` for beta."""
    return nu * h * h / (n * m_of(n * h, alpha))


@dataclass(frozen=True)
class Environment:
    """A weighted point cloud in ordered-statistic form.

    ``weights``, ``t`` and ``x`` are read-only float64 arrays of equal
    length; weights are nonincreasing.
    """

    box: Box
    weights: np.ndarray
    t: np.ndarray
    x: np.ndarray
    kind: str
    seed: Optional[SeedSpec] = None
    alpha: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown environment kind {self.kind}")
        arrays = []
        for name in ("weights", "t", "x"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        w, t, x = arrays
        if not (w.shape == t.shape == x.shape) or w.ndim != 1:
            raise InvalidParameterError(
                "weights, times and positions must be 1-d and equally long"
            )
        if np.any(w < 0):
            raise InvalidParameterError("weights must be nonnegative")
        if w.size > 1 and np.any(np.diff(w) > 0):
            raise InvalidParameterError("weights must be nonincreasing")
        if self.alpha is not None:
            _check_alpha(self.alpha)
        if self.box.is_lattice:
            if np.any(t != np.round(t)) or np.any(x != np.round(x)):
                raise InvalidParameterError(
                    "lattice environments need integer coordinates"
                )
            inside = (t >= 1) & (t <= self.box.t_max)
        else:
            inside = (t >= 0) & (t <= self.box.t_max)
        inside &= np.abs(x) <= self.box.x_max
        if not np.all(inside):
            raise InvalidParameterError("locations must lie inside the box")

    def __len__(self) -> int:
        return int(self.weights.size)

    @property
    def entries(self) -> list[tuple[float, TimeSpacePoint]]:
        return [
            (float(w), TimeSpacePoint(float(t), float(x)))
            for w, t, x in zip(self.weights, self.t, self.x)
        ]

    @property
    def points(self) -> list[TimeSpacePoint]:
        return [
            TimeSpacePoint(float(t), float(x)) for t, x in zip(self.t, self.x)
        ]

    def _replace_entries(
        self, index: slice | np.ndarray, **extra
    ) -> "Environment":
        return Environment(
            box=self.box,
            weights=self.weights[index],
            t=self.t[index],
            x=self.x[index],
            kind=self.kind,
            seed=self.seed,
            alpha=self.alpha,
            metadata={**self.metadata, **extra},
        )

    def head(self, ell: int) -> "Environment":
        """The ``ell`` heaviest entries."""
        return self._replace_entries(slice(0, ell))

    def beyond(self, ell: int) -> "Environment":
        """Entries of rank greater than ``ell``."""
        return self._replace_entries(slice(ell, None))

    def reflected(self) -> "Environment":
        return Environment(
            box=self.box,
            weights=self.weights,
            t=self.t,
            x=-self.x + 0.0,
            kind=self.kind,
            seed=self.seed,
            alpha=self.alpha,
            metadata=dict(self.metadata),
        )

    def scaled_weights(self, factor: float) -> "Environment":
        if not factor > 0:
            raise InvalidParameterError("weight scale factor must be positive")
        return Environment(
            box=self.box,
            weights=self.weights * factor,
            t=self.t,
            x=self.x,
            kind=self.kind,
            seed=self.seed,
            alpha=self.alpha,
            metadata=dict(self.metadata),
        )

    @classmethod
    def from_points(
        cls,
        points: Iterable[Sequence[float]],
        weights: Optional[Sequence[float]] = None,
        box: Optional[Box] = None,
    ) -> "Environment":
        """Hand-built environment; entries are re-sorted by weight
        (stable, so equal weights keep the given order)."""
        pts = [TimeSpacePoint(*p) for p in points]
        w = np.ones(len(pts)) if weights is None else np.asarray(
            weights, dtype=np.float64
        )
        if w.size != len(pts):
            raise InvalidParameterError("one weight per point is required")
        order = np.argsort(-w, kind="stable")
        t = np.array([p.t for p in pts], dtype=np.float64)[order]
        x = np.array([p.x for p in pts], dtype=np.float64)[order]
        if box is None:
            t_max = max(float(t.max()) if t.size else 1.0, 1.0)
            x_max = max(float(np.abs(x).max()) if x.size else 1.0, 1.0)
            box = Box(CONTINUOUS, t_max, x_max)
        return cls(box=box, weights=w[order], t=t, x=x, kind=MANUAL)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "box": self.box.to_dict(),
            "alpha": self.alpha,
            "seed": self.seed.to_dict() if self.seed else None,
            "entries": [
                [float(w), float(t), float(x)]
                for w, t, x in zip(self.weights, self.t, self.x)
            ],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Environment":
        try:
            box = Box(**data["box"])
            entries = np.asarray(data["entries"], dtype=np.float64).reshape(
                -1, 3
            )
            seed = (
                SeedSpec.from_dict(data["seed"]) if data.get("seed") else None
            )
            return cls(
                box=box,
                weights=entries[:, 0],
                t=entries[:, 1],
                x=entries[:, 2],
                kind=data["kind"],
                seed=seed,
                alpha=data.get("alpha"),
                metadata=dict(data.get("metadata") or {}),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidParameterError):
                raise EnvironmentFormatError(
                    f"environment document violates invariants: {e.message}"
                )
            raise EnvironmentFormatError(
                f"malformed environment document: {e!r}"
            )


def _sample_distinct_sites(
    rng: np.random.Generator, cardinality: int, count: int
) -> np.ndarray:
    """Partial Fisher-Yates over ``range(cardinality)`` with a sparse swap
    map, so only ``count`` slots are ever touched."""
    swaps: dict[int, int] = {}
    picks = np.empty(count, dtype=np.int64)
    draws = rng.integers(
        np.arange(count), cardinality, size=count, dtype=np.int64
    )
    for i in range(count):
        j = int(draws[i])
        picks[i] = swaps.get(j, j)
        swaps[j] = swaps.get(i, i)
    return picks


def _site_coordinates(
    sites: np.ndarray, box: Box
) -> tuple[np.ndarray, np.ndarray]:
    width = 2 * int(box.x_max) + 1
    t = sites // width + 1
    x = sites % width - int(box.x_max)
    return t.astype(np.float64), x.astype(np.float64)


def sample_uniform_cloud(m: int, box: Box, seed: SeedSpec) -> Environment:
    """``m`` i.i.d. uniform points in the continuous box."""
    if m < 1:
        raise InvalidParameterError(f"cloud size must be at least 1, got {m}")
    if box.mode != CONTINUOUS:
        raise InvalidParameterError("uniform clouds need a continuous box")
    rng = derive_stream(seed)
    t = rng.random(m) * box.t_max
    x = (2.0 * rng.random(m) - 1.0) * box.x_max
    return Environment(
        box=box,
        weights=np.ones(m),
        t=t,
        x=x,
        kind=UNIFORM_CLOUD,
        seed=seed,
    )


def sample_lattice_cloud(m: int, box: Box, seed: SeedSpec) -> Environment:
    """``m`` distinct lattice points, uniformly without replacement."""
    if box.mode != LATTICE:
        raise InvalidParameterError("lattice clouds need a lattice box")
    cardinality = box.cardinality
    if m < 1:
        raise InvalidParameterError(f"cloud size must be at least 1, got {m}")
    if m > cardinality:
        raise BoxCapacityError(
            f"cannot draw {m} distinct points from a box of {cardinality}"
        )
    rng = derive_stream(seed)
    t, x = _site_coordinates(
        _sample_distinct_sites(rng, cardinality, m), box
    )
    return Environment(
        box=box,
        weights=np.ones(m),
        t=t,
        x=x,
        kind=LATTICE_CLOUD,
        seed=seed,
    )


def sample_lattice_field(
    box: Box,
    alpha: float,
    seed: SeedSpec,
    top_k: int,
    method: str = "auto",
) -> Environment:
    """The ``top_k`` largest Pareto(alpha) weights of an i.i.d. field on the
    lattice box, with their sites.

    ``full`` draws every site and keeps the largest. ``order-statistic``
    draws the top records directly: the ``r`` smallest of ``N`` uniforms are
    ``1 - exp(-S_r)`` with ``S_r = sum_{j<=r} E_j / (N - j + 1)``, and the
    record sites are a uniform draw of distinct sites. Both give the same law.
    """
    _check_alpha(alpha)
    if box.mode != LATTICE:
        raise InvalidParameterError("lattice fields need a lattice box")
    if method not in FIELD_METHODS:
        raise InvalidParameterError(
            f"method must be one of {FIELD_METHODS}, got {method!r}"
        )
    cardinality = box.cardinality
    if not (1 <= top_k <= cardinality):
        raise BoxCapacityError(
            f"top_k must lie in [1, {cardinality}], got {top_k}"
        )
    if method == "auto":
        method = (
            "full" if cardinality <= current_config.ELPP_FULL_FIELD_MAX_SITES
            else "order-statistic"
        )
    limit = current_config.ELPP_FULL_FIELD_MAX_SITES
    if method == "full" and cardinality > limit:
        raise BoxCapacityError(
            f"refusing to materialize {cardinality} sites; use the "
            "order-statistic method"
        )
    rng = derive_stream(seed)

    if method == "full":
        weights = (1.0 - rng.random(cardinality)) ** (-1.0 / alpha)
        top = np.argpartition(-weights, top_k - 1)[:top_k]
        top = top[np.lexsort((top, -weights[top]))]
        sites = top
        top_weights = weights[top]
    else:
        spacings = standard_exponentials(rng, top_k) / (
            cardinality - np.arange(top_k, dtype=np.float64)
        )
        smallest_uniforms = -np.expm1(-np.cumsum(spacings))
        top_weights = smallest_uniforms ** (-1.0 / alpha)
        sites = _sample_distinct_sites(rng, cardinality, top_k)

    t, x = _site_coordinates(np.asarray(sites, dtype=np.int64), box)
    logger.debug(
        "lattice field %s: %d sites, top %d via %s",
        box.to_dict(),
        cardinality,
        top_k,
        method,
    )
    return Environment(
        box=box,
        weights=top_weights,
        t=t,
        x=x,
        kind=LATTICE_FIELD,
        seed=seed,
        alpha=alpha,
        metadata={"method": method, "sites": cardinality},
    )


def ppp_from_exponentials(
    exponentials: Sequence[float],
    t: Sequence[float],
    x: Sequence[float],
    alpha: float,
    q: float,
    seed: Optional[SeedSpec] = None,
) -> Environment:
    """Ordered records of the Poisson process from given Exp(1) draws and
    locations: ``M_i = (2q)**(1/alpha) * (E_1 + ... + E_i)**(-1/alpha)``."""
    _check_alpha(alpha)
    if not q > 0:
        raise InvalidParameterError(f"half-width q must be positive, got {q}")
    gamma = np.cumsum(np.asarray(exponentials, dtype=np.float64))
    weights = (2.0 * q) ** (1.0 / alpha) * gamma ** (-1.0 / alpha)
    return Environment(
        box=Box(CONTINUOUS, 1.0, q),
        weights=weights,
        t=t,
        x=x,
        kind=PPP,
        seed=seed,
        alpha=alpha,
    )


def sample_ppp_ordered(
    ell: int, alpha: float, q: float, seed: SeedSpec
) -> Environment:
    """First ``ell`` ordered records of the Poisson process with intensity
    ``alpha/2 * w**(-alpha-1) dw dt dx`` on ``[0,1] x [-q,q]``.

    Record ``i`` consumes draws ``3i .. 3i+2`` of its stream, so a sample of
    ``ell`` records is the prefix of any longer sample under the same seed.
    """
    if ell < 1:
        raise InvalidParameterError(f"ell must be at least 1, got {ell}")
    _check_alpha(alpha)
    if not q > 0:
        raise InvalidParameterError(f"half-width q must be positive, got {q}")
    uniforms = derive_stream(seed).random((ell, 3))
    exponentials = -np.log1p(-uniforms[:, 0])
    t = uniforms[:, 1]
    x = (2.0 * uniforms[:, 2] - 1.0) * q
    return ppp_from_exponentials(exponentials, t, x, alpha, q, seed=seed)


def fit_lattice_box(n: int, h: float) -> Box:
    """Lattice box ``[[1, n]] x [[-floor(h), floor(h)]]``."""
    return Box(LATTICE, int(n), int(math.floor(h)))
