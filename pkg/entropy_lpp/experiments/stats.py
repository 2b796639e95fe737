"""Summary statistics for replica samples.

Quantiles use the nearest-rank rule (numpy's ``inverted_cdf``), so every
reported quantile is an observed value.
"""

from dataclasses import asdict, dataclass, field
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import ks_2samp

from entropy_lpp.errors import InvalidParameterError

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99)


def _quantile_key(level: float) -> str:
    return f"q{round(level * 100):02d}"


@dataclass
class PooledMoments:
    """Running count, mean and sum of squared deviations.

    Batches merge in any grouping to the same moments up to rounding.

    >>> a = PooledMoments.from_values([1.0, 2.0])
    >>> a.merge(PooledMoments.from_values([3.0])).mean
    2.0
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "PooledMoments":
        arr = np.asarray(
            values if isinstance(values, np.ndarray) else list(values),
            dtype=np.float64,
        )
        if arr.size == 0:
            return cls()
        mean = float(arr.mean())
        return cls(
            count=int(arr.size), mean=mean, m2=float(((arr - mean) ** 2).sum())
        )

    def merge(self, other: "PooledMoments") -> "PooledMoments":
        if other.count == 0:
            return PooledMoments(self.count, self.mean, self.m2)
        if self.count == 0:
            return PooledMoments(other.count, other.mean, other.m2)
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = (
            self.m2
            + other.m2
            + delta * delta * self.count * other.count / count
        )
        return PooledMoments(count, mean, m2)

    @property
    def variance(self) -> float:
        """Sample variance (``n - 1`` denominator)."""
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else math.nan


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Largest gap between the two empirical CDFs.

    >>> ks_two_sample([0.0], [1.0])
    1.0
    >>> ks_two_sample([0.0, 1.0], [0.0, 2.0])
    0.5
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise InvalidParameterError("KS distance needs two nonempty samples")
    return float(ks_2samp(a, b).statistic)


@dataclass
class SummaryStats:
    n_replicas: int
    mean: float
    variance: float
    quantiles: dict = field(default_factory=dict)
    ks_distance: Optional[float] = None

    @classmethod
    def from_sample(
        cls,
        values: Sequence[float],
        reference: Optional[Sequence[float]] = None,
    ) -> "SummaryStats":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            raise InvalidParameterError("cannot summarize an empty sample")
        moments = PooledMoments.from_values(arr)
        levels = np.quantile(arr, QUANTILE_LEVELS, method="inverted_cdf")
        return cls(
            n_replicas=int(arr.size),
            mean=moments.mean,
            variance=moments.variance,
            quantiles={
                _quantile_key(lv): float(q)
                for lv, q in zip(QUANTILE_LEVELS, levels)
            },
            ks_distance=(
                None if reference is None else ks_two_sample(arr, reference)
            ),
        )

    @property
    def median(self) -> float:
        return self.quantiles["q50"]

    def to_row(self, label: str) -> dict:
        row = {"label": label}
        data = asdict(self)
        quantiles = data.pop("quantiles")
        row.update(data)
        row.update(quantiles)
        return row


def empirical_tail(
    values: Sequence[int], max_k: Optional[int] = None
) -> np.ndarray:
    """``P(L >= k)`` for ``k = 0..max_k`` from integer replica values.

    >>> empirical_tail([0, 1, 1, 3]).tolist()
    [1.0, 0.75, 0.25, 0.25]
    """
    arr = np.asarray(values, dtype=np.int64)
    if max_k is None:
        max_k = int(arr.max()) if arr.size else 0
    counts = np.bincount(arr, minlength=max_k + 1)[: max_k + 1]
    at_least = counts[::-1].cumsum()[::-1]
    # values above max_k still belong to every tail
    at_least = at_least + int((arr > max_k).sum())
    return at_least / max(arr.size, 1)


def binomial_stderr(p: np.ndarray | float, n: int) -> np.ndarray | float:
    return np.sqrt(np.asarray(p) * (1 - np.asarray(p)) / n)


def tail_slope(values: Sequence[float], top_fraction: float = 0.1) -> float:
    """Least-squares slope of log survival against log value over the
    largest ``top_fraction`` of a positive sample; ``nan`` when fewer than
    two distinct points are available."""
    arr = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    n = arr.size
    top = arr[: max(int(math.ceil(top_fraction * n)), 0)]
    survival = np.arange(1, top.size + 1) / n
    keep = top > 0
    x, y = np.log(top[keep]), np.log(survival[keep])
    if np.unique(x).size < 2:
        return math.nan
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


TAIL_MIN_COUNT = 20


def tail_ratios(
    tail: Sequence[float], replicas: int, min_count: int = TAIL_MIN_COUNT
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Successive ratios ``P(L >= k+1) / P(L >= k)`` with their binomial
    standard errors.

    Returns ``(ks, ratios, stderr)``. A ratio is kept while ``P(L >= k+1)``
    rests on at least ``min_count`` replicas.

    >>> ks, ratios, _ = tail_ratios([1.0, 0.5, 0.25, 0.0], 100, min_count=1)
    >>> ks.tolist(), ratios.tolist()
    ([0, 1], [0.5, 0.5])
    """
    tail = np.asarray(tail, dtype=np.float64)
    counts = np.rint(tail * replicas)
    # survival never increases, so the kept ratios form a prefix
    ks = np.flatnonzero(counts[1:] >= min_count)
    ratios = tail[ks + 1] / tail[ks]
    stderr = np.sqrt(ratios * (1 - ratios) / counts[ks])
    return ks, ratios, stderr


def decays_supergeometrically(
    tail: Sequence[float],
    replicas: int,
    start: int = 0,
    z: float = 3.0,
    min_count: int = TAIL_MIN_COUNT,
) -> bool:
    """Whether the tail ratios from ``k = start`` on fall faster than any
    geometric law allows.

    No step may raise the ratio by more than ``z`` combined standard errors,
    and the last ratio must sit ``z`` combined standard errors below the
    first. Fewer than two usable ratios pass.

    >>> decays_supergeometrically([1.0, 0.5, 0.25, 0.125], 10**6)
    False
    """
    ks, ratios, stderr = tail_ratios(tail, replicas, min_count)
    keep = ks >= start
    ratios, stderr = ratios[keep], stderr[keep]
    if ratios.size < 2:
        return True
    steps = np.diff(ratios) <= z * np.hypot(stderr[1:], stderr[:-1])
    drop = ratios[0] - ratios[-1] > z * math.hypot(stderr[0], stderr[-1])
    return bool(np.all(steps) and drop)


def decay_onset(
    tail: Sequence[float], replicas: int, min_count: int = TAIL_MIN_COUNT
) -> Optional[int]:
    """First ``k`` from which every usable tail ratio stays below the ratio
    of the least-squares geometric fit to ``log P(L >= k)``.

    ``None`` when fewer than two ratios are usable or the last one is not
    below the fit.

    >>> decay_onset([1.0, 0.5, 0.25, 0.125], 10**6) is None
    True
    """
    ks, ratios, _ = tail_ratios(tail, replicas, min_count)
    if ratios.size < 2:
        return None
    support = np.arange(int(ks[-1]) + 2)
    slope, _ = np.polyfit(
        support, np.log(np.asarray(tail, dtype=np.float64)[support]), 1
    )
    below = np.log(ratios) < slope - 1e-9
    if not below[-1]:
        return None
    above = np.flatnonzero(~below)
    return int(ks[0] if above.size == 0 else ks[above[-1] + 1])
