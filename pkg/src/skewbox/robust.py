"""Robust location, spread and skewness estimators used by the fence rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

SKEW_CAP = 3.5
QUANTILE_ESTIMATORS = ("linear",)


class SkewboxError(ValueError):
    """Base class for invalid input to any skewbox computation."""


class DegenerateSampleError(SkewboxError):
    """The sample has no spread (zero IQR or zero variance)."""


class Sample:
    """Immutable 1-d sample of finite reals that remembers original positions.

    ``values`` keeps input order. ``sorted`` is the nondecreasing view and
    ``order`` the stable permutation with ``values[order] == sorted``.
    """

    __slots__ = ("values", "sorted", "order")

    def __init__(self, values: Iterable[float]):
        arr = np.array(values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(arr)):
            raise SkewboxError("sample contains non-finite values")
        order = np.argsort(arr, kind="stable")
        srt = arr[order]
        for a in (arr, order, srt):
            a.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "sorted", srt)

    def __setattr__(self, name, value):
        raise AttributeError("Sample is immutable")

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"Sample(n={len(self)})"

    def __neg__(self) -> "Sample":
        return Sample(-self.values)

    def affine(self, scale: float, shift: float) -> "Sample":
        return Sample(scale * self.values + shift)

    @classmethod
    def coerce(cls, data: "SampleLike") -> "Sample":
        return data if isinstance(data, cls) else cls(data)


SampleLike = Union[Sample, Iterable[float], np.ndarray]


@dataclass(frozen=True)
class QuartileSet:
    q1: float
    q2: float
    q3: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1

    @property
    def siqr_lower(self) -> float:
        return self.q2 - self.q1

    @property
    def siqr_upper(self) -> float:
        return self.q3 - self.q2


@dataclass(frozen=True)
class SkewnessMeasures:
    medcouple: float
    bowley: float
    capped_moment_skew: float


def _type7(xs: np.ndarray, prob: float) -> float:
    # xs sorted; h = (n-1)p on 0-based order statistics
    n = xs.shape[0]
    h = (n - 1) * prob
    lo = int(math.floor(h))
    frac = h - lo
    if frac == 0.0 or lo >= n - 1:
        return float(xs[min(lo, n - 1)])
    a = float(xs[lo])
    return a + frac * (float(xs[lo + 1]) - a)


def quantile(sample: SampleLike, prob: float, estimator: str = "linear") -> float:
    """Sample quantile by linear interpolation of order statistics.

    Uses position ``h = (n - 1) * prob`` on the sorted data (R's type 7,
    numpy's default). ``estimator`` is reserved for other conventions; only
    ``"linear"`` is implemented.
    """
    if estimator not in QUANTILE_ESTIMATORS:
        raise SkewboxError(f"unknown quantile estimator {estimator!r}")
    s = Sample.coerce(sample)
    if len(s) == 0:
        raise SkewboxError("empty sample")
    if not (0.0 <= prob <= 1.0):
        raise SkewboxError("probability out of range")
    return _type7(s.sorted, prob)


def quartiles(sample: SampleLike, estimator: str = "linear") -> QuartileSet:
    s = Sample.coerce(sample)
    return QuartileSet(
        quantile(s, 0.25, estimator),
        quantile(s, 0.5, estimator),
        quantile(s, 0.75, estimator),
    )


def _kernel_median(xs: np.ndarray, med: float) -> float:
    lower = xs[xs <= med]
    upper = xs[xs >= med]
    # rows index the upper half, columns the lower half
    xi = lower[np.newaxis, :]
    xj = upper[:, np.newaxis]
    with np.errstate(invalid="ignore", divide="ignore"):
        h = ((xj - med) - (med - xi)) / (xj - xi)
    t = int(np.count_nonzero(lower == med))
    if t:
        # both halves hold the t median ties at the end of `lower` and the
        # start of `upper`; kernel is sign(i + j - 1 - t) on that block
        i = np.arange(1, t + 1)
        block = np.sign(i[:, np.newaxis] + i[np.newaxis, :] - 1 - t).astype(np.float64)
        h[:t, lower.shape[0] - t:] = block
    vals = np.sort(h, axis=None)
    m = vals.shape[0]
    mid = m // 2
    if m % 2:
        return float(vals[mid])
    return float((vals[mid - 1] + vals[mid]) / 2)


def medcouple(sample: SampleLike) -> float:
    """Medcouple: median of the scaled pairwise kernel across the sample median.

    For pairs ``x_i <= Q2 <= x_j`` with ``x_i != x_j`` the kernel is
    ``((x_j - Q2) - (Q2 - x_i)) / (x_j - x_i)``. Pairs where both points equal
    the median get -1, 0 or +1 according to ``i + j - 1`` versus the tie count.
    Exact O(n^2) evaluation.
    """
    s = Sample.coerce(sample)
    if len(s) < 3:
        raise SkewboxError("too few observations")
    xs = s.sorted
    if xs[0] == xs[-1]:
        raise DegenerateSampleError("degenerate sample: zero spread")
    return _kernel_median(xs, _type7(xs, 0.5))


def split_median_skew(sample: SampleLike) -> float:
    """Median of the points above Q2 minus median of the points below Q2, over IQR.

    A coarse stand-in for the medcouple found in some adjusted-boxplot
    software. Unlike the medcouple it is nonnegative, close to 1 for
    symmetric data and not bounded by 1, so it does not collapse the adjusted
    fences to Tukey's on symmetric samples.
    """
    s = Sample.coerce(sample)
    if len(s) < 3:
        raise SkewboxError("too few observations")
    q = quartiles(s)
    if q.iqr <= 0:
        raise DegenerateSampleError("degenerate sample: zero IQR")
    xs = s.sorted
    above = xs[xs > q.q2]
    below = xs[xs < q.q2]
    if above.size == 0 or below.size == 0:
        raise DegenerateSampleError("degenerate sample: empty half around the median")
    return (_type7(above, 0.5) - _type7(below, 0.5)) / q.iqr


def bowley(q: QuartileSet) -> float:
    """Quartile skewness ``(Q3 + Q1 - 2 Q2) / IQR``, in [-1, 1]."""
    iqr = q.iqr
    if not iqr > 0:
        raise DegenerateSampleError("degenerate sample: zero IQR")
    b = (q.q3 + q.q1 - 2.0 * q.q2) / iqr
    return min(1.0, max(-1.0, b))


def moment_skewness(sample: SampleLike) -> float:
    """Adjusted Fisher-Pearson skewness ``G1 = sqrt(n(n-1))/(n-2) * m3 / m2**1.5``."""
    s = Sample.coerce(sample)
    n = len(s)
    if n < 3:
        raise SkewboxError("too few observations")
    x = s.sorted
    mean = math.fsum(x) / n
    d = x - mean
    m2 = math.fsum(d * d) / n
    if not m2 > 0:
        raise DegenerateSampleError("degenerate sample: zero spread")
    m3 = math.fsum(d * d * d) / n
    g1 = m3 / m2**1.5
    return g1 * math.sqrt(n * (n - 1)) / (n - 2)


def capped_moment_skewness(sample: SampleLike, cap: float = SKEW_CAP) -> float:
    return min(cap, max(-cap, moment_skewness(sample)))


def skewness_measures(sample: SampleLike) -> SkewnessMeasures:
    s = Sample.coerce(sample)
    return SkewnessMeasures(
        medcouple=medcouple(s),
        bowley=bowley(quartiles(s)),
        capped_moment_skew=capped_moment_skewness(s),
    )
