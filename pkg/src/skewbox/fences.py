"""Boxplot fence rules, outlier classification and grouped five-number summaries.

Seven rules are available, all of the form ``Q1 - k * a * s``, ``Q3 + k * b * s``
where ``s`` is a spread term and ``a``/``b`` skewness-dependent factors:

========== =================================================================
tukey      ``a = b = 1``, ``s = IQR``
kimber     semi-interquartile ranges: ``Q1 - 2k(Q2-Q1)``, ``Q3 + 2k(Q3-Q2)``
hubert     ``a = exp(-3 MC)``, ``b = exp(3 MC)``
adil       ``a = b = exp(SK * |MC|)`` with SK the moment skewness capped at 3.5
babura     ``a = b = exp(6 BC)`` with BC the Bowley coefficient
walker     ``a = (1-BC)/(1+BC)``, ``b = (1+BC)/(1-BC)``
junsawang  ``a = b = exp(BC * (Q2-Q1)/(Q3-Q2))``
========== =================================================================
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Tuple, Union

from .robust import (
    SKEW_CAP,
    DegenerateSampleError,
    QuartileSet,
    Sample,
    SampleLike,
    SkewboxError,
    bowley,
    capped_moment_skewness,
    medcouple,
    quartiles,
    split_median_skew,
)

METHODS = ("tukey", "kimber", "hubert", "adil", "babura", "walker", "junsawang")
MC_ESTIMATORS = ("kernel", "split-median")
WHISKER_MODES = ("fence", "data")

@dataclass(frozen=True)
class FenceParams:
    """Tuning constants shared by all fence rules.

    ``mc_estimator`` picks the skewness statistic fed to the hubert and adil
    rules: ``"kernel"`` is the medcouple, ``"split-median"`` the cruder
    :func:`~skewbox.robust.split_median_skew`.
    """

    k: float = 1.5
    bowley_clamp_epsilon: float = 1e-6
    ratio_cap: float = 20.0
    mc_estimator: str = "kernel"

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise SkewboxError("whisker coefficient k must be positive")
        if not 0 < self.bowley_clamp_epsilon < 1:
            raise SkewboxError("bowley_clamp_epsilon must lie in (0, 1)")
        if not self.ratio_cap >= 1:
            raise SkewboxError("ratio_cap must be >= 1")
        if self.mc_estimator not in MC_ESTIMATORS:
            raise SkewboxError(
                f"unknown mc estimator {self.mc_estimator!r}; expected one of {', '.join(MC_ESTIMATORS)}"
            )


DEFAULT_PARAMS = FenceParams()


@dataclass(frozen=True)
class Fences:
    lower: float
    upper: float
    method: str
    params: FenceParams = DEFAULT_PARAMS

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


Outlier = Tuple[int, float]


@dataclass(frozen=True)
class SkewBoxSummary:
    """One row of a skew-aware boxplot table."""

    group_label: str
    ymin: float
    lower: float
    middle: float
    upper: float
    ymax: float
    outliers: Tuple[Outlier, ...]
    n: int
    method: str = "tukey"

    @property
    def outlier_values(self) -> List[float]:
        return [v for _, v in self.outliers]


@dataclass(frozen=True)
class GroupFailure:
    """A group whose summary could not be computed."""

    group_label: str
    message: str
    n: int = 0


def check_method(method: str) -> str:
    if method not in METHODS:
        raise SkewboxError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")
    return method


def _check_bowley(bc: float) -> None:
    if not -1.0 <= bc <= 1.0:
        raise SkewboxError("bowley coefficient out of range")


def _check_mc(mc: float, params: FenceParams) -> None:
    if params.mc_estimator == "kernel":
        if not -1.0 <= mc <= 1.0:
            raise SkewboxError("medcouple out of range")
    elif not (mc >= 0 and math.isfinite(mc)):
        raise SkewboxError("split-median skewness out of range")


def _scaled(q: QuartileSet, lo_factor: float, hi_factor: float, method: str, params: FenceParams) -> Fences:
    spread = params.k * q.iqr
    return Fences(q.q1 - spread * lo_factor, q.q3 + spread * hi_factor, method, params)


def fences_tukey(q: QuartileSet, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    return _scaled(q, 1.0, 1.0, "tukey", params)


def fences_kimber(q: QuartileSet, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    k2 = 2.0 * params.k
    return Fences(q.q1 - k2 * q.siqr_lower, q.q3 + k2 * q.siqr_upper, "kimber", params)


def fences_hubert(q: QuartileSet, mc: float, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    _check_mc(mc, params)
    return _scaled(q, math.exp(-3.0 * mc), math.exp(3.0 * mc), "hubert", params)


def fences_adil(q: QuartileSet, mc: float, sk: float, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    _check_mc(mc, params)
    if not -SKEW_CAP <= sk <= SKEW_CAP:
        raise SkewboxError("uncapped skewness passed")
    f = math.exp(sk * abs(mc))
    return _scaled(q, f, f, "adil", params)


def fences_babura(q: QuartileSet, bc: float, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    _check_bowley(bc)
    f = math.exp(6.0 * bc)
    return _scaled(q, f, f, "babura", params)


def fences_walker(q: QuartileSet, bc: float, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    """Ratio-adjusted fences; BC is clamped away from +-1 and each factor capped."""
    _check_bowley(bc)
    eps = params.bowley_clamp_epsilon
    b = min(1.0 - eps, max(-1.0 + eps, bc))
    lo = min((1.0 - b) / (1.0 + b), params.ratio_cap)
    hi = min((1.0 + b) / (1.0 - b), params.ratio_cap)
    return _scaled(q, lo, hi, "walker", params)


def fences_junsawang(q: QuartileSet, bc: float, params: FenceParams = DEFAULT_PARAMS) -> Fences:
    _check_bowley(bc)
    if q.siqr_upper > 0:
        ratio = min(q.siqr_lower / q.siqr_upper, params.ratio_cap)
    else:
        ratio = params.ratio_cap
    f = math.exp(bc * ratio)
    return _scaled(q, f, f, "junsawang", params)


def _mc(sample: Sample, params: FenceParams) -> float:
    if params.mc_estimator == "kernel":
        return medcouple(sample)
    return split_median_skew(sample)


def compute_fences(sample: SampleLike, method: str = "tukey", params: Optional[FenceParams] = None) -> Fences:
    """Fences for ``sample`` under ``method``.

    Only the statistics the rule needs are computed. Rules that use the
    medcouple or the Bowley coefficient raise :class:`DegenerateSampleError`
    when the IQR is zero; tukey and kimber return zero-width fences instead.
    """
    check_method(method)
    params = params or DEFAULT_PARAMS
    s = Sample.coerce(sample)
    if len(s) < 4:
        raise SkewboxError("too few observations for fence method")
    q = quartiles(s)
    if method == "tukey":
        return fences_tukey(q, params)
    if method == "kimber":
        return fences_kimber(q, params)
    if not q.iqr > 0:
        raise DegenerateSampleError(f"degenerate sample: zero IQR ({method})")
    try:
        if method == "hubert":
            return fences_hubert(q, _mc(s, params), params)
        if method == "adil":
            return fences_adil(q, _mc(s, params), capped_moment_skewness(s), params)
        bc = bowley(q)
        if method == "babura":
            return fences_babura(q, bc, params)
        if method == "walker":
            return fences_walker(q, bc, params)
        return fences_junsawang(q, bc, params)
    except DegenerateSampleError as exc:
        raise DegenerateSampleError(f"{exc} ({method})") from exc


def classify_outliers(sample: SampleLike, fences: Fences) -> List[Outlier]:
    """Observations strictly outside the fences as ``(original index, value)``.

    Sorted by value, ties by original index. A value equal to a fence is an
    inlier.
    """
    s = Sample.coerce(sample)
    out = []
    for idx, v in zip(s.order.tolist(), s.sorted.tolist()):
        if v < fences.lower or v > fences.upper:
            out.append((idx, v))
    return out


def skewbox_summary(
    sample: SampleLike,
    method: str = "tukey",
    params: Optional[FenceParams] = None,
    group_label: str = "",
    whisker: str = "fence",
) -> SkewBoxSummary:
    """Quartiles, whisker ends and outliers for one group.

    With ``whisker="fence"`` ymin/ymax are the fences themselves; with
    ``whisker="data"`` they are the most extreme inlying observations, as in
    a conventionally drawn boxplot.
    """
    if whisker not in WHISKER_MODES:
        raise SkewboxError(f"unknown whisker mode {whisker!r}")
    s = Sample.coerce(sample)
    f = compute_fences(s, method, params)
    q = quartiles(s)
    outliers = classify_outliers(s, f)
    if whisker == "fence":
        ymin, ymax = f.lower, f.upper
    else:
        inside = s.sorted[(s.sorted >= f.lower) & (s.sorted <= f.upper)]
        ymin, ymax = float(inside[0]), float(inside[-1])
    return SkewBoxSummary(
        group_label=group_label,
        ymin=ymin,
        lower=q.q1,
        middle=q.q2,
        upper=q.q3,
        ymax=ymax,
        outliers=tuple(outliers),
        n=len(s),
        method=method,
    )


def grouped_summary(
    rows: Iterable[Tuple[str, float]],
    method: str = "tukey",
    params: Optional[FenceParams] = None,
    whisker: str = "fence",
) -> List[Union[SkewBoxSummary, GroupFailure]]:
    """One summary per group label, in lexicographic label order.

    Outlier indices refer to positions in ``rows``. Groups that cannot be
    summarised come back as :class:`GroupFailure` entries.
    """
    check_method(method)
    groups = defaultdict(list)
    positions = defaultdict(list)
    for pos, (label, value) in enumerate(rows):
        groups[label].append(value)
        positions[label].append(pos)
    if not groups:
        raise SkewboxError("no data")
    result: List[Union[SkewBoxSummary, GroupFailure]] = []
    for label in sorted(groups):
        values = groups[label]
        try:
            summ = skewbox_summary(values, method, params, label, whisker)
        except SkewboxError as exc:
            result.append(GroupFailure(label, str(exc), len(values)))
            continue
        pos = positions[label]
        result.append(replace(summ, outliers=tuple((pos[i], v) for i, v in summ.outliers)))
    return result
