"""Pure-Python kernels with the same interface as the compiled extension."""

from __future__ import annotations

import numpy as np

from .fences import METHODS, MC_ESTIMATORS, FenceParams, compute_fences
from .robust import Sample, SkewboxError, _kernel_median, _type7


def medcouple_sorted(xs) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.shape[0] < 3:
        raise ValueError("too few observations")
    if xs[0] == xs[-1]:
        raise ValueError("degenerate sample: zero spread")
    return _kernel_median(xs, _type7(xs, 0.5))


def batch_counts(samples, planted, method: int, k: float, eps: float, cap: float, mc_estimator: int):
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    reps, n = samples.shape
    if n < 4:
        raise ValueError("too few observations for fence method")
    if planted is not None:
        planted = np.asarray(planted, dtype=bool)
        if planted.shape != samples.shape:
            raise ValueError("planted mask shape mismatch")
    params = FenceParams(k=k, bowley_clamp_epsilon=eps, ratio_cap=cap, mc_estimator=MC_ESTIMATORS[mc_estimator])
    name = METHODS[method]
    flagged = np.zeros(reps, dtype=np.int64)
    missed = np.zeros(reps, dtype=np.int64)
    for r in range(reps):
        row = samples[r]
        try:
            f = compute_fences(Sample(row), name, params)
        except SkewboxError:
            flagged[r] = -1
            continue
        out = (row < f.lower) | (row > f.upper)
        flagged[r] = np.count_nonzero(out)
        if planted is not None:
            missed[r] = np.count_nonzero(planted[r] & ~out)
    return flagged, missed
