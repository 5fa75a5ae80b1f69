import numpy as np
import pytest

from skewbox import kernels
from skewbox.fences import METHODS, MC_ESTIMATORS, FenceParams, classify_outliers, compute_fences
from skewbox.mosaic import GridSpec, SimConfig, run_mosaic
from skewbox.robust import DegenerateSampleError, medcouple

compiled = pytest.mark.skipif("compiled" not in kernels.available_backends(), reason="extension not built")


def _batch(seed=0, reps=150, n=25):
    rng = np.random.default_rng(seed)
    x = np.round(rng.lognormal(size=(reps, n)) * 4) / 4  # coarse grid -> ties and boundary hits
    x[::7] *= -1
    x[3] = 1.0  # constant row
    x[4, :20] = 2.0  # zero IQR, nonconstant
    planted = (rng.random((reps, n)) < 0.1).astype(np.uint8)
    return np.ascontiguousarray(x), planted


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("mc", MC_ESTIMATORS)
def test_python_backend_matches_reference_path(method, mc):
    x, planted = _batch()
    mod = kernels.backend_module("python")
    p = FenceParams(mc_estimator=mc)
    flagged, missed = mod.batch_counts(x, planted, METHODS.index(method), p.k, p.bowley_clamp_epsilon,
                                       p.ratio_cap, MC_ESTIMATORS.index(mc))
    for r in range(x.shape[0]):
        try:
            out = {i for i, _ in classify_outliers(x[r], compute_fences(x[r], method, p))}
        except DegenerateSampleError:
            assert flagged[r] == -1
            continue
        assert flagged[r] == len(out)
        assert missed[r] == sum(1 for i in np.flatnonzero(planted[r]) if i not in out)


@compiled
@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("mc", MC_ESTIMATORS)
def test_backends_agree(method, mc):
    for seed in range(3):
        x, planted = _batch(seed)
        args = (METHODS.index(method), 1.5, 1e-6, 20.0, MC_ESTIMATORS.index(mc))
        a = kernels.backend_module("python").batch_counts(x, planted, *args)
        b = kernels.backend_module("compiled").batch_counts(x, planted, *args)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        c = kernels.backend_module("compiled").batch_counts(x, None, *args)
        assert np.array_equal(c[0], b[0]) and not c[1].any()


@compiled
def test_compiled_medcouple_is_exact():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(3, 60))
        x = np.sort(np.round(rng.standard_t(3, size=n), 1))
        if x[0] == x[-1]:
            continue
        assert kernels.backend_module("compiled").medcouple_sorted(x) == medcouple(x)


@pytest.mark.parametrize("backend", kernels.available_backends())
def test_input_checks(backend):
    mod = kernels.backend_module(backend)
    with pytest.raises(ValueError):
        mod.batch_counts(np.zeros((2, 3)), None, 0, 1.5, 1e-6, 20.0, 0)
    with pytest.raises(ValueError):
        mod.batch_counts(np.ones((2, 5)), np.zeros((2, 4), np.uint8), 0, 1.5, 1e-6, 20.0, 0)
    with pytest.raises(ValueError):
        mod.medcouple_sorted(np.ones(4))


def test_backend_switching():
    start = kernels.get_backend()
    try:
        kernels.set_backend("python")
        assert kernels.get_backend() == "python"
        with pytest.raises(ValueError):
            kernels.set_backend("gpu")
    finally:
        kernels.set_backend(start)


@compiled
def test_mosaic_is_backend_independent():
    grid = GridSpec((0.1, 0.5), (0.7, 3.0))
    cfg = SimConfig(scenario="masking", n=40, reps=30, method="adil", seed=3)
    start = kernels.get_backend()
    try:
        kernels.set_backend("python")
        slow = run_mosaic(grid, cfg).to_csv()
        kernels.set_backend("compiled")
        fast = run_mosaic(grid, cfg).to_csv()
    finally:
        kernels.set_backend(start)
    assert slow == fast
