"""Monte Carlo swamping/masking study over an (alpha, p) grid of SEPD shapes.

Every replication draws from its own Philox stream keyed by
``(seed, alpha_index, p_index, rep_index)``, so a cell's result does not
depend on which other cells run, in what order, or in how many processes.
Because the key does not involve the fence method, all methods evaluated
with the same seed see identical data (paired comparisons).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .fences import METHODS, MC_ESTIMATORS, FenceParams, check_method, classify_outliers, compute_fences
from .robust import Sample, SkewboxError
from .sepd import SepdEvaluator, SepdParams, make_rng

SCENARIOS = ("swamping", "masking")
CSV_HEADER = "alpha_index,p_index,alpha,p,rate,stderr,reps_completed,reps_failed"
FAILED_FLAG_FRACTION = 0.01
SIDE_RULE = "P(right tail) = 1 - alpha"


def _spaced(lo: float, hi: float, count: int, log: bool = False) -> Tuple[float, ...]:
    if count < 1:
        raise SkewboxError("grid count must be at least 1")
    if count == 1:
        if lo != hi:
            raise SkewboxError("a single-point grid needs equal endpoints")
        return (float(lo),)
    if not hi > lo:
        raise SkewboxError("grid upper endpoint must exceed the lower one")
    if log:
        if not lo > 0:
            raise SkewboxError("log-spaced grid needs positive endpoints")
        vals = np.geomspace(lo, hi, count)
    else:
        # weighted form keeps the midpoint of a symmetric range exact
        t = np.arange(count) / (count - 1)
        vals = lo * (1.0 - t) + hi * t
    vals[0], vals[-1] = lo, hi
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class GridSpec:
    alpha_values: Tuple[float, ...]
    p_values: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha_values)
        p = tuple(float(v) for v in self.p_values)
        object.__setattr__(self, "alpha_values", a)
        object.__setattr__(self, "p_values", p)
        if not a or not p:
            raise SkewboxError("grid axes must be nonempty")
        if any(not 0 < v < 1 for v in a):
            raise SkewboxError("alpha values must lie in (0, 1)")
        if any(not (v > 0 and math.isfinite(v)) for v in p):
            raise SkewboxError("p values must be positive")
        for axis in (a, p):
            if any(y <= x for x, y in zip(axis, axis[1:])):
                raise SkewboxError("grid values must be strictly increasing")

    @classmethod
    def from_ranges(cls, alpha=(0.05, 0.95, 49), p=(0.5, 10.0, 49, True)) -> "GridSpec":
        """``alpha=(lo, hi, count)``, ``p=(lo, hi, count[, log])``."""
        return cls(_spaced(*alpha), _spaced(*p))

    @classmethod
    def default(cls) -> "GridSpec":
        return cls.from_ranges()

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.p_values), len(self.alpha_values)


def planted_count(n: int, fraction: float) -> int:
    """Number of contaminating points: ``fraction * n`` rounded half up."""
    return int(math.floor(fraction * n + 0.5))


@dataclass(frozen=True)
class SimConfig:
    scenario: str = "swamping"
    method: str = "tukey"
    n: int = 20
    reps: int = 10_000
    k: float = 1.5
    seed: int = 0
    contamination_fraction: float = 0.05
    tail_quantile: float = 0.999
    color_cap: float = 0.10
    mc_estimator: str = "kernel"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise SkewboxError(f"unknown scenario {self.scenario!r}; expected swamping or masking")
        check_method(self.method)
        if self.mc_estimator not in MC_ESTIMATORS:
            raise SkewboxError(f"unknown mc estimator {self.mc_estimator!r}")
        if self.reps < 1:
            raise SkewboxError("reps must be at least 1")
        if self.n < 4:
            raise SkewboxError("n must be at least 4")
        if not self.k > 0:
            raise SkewboxError("k must be positive")
        if not 0 <= self.seed < 2**64:
            raise SkewboxError("seed must be a 64-bit unsigned integer")
        if not 0.5 < self.tail_quantile < 1:
            raise SkewboxError("tail_quantile must lie in (0.5, 1)")
        if not self.color_cap > 0:
            raise SkewboxError("color_cap must be positive")
        if self.scenario == "masking":
            if planted_count(self.n, self.contamination_fraction) < 1:
                raise SkewboxError("contamination must plant at least one outlier")
            if not 0 < self.contamination_fraction < 0.5:
                raise SkewboxError("contamination_fraction must lie in (0, 0.5)")

    @property
    def fence_params(self) -> FenceParams:
        return FenceParams(k=self.k, mc_estimator=self.mc_estimator)

    @property
    def planted(self) -> int:
        return planted_count(self.n, self.contamination_fraction) if self.scenario == "masking" else 0


@dataclass(frozen=True)
class CellResult:
    alpha: float
    p: float
    rate: float
    stderr: float
    reps_completed: int
    reps_failed: int
    alpha_index: int = 0
    p_index: int = 0
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.reps_completed == 0

    @property
    def flagged(self) -> bool:
        total = self.reps_completed + self.reps_failed
        return total > 0 and self.reps_failed / total > FAILED_FLAG_FRACTION


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass
class MosaicResult:
    """Cell matrix indexed ``cells[p_index][alpha_index]`` (p down, alpha across)."""

    grid: GridSpec
    config: Optional[SimConfig]
    cells: List[List[CellResult]]
    provenance: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        rows, cols = self.grid.shape
        if len(self.cells) != rows or any(len(r) != cols for r in self.cells):
            raise SkewboxError("cell matrix does not match the grid")

    def iter_cells(self):
        for row in self.cells:
            yield from row

    @property
    def rates(self) -> np.ndarray:
        return np.array([[c.rate for c in row] for row in self.cells])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([[c.stderr for c in row] for row in self.cells])

    def mean_rate(self) -> float:
        r = self.rates
        return float(np.nanmean(r)) if np.isfinite(r).any() else math.nan

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for c in self.iter_cells():
            lines.append(
                ",".join(
                    (
                        str(c.alpha_index), str(c.p_index), _fmt(c.alpha), _fmt(c.p),
                        _fmt(c.rate), _fmt(c.stderr), str(c.reps_completed), str(c.reps_failed),
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def meta(self) -> Dict[str, object]:
        g = self.grid
        return {
            "config": asdict(self.config) if self.config else None,
            "fence_params": asdict(self.config.fence_params) if self.config else None,
            "grid": {
                "alpha_values": list(g.alpha_values),
                "p_values": list(g.p_values),
                "alpha_range": [g.alpha_values[0], g.alpha_values[-1], len(g.alpha_values)],
                "p_range": [g.p_values[0], g.p_values[-1], len(g.p_values)],
            },
            "provenance": self.provenance,
            "failed_cells": [[c.alpha_index, c.p_index, c.error] for c in self.iter_cells() if c.failed],
            "flagged_cells": [[c.alpha_index, c.p_index] for c in self.iter_cells() if c.flagged],
        }

    def meta_text(self) -> str:
        return json.dumps(self.meta(), indent=2, sort_keys=True) + "\n"

    def write(self, prefix: str) -> Tuple[str, str]:
        csv_path, meta_path = f"{prefix}.csv", f"{prefix}.meta"
        with open(csv_path, "w", newline="") as fh:
            fh.write(self.to_csv())
        with open(meta_path, "w") as fh:
            fh.write(self.meta_text())
        return csv_path, meta_path

    @classmethod
    def from_csv(cls, text: str, meta: Optional[dict] = None) -> "MosaicResult":
        """Parse :meth:`to_csv` output. Raises :class:`SkewboxError` naming the bad row."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != CSV_HEADER:
            raise SkewboxError(f"row 1: expected header {CSV_HEADER!r}")
        parsed = {}
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != 8:
                raise SkewboxError(f"row {lineno}: expected 8 fields, got {len(parts)}")
            try:
                ai, pi = int(parts[0]), int(parts[1])
                alpha, p, rate, se = (float(v) for v in parts[2:6])
                done, failed = int(parts[6]), int(parts[7])
            except ValueError as exc:
                raise SkewboxError(f"row {lineno}: {exc}") from None
            if (ai, pi) in parsed:
                raise SkewboxError(f"row {lineno}: duplicate cell ({ai}, {pi})")
            parsed[ai, pi] = CellResult(alpha, p, rate, se, done, failed, ai, pi)
        if not parsed:
            raise SkewboxError("row 2: no cells")
        n_a = max(a for a, _ in parsed) + 1
        n_p = max(p for _, p in parsed) + 1
        if len(parsed) != n_a * n_p:
            raise SkewboxError("cell indices do not form a full grid")
        grid = GridSpec(
            tuple(parsed[a, 0].alpha for a in range(n_a)),
            tuple(parsed[0, p].p for p in range(n_p)),
        )
        cells = [[parsed[a, p] for a in range(n_a)] for p in range(n_p)]
        config = None
        provenance = {}
        if meta:
            if meta.get("config"):
                config = SimConfig(**meta["config"])
            provenance = meta.get("provenance") or {}
        return cls(grid, config, cells, provenance)


def _right_probability(params: SepdParams) -> float:
    # the right branch has scale (2(1 - alpha))**(1/p): heavier when alpha < 0.5
    return 1.0 - params.alpha


def _plant(values: np.ndarray, ev: SepdEvaluator, m: int, tail_quantile: float, rng: np.random.Generator):
    n = values.shape[0]
    idx = np.sort(rng.choice(n, size=m, replace=False))
    right = rng.random(m) < _right_probability(ev.params)
    r = rng.random(m)
    tail = 1.0 - tail_quantile
    u = np.where(right, tail_quantile + tail * r, tail * (1.0 - r))
    values[idx] = ev.quantile(u)
    return idx


def inject_outliers(clean, ev: SepdEvaluator, config: SimConfig, rng: np.random.Generator):
    """Replace ``planted`` random positions of ``clean`` with extreme-tail SEPD draws.

    Each planted value is ``ev.quantile(u)`` with ``u`` uniform beyond
    ``config.tail_quantile`` on the chosen side; the right side is chosen with
    probability ``1 - alpha``. Returns ``(contaminated, planted_indices)``.
    """
    ev = _as_evaluator(ev)
    values = np.array(Sample.coerce(clean).values)
    m = planted_count(values.shape[0], config.contamination_fraction)
    if m < 1:
        raise SkewboxError("contamination must plant at least one outlier")
    idx = _plant(values, ev, m, config.tail_quantile, rng)
    return Sample(values), tuple(int(i) for i in idx)


def _draw_rep(ev: SepdEvaluator, config: SimConfig, rng: np.random.Generator):
    x = ev.draw(rng, config.n)
    if config.scenario == "swamping":
        return x, ()
    return x, _plant(x, ev, config.planted, config.tail_quantile, rng)


def _as_evaluator(params) -> SepdEvaluator:
    return params if isinstance(params, SepdEvaluator) else SepdEvaluator(params)


def run_swamping_rep(params, config: SimConfig, rng: np.random.Generator) -> float:
    """Fraction of a clean SEPD sample flagged by ``config.method``.

    Raises :class:`~skewbox.robust.DegenerateSampleError` for degenerate draws.
    """
    if config.scenario != "swamping":
        raise SkewboxError("run_swamping_rep needs scenario='swamping'")
    ev = _as_evaluator(params)
    x, _ = _draw_rep(ev, config, rng)
    f = compute_fences(x, config.method, config.fence_params)
    return len(classify_outliers(x, f)) / config.n


def run_masking_rep(params, config: SimConfig, rng: np.random.Generator) -> float:
    """Fraction of planted outliers that ``config.method`` fails to flag."""
    if config.scenario != "masking":
        raise SkewboxError("run_masking_rep needs scenario='masking'")
    ev = _as_evaluator(params)
    x, planted = _draw_rep(ev, config, rng)
    f = compute_fences(x, config.method, config.fence_params)
    flagged = {i for i, _ in classify_outliers(x, f)}
    return sum(1 for i in planted if i not in flagged) / len(planted)


def cell_data(ev: SepdEvaluator, config: SimConfig, alpha_index: int, p_index: int):
    """All replications of one cell: ``(samples[reps, n], planted_mask or None)``."""
    samples = np.empty((config.reps, config.n))
    mask = np.zeros((config.reps, config.n), dtype=np.uint8) if config.scenario == "masking" else None
    for rep in range(config.reps):
        rng = make_rng(config.seed, alpha_index, p_index, rep)
        x, planted = _draw_rep(ev, config, rng)
        samples[rep] = x
        if mask is not None:
            mask[rep, planted] = 1
    return samples, mask


def _summarise(per_rep: np.ndarray, failed: int, alpha, p, ai, pi) -> CellResult:
    done = per_rep.shape[0]
    if done == 0:
        return CellResult(alpha, p, math.nan, math.nan, 0, failed, ai, pi, "all replications degenerate")
    rate = math.fsum(per_rep.tolist()) / done
    se = float(np.std(per_rep, ddof=1) / math.sqrt(done)) if done > 1 else math.nan
    return CellResult(alpha, p, rate, se, done, failed, ai, pi)


def simulate_cell(
    alpha_index: int,
    p_index: int,
    alpha: float,
    p: float,
    config: SimConfig,
    methods: Sequence[str] = (),
    backend: Optional[str] = None,
) -> Dict[str, CellResult]:
    """Evaluate one grid cell for several methods on shared (paired) data."""
    methods = tuple(methods) or (config.method,)
    try:
        ev = SepdEvaluator(SepdParams(alpha=alpha, p=p))
    except SkewboxError as exc:
        return {
            m: CellResult(alpha, p, math.nan, math.nan, 0, config.reps, alpha_index, p_index, str(exc))
            for m in methods
        }
    samples, mask = cell_data(ev, config, alpha_index, p_index)
    fp = config.fence_params
    mod = kernels.backend_module(backend)
    out = {}
    for m in methods:
        flagged, missed = mod.batch_counts(
            samples, mask, METHODS.index(check_method(m)), fp.k, fp.bowley_clamp_epsilon,
            fp.ratio_cap, MC_ESTIMATORS.index(fp.mc_estimator),
        )
        ok = flagged >= 0
        if config.scenario == "swamping":
            per_rep = flagged[ok] / config.n
        else:
            per_rep = missed[ok] / config.planted
        out[m] = _summarise(per_rep, int((~ok).sum()), alpha, p, alpha_index, p_index)
    return out


def run_cell(alpha_index: int, p_index: int, alpha: float, p: float, config: SimConfig) -> CellResult:
    return simulate_cell(alpha_index, p_index, alpha, p, config)[config.method]


def _cell_job(args):
    ai, pi, alpha, p, config, methods, backend = args
    return simulate_cell(ai, pi, alpha, p, config, methods, backend)


def run_mosaics(
    grid: GridSpec,
    config: SimConfig,
    methods: Sequence[str] = (),
    workers: int = 1,
    stamp: bool = False,
) -> Dict[str, MosaicResult]:
    """Run the study for each method in ``methods`` on shared per-cell data.

    ``workers > 1`` spreads cells over processes; results are identical to a
    serial run. ``stamp`` adds a wall-clock timestamp to the provenance (and
    so makes the ``.meta`` sidecar differ between runs).
    """
    from . import __version__

    methods = tuple(methods) or (config.method,)
    for m in methods:
        check_method(m)
    backend = kernels.get_backend()
    jobs = [
        (ai, pi, a, p, config, methods, backend)
        for pi, p in enumerate(grid.p_values)
        for ai, a in enumerate(grid.alpha_values)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_cell_job(j) for j in jobs]
    n_a = len(grid.alpha_values)
    out = {}
    for m in methods:
        flat = [r[m] for r in results]
        cells = [flat[i * n_a:(i + 1) * n_a] for i in range(len(grid.p_values))]
        provenance = {
            "seed": config.seed,
            "software": f"skewbox {__version__}",
            "kernel_backend": backend,
            "stream": "Philox per (seed, alpha_index, p_index, rep_index)",
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds") if stamp else None,
        }
        if config.scenario == "masking":
            provenance["outlier_side_rule"] = SIDE_RULE
        cfg = config if config.method == m else SimConfig(**{**asdict(config), "method": m})
        out[m] = MosaicResult(grid, cfg, cells, provenance)
    return out


def run_mosaic(grid: GridSpec, config: SimConfig, workers: int = 1, stamp: bool = False) -> MosaicResult:
    return run_mosaics(grid, config, (config.method,), workers, stamp)[config.method]
