"""Shared fixtures and independent reference implementations for the tests."""

import csv
import statistics
from pathlib import Path

from skewbox.fences import SkewBoxSummary
from skewbox.mosaic import CellResult, GridSpec, MosaicResult, SimConfig

TESTS = Path(__file__).resolve().parent
DATA = TESTS / "data"
GOLDEN = TESTS / "golden"
MPG = DATA / "mpg.csv"
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok

# class -> (lower, middle, upper, n_outliers) from the published console table
MPG_HUBERT_TABLE = {
    "2seater": (24.0, 25.0, 26.0, 1),
    "compact": (26.0, 27.0, 29.0, 10),
    "midsize": (26.0, 27.0, 29.0, 6),
    "minivan": (22.0, 23.0, 24.0, 2),
    "pickup": (16.0, 17.0, 18.0, 7),
    "subcompact": (24.5, 26.0, 30.5, 9),
    "suv": (17.0, 17.5, 19.0, 12),
}
# whisker columns of the same table; compared diagnostically only
MPG_HUBERT_WHISKERS = {
    "2seater": (24.0, 26.0),
    "compact": (26.0, 44.0),
    "midsize": (25.9, 32.0),
    "minivan": (21.9, 24.0),
    "pickup": (16.0, 22.0),
    "subcompact": (24.5, 44.0),
    "suv": (16.9, 27.0),
}


def mpg_rows(value="hwy", group="class"):
    with open(MPG, newline="") as fh:
        return [(r[group], float(r[value])) for r in csv.DictReader(fh)]


def type7(xs, prob):
    xs = sorted(xs)
    h = (len(xs) - 1) * prob
    lo = int(h)
    frac = h - lo
    if frac == 0 or lo + 1 >= len(xs):
        return xs[lo]
    return xs[lo] + frac * (xs[lo + 1] - xs[lo])


def medcouple_oracle(values):
    """Medcouple by explicit pair enumeration, written from the definition."""
    xs = sorted(float(v) for v in values)
    m = type7(xs, 0.5)
    minus = [x for x in xs if x <= m]
    plus = [x for x in xs if x >= m]
    ties = sum(1 for x in xs if x == m)
    kernel = []
    for a, xj in enumerate(plus):
        for b, xi in enumerate(minus):
            if xi == m and xj == m:
                # tie ranks counted from the median outward on each side
                i = a + 1
                j = len(minus) - b
                s = i + j - 1 - ties
                kernel.append(float((s > 0) - (s < 0)))
            else:
                kernel.append(((xj - m) - (m - xi)) / (xj - xi))
    return statistics.median(kernel)


def golden_summaries():
    """Fixed boxplot fixture: three hand-written groups."""
    return [
        SkewBoxSummary("alpha", 1.0, 2.0, 3.0, 4.5, 6.0, ((0, -1.5), (3, 9.25)), 12, "tukey"),
        SkewBoxSummary("beta", 0.5, 1.5, 1.75, 2.0, 3.0, (), 8, "tukey"),
        SkewBoxSummary("gamma & delta", -2.0, 0.0, 0.5, 3.0, 7.5, ((5, 11.0),), 20, "tukey"),
    ]


def golden_mosaic():
    """Fixed 4 x 5 heatmap fixture with one failed cell."""
    alphas = (0.1, 0.3, 0.5, 0.7, 0.9)
    ps = (0.5, 1.0, 2.0, 4.0)
    cells = []
    for pi, p in enumerate(ps):
        row = []
        for ai, a in enumerate(alphas):
            if (ai, pi) == (4, 0):
                row.append(CellResult(a, p, float("nan"), float("nan"), 0, 100, ai, pi, "fixture failure"))
                continue
            rate = round(0.02 * ai + 0.03 * (3 - pi), 4)
            row.append(CellResult(a, p, rate, 0.001, 100, 0, ai, pi))
        cells.append(row)
    cfg = SimConfig(scenario="swamping", method="tukey", n=20, reps=100, seed=1)
    return MosaicResult(GridSpec(alphas, ps), cfg, cells, {"seed": 1})
