"""Command-line interface: ``skewbox {summarise,simulate,render,sepd-check}``.

Exit status: 0 success, 1 usage or configuration error, 2 partial failure
(some groups or grid cells failed, or the SEPD self-check did not pass).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import __version__, kernels
from .fences import METHODS, MC_ESTIMATORS, WHISKER_MODES, FenceParams, GroupFailure, grouped_summary
from .mosaic import SCENARIOS, GridSpec, MosaicResult, SimConfig, run_mosaics
from .render import BoxplotStyle, HeatmapScale, render_boxplots, render_mosaic
from .robust import SkewboxError
from .sepd import SepdEvaluator, SepdParams, ks_statistic, ks_threshold, make_rng
from .tables import num, read_input_table, read_summary_csv, write_summary_csv

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2
CHECK_LEVELS = (0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 means partial failure here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _method_list(text: str) -> List[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    if names == ["all"]:
        return list(METHODS)
    bad = [m for m in names if m not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown method {','.join(bad) or text!r}; valid methods: {', '.join(METHODS)}"
        )
    return names


def _method(text: str) -> str:
    names = _method_list(text)
    if len(names) != 1:
        raise argparse.ArgumentTypeError("exactly one method expected")
    return names[0]


def _range(text: str, allow_log: bool):
    parts = text.split(",")
    log = False
    if allow_log and len(parts) == 4:
        if parts[3] not in ("log", "lin"):
            raise argparse.ArgumentTypeError(f"fourth field must be 'log' or 'lin', got {parts[3]!r}")
        log = parts.pop() == "log"
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo,hi,count{'[,log]' if allow_log else ''}; got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return (lo, hi, count, log) if allow_log else (lo, hi, count)


def _hex_list(text: str):
    return tuple(c.strip() for c in text.split(",") if c.strip())


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="skewbox", description="Skewness-aware boxplot fences, simulations and SVG rendering.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("summarise", aliases=["summarize"], help="grouped boxplot statistics from a CSV file")
    s.add_argument("--input", default="-", help="CSV file with a header row ('-' for stdin)")
    s.add_argument("--group", required=True, help="grouping column")
    s.add_argument("--value", required=True, help="numeric column")
    s.add_argument("--method", type=_method, default="tukey", help=f"one of: {', '.join(METHODS)}")
    s.add_argument("--k", type=float, default=1.5, help="whisker coefficient (default 1.5)")
    s.add_argument("--whisker", choices=WHISKER_MODES, default="fence",
                   help="ymin/ymax at the fences or at the extreme inliers")
    s.add_argument("--mc-estimator", choices=MC_ESTIMATORS, default="kernel",
                   help="skewness statistic for hubert/adil (default kernel medcouple)")
    s.add_argument("--emit-indices", action="store_true", help="add 1-based source rows of the outliers")
    s.set_defaults(func=cmd_summarise)

    m = sub.add_parser("simulate", help="swamping/masking Monte Carlo over an (alpha, p) grid")
    m.add_argument("--scenario", choices=SCENARIOS, default="swamping")
    m.add_argument("--method", type=_method_list, default=["tukey"],
                   help="method, comma-separated list or 'all'; several methods share the same samples")
    m.add_argument("--n", type=int, default=20, help="sample size")
    m.add_argument("--reps", type=int, default=10_000, help="replications per cell")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--grid-alpha", type=lambda t: _range(t, False), default=(0.05, 0.95, 49),
                   metavar="LO,HI,COUNT")
    m.add_argument("--grid-p", type=lambda t: _range(t, True), default=(0.5, 10.0, 49, True),
                   metavar="LO,HI,COUNT[,log]", help="linear unless ',log' is given (default 0.5,10,49,log)")
    m.add_argument("--k", type=float, default=1.5)
    m.add_argument("--contamination", type=float, default=0.05, help="masking: fraction of planted outliers")
    m.add_argument("--tail-quantile", type=float, default=0.999)
    m.add_argument("--mc-estimator", choices=MC_ESTIMATORS, default="kernel")
    m.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    m.add_argument("--backend", choices=kernels.BACKENDS, default=None, help="kernel backend override")
    m.add_argument("--stamp", action="store_true", help="record a wall-clock timestamp in the .meta file")
    m.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv and PREFIX.meta")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("render", help="SVG from a summarise or simulate CSV")
    r.add_argument("--kind", choices=("boxplot", "mosaic"), required=True)
    r.add_argument("--input", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--min-rate", type=float, default=0.0)
    r.add_argument("--max-rate", type=float, default=0.10)
    r.add_argument("--low-color", default="#1a1a40")
    r.add_argument("--high-color", default="#f5f5dc")
    r.add_argument("--failed-color", default="#c0392b")
    r.add_argument("--box-width", type=float, default=40.0)
    r.add_argument("--gap", type=float, default=30.0)
    r.add_argument("--axis-label", default="value")
    r.add_argument("--colors", type=_hex_list, default=("#9ecae1",), help="comma-separated box fills")
    r.add_argument("--no-outliers", action="store_true")
    r.set_defaults(func=cmd_render)

    c = sub.add_parser("sepd-check", help="SEPD normalizer, quantiles and KS self-test as CSV")
    c.add_argument("--alpha", type=float, default=0.5)
    c.add_argument("--p", type=float, default=2.0)
    c.add_argument("--mu", type=float, default=0.0)
    c.add_argument("--sigma", type=float, default=1.0)
    c.add_argument("--ks-n", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_sepd_check)
    return ap


def _err(msg: str) -> None:
    print(f"skewbox: {msg}", file=sys.stderr)


def cmd_summarise(args) -> int:
    try:
        params = FenceParams(k=args.k, mc_estimator=args.mc_estimator)
        if args.input == "-":
            rows = read_input_table(sys.stdin, args.group, args.value)
        else:
            with open(args.input, newline="") as fh:
                rows = read_input_table(fh, args.group, args.value)
        results = grouped_summary(rows, args.method, params, args.whisker)
    except OSError as exc:
        _err(f"cannot read {args.input}: {exc.strerror}")
        return EXIT_USAGE
    except SkewboxError as exc:
        _err(str(exc))
        return EXIT_USAGE
    write_summary_csv(results, sys.stdout, args.emit_indices)
    failed = [r for r in results if isinstance(r, GroupFailure)]
    for f in failed:
        _err(f"group {f.group_label!r} (n={f.n}) failed: {f.message}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_simulate(args) -> int:
    try:
        grid = GridSpec.from_ranges(args.grid_alpha, args.grid_p)
        config = SimConfig(
            scenario=args.scenario, method=args.method[0], n=args.n, reps=args.reps, k=args.k,
            seed=args.seed, contamination_fraction=args.contamination,
            tail_quantile=args.tail_quantile, mc_estimator=args.mc_estimator,
        )
        if args.workers < 1:
            raise SkewboxError("workers must be at least 1")
        if args.backend:
            kernels.set_backend(args.backend)
    except (SkewboxError, RuntimeError) as exc:
        _err(str(exc))
        return EXIT_USAGE

    results = run_mosaics(grid, config, args.method, workers=args.workers, stamp=args.stamp)
    any_failed = False
    for method, res in results.items():
        prefix = args.out if len(results) == 1 else f"{args.out}-{method}"
        try:
            csv_path, _ = res.write(prefix)
        except OSError as exc:
            _err(f"cannot write {prefix}: {exc.strerror}")
            return EXIT_USAGE
        cells = list(res.iter_cells())
        failed = [c for c in cells if c.failed]
        flagged = [c for c in cells if c.flagged and not c.failed]
        ok = [c for c in cells if not c.failed]
        top = max(ok, key=lambda c: c.rate) if ok else None
        top_txt = f"max {top.rate:.4f} at alpha={top.alpha:.4g} p={top.p:.4g}" if top else "max n/a"
        print(
            f"{method} {config.scenario}: mean rate {res.mean_rate():.4f}; {top_txt}; "
            f"failed cells {len(failed)}; cells over 1% failed reps {len(flagged)} -> {csv_path}"
        )
        any_failed = any_failed or bool(failed)
    return EXIT_PARTIAL if any_failed else EXIT_OK


def _load_mosaic(path: str) -> MosaicResult:
    with open(path, newline="") as fh:
        text = fh.read()
    meta = None
    meta_path = os.path.splitext(path)[0] + ".meta"
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            try:
                meta = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SkewboxError(f"{meta_path}: {exc}") from None
    return MosaicResult.from_csv(text, meta)


def cmd_render(args) -> int:
    try:
        if args.kind == "mosaic":
            scale = HeatmapScale(args.min_rate, args.max_rate, args.low_color, args.high_color, args.failed_color)
            svg = render_mosaic(_load_mosaic(args.input), scale)
        else:
            style = BoxplotStyle(
                box_width=args.box_width, gap=args.gap, show_outliers=not args.no_outliers,
                axis_label=args.axis_label, fill_colors=args.colors,
            )
            with open(args.input, newline="") as fh:
                svg = render_boxplots(read_summary_csv(fh), style)
        with open(args.out, "w") as fh:
            fh.write(svg)
    except OSError as exc:
        _err(f"{exc.filename}: {exc.strerror}")
        return EXIT_USAGE
    except SkewboxError as exc:
        _err(f"{args.input}: {exc}")
        return EXIT_USAGE
    return EXIT_OK


def cmd_sepd_check(args) -> int:
    try:
        if args.ks_n < 1:
            raise SkewboxError("--ks-n must be at least 1")
        ev = SepdEvaluator(SepdParams(mu=args.mu, sigma=args.sigma, alpha=args.alpha, p=args.p))
    except SkewboxError as exc:
        _err(str(exc))
        return EXIT_USAGE
    draws = ev.draw(make_rng(args.seed), args.ks_n)
    ks = ks_statistic(ev, draws)
    thr = ks_threshold(args.ks_n)
    passed = ks < thr
    rows = [
        ("alpha", num(args.alpha)), ("p", num(args.p)), ("mu", num(args.mu)), ("sigma", num(args.sigma)),
        ("normalizer", num(ev.normalizer)), ("analytic_normalizer", num(ev.analytic_normalizer)),
        ("left_mass", num(ev.left_mass)),
    ]
    rows += [(f"quantile_{u:g}", num(ev.quantile(u))) for u in CHECK_LEVELS]
    rows += [
        ("ks_n", str(args.ks_n)), ("ks_statistic", num(ks)), ("ks_threshold", num(thr)),
        ("ks_pass", "pass" if passed else "fail"),
    ]
    print("quantity,value")
    for k, v in rows:
        print(f"{k},{v}")
    return EXIT_OK if passed else EXIT_PARTIAL


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
