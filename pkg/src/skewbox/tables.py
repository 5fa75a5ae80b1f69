"""CSV input tables and the grouped-summary interchange format."""

from __future__ import annotations

import csv
import io
import math
from typing import List, Sequence, TextIO, Tuple, Union

from .fences import GroupFailure, SkewBoxSummary
from .robust import SkewboxError

SUMMARY_COLUMNS = ("group", "ymin", "lower", "middle", "upper", "ymax", "n", "n_outliers", "outlier_values")
INDEX_COLUMN = "outlier_rows"


def num(v: float) -> str:
    """Shortest text that parses back to the same float."""
    return repr(float(v))


def read_input_table(fh: TextIO, group: str, value: str) -> List[Tuple[str, float]]:
    """``(group label, value)`` pairs from a headed CSV.

    Row numbers in error messages count data rows from 1 (the header is row 0).
    """
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise SkewboxError("input has no header row") from None
    missing = [c for c in (group, value) if c not in header]
    if missing:
        raise SkewboxError(f"column(s) not found: {', '.join(missing)}; available: {', '.join(header)}")
    gi, vi = header.index(group), header.index(value)
    rows, bad = [], []
    for lineno, rec in enumerate(reader, start=1):
        if not rec:
            continue
        if len(rec) != len(header):
            bad.append(f"row {lineno}: expected {len(header)} fields, got {len(rec)}")
            continue
        try:
            x = float(rec[vi])
        except ValueError:
            bad.append(f"row {lineno}: value {rec[vi]!r} is not a number")
            continue
        if not math.isfinite(x):
            bad.append(f"row {lineno}: value {rec[vi]!r} is not finite")
            continue
        rows.append((rec[gi], x))
    if bad:
        shown = "; ".join(bad[:10]) + ("; ..." if len(bad) > 10 else "")
        raise SkewboxError(f"{len(bad)} unparseable row(s): {shown}")
    return rows


def write_summary_csv(
    results: Sequence[Union[SkewBoxSummary, GroupFailure]], fh: TextIO, emit_indices: bool = False
) -> None:
    """Summary rows; failed groups are skipped (callers report them separately)."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS + ((INDEX_COLUMN,) if emit_indices else ()))
    for s in results:
        if isinstance(s, GroupFailure):
            continue
        row = [
            s.group_label, num(s.ymin), num(s.lower), num(s.middle), num(s.upper), num(s.ymax),
            str(s.n), str(len(s.outliers)), ";".join(num(v) for _, v in s.outliers),
        ]
        if emit_indices:
            row.append(";".join(str(i + 1) for i, _ in s.outliers))
        w.writerow(row)


def summaries_to_csv(results, emit_indices: bool = False) -> str:
    buf = io.StringIO()
    write_summary_csv(results, buf, emit_indices)
    return buf.getvalue()


def read_summary_csv(fh: TextIO) -> List[SkewBoxSummary]:
    """Parse :func:`write_summary_csv` output back into summaries."""
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise SkewboxError("row 0: empty summary file") from None
    if tuple(header[: len(SUMMARY_COLUMNS)]) != SUMMARY_COLUMNS:
        raise SkewboxError(f"row 0: expected header starting {','.join(SUMMARY_COLUMNS)}")
    with_idx = len(header) > len(SUMMARY_COLUMNS) and header[len(SUMMARY_COLUMNS)] == INDEX_COLUMN
    out = []
    for lineno, rec in enumerate(reader, start=1):
        if not rec:
            continue
        if len(rec) != len(header):
            raise SkewboxError(f"row {lineno}: expected {len(header)} fields, got {len(rec)}")
        try:
            ymin, lower, middle, upper, ymax = (float(v) for v in rec[1:6])
            n, n_out = int(rec[6]), int(rec[7])
            values = [float(v) for v in rec[8].split(";")] if rec[8] else []
            idx = [int(v) - 1 for v in rec[9].split(";")] if with_idx and rec[9] else [-1] * len(values)
        except ValueError as exc:
            raise SkewboxError(f"row {lineno}: {exc}") from None
        if len(values) != n_out or len(idx) != n_out:
            raise SkewboxError(f"row {lineno}: n_outliers is {n_out} but {len(values)} values listed")
        out.append(
            SkewBoxSummary(rec[0], ymin, lower, middle, upper, ymax, tuple(zip(idx, values)), n, "unknown")
        )
    if not out:
        raise SkewboxError("row 1: no summary rows")
    return out
