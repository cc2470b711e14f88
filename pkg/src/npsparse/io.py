"""File formats: CSV/JSON result writers and CSV matrix/vector readers.

Input matrices are plain comma-separated decimal rows with no header;
vectors are single-column files.  Output files always begin with a
schema_version marker and a config echo so a result file records how it was
produced.  Floats are written with 17 significant digits, which round-trips
float64 exactly and keeps golden files byte-stable.  Timing columns are
zeroed unless explicitly requested, for the same reason.
"""

import json
import math

import numpy as np

from .errors import ParseError

SCHEMA_VERSION = 1


def _fmt(value):
    return "%.17g" % float(value)


def _json_value(value):
    # Strict JSON has no Infinity/NaN literals; encode them as strings.
    value = float(value)
    if math.isfinite(value):
        return value
    return repr(value)


def read_matrix_csv(path):
    """Parse a headerless CSV of decimal rows into a 2-D float64 array."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if stripped == "":
                continue
            fields = stripped.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"expected {width} fields, found {len(fields)}",
                    file=path, line=lineno,
                )
            row = []
            for col, token in enumerate(fields, start=1):
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(
                        f"not a number: {token.strip()!r}",
                        file=path, line=lineno, column=col,
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"non-finite value: {token.strip()!r}",
                        file=path, line=lineno, column=col,
                    )
                row.append(value)
            rows.append(row)
    if not rows:
        raise ParseError("empty file", file=path, line=1)
    return np.array(rows, dtype=np.float64)


def read_vector_csv(path):
    """Parse a single-column CSV into a 1-D float64 array."""
    matrix = read_matrix_csv(path)
    if matrix.shape[1] != 1:
        raise ParseError(
            f"expected a single column, found {matrix.shape[1]}",
            file=path, line=1,
        )
    return matrix[:, 0]


def _config_rows(config_echo):
    lines = [f"schema_version,{SCHEMA_VERSION}"]
    for key, value in config_echo.items():
        if isinstance(value, bool):
            value = int(value)
        elif isinstance(value, (list, tuple)):
            value = ";".join(str(v) for v in value)
        lines.append(f"config,{key},{value}")
    return lines


def _json_config(config_echo):
    return {key: value if not isinstance(value, tuple) else list(value)
            for key, value in config_echo.items()}


def _trace_seconds(row, include_timing):
    return row.seconds if include_timing else 0.0


def write_recovery_result(path, fmt, config_echo, result, m, n,
                          include_timing=False):
    """Write a single recovery: summary, estimate, and per-iteration trace.

    CSV rows are tagged by section (config / summary / x_hat / trace); the
    trace columns are iteration, rel_change, rel_error (empty when no
    ground truth was available), seconds.
    """
    if fmt == "csv":
        lines = _config_rows(config_echo)
        lines.append(f"summary,m,{m}")
        lines.append(f"summary,n,{n}")
        lines.append(f"summary,iterations,{result.iterations}")
        lines.append(f"summary,termination,{result.termination}")
        for i, value in enumerate(result.x_hat):
            lines.append(f"x_hat,{i},{_fmt(value)}")
        for row in result.trace:
            err = "" if row.rel_error is None else _fmt(row.rel_error)
            lines.append(
                f"trace,{row.iteration},{_fmt(row.rel_change)},{err},"
                f"{_fmt(_trace_seconds(row, include_timing))}"
            )
        _write_lines(path, lines)
    elif fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config": _json_config(config_echo),
            "summary": {
                "m": m,
                "n": n,
                "iterations": result.iterations,
                "termination": result.termination,
            },
            "x_hat": [_json_value(v) for v in result.x_hat],
            "trace": [
                {
                    "iteration": row.iteration,
                    "rel_change": _json_value(row.rel_change),
                    "rel_error": None if row.rel_error is None
                    else _json_value(row.rel_error),
                    "seconds": _json_value(
                        _trace_seconds(row, include_timing)
                    ),
                }
                for row in result.trace
            ],
        }
        _write_json(path, doc)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def write_grid(path, fmt, config_echo, grid, include_timing=False):
    """Write sweep aggregates, one row per (sweep value, method)."""
    if fmt == "csv":
        lines = _config_rows(config_echo)
        lines.append(
            "sweep_value,method,success_rate,mean_mse_db,"
            "mean_iterations,mean_seconds"
        )
        for p in grid.points:
            seconds = p.mean_seconds if include_timing else 0.0
            lines.append(
                f"{p.sweep_value},{p.method},{_fmt(p.success_rate)},"
                f"{_fmt(p.mean_mse_db)},{_fmt(p.mean_iterations)},"
                f"{_fmt(seconds)}"
            )
        _write_lines(path, lines)
    elif fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config": _json_config(config_echo),
            "points": [
                {
                    "sweep_value": p.sweep_value,
                    "method": p.method,
                    "success_rate": _json_value(p.success_rate),
                    "mean_mse_db": _json_value(p.mean_mse_db),
                    "mean_iterations": _json_value(p.mean_iterations),
                    "mean_seconds": _json_value(
                        p.mean_seconds if include_timing else 0.0
                    ),
                }
                for p in grid.points
            ],
        }
        _write_json(path, doc)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def write_trace_table(path, fmt, config_echo, table, include_timing=True):
    """Write per-method convergence traces, one row per (method, iteration)."""
    if fmt == "csv":
        lines = _config_rows(config_echo)
        lines.append("method,iteration,rel_change,mse_db,seconds")
        for method, iteration, rel_change, mse, seconds in table.rows:
            if not include_timing:
                seconds = 0.0
            lines.append(
                f"{method},{iteration},{_fmt(rel_change)},{_fmt(mse)},"
                f"{_fmt(seconds)}"
            )
        _write_lines(path, lines)
    elif fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config": _json_config(config_echo),
            "rows": [
                {
                    "method": method,
                    "iteration": iteration,
                    "rel_change": _json_value(rel_change),
                    "mse_db": _json_value(mse),
                    "seconds": _json_value(
                        seconds if include_timing else 0.0
                    ),
                }
                for method, iteration, rel_change, mse, seconds in table.rows
            ],
        }
        _write_json(path, doc)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")
