"""Returns files in, CSV/JSON reports out.

Returns files are UTF-8, comma-separated, with a header row of asset names
and an optional leading ``date`` column.  Values are decimal fractions
(0.012 is 1.2%).  Floats in reports carry 17 significant digits, so written
files reload to bit-identical arrays.
"""
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from functools import singledispatch
from pathlib import Path
from typing import Optional

import numpy as np

from .asymptotics import AreTable
from .errors import NonFiniteValue, ParseError, TooFewRows
from .estimators import Estimate
from .influence import DimResult
from .montecarlo import MseTable
from .portfolio import FrontierPoint

__all__ = ["ReturnsData", "load_returns", "write_returns", "emit_report", "format_float"]


@dataclass(frozen=True, eq=False)
class ReturnsData:
    data: np.ndarray
    names: list
    labels: Optional[list] = None


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _parse_cell(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"line {line}, column {column}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"line {line}, column {column}: non-finite value {text!r}")
    return value


def load_returns(path, prices=False, min_rows=2):
    """Read a returns (or prices) CSV file.

    With ``prices=True`` each column is converted to log-returns
    ``ln(P_t / P_{t-1})``, which drops the first row.  Fewer than `min_rows`
    return rows is an error.

    Raises
    ------
    ParseError, NonFiniteValue, TooFewRows
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        has_date = bool(header) and header[0].lower() == "date"
        names = header[1:] if has_date else header
        if not names or any(not n for n in names):
            raise ParseError(f"line 1: malformed header {header!r}")
        width = len(header)
        rows, labels = [], []
        for record in reader:
            line = reader.line_num
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != width:
                raise ParseError(
                    f"line {line}: expected {width} fields, found {len(record)}")
            cells = record[1:] if has_date else record
            if has_date:
                labels.append(record[0].strip())
            rows.append([_parse_cell(c.strip(), line, j + 1 + has_date)
                         for j, c in enumerate(cells)])

    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    if prices:
        if np.any(data <= 0):
            raise ParseError("prices must be strictly positive")
        data = np.diff(np.log(data), axis=0)
        labels = labels[1:]
    if data.shape[0] < max(min_rows, 1):
        raise TooFewRows(
            f"need at least {max(min_rows, 1)} return observations, found {data.shape[0]}")
    return ReturnsData(data, names, labels if has_date else None)


def write_returns(path, data, names, labels=None):
    data = np.asarray(data, dtype=float)
    header = (["date"] if labels is not None else []) + list(names)
    rows = []
    for i, row in enumerate(data):
        cells = [format_float(v) for v in row]
        rows.append(([labels[i]] if labels is not None else []) + cells)
    _write_csv(path, header, rows)


# -- reports ---------------------------------------------------------------

@singledispatch
def _to_table(result):
    raise TypeError(f"no CSV layout for {type(result).__name__}")


@_to_table.register
def _(result: Estimate):
    rows = [["alpha", "", "", format_float(result.alpha)],
            ["iterations", "", "", str(result.iterations)],
            ["converged", "", "", str(result.converged).lower()],
            ["objective_value", "", "", format_float(result.objective_value)]]
    rows += [["mu", str(i + 1), "", format_float(v)] for i, v in enumerate(result.mu)]
    n = result.mu.size
    rows += [["sigma", str(i + 1), str(j + 1), format_float(result.sigma[i, j])]
             for i in range(n) for j in range(n)]
    rows += [["weights", str(t + 1), "", format_float(v)]
             for t, v in enumerate(result.weights)]
    return ["field", "i", "j", "value"], rows


@_to_table.register(list)
def _(result):
    if not result or not all(isinstance(p, FrontierPoint) for p in result):
        raise TypeError("only lists of FrontierPoint can be reported")
    n = result[0].weights.size
    header = ["lambda", "return", "variance"] + [f"w_{i + 1}" for i in range(n)]
    rows = [[format_float(p.lam), format_float(p.expected_return), format_float(p.variance)]
            + [format_float(w) for w in p.weights] for p in result]
    return header, rows


@_to_table.register
def _(result: DimResult):
    return ["index", "dim"], [[str(i), format_float(v)] for i, v in enumerate(result.dims)]


@_to_table.register
def _(result: AreTable):
    header = ["N"] + [f"alpha={float(a):g}" for a in result.alphas]
    rows = [[str(n)] + [format_float(v) for v in result.values[i]]
            for i, n in enumerate(result.ns)]
    return header, rows


@_to_table.register
def _(result: MseTable):
    header = ["n", "t", "eps", "alpha", "mse", "failures"]
    rows = [[str(r.n), str(r.t), format_float(r.eps), format_float(r.alpha),
             format_float(r.mse), str(r.failures)] for r in result.rows]
    return header, rows


@singledispatch
def _to_document(result):
    raise TypeError(f"no JSON layout for {type(result).__name__}")


@_to_document.register
def _(result: Estimate):
    return {
        "mu": result.mu, "sigma": result.sigma, "weights": result.weights,
        "alpha": result.alpha, "iterations": result.iterations,
        "converged": result.converged, "objective_value": result.objective_value,
    }


@_to_document.register(list)
def _(result):
    if not result or not all(isinstance(p, FrontierPoint) for p in result):
        raise TypeError("only lists of FrontierPoint can be reported")
    return [{"lambda": p.lam, "return": p.expected_return, "variance": p.variance,
             "weights": p.weights} for p in result]


@_to_document.register
def _(result: DimResult):
    return {
        "alpha": result.estimate.alpha, "if_alpha": result.if_alpha,
        "lambda": result.point.lam, "variance": result.point.variance,
        "weights": result.point.weights,
        "index": list(range(result.dims.size)), "dim": result.dims,
    }


@_to_document.register
def _(result: AreTable):
    return {"alphas": list(result.alphas), "N": list(result.ns), "are": result.values}


@_to_document.register
def _(result: MseTable):
    return [{"n": r.n, "t": r.t, "eps": r.eps, "alpha": r.alpha, "mse": r.mse,
             "failures": r.failures, "nonconverged": r.nonconverged}
            for r in result.rows]


def _json_text(obj):
    # json.dumps prints shortest repr; reports need fixed 17-digit floats
    if isinstance(obj, np.ndarray):
        return _json_text(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json_text(str(k))}: {_json_text(v)}"
                               for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(path, text):
    if str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_bytes(text.encode("utf-8"))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _write_text(path, buf.getvalue())


def emit_report(result, fmt, path):
    """Write `result` as ``"csv"`` or ``"json"`` to `path` (``"-"`` is stdout)."""
    fmt = fmt.lower()
    if fmt == "csv":
        header, rows = _to_table(result)
        _write_csv(path, header, rows)
    elif fmt == "json":
        _write_text(path, _json_text(_to_document(result)) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
