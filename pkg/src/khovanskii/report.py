"""Convergence tables: exact approximants, errors against an oracle, fitted rates."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactnum import FixedReal, Interval, decimal_str

CSV_COLUMNS = ("n", "num", "den", "decimal", "abs_error", "rate_window")
RATE_WINDOW = 6
FLOAT_BITS = 53


@dataclass(frozen=True)
class Row:
    n: int
    value: Fraction | None
    abs_error: FixedReal | None = None
    rate_window: float | None = None


@dataclass
class ConvergenceReport:
    rows: list[Row]
    precision_bits: int
    rate_estimate: float | None = None
    predicted_rate: FixedReal | None = None
    problem: dict = field(default_factory=dict)
    method: str = ""
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def last_value(self) -> Fraction | None:
        for row in reversed(self.rows):
            if row.value is not None:
                return row.value
        return None


def sci_str(q: Fraction, sig: int = 12) -> str:
    """Exact scientific rendering with ``sig`` significant digits."""
    q = Fraction(q)
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    e = len(str(q.numerator)) - len(str(q.denominator))
    if q < Fraction(10) ** e:
        e -= 1
    mant = q / Fraction(10) ** e
    digits = int(mant * 10 ** (sig - 1) + Fraction(1, 2))
    if digits >= 10**sig:
        digits //= 10
        e += 1
    s = str(digits)
    return f"{sign}{s[0]}.{s[1:]}e{e:+d}"


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def _reliable(err: FixedReal | None) -> bool:
    # well above the rounding floor of the error itself
    return err is not None and (err.exact and err.mantissa > 0 or abs(err.mantissa) >= 256)


def fit_rate(points: Iterable[tuple[int, FixedReal | None]]) -> float | None:
    """exp of the least-squares slope of log|e_n| against n."""
    xs, ys = [], []
    for n, err in points:
        if _reliable(err):
            xs.append(n)
            ys.append(_log(abs(err.value)))
    if len(xs) < 2:
        return None
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return None
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return math.exp(slope)


def build_rows(approx: Iterable[tuple[int, Fraction | None]], target, bits: int) -> list[Row]:
    """Attach |r_n - target| at ``bits`` precision.

    ``target`` is an exact ``Fraction``, an ``Interval`` narrower than
    2**-(bits+2), or None when there is no reference value.
    """
    if target is not None and not isinstance(target, Interval):
        target = Interval(target)
    rows: list[Row] = []
    for n, r in approx:
        err = None
        if r is not None and target is not None:
            err = FixedReal.from_interval(abs(r - target), bits)
        rows.append(Row(n, r, err))
    out = []
    for i, row in enumerate(rows):
        rate = None
        j = i - RATE_WINDOW
        if j >= 0 and _reliable(row.abs_error) and _reliable(rows[j].abs_error):
            span = row.n - rows[j].n
            rate = math.exp((_log(row.abs_error.value) - _log(rows[j].abs_error.value)) / span)
        out.append(Row(row.n, row.value, row.abs_error, rate))
    return out


def final_third_rate(rows: Sequence[Row]) -> float | None:
    tail = rows[len(rows) - max(2, len(rows) // 3):]
    return fit_rate((r.n, r.abs_error) for r in tail)


def _decimal_digits(bits: int) -> int:
    return min(40, max(6, int(bits * 0.30103)))


def fixed_json(x: FixedReal | None, digits: int | None = None):
    if x is None:
        return None
    return {"value": decimal_str(x.value, digits or _decimal_digits(x.bits)),
            "precision_bits": x.bits, "exact": x.exact}


def float_json(x: float | None):
    if x is None:
        return None
    return {"value": f"{x:.6g}", "precision_bits": FLOAT_BITS}


def rational_json(q: Fraction | None):
    if q is None:
        return None
    return {"num": str(q.numerator), "den": str(q.denominator), "exact": True}


def error_json(x: FixedReal | None):
    if x is None:
        return None
    return {"value": sci_str(x.value), "precision_bits": x.bits, "exact": x.exact}


def to_json(report: ConvergenceReport) -> dict:
    digits = _decimal_digits(report.precision_bits)
    rows = []
    for row in report.rows:
        rows.append({
            "n": row.n,
            "num": None if row.value is None else str(row.value.numerator),
            "den": None if row.value is None else str(row.value.denominator),
            "decimal": None if row.value is None else {
                "value": decimal_str(row.value, digits), "precision_bits": report.precision_bits},
            "abs_error": error_json(row.abs_error),
            "rate_window": float_json(row.rate_window),
        })
    out = {
        "problem": report.problem,
        "method": report.method,
        "rows": rows,
        "rate_estimate": float_json(report.rate_estimate),
    }
    if report.predicted_rate is not None:
        out["predicted_rate"] = fixed_json(report.predicted_rate, 20)
    out["status"] = report.status
    out.update(report.extra)
    return out


def to_csv(report: ConvergenceReport) -> str:
    digits = _decimal_digits(report.precision_bits)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in report.rows:
        if row.value is None:
            w.writerow([row.n, "", "", "", "", ""])
            continue
        w.writerow([
            row.n, row.value.numerator, row.value.denominator,
            decimal_str(row.value, digits),
            "" if row.abs_error is None else sci_str(row.abs_error.value),
            "" if row.rate_window is None else f"{row.rate_window:.6g}",
        ])
    return buf.getvalue()


def to_text(report: ConvergenceReport) -> str:
    lines = [f"method: {report.method}",
             "problem: " + ", ".join(f"{k}={v}" for k, v in report.problem.items())]
    for k, v in report.extra.items():
        lines.append(f"{k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    lines.append(f"{'n':>5}  {'approximant':<28}  {'abs_error':<20}  rate")
    for row in report.rows:
        if row.value is None:
            lines.append(f"{row.n:>5}  (skipped: zero denominator)")
            continue
        err = "" if row.abs_error is None else sci_str(row.abs_error.value, 6)
        rate = "" if row.rate_window is None else f"{row.rate_window:.4f}"
        lines.append(f"{row.n:>5}  {decimal_str(row.value, 24):<28}  {err:<20}  {rate}")
    if report.rate_estimate is not None:
        lines.append(f"rate_estimate: {report.rate_estimate:.6g}")
    if report.predicted_rate is not None:
        lines.append(f"predicted_rate: {report.predicted_rate.decimal(12)}")
    lines.append(f"status: {report.status}")
    return "\n".join(lines) + "\n"
