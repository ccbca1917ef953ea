"""Text, CSV and JSON renderings of residual reports.

All floats are written with ``repr`` (shortest round-trip form), so equal
inputs give byte-identical files.

JSON schema (``solitonkit-report/1``)::

    {
      "schema": "solitonkit-report/1",
      "seed": int, "points": int,
      "results": [
        {"scenario": str, "checker": str, "tol": float,
         "expect": "pass" | "fail",
         "status": "pass" | "fail" | "inconclusive",
         "ok": bool, "max": float | null,
         "fitted": {name: float}, "diagnostics": {...},
         "points": [{"index": int, "coords": [float, ...],
                     "value": float | null, "sup": float | null,
                     "error": str (only when the point failed)}]}
      ],
      "summary": {"checks": int, "ok": int, "mismatches": int,
                  "inconclusive": int, "exit_code": int}
    }

CSV: header ``scenario,checker,point,coords,value,sup,tol,expect,status``,
one row per (scenario, checker, point); ``coords`` is ``;``-joined.
"""

from __future__ import annotations

import csv
import io
import json
import math

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

SCHEMA = "solitonkit-report/1"
CSV_HEADER = ("scenario", "checker", "point", "coords", "value", "sup", "tol", "expect", "status")


def status(r):
    if r.inconclusive:
        return "inconclusive"
    return "pass" if r.passed else "fail"


def exit_code(reports):
    """3 if any report is inconclusive, else 1 on any expectation mismatch, else 0."""
    if any(r.inconclusive for r in reports):
        return EXIT_INCONCLUSIVE
    if any(not r.ok for r in reports):
        return EXIT_MISMATCH
    return EXIT_OK


def _num(x):
    x = float(x)
    return None if math.isnan(x) else x


def _fmt(x):
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _errors(r):
    return r.diagnostics.get("errors", {})


def summary(reports):
    return {
        "checks": len(reports),
        "ok": sum(1 for r in reports if r.ok and not r.inconclusive),
        "mismatches": sum(1 for r in reports if not r.ok and not r.inconclusive),
        "inconclusive": sum(1 for r in reports if r.inconclusive),
        "exit_code": exit_code(reports),
    }


def to_json(reports, seed, points):
    results = []
    for r in reports:
        errs = _errors(r)
        pts = []
        for i, p in enumerate(r.points):
            row = {
                "index": i,
                "coords": [float(c) for c in p],
                "value": _num(r.values[i]),
                "sup": _num(r.sup_values[i]),
            }
            if i in errs:
                row["error"] = errs[i]
            pts.append(row)
        diag = {k: v for k, v in r.diagnostics.items() if k != "errors"}
        results.append({
            "scenario": r.scenario,
            "checker": r.equation,
            "tol": float(r.tol),
            "expect": "pass" if r.expect_pass else "fail",
            "status": status(r),
            "ok": bool(r.ok and not r.inconclusive),
            "max": _num(r.max),
            "fitted": {k: _num(v) for k, v in r.fitted.items()},
            "diagnostics": {k: _num(v) for k, v in diag.items()},
            "points": pts,
        })
    doc = {
        "schema": SCHEMA,
        "seed": seed,
        "points": points,
        "results": results,
        "summary": summary(reports),
    }
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        exp = "pass" if r.expect_pass else "fail"
        st = status(r)
        for i, p in enumerate(r.points):
            w.writerow([
                r.scenario, r.equation, i, ";".join(repr(float(c)) for c in p),
                _fmt(r.values[i]), _fmt(r.sup_values[i]), repr(float(r.tol)), exp, st,
            ])
    return buf.getvalue()


def to_text(reports):
    lines = []
    for r in reports:
        tag = "ok" if r.ok and not r.inconclusive else ("??" if r.inconclusive else "XX")
        extra = "".join(f" {k}*={_fmt(v)}" for k, v in r.fitted.items())
        extra += "".join(
            f" {k}={_fmt(v)}" for k, v in r.diagnostics.items() if k != "errors"
        )
        lines.append(
            f"[{tag}] {r.scenario} {r.equation}: max={_fmt(r.max)} tol={r.tol!r} "
            f"expect={'pass' if r.expect_pass else 'fail'} status={status(r)}{extra}"
        )
        for i, msg in sorted(_errors(r).items()):
            lines.append(f"     point {i}: {msg}")
    s = summary(reports)
    lines.append("")
    lines.append(
        f"summary: {s['checks']} checks, {s['ok']} ok, {s['mismatches']} mismatches, "
        f"{s['inconclusive']} inconclusive; exit {s['exit_code']}"
    )
    return "\n".join(lines) + "\n"


def render(reports, fmt, seed, points):
    if fmt == "json":
        return to_json(reports, seed, points)
    if fmt == "csv":
        return to_csv(reports)
    return to_text(reports)
