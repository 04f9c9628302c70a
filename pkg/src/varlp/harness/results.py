"""Check results and report files.

A CheckResult is one verified claim: a named statistic compared against a
bound with an explicit polarity.  Reports are written as a JSON document
(full provenance) plus a CSV with one row per check.  All volatile timing
data lives in the CSV and in the JSON's single ``timestamp`` field, so two
runs with the same config produce byte-identical JSON once that field is
dropped.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

CSV_COLUMNS = ["check_id", "paper_ref", "statistic", "bound", "polarity",
               "pass", "runtime_ms"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class CheckResult:
    check_id: str
    paper_ref: str
    statistic: float
    bound: float
    polarity: str  # "<=" or ">="
    passed: bool
    runtime_ms: float = 0.0
    provenance: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def row(self):
        return {
            "check_id": self.check_id,
            "paper_ref": self.paper_ref,
            "statistic": _fmt(self.statistic),
            "bound": _fmt(self.bound),
            "polarity": self.polarity,
            "pass": str(bool(self.passed)).lower(),
            "runtime_ms": f"{self.runtime_ms:.1f}",
        }

    def to_json_dict(self):
        # runtime is deliberately absent: it is volatile and reported via
        # the CSV and the aggregate timestamp field
        return {
            "check_id": self.check_id,
            "paper_ref": self.paper_ref,
            "statistic": _fmt(self.statistic),
            "bound": _fmt(self.bound),
            "polarity": self.polarity,
            "pass": bool(self.passed),
            "provenance": self.provenance,
            "detail": _jsonable(self.detail),
        }


def check(check_id, paper_ref, statistic, bound, polarity, runtime_ms=0.0,
          provenance=None, detail=None, passed=None):
    """Build a CheckResult, computing pass/fail from the polarity unless
    overridden."""
    statistic = float(statistic)
    bound = float(bound)
    if passed is None:
        if polarity == "<=":
            passed = statistic <= bound
        elif polarity == ">=":
            passed = statistic >= bound
        else:
            raise ValueError(f"unknown polarity: {polarity}")
        if math.isnan(statistic):
            passed = False
    return CheckResult(check_id=check_id, paper_ref=paper_ref,
                       statistic=statistic, bound=bound, polarity=polarity,
                       passed=bool(passed), runtime_ms=float(runtime_ms),
                       provenance=provenance or {}, detail=detail or {})


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return _fmt(obj)
    if hasattr(obj, "tolist"):  # numpy arrays and scalars
        return _jsonable(obj.tolist())
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_document(results, suite, config_description, timestamp=None):
    total_ms = sum(r.runtime_ms for r in results)
    return {
        "schema_version": SCHEMA_VERSION,
        "suite": suite,
        "config": _jsonable(config_description),
        "n_checks": len(results),
        "n_failed": sum(1 for r in results if not r.passed),
        "results": [r.to_json_dict() for r in results],
        "timestamp": {"created": timestamp or "", "runtime_ms": total_ms},
    }


def csv_text(results):
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.row())
    return buf.getvalue()


def emit_report(results, out_dir, suite, config_description=None,
                timestamp=None):
    """Write <suite>.json and <suite>.csv under out_dir (atomically).

    Returns (json_path, csv_path, exit_code); a failing check yields exit
    code 1 but the report is still written.
    """
    doc = report_document(results, suite, config_description or {},
                          timestamp=timestamp)
    json_path = os.path.join(out_dir, f"{suite}.json")
    csv_path = os.path.join(out_dir, f"{suite}.csv")
    _atomic_write(json_path, json.dumps(doc, indent=2, sort_keys=False) + "\n")
    _atomic_write(csv_path, csv_text(results))
    code = EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED
    return json_path, csv_path, code
