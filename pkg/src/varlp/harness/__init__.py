"""Check-suite harness: run context, measurements, calibration of frozen
reference values, suite registry and report emission."""

from .calibration import (
    default_fixtures_path,
    load_fixtures,
    run_calibration,
)
from .context import (
    RunContext,
    StopWatch,
    resolve_exponent,
    resolve_weight,
)
from .results import CheckResult, check, emit_report, report_document
from .suites import SuiteRun, available_suites, build_context, run_suite

__all__ = [
    "CheckResult",
    "RunContext",
    "StopWatch",
    "SuiteRun",
    "available_suites",
    "build_context",
    "check",
    "default_fixtures_path",
    "emit_report",
    "load_fixtures",
    "report_document",
    "resolve_exponent",
    "resolve_weight",
    "run_calibration",
    "run_suite",
]
