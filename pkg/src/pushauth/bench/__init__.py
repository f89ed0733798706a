"""Benchmark harness: per-variant duration and success-rate studies."""

from pushauth.bench.plan import StudyPlan, VariantPlan, default_study_plan
from pushauth.bench.report import RunSummary, VariantSummary, emit_report, parse_structured
from pushauth.bench.run import StudyRunner, run_study

__all__ = [
    "StudyPlan",
    "VariantPlan",
    "default_study_plan",
    "RunSummary",
    "VariantSummary",
    "emit_report",
    "parse_structured",
    "StudyRunner",
    "run_study",
]
