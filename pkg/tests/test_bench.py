"""Bench harness: plans, execution, aggregation, reports."""

from __future__ import annotations

import io
import json
import random
import statistics

import pytest

from pushauth.agent.profile import AgentProfile, LatencyModel
from pushauth.bench.plan import StudyPlan, VariantPlan, default_study_plan
from pushauth.bench.report import emit_report, parse_structured, text_table
from pushauth.bench.run import StudyRunner, _failure_positions, _variant_rng, run_study
from pushauth.errors import ConfigError
from pushauth.protocol.model import DeviceClass


def zero_latency_variant(name="instant", series=1, attempts=8, failure_prob=0.0):
    return VariantPlan(
        name=name,
        agent_profile=AgentProfile(
            user_id=f"bench-{name}",
            device_class=DeviceClass.WATCH,
            confirm_delay=LatencyModel.zero(),
        ),
        attempts_per_series=attempts,
        series=series,
        failure_prob=failure_prob,
    )


def password_variant(name="password", mean_ms=50.0, sd_ms=10.0, attempts=8, failure_prob=0.0):
    return VariantPlan(
        name=name,
        password_latency=LatencyModel.normal(mean_ms, sd_ms),
        attempts_per_series=attempts,
        failure_prob=failure_prob,
    )


# -- plan validation -----------------------------------------------------------


def test_variant_requires_exactly_one_model():
    with pytest.raises(ConfigError):
        VariantPlan(name="both")
    with pytest.raises(ConfigError):
        VariantPlan(
            name="both",
            agent_profile=AgentProfile(user_id="u"),
            password_latency=LatencyModel.zero(),
        )


def test_plan_rejects_duplicate_names():
    with pytest.raises(ConfigError):
        StudyPlan(variants=(password_variant(), password_variant()))


def test_plan_file_round_trip(tmp_path):
    plan = default_study_plan(seed=7, series=3)
    path = tmp_path / "plan.json"
    plan.to_file(path)
    assert StudyPlan.from_file(path) == plan


def test_default_plan_shape():
    plan = default_study_plan(seed=42, series=30)
    names = [v.name for v in plan.variants]
    assert names == [
        "password",
        "phone_button",
        "phone_biometric",
        "watch_button",
        "watch_biometric",
    ]
    assert all(v.attempts == 240 for v in plan.variants)
    assert plan.variants[0].is_password


# -- failure injection ----------------------------------------------------------


def test_failure_quota_is_exact():
    rng = random.Random(0)
    assert len(_failure_positions(rng, 240, 0.03)) == 7
    assert len(_failure_positions(rng, 240, 0.04)) == 10
    assert _failure_positions(rng, 240, 0.0) == set()
    assert len(_failure_positions(rng, 10, 1.0)) == 10


def test_failure_positions_seeded():
    a = _failure_positions(random.Random("x"), 100, 0.1)
    b = _failure_positions(random.Random("x"), 100, 0.1)
    assert a == b


# -- execution -------------------------------------------------------------------


def test_password_study_bypasses_network():
    plan = StudyPlan(variants=(password_variant(mean_ms=5.0, sd_ms=1.0),), seed=3)
    runner = StudyRunner(plan)
    summary = runner.run()
    assert runner.service is None and runner.server is None
    assert summary.variants[0].n == 8


def test_password_variant_makes_no_service_requests():
    plan = StudyPlan(
        variants=(
            password_variant(mean_ms=5.0, sd_ms=1.0, attempts=4),
            zero_latency_variant(attempts=4),
        ),
        seed=3,
    )
    runner = StudyRunner(plan)
    runner.run()
    assert runner.service.stats.requests_opened == 4


def test_zero_latency_wall_study_is_fast():
    """Loopback overhead bound: 40 attempts, success 1.0, mean < 0.25 s."""
    plan = StudyPlan(
        variants=(zero_latency_variant(attempts=8, series=5),),
        seed=11,
        timing="wall",
    )
    summary = run_study(plan)
    variant = summary.variants[0]
    assert variant.n == 40
    assert variant.success_rate == 1.0
    assert variant.mean_duration_s < 0.25
    assert summary.started_at_ms is not None


def test_injected_failures_recorded_with_durations():
    plan = StudyPlan(
        variants=(zero_latency_variant(attempts=10, failure_prob=0.3),),
        seed=5,
    )
    summary = run_study(plan)
    variant = summary.variants[0]
    assert variant.successes + variant.failures == variant.n == 10
    assert variant.failures == 3
    assert variant.success_rate == 0.7


def test_accounted_durations_match_injected_samples():
    """Recorded mean equals the injected latency mean plus overhead."""
    profile = AgentProfile(
        user_id="bench-inj",
        device_class=DeviceClass.WATCH,
        confirm_delay=LatencyModel.normal(30.0, 5.0),
    )
    variant = VariantPlan(name="inj", agent_profile=profile, attempts_per_series=12)
    plan = StudyPlan(variants=(variant,), seed=21, overhead_ms=4.0)
    summary = run_study(plan)

    rng = _variant_rng(plan.seed, "inj")
    from pushauth.agent.profile import sample_attempt_delay

    expected = [sample_attempt_delay(profile, rng) + 4.0 for _ in range(12)]
    assert summary.variants[0].mean_duration_s == pytest.approx(
        statistics.fmean(expected) / 1000.0, abs=1e-9
    )
    # protocol overhead term keeps the recorded mean at or above the model
    assert summary.variants[0].mean_duration_s * 1000 >= 30.0 - 5.0


def test_determinism_same_seed_same_report():
    plan = StudyPlan(
        variants=(
            password_variant(mean_ms=20.0, sd_ms=4.0, attempts=6),
            zero_latency_variant(attempts=6),
        ),
        seed=99,
        time_scale=0.01,
    )
    first = run_study(plan).to_json()
    second = run_study(plan).to_json()
    assert first == second


def test_different_seed_changes_report():
    base = dict(
        variants=(password_variant(mean_ms=20.0, sd_ms=4.0, attempts=6),),
        time_scale=0.01,
    )
    first = run_study(StudyPlan(seed=1, **base))
    second = run_study(StudyPlan(seed=2, **base))
    assert first.variants[0].mean_duration_s != second.variants[0].mean_duration_s


def test_shuffle_reorders_variants_deterministically():
    variants = (
        password_variant("pw", mean_ms=1.0, sd_ms=0.1, attempts=2),
        password_variant("pw2", mean_ms=1.0, sd_ms=0.1, attempts=2),
        password_variant("pw3", mean_ms=1.0, sd_ms=0.1, attempts=2),
    )
    ordered = run_study(StudyPlan(variants=variants, seed=8))
    shuffled_a = run_study(StudyPlan(variants=variants, seed=8, shuffle=True))
    shuffled_b = run_study(StudyPlan(variants=variants, seed=8, shuffle=True))
    assert [v.name for v in shuffled_a.variants] == [v.name for v in shuffled_b.variants]
    assert sorted(v.name for v in shuffled_a.variants) == ["pw", "pw2", "pw3"]
    assert [v.name for v in ordered.variants] == ["pw", "pw2", "pw3"]


def test_successes_only_changes_duration_pool():
    variant = password_variant(mean_ms=100.0, sd_ms=20.0, attempts=10, failure_prob=0.4)
    everything = run_study(StudyPlan(variants=(variant,), seed=13, time_scale=0.001))
    winners = run_study(
        StudyPlan(variants=(variant,), seed=13, time_scale=0.001, successes_only=True)
    )
    assert everything.variants[0].success_rate == winners.variants[0].success_rate
    assert everything.variants[0].mean_duration_s != winners.variants[0].mean_duration_s


# -- reports ---------------------------------------------------------------------


def test_empty_plan_header_only_table():
    summary = run_study(StudyPlan(seed=1))
    rendered = text_table(summary)
    lines = rendered.strip().splitlines()
    assert len(lines) == 2
    assert "Variant" in lines[0] and "Duration" in lines[0] and "Success" in lines[0]


def test_structured_report_round_trip():
    plan = StudyPlan(
        variants=(password_variant(mean_ms=10.0, sd_ms=2.0, attempts=4),), seed=17
    )
    summary = run_study(plan)
    parsed = parse_structured(summary.to_json())
    assert parsed == summary


def test_text_table_lists_variants_in_plan_order():
    plan = StudyPlan(
        variants=(
            password_variant("one", mean_ms=1.0, sd_ms=0.1, attempts=2),
            password_variant("two", mean_ms=1.0, sd_ms=0.1, attempts=2),
        ),
        seed=4,
    )
    rendered = text_table(run_study(plan))
    assert rendered.index("one") < rendered.index("two")


GOLDEN_TABLE = (
    "Variant            Duration            Success\n"
    "----------------------------------------------\n"
    "pw                 0.05 s (0.01 s)      100.0%\n"
)


def test_golden_text_table():
    plan = StudyPlan(
        variants=(password_variant("pw", mean_ms=50.0, sd_ms=10.0, attempts=8),),
        seed=2024,
        time_scale=0.001,
    )
    summary = run_study(plan)
    assert text_table(summary) == GOLDEN_TABLE


def test_emit_report_to_file_and_stream(tmp_path):
    summary = run_study(
        StudyPlan(variants=(password_variant(mean_ms=1.0, sd_ms=0.1, attempts=2),), seed=6)
    )
    out_path = tmp_path / "report.json"
    emit_report(summary, "structured", out_path)
    assert parse_structured(out_path.read_text()) == summary
    stream = io.StringIO()
    emit_report(summary, "text", stream)
    assert "Variant" in stream.getvalue()


def test_emit_report_unwritable_path_raises(tmp_path):
    summary = run_study(StudyPlan(seed=1))
    with pytest.raises(OSError):
        emit_report(summary, "structured", tmp_path / "missing-dir" / "report.json")


def test_config_digest_tracks_plan_identity():
    a = StudyPlan(variants=(password_variant(mean_ms=1.0, sd_ms=0.1),), seed=1)
    b = StudyPlan(variants=(password_variant(mean_ms=1.0, sd_ms=0.1),), seed=2)
    assert a.digest() != b.digest()
    assert a.digest() == StudyPlan.from_dict(json.loads(json.dumps(a.to_dict()))).digest()
