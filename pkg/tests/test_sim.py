"""Tests for the caller simulation.

The dynamics are checked three ways: closed-form traces small enough to
work out by hand, an independent sequential replay of the contention
contract for runs without passivation, and a frozen regression table
(tests/fixtures/sim_baseline.csv, regenerated via
scripts/gen_sim_baseline.py) that pins the sweep output byte for byte.
"""

import dataclasses
import pathlib
import random

import pytest

from muit.sim import (
    CSV_HEADER,
    SpecError,
    WorkloadSpec,
    render_csv,
    run,
    summarize,
    sweep,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def reference_latencies(spec: WorkloadSpec) -> list[float]:
    """Sequential replay of the contention contract.

    Valid only for passivation-off runs with worker_bound >= n, where
    every request is granted the moment it is issued.  Each caller's
    next request starts when its previous response lands; the response
    time is grant + think + pressure, with pressure read at the grant
    from the count of delayed requests past their service window:

        S(t) = |{j delayed : grant_j + service <= t < respond_j}|

    The half-open interval mirrors event order in the simulation: a
    request maturing exactly at t is already asleep, one responding
    exactly at t is already gone.
    """
    total = spec.total_requests
    rng = random.Random(spec.seed)
    delayed = set(rng.sample(range(total), round(spec.delayed_fraction * total)))
    think = {
        i: spec.service_time_s + (spec.delay_s if i in delayed else 0.0)
        for i in range(total)
    }
    grant: dict[int, float] = {}
    respond: dict[int, float] = {}
    next_req = [0] * spec.n
    ready = [0.0] * spec.n
    latencies = [0.0] * total
    for _ in range(total):
        caller = min(
            (c for c in range(spec.n) if next_req[c] < spec.requests_per_caller),
            key=lambda c: (ready[c], c),
        )
        t = ready[caller]
        idx = caller * spec.requests_per_caller + next_req[caller]
        s = sum(
            1
            for j in delayed
            if j in grant and grant[j] + spec.service_time_s <= t < respond[j]
        )
        r = t + think[idx] + spec.memory_pressure_s * s * s
        grant[idx] = t
        respond[idx] = r
        latencies[idx] = r - t
        ready[caller] = r
        next_req[caller] += 1
    return latencies


class TestClosedForm:
    def test_single_caller_no_delay_is_exactly_service_time(self):
        report = run(WorkloadSpec(n=1, delayed_fraction=0.0))
        assert report.latencies == [2.0] * 10
        assert report.art_s == 2.0
        assert report.p95_s == 2.0
        assert report.passivations == 0

    def test_zero_delayed_is_flat_at_any_scale(self):
        # No delayed requests means no sleepers, so no pressure: every
        # latency is the bare service time regardless of N.
        for n in (1, 40, 200):
            report = run(WorkloadSpec(n=n, delayed_fraction=0.0))
            assert report.art_s == 2.0
            assert set(report.latencies) == {2.0}

    def test_all_delayed_single_caller_hand_trace(self):
        # One caller, two requests, both delayed.  r0: granted at 0,
        # matures at 2, responds at 62; r1: issued at 62 with zero
        # sleepers (r0 just left), responds at 124.  Latency 62 both
        # times whether or not the engine passivates in between.
        spec = WorkloadSpec(n=1, requests_per_caller=2, delayed_fraction=1.0)
        on = run(spec)
        off = run(dataclasses.replace(spec, passivation=False))
        assert on.latencies == [62.0, 62.0]
        assert off.latencies == [62.0, 62.0]
        # Each request sits idle past the 4s threshold, so with the
        # sweep running both get passivated and restored exactly once.
        assert (on.passivations, on.restores) == (2, 2)
        assert (off.passivations, off.restores) == (0, 0)

    def test_half_delayed_pair(self):
        report = run(WorkloadSpec(n=2, requests_per_caller=1, delayed_fraction=0.5))
        assert sorted(report.latencies) == [2.0, 62.0]
        assert report.delayed_indices == sorted(report.delayed_indices)
        assert len(report.delayed_indices) == 1
        # Summary stats skip the delayed request entirely.
        assert report.art_s == 2.0
        assert report.p95_s == 2.0


class TestReferenceModel:
    def test_matches_simulation_with_visible_pressure(self):
        # Pressure cranked high enough that the S^2 term shifts float
        # values well above rounding noise; equality must still be
        # exact because both sides run the same arithmetic.
        spec = WorkloadSpec(
            n=6,
            requests_per_caller=5,
            delayed_fraction=0.4,
            delay_s=7.3,
            memory_pressure_s=0.013,
            passivation=False,
            worker_bound=100,
            seed=77,
        )
        report = run(spec)
        expected = reference_latencies(spec)
        assert report.latencies == expected
        assert max(report.latencies) > spec.service_time_s + spec.delay_s

    def test_matches_simulation_at_default_pressure(self):
        spec = WorkloadSpec(
            n=30,
            requests_per_caller=4,
            delayed_fraction=0.25,
            delay_s=9.0,
            passivation=False,
            seed=5,
        )
        assert run(spec).latencies == reference_latencies(spec)

    def test_summary_excludes_delayed_requests(self):
        spec = WorkloadSpec(
            n=10, requests_per_caller=3, delayed_fraction=0.3, passivation=False
        )
        report = run(spec)
        delayed = set(report.delayed_indices)
        mean, p95 = summarize(report.latencies, delayed)
        assert report.art_s == mean
        assert report.p95_s == p95
        kept = [v for i, v in enumerate(report.latencies) if i not in delayed]
        assert mean == sum(kept) / len(kept)


class TestPassivationEffect:
    def test_transparent_to_callers_without_pressure(self):
        # With the pressure term zeroed, passivation must not move a
        # single latency: restore happens inside complete() before the
        # response is produced, invisibly to the caller.
        spec = WorkloadSpec(n=25, requests_per_caller=4, memory_pressure_s=0.0)
        on = run(spec)
        off = run(dataclasses.replace(spec, passivation=False))
        assert on.latencies == off.latencies
        assert on.passivations > 0
        assert off.passivations == 0

    def test_reduces_art_under_pressure(self):
        spec = WorkloadSpec(n=300)
        on = run(spec)
        off = run(dataclasses.replace(spec, passivation=False))
        assert on.art_s < off.art_s
        # Passivated instances leave memory, so the live-instance
        # integral (a proxy for resident footprint) drops hard too.
        assert on.live_instance_seconds < off.live_instance_seconds / 3

    def test_every_delayed_request_passivates_once_at_defaults(self):
        # delay (60s) dwarfs the idle threshold (4s) while non-delayed
        # requests respond before ever going idle, so passivation count
        # equals the delayed count exactly.
        report = run(WorkloadSpec(n=120))
        assert report.passivations == len(report.delayed_indices)
        assert report.restores == report.passivations

    def test_peak_live_is_caller_count(self):
        # Callers issue in lockstep at t=0 and each waits for its
        # response, so concurrency peaks at N in both modes.
        for passivation in (True, False):
            report = run(WorkloadSpec(n=80, passivation=passivation))
            assert report.peak_live == 80


class TestConservation:
    @pytest.mark.parametrize(
        "spec",
        [
            WorkloadSpec(n=50),
            WorkloadSpec(n=50, passivation=False),
            WorkloadSpec(n=40, sync_fraction=0.5),
            WorkloadSpec(n=20, requests_per_caller=3, delayed_fraction=1.0),
        ],
        ids=["on", "off", "mixed-transport", "all-delayed"],
    )
    def test_every_request_settles(self, spec):
        report = run(spec)
        assert report.issued == spec.total_requests
        assert report.completed + report.faulted == report.issued
        assert report.faulted == report.backpressured == 0
        assert len(report.latencies) == report.issued
        # Latency is a difference of absolute clock values, so it can
        # round a few ulps below the exact think time.
        assert all(v > spec.service_time_s - 1e-9 for v in report.latencies)

    def test_transport_mix_does_not_change_timing(self):
        # Sync callers hold a connection, async callers take a
        # callback; either way the caller waits, so the latency math
        # is identical request for request.
        base = run(WorkloadSpec(n=60))
        mixed = run(WorkloadSpec(n=60, sync_fraction=0.5))
        solid = run(WorkloadSpec(n=60, sync_fraction=1.0))
        assert base.latencies == mixed.latencies == solid.latencies
        assert (base.mode, mixed.mode, solid.mode) == ("async", "mixed-0.5", "sync")

    def test_worker_bound_below_caller_count_still_drains(self):
        report = run(WorkloadSpec(n=150, requests_per_caller=2, worker_bound=40))
        assert report.completed == 300
        assert report.peak_live == 150
        # Queued requests wait for a worker, so some latencies stretch
        # past think time even for non-delayed requests.
        assert max(report.latencies) > 62.0

    def test_worker_bound_with_passivation_rescues_queued(self):
        # Workers scarce enough that delayed requests get passivated
        # while still queued; the run must settle them all anyway.
        report = run(
            WorkloadSpec(n=30, requests_per_caller=2, delayed_fraction=1.0, worker_bound=4)
        )
        assert report.completed == 60
        assert report.passivations > 0
        assert report.restores == report.passivations


class TestDeterminism:
    def test_identical_runs_are_byte_identical(self):
        spec = WorkloadSpec(n=80)
        assert run(spec).to_json() == run(spec).to_json()

    def test_seed_changes_the_delayed_set(self):
        a = run(WorkloadSpec(n=40, seed=1))
        b = run(WorkloadSpec(n=40, seed=2))
        assert a.delayed_indices != b.delayed_indices


class TestSweep:
    def test_monotone_trends_at_small_scale(self):
        sizes = (50, 150, 300)
        on = sweep(WorkloadSpec(), n_values=sizes)
        off = sweep(WorkloadSpec(passivation=False), n_values=sizes)
        on_art = [r.art_s for r in on]
        off_art = [r.art_s for r in off]
        assert on_art == sorted(on_art)
        assert off_art == sorted(off_art) and len(set(off_art)) == 3
        assert all(o > p for o, p in zip(off_art, on_art))

    def test_baseline_regression_table(self):
        # Frozen output of scripts/gen_sim_baseline.py.  A diff here
        # means the dynamics changed; regenerate only if the change
        # was deliberate.
        reports = sweep(WorkloadSpec()) + sweep(WorkloadSpec(passivation=False))
        expected = (FIXTURES / "sim_baseline.csv").read_text(encoding="utf-8")
        assert render_csv(reports) == expected


class TestSpecValidation:
    def test_defaults_are_valid(self):
        assert WorkloadSpec().validate() is not None

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"n": 0}, "n must be at least 1"),
            ({"requests_per_caller": 0}, "requests_per_caller"),
            ({"sync_fraction": 1.5}, "sync_fraction"),
            ({"delayed_fraction": -0.1}, "delayed_fraction"),
            ({"service_time_s": 0.0}, "service_time_s must be positive"),
            ({"delay_s": -1.0}, "delay_s non-negative"),
            ({"worker_bound": 0}, "worker_bound"),
            ({"idle_threshold_s": 2.0}, "idle_threshold_s must exceed"),
        ],
    )
    def test_rejects_bad_values(self, kwargs, message):
        with pytest.raises(SpecError, match=message):
            WorkloadSpec(**kwargs).validate()


class TestCsv:
    def test_render_shape(self):
        reports = sweep(WorkloadSpec(), n_values=(50,))
        text = render_csv(reports)
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        n, mode, passivation, art, p95, peak = lines[1].split(",")
        assert (n, mode, passivation, peak) == ("50", "async", "on", "50")
        # Six decimal places, fixed point.
        assert len(art.split(".")[1]) == 6
        assert len(p95.split(".")[1]) == 6
