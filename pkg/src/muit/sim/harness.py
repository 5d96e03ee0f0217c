"""Deterministic discrete-event caller harness driving the instance manager.

Simulated time only: a heap of (time, seq) events advances a shared
manual clock, so "2 seconds of service" costs no wall time and two runs
with the same spec produce identical reports byte for byte.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import replace

from muit.bridge import TaskEnvelope
from muit.engine import (
    ASYNC,
    SYNC,
    BackpressureError,
    EngineConfig,
    InstanceManager,
    ManualClock,
    MemoryStore,
    PASSIVATED_STATES,
)

from .spec import RunReport, WorkloadSpec, summarize

ISSUE, MATURE, RESPOND, SWEEP = "issue", "mature", "respond", "sweep"


class _Simulation:
    def __init__(self, spec: WorkloadSpec):
        self.spec = spec
        self.clock = ManualClock(0.0)
        self.manager = InstanceManager(
            store=MemoryStore(),
            clock=self.clock,
            config=EngineConfig(
                idle_threshold_s=spec.idle_threshold_s,
                queue_capacity=max(4 * spec.n, 4096),
            ),
        )
        total = spec.total_requests
        rng = random.Random(spec.seed)
        delayed_count = round(spec.delayed_fraction * total)
        self.delayed = set(rng.sample(range(total), delayed_count))
        sync_count = round(spec.sync_fraction * total)
        self.sync_ids = set(random.Random(spec.seed + 1).sample(range(total), sync_count))

        self.heap: list[tuple[float, int, str, int]] = []
        self.seq = 0
        self.next_request = [0] * spec.n
        self.t_issue = [0.0] * total
        self.latencies = [0.0] * total
        self.iid_of: list[str | None] = [None] * total
        self.idx_of: dict[str, int] = {}
        self.matured = [False] * total

        self.free_workers = spec.worker_bound
        self.held: set[int] = set()
        self.worker_queue: deque[int] = deque()
        self.queued: set[int] = set()

        self.sleepers = 0
        self.settled = 0
        self.completed = 0
        self.faulted = 0
        self.backpressured = 0
        self.faulted_ids: set[int] = set()
        self.peak_live = 0
        self.live_seconds = 0.0
        self._last_time = 0.0

    # -- scheduling ---------------------------------------------------

    def schedule(self, at: float, kind: str, data: int) -> None:
        heapq.heappush(self.heap, (at, self.seq, kind, data))
        self.seq += 1

    def request_index(self, caller: int) -> int:
        return caller * self.spec.requests_per_caller + self.next_request[caller]

    def think_time(self, idx: int) -> float:
        extra = self.spec.delay_s if idx in self.delayed else 0.0
        return self.spec.service_time_s + extra

    def pressure(self) -> float:
        return self.spec.memory_pressure_s * self.sleepers * self.sleepers

    # -- event handlers -----------------------------------------------

    def issue(self, caller: int) -> None:
        idx = self.request_index(caller)
        self.next_request[caller] += 1
        now = self.clock.now()
        self.t_issue[idx] = now
        mode = SYNC if idx in self.sync_ids else ASYNC
        request = TaskEnvelope("approveTask", f"sim-{idx}", {"r": str(idx)})
        try:
            instance = self.manager.create(
                request,
                mode,
                callback_address=(
                    f"sim://caller/{caller}" if mode == ASYNC else None
                ),
            )
        except BackpressureError:
            self.backpressured += 1
            self.faulted += 1
            self.faulted_ids.add(idx)
            self.settle(caller)
            return
        self.iid_of[idx] = instance.instance_id
        self.idx_of[instance.instance_id] = idx
        if self.free_workers > 0:
            self.grant(idx)
        else:
            self.worker_queue.append(idx)
            self.queued.add(idx)

    def grant(self, idx: int) -> None:
        self.free_workers -= 1
        self.held.add(idx)
        self.manager.touch(self.iid_of[idx])
        now = self.clock.now()
        self.schedule(now + self.think_time(idx) + self.pressure(), RESPOND, idx)
        if idx in self.delayed:
            self.schedule(now + self.spec.service_time_s, MATURE, idx)

    def grant_waiting(self) -> None:
        while self.free_workers > 0 and self.worker_queue:
            idx = self.worker_queue.popleft()
            self.queued.discard(idx)
            self.grant(idx)

    def mature(self, idx: int) -> None:
        # Service window over, user still out: this instance now exerts
        # memory pressure until it responds or the engine passivates it.
        if not self.matured[idx]:
            self.matured[idx] = True
            self.sleepers += 1

    def respond(self, idx: int) -> None:
        iid = self.iid_of[idx]
        result = TaskEnvelope("approveTask", f"sim-{idx}", {"status": "approved"})
        self.manager.complete(iid, result)
        now = self.clock.now()
        self.latencies[idx] = now - self.t_issue[idx]
        self.completed += 1
        if self.matured[idx]:
            self.matured[idx] = False
            self.sleepers -= 1
        if idx in self.held:
            self.held.discard(idx)
            self.free_workers += 1
            self.grant_waiting()
        self.settle(idx // self.spec.requests_per_caller)

    def settle(self, caller: int) -> None:
        self.settled += 1
        if self.next_request[caller] < self.spec.requests_per_caller:
            self.schedule(self.clock.now(), ISSUE, caller)

    def run_sweep(self) -> None:
        for iid in self.manager.passivate_idle():
            idx = self.idx_of[iid]
            if self.matured[idx]:
                self.matured[idx] = False
                self.sleepers -= 1
            if idx in self.held:
                self.held.discard(idx)
                self.free_workers += 1
            elif idx in self.queued:
                # Never granted a worker; the store-backed UI reaches
                # the user at passivation, so the think timer starts now.
                self.worker_queue.remove(idx)
                self.queued.discard(idx)
                self.schedule(
                    self.clock.now() + self.think_time(idx) + self.pressure(),
                    RESPOND,
                    idx,
                )
        self.grant_waiting()
        if self.settled < self.spec.total_requests:
            self.schedule(
                self.clock.now() + self.spec.sweep_interval_s, SWEEP, 0
            )

    # -- main loop ----------------------------------------------------

    def run(self) -> RunReport:
        spec = self.spec
        for caller in range(spec.n):
            self.schedule(0.0, ISSUE, caller)
        if spec.passivation:
            self.schedule(spec.sweep_interval_s, SWEEP, 0)

        handlers = {
            ISSUE: self.issue,
            MATURE: self.mature,
            RESPOND: self.respond,
            SWEEP: lambda _data: self.run_sweep(),
        }
        while self.heap:
            at, _seq, kind, data = heapq.heappop(self.heap)
            live = self.manager.live_count()
            self.live_seconds += live * (at - self._last_time)
            self._last_time = at
            self.clock.set(at)
            handlers[kind](data)
            self.peak_live = max(self.peak_live, self.manager.live_count())

        metrics = self.manager.metrics()
        skip = self.delayed | self.faulted_ids
        art, p95 = summarize(self.latencies, skip)
        return RunReport(
            n=spec.n,
            mode=spec.mode_label,
            passivation=spec.passivation,
            issued=spec.total_requests,
            completed=self.completed,
            faulted=self.faulted,
            backpressured=self.backpressured,
            art_s=art,
            p95_s=p95,
            peak_live=self.peak_live,
            live_instance_seconds=self.live_seconds,
            passivations=metrics["passivations"],
            restores=metrics["restores"],
            latencies=self.latencies,
            delayed_indices=sorted(self.delayed),
        )


def run(spec: WorkloadSpec) -> RunReport:
    return _Simulation(spec.validate()).run()


def sweep(template: WorkloadSpec, n_values=(100, 500, 1000)) -> list[RunReport]:
    return [run(replace(template, n=n)) for n in n_values]
