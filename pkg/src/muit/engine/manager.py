"""Lifecycle of handling instances: one per in-flight process request.

An instance is created when a request arrives, waits for a human to
act, and may be passivated to the store while it waits so the server
holds no live resources across think-time. Completion restores it if
needed and produces exactly one outbound delivery, no matter how
completion, expiry, and passivation interleave.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field

from muit.bridge import REQUEST, TaskEnvelope

from .clock import SystemClock

SYNC = "sync"
ASYNC = "async"

CREATED = "Created"
AWAITING_USER = "AwaitingUser"
PASSIVATED_ASYNC = "PassivatedAsync"
PASSIVATED_SYNC = "PassivatedSync"
RESTORING = "Restoring"
COMPLETED = "Completed"
FAILED = "Failed"
TIMED_OUT = "TimedOut"

TERMINAL_STATES = frozenset({COMPLETED, FAILED, TIMED_OUT})
PASSIVATED_STATES = frozenset({PASSIVATED_ASYNC, PASSIVATED_SYNC})

# The full edge set; _transition refuses anything else.
ALLOWED_EDGES = frozenset(
    {
        (CREATED, AWAITING_USER),
        (AWAITING_USER, PASSIVATED_ASYNC),
        (AWAITING_USER, PASSIVATED_SYNC),
        (AWAITING_USER, COMPLETED),
        (AWAITING_USER, FAILED),
        (AWAITING_USER, TIMED_OUT),
        (PASSIVATED_ASYNC, RESTORING),
        (PASSIVATED_SYNC, RESTORING),
        (RESTORING, COMPLETED),
        (RESTORING, FAILED),
    }
)

CONTINUATION_VERSION = 1


class EngineError(Exception):
    pass


class StateError(EngineError):
    """The operation is not legal in the instance's current state."""


class BackpressureError(EngineError):
    """The pending queue is full; the caller should retry later."""


class UnknownInstanceError(EngineError):
    pass


class OperationMismatchError(EngineError):
    """The result names a different operation than the request."""


@dataclass
class DeliveryAction:
    """One outbound response the transport layer must perform.

    kind "callback" POSTs a response envelope to `target` (a URL);
    "answer" resolves the parked connection named by `target` (a
    resumption token). The fault_ variants carry (code, message)
    instead of an envelope.
    """

    kind: str
    instance_id: str
    target: str
    envelope: TaskEnvelope | None = None
    fault: tuple[str, str] | None = None


@dataclass
class AlreadyCompleted:
    """Marker result: the terminal delivery already happened."""

    instance_id: str


@dataclass
class HandlingInstance:
    instance_id: str
    mode: str
    state: str
    request: TaskEnvelope
    callback_address: str | None
    assigned_user: str
    resumption_token: str | None
    created_at: float
    touched_at: float
    deadline: float | None
    passivated_at: float | None = None
    completed_at: float | None = None
    continuation: dict | None = None
    # Free-form caller context (e.g. which deployment owns the
    # instance); survives passivation.
    meta: dict = field(default_factory=dict)
    history: list[tuple[str, float]] = field(default_factory=list)


def build_continuation(instance: HandlingInstance) -> dict:
    request = instance.request
    return {
        "v": CONTINUATION_VERSION,
        "instance_id": instance.instance_id,
        "mode": instance.mode,
        "state": instance.state,
        "request": {
            "op": request.operation,
            "cid": request.correlation_id,
            "data": request.payload,
            "dir": request.direction,
            "ns": request.namespace,
        },
        "callback_address": instance.callback_address,
        "assigned_user": instance.assigned_user,
        "resumption_token": instance.resumption_token,
        "created_at": instance.created_at,
        "touched_at": instance.touched_at,
        "passivated_at": instance.passivated_at,
        "deadline": instance.deadline,
        "meta": instance.meta,
        "history": [list(item) for item in instance.history],
    }


def restore_instance(record: dict) -> HandlingInstance:
    if record.get("v") != CONTINUATION_VERSION:
        raise EngineError(f"unsupported continuation version {record.get('v')!r}")
    req = record["request"]
    request = TaskEnvelope(
        operation=req["op"],
        correlation_id=req["cid"],
        payload=req["data"],
        direction=req["dir"],
        namespace=req.get("ns"),
    )
    return HandlingInstance(
        instance_id=record["instance_id"],
        mode=record["mode"],
        state=record["state"],
        request=request,
        callback_address=record["callback_address"],
        assigned_user=record["assigned_user"],
        resumption_token=record["resumption_token"],
        created_at=record["created_at"],
        touched_at=record["touched_at"],
        deadline=record["deadline"],
        passivated_at=record["passivated_at"],
        meta=record.get("meta", {}),
        history=[tuple(item) for item in record["history"]],
    )


@dataclass
class EngineConfig:
    idle_threshold_s: float = 60.0
    queue_capacity: int = 1024
    instance_deadline_s: float | None = None
    store_path: str | None = None


class InstanceManager:
    """Shared-state concurrent manager; one writer per instance id."""

    def __init__(self, store=None, clock=None, config: EngineConfig | None = None,
                 on_create=None, on_transition=None):
        self.store = store if store is not None else _default_store()
        self.clock = clock if clock is not None else SystemClock()
        self.config = config or EngineConfig()
        self.on_create = on_create
        self.on_transition = on_transition
        self._live: dict[str, HandlingInstance] = {}
        self._queue: dict[str, None] = {}
        # Queue slots held, counting creates still in flight, so the
        # capacity check has no window between check and enqueue.
        self._pending_count = 0
        self._states: dict[str, str] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._lock = threading.Lock()
        self._metrics = {
            "created": 0,
            "completed": 0,
            "failed": 0,
            "timed_out": 0,
            "passivations": 0,
            "restores": 0,
            "deliveries": 0,
            "rejected_backpressure": 0,
        }
        self._art_sum = 0.0
        self._art_count = 0
        self.recover()

    # -- registry helpers ------------------------------------------------

    def _lock_for(self, instance_id: str) -> threading.Lock:
        with self._lock:
            lock = self._locks.get(instance_id)
            if lock is None:
                lock = self._locks[instance_id] = threading.Lock()
            return lock

    def _dequeue_locked(self, instance_id: str) -> None:
        if instance_id in self._queue:
            del self._queue[instance_id]
            self._pending_count -= 1

    def _transition(self, instance: HandlingInstance, new_state: str) -> None:
        edge = (instance.state, new_state)
        if edge not in ALLOWED_EDGES:
            raise StateError(
                f"instance {instance.instance_id}: no edge {instance.state} -> {new_state}"
            )
        previous = instance.state
        instance.state = new_state
        now = self.clock.now()
        instance.history.append((new_state, now))
        with self._lock:
            self._states[instance.instance_id] = new_state
        if self.on_transition is not None:
            self.on_transition(instance.instance_id, previous, new_state, now)

    def recover(self) -> list[str]:
        """Index store records so completion works after a restart."""
        recovered = []
        for instance_id in self.store.ids():
            record = self.store.get(instance_id)
            if record and record.get("v") == CONTINUATION_VERSION:
                with self._lock:
                    if instance_id not in self._states:
                        self._states[instance_id] = record["state"]
                        recovered.append(instance_id)
        return recovered

    # -- operations ------------------------------------------------------

    def create(self, request: TaskEnvelope, mode: str, callback_address: str | None = None,
               assigned_user: str = "", deadline_s: float | None = None,
               meta: dict | None = None) -> HandlingInstance:
        if mode not in (SYNC, ASYNC):
            raise EngineError(f"unknown mode {mode!r}")
        if mode == ASYNC and not callback_address:
            raise EngineError("async instances require a callback address")
        request.validated()
        if request.direction != REQUEST:
            raise EngineError("instances are created from requests, not responses")
        now = self.clock.now()
        if deadline_s is None:
            deadline_s = self.config.instance_deadline_s
        instance = HandlingInstance(
            instance_id=secrets.token_hex(16),
            mode=mode,
            state=CREATED,
            request=request,
            callback_address=callback_address,
            assigned_user=assigned_user,
            resumption_token=secrets.token_hex(16) if mode == SYNC else None,
            created_at=now,
            touched_at=now,
            deadline=None if deadline_s is None else now + deadline_s,
            meta=dict(meta) if meta else {},
            history=[(CREATED, now)],
        )
        with self._lock:
            if self._pending_count >= self.config.queue_capacity:
                self._metrics["rejected_backpressure"] += 1
                raise BackpressureError(
                    f"pending queue at capacity {self.config.queue_capacity}"
                )
            self._pending_count += 1
            self._live[instance.instance_id] = instance
            self._states[instance.instance_id] = CREATED
            self._metrics["created"] += 1
        self._transition(instance, AWAITING_USER)
        with self._lock:
            self._queue[instance.instance_id] = None
        if self.on_create is not None:
            self.on_create(instance)
        return instance

    def passivate(self, instance_id: str) -> None:
        with self._lock_for(instance_id):
            instance = self._live.get(instance_id)
            if instance is None:
                if instance_id in self._states:
                    raise StateError(f"instance {instance_id} is not live")
                raise UnknownInstanceError(instance_id)
            if instance.state != AWAITING_USER:
                raise StateError(
                    f"cannot passivate instance in state {instance.state}"
                )
            now = self.clock.now()
            if now - instance.touched_at < self.config.idle_threshold_s:
                raise StateError(
                    f"instance idle {now - instance.touched_at:.1f}s, "
                    f"threshold {self.config.idle_threshold_s:.1f}s"
                )
            target = PASSIVATED_ASYNC if instance.mode == ASYNC else PASSIVATED_SYNC
            instance.passivated_at = now
            self._transition(instance, target)
            instance.continuation = build_continuation(instance)
            self.store.put(instance_id, instance.continuation)
            with self._lock:
                del self._live[instance_id]
                self._dequeue_locked(instance_id)
                self._metrics["passivations"] += 1

    def passivate_idle(self, now: float | None = None) -> list[str]:
        if now is None:
            now = self.clock.now()
        threshold = self.config.idle_threshold_s
        candidates = [
            instance_id
            for instance_id, instance in list(self._live.items())
            if instance.state == AWAITING_USER and now - instance.touched_at >= threshold
        ]
        passivated = []
        for instance_id in candidates:
            try:
                self.passivate(instance_id)
                passivated.append(instance_id)
            except (StateError, UnknownInstanceError):
                continue
        return passivated

    def touch(self, instance_id: str) -> None:
        instance = self._live.get(instance_id)
        if instance is not None and instance.state == AWAITING_USER:
            instance.touched_at = self.clock.now()

    def _restore_locked(self, instance_id: str) -> HandlingInstance:
        record = self.store.get(instance_id)
        if record is None:
            raise UnknownInstanceError(instance_id)
        instance = restore_instance(record)
        self._transition(instance, RESTORING)
        with self._lock:
            self._live[instance_id] = instance
            self._metrics["restores"] += 1
        self.store.delete(instance_id)
        return instance

    def complete(self, instance_id: str, result: TaskEnvelope):
        with self._lock_for(instance_id):
            return self._finish_locked(instance_id, result=result)

    def fail(self, instance_id: str, code: str, message: str):
        with self._lock_for(instance_id):
            return self._finish_locked(instance_id, fault=(code, message))

    def _finish_locked(self, instance_id: str, result: TaskEnvelope | None = None,
                       fault: tuple[str, str] | None = None):
        instance = self._live.get(instance_id)
        if instance is None:
            with self._lock:
                known = self._states.get(instance_id)
            if known is None:
                raise UnknownInstanceError(instance_id)
            if known in TERMINAL_STATES:
                return AlreadyCompleted(instance_id)
            if known in PASSIVATED_STATES:
                instance = self._restore_locked(instance_id)
            else:
                raise StateError(f"instance {instance_id} in state {known} is not live")
        if instance.state in TERMINAL_STATES:
            return AlreadyCompleted(instance_id)
        if instance.state not in (AWAITING_USER, RESTORING):
            raise StateError(f"cannot complete instance in state {instance.state}")

        if result is not None:
            if result.operation != instance.request.operation:
                raise OperationMismatchError(
                    f"result is for {result.operation!r}, "
                    f"request was {instance.request.operation!r}"
                )
            response = instance.request.reply(result.payload)
            self._transition(instance, COMPLETED)
            instance.completed_at = self.clock.now()
            metric = "completed"
            kind = "callback" if instance.mode == ASYNC else "answer"
            action = DeliveryAction(
                kind=kind,
                instance_id=instance_id,
                target=instance.callback_address or instance.resumption_token or "",
                envelope=response,
            )
        else:
            self._transition(instance, FAILED)
            instance.completed_at = self.clock.now()
            metric = "failed"
            kind = "fault_callback" if instance.mode == ASYNC else "fault_answer"
            action = DeliveryAction(
                kind=kind,
                instance_id=instance_id,
                target=instance.callback_address or instance.resumption_token or "",
                fault=fault,
            )
        instance.continuation = None
        never_passivated = not any(
            state in PASSIVATED_STATES for state, _ in instance.history
        )
        with self._lock:
            self._dequeue_locked(instance_id)
            del self._live[instance_id]
            self._metrics[metric] += 1
            self._metrics["deliveries"] += 1
            if metric == "completed" and never_passivated:
                self._art_sum += instance.completed_at - instance.created_at
                self._art_count += 1
        return action

    def expire(self, now: float | None = None) -> list[DeliveryAction]:
        """Time out live awaiting instances past their deadline.

        Passivated instances are never expired: think-time is
        unbounded once the state is in the store.
        """
        if now is None:
            now = self.clock.now()
        actions = []
        for instance_id in [
            iid
            for iid, inst in list(self._live.items())
            if inst.state == AWAITING_USER
            and inst.deadline is not None
            and now >= inst.deadline
        ]:
            with self._lock_for(instance_id):
                instance = self._live.get(instance_id)
                if (
                    instance is None
                    or instance.state != AWAITING_USER
                    or instance.deadline is None
                    or now < instance.deadline
                ):
                    continue
                self._transition(instance, TIMED_OUT)
                instance.completed_at = self.clock.now()
                kind = "fault_callback" if instance.mode == ASYNC else "fault_answer"
                actions.append(
                    DeliveryAction(
                        kind=kind,
                        instance_id=instance_id,
                        target=instance.callback_address or instance.resumption_token or "",
                        fault=("Server", f"instance {instance_id} timed out"),
                    )
                )
                with self._lock:
                    self._dequeue_locked(instance_id)
                    del self._live[instance_id]
                    self._metrics["timed_out"] += 1
                    self._metrics["deliveries"] += 1
        return actions

    # -- queries ---------------------------------------------------------

    def state_of(self, instance_id: str) -> str:
        with self._lock:
            state = self._states.get(instance_id)
        if state is None:
            raise UnknownInstanceError(instance_id)
        return state

    def peek(self, instance_id: str) -> dict:
        """Read-only view for UI bootstrap; never transitions state."""
        instance = self._live.get(instance_id)
        if instance is not None:
            return {
                "instance_id": instance_id,
                "state": instance.state,
                "mode": instance.mode,
                "operation": instance.request.operation,
                "data": instance.request.payload,
                "assigned_user": instance.assigned_user,
                "meta": instance.meta,
            }
        record = self.store.get(instance_id)
        if record is not None:
            return {
                "instance_id": instance_id,
                "state": record["state"],
                "mode": record["mode"],
                "operation": record["request"]["op"],
                "data": record["request"]["data"],
                "assigned_user": record["assigned_user"],
                "meta": record.get("meta", {}),
            }
        state = self.state_of(instance_id)
        return {"instance_id": instance_id, "state": state}

    def queue_depth(self) -> int:
        with self._lock:
            return len(self._queue)

    def queued_ids(self) -> list[str]:
        with self._lock:
            return list(self._queue)

    def live_count(self) -> int:
        with self._lock:
            return len(self._live)

    def passivated_count(self) -> int:
        return sum(
            1
            for instance_id in self.store.ids()
            if (rec := self.store.get(instance_id)) and rec["state"] in PASSIVATED_STATES
        )

    def metrics(self) -> dict:
        with self._lock:
            out = dict(self._metrics)
            art = self._art_sum / self._art_count if self._art_count else 0.0
        out["live_instances"] = self.live_count()
        out["passivated_instances"] = self.passivated_count()
        out["queue_depth"] = self.queue_depth()
        out["art_s"] = art
        return out


def _default_store():
    from .store import MemoryStore

    return MemoryStore()
