"""Handling-instance lifecycle: queueing, passivation, delivery."""

from .clock import ManualClock, SystemClock
from .manager import (
    ALLOWED_EDGES,
    ASYNC,
    AWAITING_USER,
    COMPLETED,
    CONTINUATION_VERSION,
    CREATED,
    FAILED,
    PASSIVATED_ASYNC,
    PASSIVATED_STATES,
    PASSIVATED_SYNC,
    RESTORING,
    SYNC,
    TERMINAL_STATES,
    TIMED_OUT,
    AlreadyCompleted,
    BackpressureError,
    DeliveryAction,
    EngineConfig,
    EngineError,
    HandlingInstance,
    InstanceManager,
    OperationMismatchError,
    StateError,
    UnknownInstanceError,
    build_continuation,
    restore_instance,
)
from .store import AppendLogStore, MemoryStore

__all__ = [
    "ALLOWED_EDGES",
    "ASYNC",
    "AWAITING_USER",
    "COMPLETED",
    "CONTINUATION_VERSION",
    "CREATED",
    "FAILED",
    "PASSIVATED_ASYNC",
    "PASSIVATED_STATES",
    "PASSIVATED_SYNC",
    "RESTORING",
    "SYNC",
    "TERMINAL_STATES",
    "TIMED_OUT",
    "AlreadyCompleted",
    "AppendLogStore",
    "BackpressureError",
    "DeliveryAction",
    "EngineConfig",
    "EngineError",
    "HandlingInstance",
    "InstanceManager",
    "ManualClock",
    "MemoryStore",
    "OperationMismatchError",
    "StateError",
    "SystemClock",
    "UnknownInstanceError",
    "build_continuation",
    "restore_instance",
]
