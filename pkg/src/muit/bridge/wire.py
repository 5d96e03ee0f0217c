"""Compact JSON wire form used between the engine and handsets.

The wire object is a flat map with a fixed key set: "cid", "data",
"op", plus "dir": "response" on responses only. Keys serialize in
lexicographic order with no whitespace, so equal envelopes produce
equal bytes.
"""

from __future__ import annotations

import json

from .envelope import REQUEST, RESPONSE, TaskEnvelope, WireFormatError, normalize_value

_ALLOWED_KEYS = {"cid", "data", "dir", "op"}


def canonical_to_json(envelope: TaskEnvelope) -> bytes:
    obj: dict = {
        "cid": envelope.correlation_id,
        "data": envelope.payload,
        "op": envelope.operation,
    }
    if envelope.direction == RESPONSE:
        obj["dir"] = "response"
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def json_to_canonical(data: bytes | str, namespace: str | None = None) -> TaskEnvelope:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireFormatError(f"invalid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise WireFormatError(f"unparseable JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise WireFormatError(f"wire value is {type(obj).__name__}, not an object")
    extra = set(obj) - _ALLOWED_KEYS
    if extra:
        raise WireFormatError(f"unknown keys: {', '.join(sorted(extra))}")
    for key in ("cid", "op"):
        if key not in obj:
            raise WireFormatError(f"missing key {key!r}")
        if not isinstance(obj[key], str):
            raise WireFormatError(f"not a string", path=f"$.{key}")
    if "data" not in obj:
        raise WireFormatError("missing key 'data'")
    if not isinstance(obj["data"], dict):
        raise WireFormatError("not an object", path="$.data")
    direction = REQUEST
    if "dir" in obj:
        if obj["dir"] != "response":
            raise WireFormatError(f"must be \"response\" when present", path="$.dir")
        direction = RESPONSE
    payload = normalize_value(obj["data"], "$.data")
    return TaskEnvelope(
        operation=obj["op"],
        correlation_id=obj["cid"],
        payload=payload,
        direction=direction,
        namespace=namespace,
    )
