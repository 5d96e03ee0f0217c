"""SOAP 1.1 / compact-JSON transcoder for task traffic."""

from .envelope import (
    REQUEST,
    RESPONSE,
    BridgeError,
    SoapFormatError,
    TaskEnvelope,
    WireFormatError,
    normalize_value,
)
from .soap import (
    BRIDGE_NS,
    SOAP_NS,
    canonical_to_soap,
    is_fault,
    make_fault,
    soap_to_canonical,
)
from .wire import canonical_to_json, json_to_canonical

__all__ = [
    "BRIDGE_NS",
    "BridgeError",
    "REQUEST",
    "RESPONSE",
    "SOAP_NS",
    "SoapFormatError",
    "TaskEnvelope",
    "WireFormatError",
    "canonical_to_json",
    "canonical_to_soap",
    "is_fault",
    "json_to_canonical",
    "make_fault",
    "normalize_value",
    "soap_to_canonical",
]
