"""SOAP 1.1 side of the bridge: document/literal envelopes only.

Parsing accepts any prefix layout; serialization always emits the
same canonical shape (soap: for the envelope, m: for the operation
element, unqualified locals), which makes output bytes deterministic.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from .envelope import REQUEST, RESPONSE, SoapFormatError, TaskEnvelope

SOAP_NS = "http://schemas.xmlsoap.org/soap/envelope/"
BRIDGE_NS = "urn:muit:bridge"
DEFAULT_BODY_NS = "urn:muit:task"

_ENVELOPE = f"{{{SOAP_NS}}}Envelope"
_HEADER = f"{{{SOAP_NS}}}Header"
_BODY = f"{{{SOAP_NS}}}Body"
_CORRELATION = f"{{{BRIDGE_NS}}}correlation"
_CALLBACK = f"{{{BRIDGE_NS}}}callback"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _namespace(tag: str) -> str | None:
    if tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return None


def _convert(element: ET.Element, path: str):
    """Element to value: records become maps, leaves become text."""
    children = list(element)
    text = (element.text or "").strip()
    if children and text:
        raise SoapFormatError(f"{path}: mixed text and element content")
    for child in children:
        if (child.tail or "").strip():
            raise SoapFormatError(f"{path}: mixed text and element content")
    if not children and not element.attrib:
        return text
    out: dict = {}
    for name, value in element.attrib.items():
        out["@" + _local(name)] = value
    if text:
        raise SoapFormatError(f"{path}: attributes on a text-only element")
    seen_lists: set[str] = set()
    for child in children:
        key = _local(child.tag)
        value = _convert(child, f"{path}.{key}")
        if key in out:
            if key in seen_lists:
                out[key].append(value)
            else:
                out[key] = [out[key], value]
                seen_lists.add(key)
        else:
            out[key] = value
    return out


def soap_to_canonical(data: bytes | str) -> TaskEnvelope:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise SoapFormatError(f"unparseable XML: {exc}") from exc
    if root.tag != _ENVELOPE:
        raise SoapFormatError(f"root element is {root.tag!r}, not a SOAP 1.1 envelope")
    body = root.find(_BODY)
    if body is None:
        raise SoapFormatError("envelope has no Body")
    children = list(body)
    if len(children) != 1:
        raise SoapFormatError(f"Body has {len(children)} children; document/literal requires 1")
    op_element = children[0]
    if op_element.get("encodingStyle") or op_element.get(f"{{{SOAP_NS}}}encodingStyle"):
        raise SoapFormatError("encoded style is not supported")

    correlation = ""
    callback = None
    header = root.find(_HEADER)
    if header is not None:
        node = header.find(_CORRELATION)
        if node is not None:
            correlation = (node.text or "").strip()
        node = header.find(_CALLBACK)
        if node is not None and (node.text or "").strip():
            callback = (node.text or "").strip()

    name = _local(op_element.tag)
    if name.endswith("Response") and len(name) > len("Response"):
        operation, direction = name[: -len("Response")], RESPONSE
    else:
        operation, direction = name, REQUEST

    payload = _convert(op_element, name)
    if isinstance(payload, str):
        if payload:
            raise SoapFormatError(f"{name}: operation element must contain element children")
        payload = {}
    return TaskEnvelope(
        operation=operation,
        correlation_id=correlation,
        payload=payload,
        direction=direction,
        namespace=_namespace(op_element.tag),
        callback_address=callback,
    )


def _write_value(name: str, value, parts: list[str], path: str) -> None:
    if isinstance(value, list):
        for i, item in enumerate(value):
            if isinstance(item, list):
                raise SoapFormatError(f"{path}[{i}]: arrays cannot nest directly")
            _write_value(name, item, parts, f"{path}[{i}]")
        return
    if isinstance(value, dict):
        attrs = "".join(
            f" {key[1:]}={quoteattr(_text(item))}"
            for key, item in value.items()
            if key.startswith("@")
        )
        parts.append(f"<{name}{attrs}>")
        for key, item in value.items():
            if not key.startswith("@"):
                _write_value(key, item, parts, f"{path}.{key}")
        parts.append(f"</{name}>")
        return
    text = _text(value)
    if text == "":
        parts.append(f"<{name}/>")
    else:
        parts.append(f"<{name}>{escape(text)}</{name}>")


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def canonical_to_soap(envelope: TaskEnvelope) -> bytes:
    name = envelope.operation
    if envelope.direction == RESPONSE:
        name += "Response"
    namespace = envelope.namespace or DEFAULT_BODY_NS
    parts: list[str] = [
        '<?xml version="1.0" encoding="utf-8"?>',
        f'<soap:Envelope xmlns:soap="{SOAP_NS}">',
    ]
    if envelope.correlation_id or envelope.callback_address:
        header_parts = []
        if envelope.correlation_id:
            header_parts.append(
                f'<m:correlation xmlns:m="{BRIDGE_NS}">'
                f"{escape(envelope.correlation_id)}</m:correlation>"
            )
        if envelope.callback_address:
            header_parts.append(
                f'<m:callback xmlns:m="{BRIDGE_NS}">'
                f"{escape(envelope.callback_address)}</m:callback>"
            )
        parts.append(f"<soap:Header>{''.join(header_parts)}</soap:Header>")
    parts.append("<soap:Body>")
    attrs = "".join(
        f" {key[1:]}={quoteattr(_text(item))}"
        for key, item in envelope.payload.items()
        if key.startswith("@")
    )
    parts.append(f'<m:{name} xmlns:m="{namespace}"{attrs}>')
    for key, value in envelope.payload.items():
        if not key.startswith("@"):
            _write_value(key, value, parts, key)
    parts.append(f"</m:{name}>")
    parts.append("</soap:Body>")
    parts.append("</soap:Envelope>")
    return "".join(parts).encode("utf-8")


def make_fault(code: str, message: str) -> bytes:
    """A SOAP 1.1 Fault; code is "Client" or "Server"."""
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        f'<soap:Envelope xmlns:soap="{SOAP_NS}"><soap:Body><soap:Fault>'
        f"<faultcode>soap:{escape(code)}</faultcode>"
        f"<faultstring>{escape(message)}</faultstring>"
        "</soap:Fault></soap:Body></soap:Envelope>"
    ).encode("utf-8")


def is_fault(data: bytes | str) -> bool:
    try:
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        root = ET.fromstring(data)
    except ET.ParseError:
        return False
    body = root.find(_BODY)
    if body is None or len(body) != 1:
        return False
    return _local(body[0].tag) == "Fault"
