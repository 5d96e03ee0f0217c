"""Reads WSDL 1.1 service contracts (document/literal SOAP 1.1 only)."""

import io
import xml.etree.ElementTree as ET

from .model import (
    ComplexType,
    Message,
    PortOperation,
    SchemaElement,
    UnsupportedStyleError,
    WsdlParseError,
    WsdlService,
)

WSDL_NS = "http://schemas.xmlsoap.org/wsdl/"
SOAP_NS = "http://schemas.xmlsoap.org/wsdl/soap/"
XSD_NS = "http://www.w3.org/2001/XMLSchema"

# XSD scalar types this pipeline understands, by local name.
SCALAR_XSD = {
    "string",
    "int",
    "integer",
    "long",
    "short",
    "boolean",
    "date",
    "dateTime",
}


def _w(tag: str) -> str:
    return f"{{{WSDL_NS}}}{tag}"


def _s(tag: str) -> str:
    return f"{{{SOAP_NS}}}{tag}"


def _x(tag: str) -> str:
    return f"{{{XSD_NS}}}{tag}"


def _local(qname: str) -> str:
    return qname.split(":", 1)[1] if ":" in qname else qname


class _NsDoc:
    """Parsed document plus the prefix map captured while parsing."""

    def __init__(self, text: str):
        self.prefixes: dict[str, str] = {}
        try:
            root = None
            for event, payload in ET.iterparse(
                io.StringIO(text), events=("start-ns", "start")
            ):
                if event == "start-ns":
                    prefix, uri = payload
                    self.prefixes[prefix] = uri
                elif root is None:
                    root = payload
            if root is None:
                raise WsdlParseError("empty document")
            self.root = root
        except ET.ParseError as exc:
            raise WsdlParseError(f"malformed XML: {exc}") from exc

    def uri_of(self, qname: str) -> str | None:
        if ":" not in qname:
            return self.prefixes.get("")
        return self.prefixes.get(qname.split(":", 1)[0])


def _is_xsd_scalar(doc: _NsDoc, type_attr: str) -> bool:
    return doc.uri_of(type_attr) == XSD_NS and _local(type_attr) in SCALAR_XSD


def _read_sequence(doc: _NsDoc, complex_el: ET.Element) -> list[SchemaElement]:
    elements: list[SchemaElement] = []
    sequence = complex_el.find(_x("sequence"))
    if sequence is None:
        return elements
    for child in sequence.findall(_x("element")):
        name = child.get("name")
        type_attr = child.get("type")
        if name is None:
            raise WsdlParseError("schema element without a name")
        if type_attr is None:
            raise WsdlParseError(f"element {name!r} has no type")
        max_occurs = child.get("maxOccurs", "1")
        many = max_occurs == "unbounded" or (max_occurs.isdigit() and int(max_occurs) > 1)
        elements.append(
            SchemaElement(
                name=name,
                type_name=_local(type_attr),
                is_scalar=_is_xsd_scalar(doc, type_attr),
                many=many,
            )
        )
    return elements


def parse_wsdl(text: str) -> WsdlService:
    """Parse a WSDL document.  Raises WsdlParseError on malformed input
    and UnsupportedStyleError for rpc or encoded bindings."""
    doc = _NsDoc(text)
    root = doc.root
    if root.tag != _w("definitions"):
        raise WsdlParseError(f"not a WSDL document (root {root.tag})")
    tns = root.get("targetNamespace", "")

    complex_types: dict[str, ComplexType] = {}
    root_elements: dict[str, ComplexType] = {}
    types_el = root.find(_w("types"))
    if types_el is not None:
        for schema in types_el.findall(_x("schema")):
            for ct in schema.findall(_x("complexType")):
                name = ct.get("name")
                if name is None:
                    raise WsdlParseError("top-level complexType without a name")
                complex_types[name] = ComplexType(
                    name=name, elements=_read_sequence(doc, ct)
                )
            for el in schema.findall(_x("element")):
                name = el.get("name")
                if name is None:
                    raise WsdlParseError("top-level element without a name")
                inline = el.find(_x("complexType"))
                if inline is not None:
                    root_elements[name] = ComplexType(
                        name=name, elements=_read_sequence(doc, inline)
                    )
                else:
                    type_attr = el.get("type")
                    if type_attr is None:
                        raise WsdlParseError(f"element {name!r} has no content model")
                    root_elements[name] = ComplexType(
                        name=name,
                        elements=[
                            SchemaElement(
                                name=name,
                                type_name=_local(type_attr),
                                is_scalar=_is_xsd_scalar(doc, type_attr),
                            )
                        ],
                    )

    messages: dict[str, Message] = {}
    for msg in root.findall(_w("message")):
        name = msg.get("name")
        parts = msg.findall(_w("part"))
        if name is None or not parts:
            raise WsdlParseError("message without name or parts")
        if len(parts) > 1:
            raise UnsupportedStyleError(
                f"message {name!r} has {len(parts)} parts; document/literal "
                "wrapped messages carry exactly one"
            )
        part = parts[0]
        element = part.get("element")
        if element is None:
            # A type= part is rpc style.
            raise UnsupportedStyleError(
                f"message {name!r} uses a type= part (rpc style is not supported)"
            )
        messages[name] = Message(name=name, element=_local(element))

    port_types = root.findall(_w("portType"))
    if not port_types:
        raise WsdlParseError("no portType")
    port_type = port_types[0]
    operations: list[PortOperation] = []
    for op in port_type.findall(_w("operation")):
        name = op.get("name")
        if name is None:
            raise WsdlParseError("portType operation without a name")
        input_el = op.find(_w("input"))
        output_el = op.find(_w("output"))
        operations.append(
            PortOperation(
                name=name,
                input_message=_local(input_el.get("message", "")) if input_el is not None else None,
                output_message=_local(output_el.get("message", "")) if output_el is not None else None,
            )
        )

    binding_el = root.find(_w("binding"))
    binding_name = ""
    if binding_el is not None:
        binding_name = binding_el.get("name", "")
        soap_binding = binding_el.find(_s("binding"))
        if soap_binding is not None:
            style = soap_binding.get("style", "document")
            if style != "document":
                raise UnsupportedStyleError(f"binding style {style!r} is not supported")
        for op in binding_el.findall(_w("operation")):
            soap_op = op.find(_s("operation"))
            action = soap_op.get("soapAction", "") if soap_op is not None else ""
            for port_op in operations:
                if port_op.name == op.get("name"):
                    port_op.soap_action = action
            for io_el in (op.find(_w("input")), op.find(_w("output"))):
                if io_el is None:
                    continue
                body = io_el.find(_s("body"))
                if body is not None and body.get("use", "literal") != "literal":
                    raise UnsupportedStyleError("encoded use is not supported")

    service_el = root.find(_w("service"))
    if service_el is None:
        raise WsdlParseError("no service element")
    service_name = service_el.get("name", "")
    address = ""
    port_el = service_el.find(_w("port"))
    if port_el is not None:
        soap_address = port_el.find(_s("address"))
        if soap_address is not None:
            address = soap_address.get("location", "")

    for op in operations:
        for ref in (op.input_message, op.output_message):
            if ref is not None and ref not in messages:
                raise WsdlParseError(f"operation {op.name!r} references unknown message {ref!r}")

    return WsdlService(
        name=service_name,
        target_namespace=tns,
        port_type=port_type.get("name", ""),
        binding=binding_name,
        address=address,
        operations=operations,
        messages=messages,
        complex_types=complex_types,
        root_elements=root_elements,
    )
