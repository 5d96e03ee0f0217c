"""Data model for parsed service contracts and the UI model derived
from them."""

from dataclasses import dataclass, field
from typing import Optional


class WsdlError(Exception):
    """Base class for contract ingestion failures."""


class WsdlParseError(WsdlError):
    pass


class UnsupportedStyleError(WsdlError):
    """Only document/literal SOAP bindings are accepted."""


class UnsupportedTypeError(WsdlError):
    pass


@dataclass
class SchemaElement:
    """One <element> in a schema sequence."""

    name: str
    type_name: str            # local name: scalar xsd name or complex type name
    is_scalar: bool
    many: bool = False        # maxOccurs > 1 or unbounded


@dataclass
class ComplexType:
    name: str
    elements: list[SchemaElement] = field(default_factory=list)


@dataclass
class Message:
    name: str
    element: str              # local name of the wrapped root element


@dataclass
class PortOperation:
    name: str
    input_message: Optional[str]
    output_message: Optional[str]
    soap_action: str = ""


@dataclass
class WsdlService:
    name: str
    target_namespace: str
    port_type: str
    binding: str
    address: str
    operations: list[PortOperation] = field(default_factory=list)
    messages: dict[str, Message] = field(default_factory=dict)
    complex_types: dict[str, ComplexType] = field(default_factory=dict)
    root_elements: dict[str, ComplexType] = field(default_factory=dict)

    def scalar_leaves(self) -> list[tuple[str, str]]:
        """Every scalar-typed element in the schema, in document order.
        The UI derivation must conserve exactly this multiset."""
        leaves: list[tuple[str, str]] = []
        for ct in self.complex_types.values():
            for el in ct.elements:
                if el.is_scalar:
                    leaves.append((el.name, el.type_name))
        for ct in self.root_elements.values():
            for el in ct.elements:
                if el.is_scalar:
                    leaves.append((el.name, el.type_name))
        return leaves


# --- derived UI model ----------------------------------------------------


@dataclass
class UiProperty:
    name: str
    type_text: str            # DSL type: String, int, boolean, DateTime,
                              # entity name, or list<...>
    is_scalar: bool = True


@dataclass
class UiEntity:
    name: str
    properties: list[UiProperty] = field(default_factory=list)
    synthesized: bool = False  # built from an operation's result fields

    def scalar_properties(self) -> list[UiProperty]:
        return [p for p in self.properties if p.is_scalar]


@dataclass
class UiParam:
    name: str
    type_text: str
    is_scalar: bool = True


@dataclass
class UiOperation:
    name: str
    params: list[UiParam] = field(default_factory=list)
    returns: Optional[str] = None      # DSL type text, or None for events
    returns_entity: Optional[str] = None
    returns_list: bool = False
    is_event: bool = False             # void outcome: fire-and-forget


@dataclass
class UiView:
    """A generated default screen."""

    name: str
    kind: str                  # "list", "detail", "form", "action"
    operation: Optional[str] = None
    entity: Optional[str] = None


@dataclass
class UiModel:
    service_name: str
    service_url: str
    entities: list[UiEntity] = field(default_factory=list)
    operations: list[UiOperation] = field(default_factory=list)
    views: list[UiView] = field(default_factory=list)

    def entity(self, name: str) -> Optional[UiEntity]:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def scalar_leaves(self) -> list[tuple[str, str]]:
        """Counterpart of WsdlService.scalar_leaves after derivation:
        scalar entity properties plus scalar operation parameters."""
        leaves: list[tuple[str, str]] = []
        for entity in self.entities:
            for prop in entity.scalar_properties():
                leaves.append((prop.name, prop.type_text))
        for op in self.operations:
            for param in op.params:
                if param.is_scalar:
                    leaves.append((param.name, param.type_text))
        return leaves
