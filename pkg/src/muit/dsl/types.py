"""Static types used by the checker."""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Type:
    kind: str
    name: str = ""
    elem: Optional["Type"] = None

    def __str__(self) -> str:
        if self.kind == "list":
            return f"list<{self.elem}>"
        if self.kind in ("entity", "screen", "widget"):
            return self.name
        return self.kind


STRING = Type("String")
INT = Type("int")
BOOL = Type("boolean")
DATETIME = Type("DateTime")
ANY = Type("Any")
VOID = Type("void")


def entity_type(name: str) -> Type:
    return Type("entity", name=name)

def list_type(elem: Type) -> Type:
    return Type("list", elem=elem)

def screen_type(name: str) -> Type:
    return Type("screen", name=name)

def widget_type(name: str) -> Type:
    return Type("widget", name=name)


PRIMITIVES: dict[str, Type] = {
    "String": STRING,
    "int": INT,
    "boolean": BOOL,
    "DateTime": DATETIME,
    "Any": ANY,
    "void": VOID,
}


def assignable(src: Type, dst: Type) -> bool:
    """Whether a value of type src may flow into a slot of type dst."""
    if src == ANY or dst == ANY:
        return True
    if src == dst:
        return True
    if src.kind == "list" and dst.kind == "list":
        return assignable(src.elem, dst.elem)
    return False
