"""Service-contract ingestion: WSDL parsing and default-UI derivation."""

from .emit import emit_dsl, import_wsdl
from .model import (
    UiModel,
    UnsupportedStyleError,
    UnsupportedTypeError,
    WsdlError,
    WsdlParseError,
    WsdlService,
)
from .parser import parse_wsdl
from .transform import SCALAR_TYPE_MAP, derive_ui_model, map_scalar

__all__ = [
    "SCALAR_TYPE_MAP",
    "UiModel",
    "UnsupportedStyleError",
    "UnsupportedTypeError",
    "WsdlError",
    "WsdlParseError",
    "WsdlService",
    "derive_ui_model",
    "emit_dsl",
    "import_wsdl",
    "map_scalar",
    "parse_wsdl",
]
