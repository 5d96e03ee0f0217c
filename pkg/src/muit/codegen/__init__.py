"""Bundle compiler: checked modules to self-contained web bundles."""

from .bundle import (
    DEEP_LINK_TEMPLATE,
    MANIFEST_VERSION,
    CompileOptions,
    PageBundle,
    build_navigation,
    compile_bundle,
    write_bundle,
)
from .descriptors import (
    DescriptorError,
    block_descriptor,
    descriptor_to_expr,
    expr_descriptor,
    stmt_descriptor,
)
from .html import CompileError, lower_screen

__all__ = [
    "DEEP_LINK_TEMPLATE",
    "MANIFEST_VERSION",
    "CompileError",
    "CompileOptions",
    "DescriptorError",
    "PageBundle",
    "block_descriptor",
    "build_navigation",
    "compile_bundle",
    "descriptor_to_expr",
    "expr_descriptor",
    "lower_screen",
    "stmt_descriptor",
    "write_bundle",
]
