"""Mobile task-UI toolkit: DSL compiler, WSDL import, task brokering engine."""

__version__ = "0.1.0"
