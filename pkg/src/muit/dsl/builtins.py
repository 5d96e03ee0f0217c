"""Built-in vocabulary: UI elements, widget and gesture kinds, context
variables and the ambient function library available to scripts."""

from dataclasses import dataclass

from . import types as T

# Primitive layout elements usable inside screens and handlers.
ELEMENT_NAMES = frozenset(
    {"button", "label", "text", "image", "link", "form", "listview"}
)

# Reusable widget kinds.  A widget declaration names one of these.
WIDGET_KINDS = frozenset(
    {"calendar", "textInput", "button", "list", "map", "weather"}
)

# Gesture kinds a touch declaration may bind.
TOUCH_KINDS = frozenset({"swipe", "zoom", "pinch", "press", "tap"})

# Read-only context variables, addressed by dotted path.
CONTEXT_VARS: dict[str, T.Type] = {
    "screen.deviceos": T.STRING,
    "screen.devicetype": T.STRING,
    "screen.device.orientation": T.STRING,
    "screen.window.innerWidth": T.INT,
    "screen.window.innerHeight": T.INT,
    "network.online": T.BOOL,
}

# Namespace objects valid as the head of a dotted path.
BUILTIN_OBJECTS = frozenset({"screen", "network", "history", "option", "DateTime"})


@dataclass(frozen=True)
class Signature:
    params: tuple[T.Type, ...]
    result: T.Type


# Free functions.
FUNCTIONS: dict[str, Signature] = {
    "exist": Signature((T.ANY,), T.BOOL),
    "navigate": Signature((T.ANY,), T.VOID),
    "add": Signature((T.ANY,), T.VOID),
    "select": Signature((T.ANY,), T.ANY),
    "httpRequest": Signature((T.STRING,), T.ANY),
}

# Functions reached through a namespace object.
NAMESPACE_FUNCTIONS: dict[str, Signature] = {
    "history.go": Signature((T.INT,), T.VOID),
    "history.back": Signature((T.INT,), T.VOID),
    "DateTime.create": Signature((T.INT, T.INT, T.INT), T.DATETIME),
}

# Members available on namespace objects (beyond CONTEXT_VARS paths).
NAMESPACE_MEMBERS: dict[str, T.Type] = {
    "option.value": T.ANY,
}

# Instance methods keyed by receiver type kind.
METHODS: dict[str, dict[str, Signature]] = {
    "DateTime": {
        "getYear": Signature((), T.INT),
        "getMonth": Signature((), T.INT),
        "getDate": Signature((), T.INT),
    },
}

# Event attribute names accepted on elements and widget references.
EVENT_ATTRS = frozenset({"onClick", "onChange", "onSubmit", "onSelect"})
