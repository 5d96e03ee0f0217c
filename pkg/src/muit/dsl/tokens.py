"""Token definitions for the UI description language."""

from dataclasses import dataclass
from enum import Enum, auto


class TokenType(Enum):
    # Literals
    IDENT = auto()
    INT = auto()
    STRING = auto()

    # Keywords
    KW_ENTITY = auto()
    KW_OPERATION = auto()
    KW_SCREEN = auto()
    KW_WIDGET = auto()
    KW_TOUCH = auto()
    KW_HANDLER = auto()
    KW_HEADER = auto()
    KW_IMPORT = auto()
    KW_VAR = auto()
    KW_FOREACH = auto()
    KW_IF = auto()
    KW_ELSEIF = auto()
    KW_ELSE = auto()
    KW_RETURN = auto()
    KW_WHEN = auto()
    KW_WHERE = auto()
    KW_NEW = auto()
    KW_IN = auto()
    KW_TRUE = auto()
    KW_FALSE = auto()
    KW_ASYNC = auto()
    KW_CACHED = auto()

    # Punctuation
    LBRACE = auto()
    RBRACE = auto()
    LPAREN = auto()
    RPAREN = auto()
    SEMICOLON = auto()
    COLON = auto()
    COMMA = auto()
    DOT = auto()

    # Operators
    ASSIGN = auto()       # =
    EQ = auto()           # ==
    NEQ = auto()          # !=
    LT = auto()           # <
    GT = auto()           # >
    LTE = auto()          # <=
    GTE = auto()          # >=
    PLUS = auto()
    MINUS = auto()
    STAR = auto()
    PERCENT = auto()
    SLASH = auto()        # only meaningful inside inline markup
    NOT = auto()          # !
    AND = auto()          # &&
    OR = auto()           # ||

    ERROR = auto()
    EOF = auto()


KEYWORDS: dict[str, TokenType] = {
    "entity": TokenType.KW_ENTITY,
    "operation": TokenType.KW_OPERATION,
    "screen": TokenType.KW_SCREEN,
    "widget": TokenType.KW_WIDGET,
    "touch": TokenType.KW_TOUCH,
    "handler": TokenType.KW_HANDLER,
    "header": TokenType.KW_HEADER,
    "import": TokenType.KW_IMPORT,
    "var": TokenType.KW_VAR,
    "foreach": TokenType.KW_FOREACH,
    "if": TokenType.KW_IF,
    "elseif": TokenType.KW_ELSEIF,
    "else": TokenType.KW_ELSE,
    "return": TokenType.KW_RETURN,
    "when": TokenType.KW_WHEN,
    "where": TokenType.KW_WHERE,
    "new": TokenType.KW_NEW,
    "in": TokenType.KW_IN,
    "true": TokenType.KW_TRUE,
    "false": TokenType.KW_FALSE,
    "async": TokenType.KW_ASYNC,
    "cached": TokenType.KW_CACHED,
}

# Keywords that may double as plain names (declaration names, member names,
# argument names).  "import" is here because an operation may be named import.
NAME_LIKE_KEYWORDS = frozenset(
    {
        TokenType.KW_IMPORT,
        TokenType.KW_SCREEN,
        TokenType.KW_HEADER,
        TokenType.KW_IN,
        TokenType.KW_WHEN,
        TokenType.KW_WHERE,
        TokenType.KW_CACHED,
    }
)


@dataclass
class Token:
    type: TokenType
    value: str
    line: int
    column: int

    def __repr__(self) -> str:
        return f"Token({self.type.name}, {self.value!r}, {self.line}:{self.column})"

    @property
    def length(self) -> int:
        return max(1, len(self.value))
