"""Hand-written lexer.

Scanning never raises: malformed input produces ERROR tokens plus
diagnostics, and the stream always terminates with EOF.
"""

from .diagnostics import DiagnosticSink
from .tokens import KEYWORDS, Token, TokenType

_SINGLE_CHAR = {
    "{": TokenType.LBRACE,
    "}": TokenType.RBRACE,
    "(": TokenType.LPAREN,
    ")": TokenType.RPAREN,
    ";": TokenType.SEMICOLON,
    ":": TokenType.COLON,
    ",": TokenType.COMMA,
    ".": TokenType.DOT,
    "+": TokenType.PLUS,
    "-": TokenType.MINUS,
    "*": TokenType.STAR,
    "%": TokenType.PERCENT,
    "/": TokenType.SLASH,
}


class Lexer:
    def __init__(self, source: str, sink: DiagnosticSink | None = None):
        self.source = source
        self.pos = 0
        self.line = 1
        self.column = 1
        self.sink = sink if sink is not None else DiagnosticSink()

    @property
    def current_char(self) -> str | None:
        if self.pos >= len(self.source):
            return None
        return self.source[self.pos]

    def peek_char(self, offset: int = 1) -> str | None:
        pos = self.pos + offset
        if pos >= len(self.source):
            return None
        return self.source[pos]

    def advance(self) -> None:
        if self.pos < len(self.source):
            if self.source[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def skip_whitespace_and_comments(self) -> None:
        while self.current_char is not None:
            ch = self.current_char
            if ch in " \t\r\n":
                self.advance()
            elif ch == "/" and self.peek_char() == "/":
                while self.current_char is not None and self.current_char != "\n":
                    self.advance()
            elif ch == "/" and self.peek_char() == "*":
                start_line, start_col = self.line, self.column
                self.advance()
                self.advance()
                closed = False
                while self.current_char is not None:
                    if self.current_char == "*" and self.peek_char() == "/":
                        self.advance()
                        self.advance()
                        closed = True
                        break
                    self.advance()
                if not closed:
                    self.sink.error(
                        "E0003", "unterminated block comment", start_line, start_col, 2
                    )
            else:
                break

    def read_string(self) -> Token:
        start_line, start_col = self.line, self.column
        quote = self.current_char
        self.advance()
        chars: list[str] = []
        while self.current_char is not None and self.current_char not in (quote, "\n"):
            if self.current_char == "\\":
                self.advance()
                esc = self.current_char
                if esc is None:
                    break
                chars.append({"n": "\n", "t": "\t", '"': '"', "'": "'", "\\": "\\"}.get(esc, esc))
                self.advance()
            else:
                chars.append(self.current_char)
                self.advance()
        if self.current_char == quote:
            self.advance()
            return Token(TokenType.STRING, "".join(chars), start_line, start_col)
        self.sink.error("E0002", "unterminated string literal", start_line, start_col, 1)
        return Token(TokenType.ERROR, "".join(chars), start_line, start_col)

    def read_number(self) -> Token:
        start_line, start_col = self.line, self.column
        digits: list[str] = []
        while self.current_char is not None and self.current_char.isdigit():
            digits.append(self.current_char)
            self.advance()
        return Token(TokenType.INT, "".join(digits), start_line, start_col)

    def read_identifier(self) -> Token:
        start_line, start_col = self.line, self.column
        chars: list[str] = []
        while self.current_char is not None and (
            self.current_char.isalnum() or self.current_char == "_"
        ):
            chars.append(self.current_char)
            self.advance()
        text = "".join(chars)
        ttype = KEYWORDS.get(text, TokenType.IDENT)
        return Token(ttype, text, start_line, start_col)

    def next_token(self) -> Token:
        self.skip_whitespace_and_comments()
        ch = self.current_char
        if ch is None:
            return Token(TokenType.EOF, "", self.line, self.column)
        if ch in ('"', "'"):
            return self.read_string()
        if ch.isdigit():
            return self.read_number()
        if ch.isalpha() or ch == "_":
            return self.read_identifier()

        line, col = self.line, self.column
        nxt = self.peek_char()
        two = ch + (nxt or "")
        if two in ("==", "!=", "<=", ">=", "&&", "||"):
            self.advance()
            self.advance()
            ttype = {
                "==": TokenType.EQ,
                "!=": TokenType.NEQ,
                "<=": TokenType.LTE,
                ">=": TokenType.GTE,
                "&&": TokenType.AND,
                "||": TokenType.OR,
            }[two]
            return Token(ttype, two, line, col)
        if ch == "=":
            self.advance()
            return Token(TokenType.ASSIGN, "=", line, col)
        if ch == "!":
            self.advance()
            return Token(TokenType.NOT, "!", line, col)
        if ch == "<":
            self.advance()
            return Token(TokenType.LT, "<", line, col)
        if ch == ">":
            self.advance()
            return Token(TokenType.GT, ">", line, col)
        if ch in _SINGLE_CHAR:
            self.advance()
            return Token(_SINGLE_CHAR[ch], ch, line, col)

        self.sink.error("E0001", f"unexpected character {ch!r}", line, col, 1)
        self.advance()
        return Token(TokenType.ERROR, ch, line, col)

    def tokenize(self) -> list[Token]:
        tokens: list[Token] = []
        while True:
            token = self.next_token()
            tokens.append(token)
            if token.type == TokenType.EOF:
                return tokens


def tokenize(source: str, sink: DiagnosticSink | None = None) -> list[Token]:
    """Tokenize source, appending any diagnostics to the given sink."""
    return Lexer(source, sink).tokenize()
