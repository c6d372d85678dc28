"""Tokenizer for the modeling language."""

from .errors import ParseError

KEYWORDS = {
    "reactiveclass", "statevars", "msgsrv", "main", "constraint",
    "if", "else", "while", "for", "break",
    "unicast", "multicast", "succ", "unsucc",
    "self", "true", "false", "and", "con", "new",
    "int", "boolean",
}

# Longest symbols first so the two-character operators win.
SYMBOLS = [
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "{", "}", "(", ")", "[", "]", ";", ",", ":", "=", "<", ">",
    "+", "-", "*", "!",
]


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind  # keyword/symbol text itself, or "ident"/"int"/"eof"
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind!r}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source):
    """Split source text into tokens, dropping // and /* */ comments."""
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            if j < 0:
                break
            i = j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i)
            if j < 0:
                raise ParseError("unterminated comment", line, col)
            skipped = source[i:j + 2]
            nl = skipped.count("\n")
            if nl:
                line += nl
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = j + 2
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = word if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens
