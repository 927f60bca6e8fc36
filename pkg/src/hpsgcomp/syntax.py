"""Tokenizer, description AST and statement parser for grammar files.

Grammar files are line-oriented UTF-8 text with ``%`` comments.  Every
statement ends with a period::

    type ne_list intro [hd:top, tl:list].
    type list sub [e_list, ne_list].
    order_types [word, phrase].
    order_feats phrase [goals, dtr1, dtr2].
    append_c => (arg1:[], arg2:X, arg3:X, goals:[]) ; ... .

In descriptions, lowercase identifiers are types, capitalised identifiers
(and ``#n`` tags) are variables, and an identifier directly followed by
``:`` is a feature name.  Feature names are case-insensitive and stored in
lowercase.  ``,`` is conjunction, ``;`` disjunction (looser), ``V=d`` binds
a variable, ``[a,b|T]`` is list sugar and ``[type F:v ...]`` is the AVM
form produced by the printer.
"""

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import GrammarSyntaxError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<arrow>=>)
  | (?P<tag>\#[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[\[\](),;|:=.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'tag', 'eof' or the punctuation text itself
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise GrammarSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind == "arrow":
            tokens.append(Token("=>", value, line, pos - line_start + 1))
        elif kind == "punct":
            tokens.append(Token(value, value, line, pos - line_start + 1))
        elif kind in ("ident", "tag"):
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Description AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeLit:
    name: str
    pos: Optional[tuple] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Feat:
    feat: str
    value: "Description"
    pos: Optional[tuple] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Conj:
    left: "Description"
    right: "Description"


@dataclass(frozen=True)
class Disj:
    left: "Description"
    right: "Description"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ListSugar:
    elements: tuple
    tail: Optional["Description"] = None


Description = Union[TypeLit, Feat, Conj, Disj, Var, ListSugar]


def conj_all(parts):
    """Left-nested conjunction of a non-empty sequence."""
    parts = list(parts)
    result = parts[0]
    for p in parts[1:]:
        result = Conj(result, p)
    return result


def disj_all(parts):
    parts = list(parts)
    result = parts[0]
    for p in parts[1:]:
        result = Disj(result, p)
    return result


def format_description(d):
    """Render a description back in source syntax (fully parenthesised)."""
    if isinstance(d, TypeLit):
        return d.name
    if isinstance(d, Var):
        return d.name
    if isinstance(d, Feat):
        return f"{d.feat}:{_format_operand(d.value)}"
    if isinstance(d, Conj):
        return f"{format_description(d.left)}, {format_description(d.right)}"
    if isinstance(d, Disj):
        return f"({format_description(d.left)} ; {format_description(d.right)})"
    if isinstance(d, ListSugar):
        inner = ", ".join(_format_operand(e) for e in d.elements)
        if d.tail is not None:
            inner += "|" + _format_operand(d.tail)
        return f"[{inner}]"
    raise TypeError(f"not a description: {d!r}")


def _format_operand(d):
    if isinstance(d, (Conj, Disj)):
        return f"({format_description(d)})"
    return format_description(d)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeDecl:
    name: str
    subs: tuple
    intro: tuple  # ((feature, value_type), ...)
    pos: tuple


@dataclass(frozen=True)
class OrderTypes:
    names: tuple
    pos: tuple


@dataclass(frozen=True)
class OrderFeats:
    type: str
    feats: tuple
    pos: tuple


@dataclass(frozen=True)
class ConstraintDecl:
    antecedent: str
    consequent: Description
    pos: tuple


def is_variable_name(name):
    return name[0].isupper() or name[0] == "_"


class Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0
        self._anon = itertools.count(1)

    # token helpers

    @property
    def tok(self):
        return self.tokens[self.i]

    def peek(self, k=1):
        j = min(self.i + k, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self):
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, message, tok=None):
        tok = tok or self.tok
        return GrammarSyntaxError(message, tok.line, tok.col)

    def expect(self, kind, what=None):
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what or kind!r}, found {found!r}")
        return self.advance()

    def ident(self, what="identifier"):
        return self.expect("ident", what).text

    def name_list(self):
        self.expect("[")
        names = []
        if self.tok.kind != "]":
            names.append(self.ident())
            while self.tok.kind == ",":
                self.advance()
                names.append(self.ident())
        self.expect("]")
        return names

    # statements

    def statements(self):
        result = []
        while self.tok.kind != "eof":
            result.append(self.statement())
        return result

    def statement(self):
        start = self.tok
        pos = (start.line, start.col)
        if start.kind != "ident":
            raise self.error(f"expected a declaration, found {start.text!r}")
        if start.text == "type" and self.peek().kind == "ident":
            self.advance()
            name = self.ident("type name")
            subs, intro = [], []
            while self.tok.kind == "ident" and self.tok.text in ("sub", "intro"):
                keyword = self.advance().text
                if keyword == "sub":
                    subs.extend(self.name_list())
                else:
                    intro.extend(self.intro_list())
            self.expect(".")
            return TypeDecl(name, tuple(subs), tuple(intro), pos)
        if start.text == "order_types" and self.peek().kind == "[":
            self.advance()
            names = self.name_list()
            self.expect(".")
            return OrderTypes(tuple(names), pos)
        if start.text == "order_feats" and self.peek().kind == "ident":
            self.advance()
            tname = self.ident("type name")
            feats = [f.lower() for f in self.name_list()]
            self.expect(".")
            return OrderFeats(tname, tuple(feats), pos)
        if self.peek().kind == "=>":
            name = self.advance().text
            self.advance()
            desc = self.description()
            self.expect(".")
            return ConstraintDecl(name, desc, pos)
        raise self.error(f"cannot parse declaration starting with {start.text!r}")

    def intro_list(self):
        self.expect("[")
        items = []
        if self.tok.kind != "]":
            items.append(self.intro_item())
            while self.tok.kind == ",":
                self.advance()
                items.append(self.intro_item())
        self.expect("]")
        return items

    def intro_item(self):
        feat = self.ident("feature name").lower()
        self.expect(":")
        return feat, self.ident("type name")

    # descriptions

    def description(self):
        left = self.conjunction()
        while self.tok.kind == ";":
            self.advance()
            left = Disj(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.tok.kind == ",":
            self.advance()
            left = Conj(left, self.unary())
        return left

    def _is_feature_start(self):
        return self.tok.kind == "ident" and self.peek().kind == ":"

    def unary(self):
        tok = self.tok
        pos = (tok.line, tok.col)
        if tok.kind == "ident":
            if self.peek().kind == ":":
                self.advance()
                self.advance()
                return Feat(tok.text.lower(), self.unary(), pos)
            if is_variable_name(tok.text):
                self.advance()
                var = self._variable(tok.text)
                if self.tok.kind == "=":
                    self.advance()
                    return Conj(var, self.unary())
                return var
            self.advance()
            return TypeLit(tok.text, pos)
        if tok.kind == "tag":
            self.advance()
            var = Var(tok.text)
            if self.tok.kind == "=":
                self.advance()
                return Conj(var, self.unary())
            return var
        if tok.kind == "(":
            self.advance()
            inner = self.description()
            self.expect(")")
            return inner
        if tok.kind == "[":
            return self.bracket()
        found = tok.text or "end of input"
        raise self.error(f"expected a description, found {found!r}")

    def _variable(self, name):
        if name == "_":
            return Var(f"_{next(self._anon)}")
        return Var(name)

    def bracket(self):
        self.expect("[")
        if self.tok.kind == "]":
            self.advance()
            return ListSugar(())
        first = self.unary()
        if self._is_feature_start():
            parts = [first]
            while self.tok.kind != "]":
                if self.tok.kind == "eof":
                    raise self.error("unterminated '['")
                parts.append(self.unary())
            self.advance()
            return conj_all(parts)
        elements = [first]
        while self.tok.kind == ",":
            self.advance()
            elements.append(self.unary())
        tail = None
        if self.tok.kind == "|":
            self.advance()
            tail = self.unary()
        self.expect("]")
        return ListSugar(tuple(elements), tail)


def parse_statements(text):
    return Parser(text).statements()


def parse_description(text):
    """Parse a standalone description (a query); a trailing period is allowed."""
    p = Parser(text)
    d = p.description()
    if p.tok.kind == ".":
        p.advance()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after description")
    return d
