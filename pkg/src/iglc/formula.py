"""Syntax of the modal propositional language: AST, parser, printer, structural queries.

The primitive connectives are ``⊥``, ``∧``, ``∨``, ``→`` and ``□``.  Negation and
verum are surface sugar only: ``~A`` parses to ``A -> false`` and ``true`` to
``false -> false``, so every structural recursion has exactly six cases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

__all__ = [
    "Formula", "Atom", "Bottom", "And", "Or", "Imp", "Box",
    "BOT", "TOP", "Neg", "Iff", "ParseError", "Decomposition",
    "parse", "render", "subsentences", "modal_decompose", "boxdepth",
    "atoms", "substitute", "is_box_free", "size",
]


class _Node:
    """Interned immutable AST node: equal trees are the same object.

    Hash-consing keeps hashing and equality O(1), which the provers rely on
    (everything downstream keys dictionaries by formulas).
    """

    __slots__ = ()

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


class Atom(_Node):
    __slots__ = ("name",)
    _intern: dict[str, "Atom"] = {}

    def __new__(cls, name: str):
        f = cls._intern.get(name)
        if f is None:
            f = object.__new__(cls)
            object.__setattr__(f, "name", name)
            cls._intern[name] = f
        return f

    def __repr__(self):
        return f"Atom({self.name!r})"


class Bottom(_Node):
    __slots__ = ()
    _instance: "Bottom | None" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Bottom"


class _Binary(_Node):
    __slots__ = ("left", "right")

    def __new__(cls, left: "Formula", right: "Formula"):
        key = (left, right)
        f = cls._intern.get(key)
        if f is None:
            f = object.__new__(cls)
            object.__setattr__(f, "left", left)
            object.__setattr__(f, "right", right)
            cls._intern[key] = f
        return f

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    __slots__ = ()
    _intern: dict = {}


class Or(_Binary):
    __slots__ = ()
    _intern: dict = {}


class Imp(_Binary):
    __slots__ = ()
    _intern: dict = {}


class Box(_Node):
    __slots__ = ("inner",)
    _intern: dict = {}

    def __new__(cls, inner: "Formula"):
        f = cls._intern.get(inner)
        if f is None:
            f = object.__new__(cls)
            object.__setattr__(f, "inner", inner)
            cls._intern[inner] = f
        return f

    def __repr__(self):
        return f"Box({self.inner!r})"


Formula = Atom | Bottom | And | Or | Imp | Box

BOT = Bottom()
TOP = Imp(BOT, BOT)


def Neg(a: Formula) -> Formula:
    """Sugar: ¬A is A → ⊥."""
    return Imp(a, BOT)


def Iff(a: Formula, b: Formula) -> Formula:
    """Sugar: A ↔ B is (A→B) ∧ (B→A)."""
    return And(Imp(a, b), Imp(b, a))


# ---------------------------------------------------------------------------
# Parsing.
#
# Grammar (lowest to highest precedence, "->" right-associative):
#   formula := or_expr ( "->" formula )?
#   or_expr := and_expr ( "|" and_expr )*
#   and_expr := unary ( "&" unary )*
#   unary := "~" unary | "[]" unary | atom
#   atom := IDENT | "false" | "true" | "(" formula ")"

class ParseError(ValueError):
    """Malformed formula text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(->|\[\]|[()~&|]|[a-z][a-zA-Z0-9_]*)")
_IDENT_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", len(text) - len(rest))
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}", self.pos())
        self.i += 1

    def formula(self) -> Formula:
        left = self.or_expr()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.formula())
        return left

    def or_expr(self) -> Formula:
        f = self.and_expr()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Neg(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if tok == "false":
            self.take()
            return BOT
        if tok == "true":
            self.take()
            return TOP
        if tok is not None and _IDENT_RE.match(tok):
            self.take()
            return Atom(tok)
        raise ParseError("expected an atom, 'false', 'true' or '('", self.pos())


def parse(text: str) -> Formula:
    """Parse formula text into an AST with sugar expanded."""
    p = _Parser(text)
    f = p.formula()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return f


# ---------------------------------------------------------------------------
# Printing.  Precedence levels: 0 imp, 1 or, 2 and, 3 unary/atom.

def _render(f: Formula, level: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if f == TOP:
        return "true"
    if isinstance(f, Imp) and f.right == BOT:
        return "~" + _render(f.left, 3)
    if isinstance(f, Imp):
        s = _render(f.left, 1) + " -> " + _render(f.right, 0)
        return f"({s})" if level > 0 else s
    if isinstance(f, Or):
        s = _render(f.left, 1) + " | " + _render(f.right, 2)
        return f"({s})" if level > 1 else s
    if isinstance(f, And):
        s = _render(f.left, 2) + " & " + _render(f.right, 3)
        return f"({s})" if level > 2 else s
    if isinstance(f, Box):
        return "[]" + _render(f.inner, 3)
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def render(f: Formula) -> str:
    """Print a formula; the output reparses to a node-identical tree."""
    return _render(f, 0)


# ---------------------------------------------------------------------------
# Structural queries.

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or, Imp)):
        return (f.left, f.right)
    if isinstance(f, Box):
        return (f.inner,)
    return ()


def _walk(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from _walk(c)


@lru_cache(maxsize=None)
def subsentences(f: Formula) -> frozenset[Formula]:
    """Smallest set containing f and closed under immediate subformulas."""
    out = frozenset({f})
    for c in children(f):
        out |= subsentences(c)
    return out


@lru_cache(maxsize=None)
def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset({f.name})
    out = frozenset()
    for c in children(f):
        out |= atoms(c)
    return out


@lru_cache(maxsize=None)
def is_box_free(f: Formula) -> bool:
    if isinstance(f, Box):
        return False
    return all(is_box_free(c) for c in children(f))


@lru_cache(maxsize=None)
def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(f))


@lru_cache(maxsize=None)
def boxdepth(f: Formula) -> int:
    """Maximal nesting depth of □; 0 for box-free formulas."""
    if isinstance(f, Box):
        return 1 + boxdepth(f.inner)
    return max((boxdepth(c) for c in children(f)), default=0)


def substitute(f: Formula, mapping: dict[str, Formula]) -> Formula:
    """Replace atoms by formulas, capture-free (there are no binders)."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Bottom):
        return f
    if isinstance(f, And):
        return And(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Or):
        return Or(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Imp):
        return Imp(substitute(f.left, mapping), substitute(f.right, mapping))
    return Box(substitute(f.inner, mapping))


# ---------------------------------------------------------------------------
# Unique modal decomposition: every formula is C(p⃗, □B₁, …, □Bₖ) for a box-free
# skeleton C and pairwise distinct boxed parts Bᵢ.

PLACEHOLDER_PREFIX = "_b"


@dataclass(frozen=True)
class Decomposition:
    """Box-free skeleton over fresh placeholder atoms, plus the boxed parts.

    ``boxed_parts[i]`` corresponds to the placeholder ``placeholders[i]``;
    parts are ordered by first occurrence of their box in a preorder traversal,
    which makes the decomposition deterministic.
    """

    skeleton: Formula
    boxed_parts: tuple[Formula, ...]

    @property
    def placeholders(self) -> tuple[str, ...]:
        return tuple(f"{PLACEHOLDER_PREFIX}{i + 1}" for i in range(len(self.boxed_parts)))

    def recompose(self) -> Formula:
        mapping = {q: Box(b) for q, b in zip(self.placeholders, self.boxed_parts)}
        return substitute(self.skeleton, mapping)


def modal_decompose(f: Formula) -> Decomposition:
    """Split f into its box-free skeleton and maximal boxed subformulas."""
    parts: list[Formula] = []
    index: dict[Formula, int] = {}

    def skel(g: Formula) -> Formula:
        if isinstance(g, Box):
            i = index.get(g.inner)
            if i is None:
                i = len(parts)
                index[g.inner] = i
                parts.append(g.inner)
            return Atom(f"{PLACEHOLDER_PREFIX}{i + 1}")
        if isinstance(g, And):
            return And(skel(g.left), skel(g.right))
        if isinstance(g, Or):
            return Or(skel(g.left), skel(g.right))
        if isinstance(g, Imp):
            return Imp(skel(g.left), skel(g.right))
        return g

    skeleton = skel(f)
    return Decomposition(skeleton, tuple(parts))
