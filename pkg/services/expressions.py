"""
expressions.py — the polytope expression language used by the CLI.

    expr    := term (op term)*            op in {join, cart, dsum, topo}, left-assoc
    term    := primary ('^' int)*
    primary := atom | unary '(' expr ')' | '(' expr ')'
    atom    := name | name '(' int (',' int)* ')'

Parameter ranges are checked while parsing; operand-rank restrictions
(topological operands of rank >= 2, the empty polytope) surface from
evaluate().
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from config import CATALOG_ATOMS, PRODUCT_KIND_NAMES, UNARY_OPERATORS
from services import catalog, products
from services.catalog import CatalogSpec, ParameterOutOfRange
from services.poset_core import Polytope, dual
from services.products import ProductKind


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class RangeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    spec: CatalogSpec

    def __str__(self) -> str:
        return str(self.spec)


@dataclass(frozen=True)
class Unary:
    op: str
    arg: Expr

    def __str__(self) -> str:
        return f"{self.op}({self.arg})"


@dataclass(frozen=True)
class Binary:
    kind: ProductKind
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"({self.left} {self.kind.cli_name} {self.right})"


@dataclass(frozen=True)
class Power:
    base: Expr
    k: int

    def __str__(self) -> str:
        return f"{self.base}^{self.k}"


Expr = Atom | Unary | Binary | Power


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[(),^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def current(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, pos = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionError(f"expected {value!r}, found {found}", pos)

    def integer(self) -> tuple[int, int]:
        kind, text, pos = self.take()
        if kind != "int":
            raise ExpressionError("expected an integer", pos)
        return int(text), pos

    def expr(self) -> Expr:
        node = self.term()
        while self.current[0] == "name" and self.current[1] in PRODUCT_KIND_NAMES:
            _, op, _ = self.take()
            node = Binary(ProductKind.from_name(op), node, self.term())
        return node

    def term(self) -> Expr:
        node = self.primary()
        while self.current[1] == "^":
            self.take()
            k, pos = self.integer()
            if k < 1:
                raise RangeError(f"power exponent must be >= 1, got {k} at position {pos}")
            node = Power(node, k)
        return node

    def primary(self) -> Expr:
        kind, text, pos = self.take()
        if text == "(" and kind == "punct":
            node = self.expr()
            self.expect(")")
            return node
        if kind != "name":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionError(f"expected a polytope, found {found}", pos)
        if text in UNARY_OPERATORS:
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Unary(text, node)
        if text in CATALOG_ATOMS:
            return self.atom(text, pos)
        raise ExpressionError(f"unknown name {text!r}", pos)

    def atom(self, name: str, pos: int) -> Atom:
        params = []
        if self.current[1] == "(":
            self.take()
            params.append(self.integer()[0])
            while self.current[1] == ",":
                self.take()
                params.append(self.integer()[0])
            self.expect(")")
        spec = CatalogSpec(name, tuple(params))
        try:
            catalog.check_spec(spec)
        except ParameterOutOfRange as e:
            raise RangeError(f"{e} at position {pos}") from None
        return Atom(spec)


def parse(text: str) -> Expr:
    parser = _Parser(text)
    node = parser.expr()
    kind, value, pos = parser.current
    if kind != "end":
        raise ExpressionError(f"unexpected {value!r}", pos)
    return node


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

_UNARY = {
    "pyr":   products.pyr,
    "prism": products.pri,
    "bipyr": products.bipyr,
    "dual":  dual,
}


def evaluate(node: Expr, power_kind: ProductKind = ProductKind.CARTESIAN) -> Polytope:
    """
    Build the polytope; catalog atoms come from the catalog's caches.  `^k` is
    the k-fold power under power_kind.
    """
    if isinstance(node, Atom):
        return catalog.make(node.spec)
    if isinstance(node, Unary):
        return _UNARY[node.op](evaluate(node.arg, power_kind))
    if isinstance(node, Binary):
        return products.product(node.kind, evaluate(node.left, power_kind), evaluate(node.right, power_kind))
    if isinstance(node, Power):
        return products.power(power_kind, evaluate(node.base, power_kind), node.k)
    raise TypeError(f"not an expression node: {node!r}")
