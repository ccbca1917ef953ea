"""A small arithmetic-expression language for scenario files.

Grammar::

    expr    := term { ("+" | "-") term }
    term    := unary { ("*" | "/") unary }
    unary   := ("+" | "-") unary | power
    power   := atom [ "^" unary ]
    atom    := number | name | name "(" expr { "," expr } ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus, so
``-x^2`` is ``-(x^2)``.  Numbers are parsed exactly (as fractions) and
turned into floats only when evaluated in float mode.

The same tree evaluates over floats, :class:`~solitonkit.jet.Jet` values
and exact :class:`~solitonkit.diffalg.DiffRat` values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from . import jet as jm

__all__ = ["ExprSyntaxError", "Node", "parse", "compile_field", "FUNCTIONS", "CONSTANTS"]


class ExprSyntaxError(ValueError):
    pass


FUNCTIONS = {
    "exp": jm.exp,
    "log": jm.log,
    "sqrt": jm.sqrt,
    "sin": jm.sin,
    "cos": jm.cos,
    "tan": jm.tan,
    "sinh": jm.sinh,
    "cosh": jm.cosh,
    "tanh": jm.tanh,
    "atanh": jm.atanh,
    "asinh": jm.asinh,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ExprSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = mt.end()
        if mt.group("num"):
            out.append(("num", Fraction(mt.group("num"))))
        elif mt.group("name"):
            out.append(("name", mt.group("name")))
        else:
            op = mt.group("op")
            out.append(("op", "^" if op == "**" else op))
    out.append(("end", None))
    return out


@dataclass(frozen=True)
class Node:
    kind: str  # num | name | neg | bin | call
    value: object = None
    args: tuple = ()

    def names(self):
        """Free identifiers (excluding called function names)."""
        if self.kind == "name":
            return {self.value}
        out = set()
        for a in self.args:
            out |= a.names()
        return out

    def evaluate(self, lookup, exact=False, functions=None):
        """Evaluate with ``lookup(name)`` supplying identifier values."""
        funcs = FUNCTIONS if functions is None else functions
        k = self.kind
        if k == "num":
            return self.value if exact else float(self.value)
        if k == "name":
            return lookup(self.value)
        if k == "neg":
            return -self.args[0].evaluate(lookup, exact, functions)
        if k == "call":
            if exact:
                raise ExprSyntaxError(f"function {self.value!r} not allowed in exact expressions")
            if self.value not in funcs:
                raise ExprSyntaxError(f"unknown function {self.value!r}")
            vals = [a.evaluate(lookup, exact, functions) for a in self.args]
            return funcs[self.value](*vals)
        a = self.args[0].evaluate(lookup, exact, functions)
        b = self.args[1].evaluate(lookup, exact, functions)
        op = self.value
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        if exact:
            return a ** b
        if isinstance(b, float) and b.is_integer() and not isinstance(a, jm.Jet):
            return a ** int(b)
        return jm.power(a, b)


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ExprSyntaxError(f"expected {value or kind}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = Node("bin", op, (node, self.term()))
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = Node("bin", op, (node, self.unary()))
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return Node("neg", None, (self.unary(),))
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return Node("bin", "^", (base, self.unary()))
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Node("num", val)
        if kind == "name":
            self.take()
            if self.peek() == ("op", "("):
                self.take()
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.take("op", ")")
                return Node("call", val, tuple(args))
            return Node("name", val)
        if (kind, val) == ("op", "("):
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        raise ExprSyntaxError(f"unexpected token {val!r}")


def parse(text):
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression")
    p = _Parser(_tokenize(text))
    node = p.expr()
    p.take("end")
    return node


def compile_field(text, coords, params=None):
    """Return ``fn(x)`` evaluating ``text`` with ``coords[i]`` bound to ``x[i]``.

    ``params`` maps extra identifiers to numbers or to already compiled
    callables of ``x`` (used for derived fields such as ``tau`` or ``l``).
    """
    tree = parse(text)
    params = dict(params or {})
    index = {name: i for i, name in enumerate(coords)}
    unknown = tree.names() - set(index) - set(params) - set(CONSTANTS)
    if unknown:
        raise ExprSyntaxError(f"unknown identifiers: {', '.join(sorted(unknown))}")

    def fn(x):
        def lookup(name):
            if name in index:
                return x[index[name]]
            if name in params:
                v = params[name]
                return v(x) if callable(v) else float(v)
            return CONSTANTS[name]

        return tree.evaluate(lookup)

    fn.source = text
    return fn
