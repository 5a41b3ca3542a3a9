"""Formulae over a sort set: atoms, the unit I, tensor and linear implication.

Ports (leaf occurrences of a sort or of I) are addressed by leaf index in
left-to-right order; that total order is relied on everywhere downstream.
A port is positive when it lies to the left of an even number of
implications on its path to the root, negative otherwise.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache

_SORT_NAME = re.compile(r"[a-zA-Z0-9_']+\Z")


class ParseError(ValueError):
    """Malformed text; `position` is a 0-based column when known."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at column {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True, order=True)
class Sort:
    name: str

    def __post_init__(self):
        if not self.name or not _SORT_NAME.match(self.name):
            raise ValueError(f"bad sort name: {self.name!r}")
        if self.name == "I":
            raise ValueError("sort name 'I' is reserved for the unit")

    def __str__(self):
        return self.name


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    def flip(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


class Formula:
    """Base class; instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    sort: Sort
    __slots__ = ("sort",)


@dataclass(frozen=True)
class Unit(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class Tensor(Formula):
    left: Formula
    right: Formula
    __slots__ = ("left", "right")


@dataclass(frozen=True)
class Lollipop(Formula):
    left: Formula
    right: Formula
    __slots__ = ("left", "right")


UNIT = Unit()


def atom(name: str) -> Atom:
    return Atom(Sort(name))


def tensor_all(factors: list[Formula], empty: Formula = UNIT) -> Formula:
    """Right-nested tensor of `factors`; `empty` for the empty product."""
    if not factors:
        return empty
    out = factors[-1]
    for f in reversed(factors[:-1]):
        out = Tensor(f, out)
    return out


@dataclass(frozen=True)
class Port:
    """A leaf occurrence: its index and its kind (a Sort, or None for I)."""

    index: int
    kind: Sort | None


@lru_cache(maxsize=None)
def leaves(f: Formula) -> tuple[Sort | None, ...]:
    """Kinds of the leaves of `f` in left-to-right order (None = unit)."""
    if isinstance(f, Atom):
        return (f.sort,)
    if isinstance(f, Unit):
        return (None,)
    return leaves(f.left) + leaves(f.right)


def leaf_count(f: Formula) -> int:
    return len(leaves(f))


def ports(f: Formula) -> tuple[Port, ...]:
    return tuple(Port(i, kind) for i, kind in enumerate(leaves(f)))


def sorts_of(f: Formula) -> frozenset[Sort]:
    return frozenset(k for k in leaves(f) if k is not None)


@lru_cache(maxsize=None)
def _polarities(f: Formula, depth_even: bool = True) -> tuple[Polarity, ...]:
    if isinstance(f, (Atom, Unit)):
        return (Polarity.POSITIVE if depth_even else Polarity.NEGATIVE,)
    if isinstance(f, Tensor):
        return _polarities(f.left, depth_even) + _polarities(f.right, depth_even)
    return _polarities(f.left, not depth_even) + _polarities(f.right, depth_even)


def polarity(f: Formula, port: Port | int) -> Polarity:
    """Polarity of a leaf of `f`, addressed by `Port` or by leaf index."""
    index = port.index if isinstance(port, Port) else port
    pols = _polarities(f)
    if not 0 <= index < len(pols):
        raise IndexError(f"port {index} out of range for formula with {len(pols)} leaves")
    return pols[index]


# -- classical view ----------------------------------------------------------
# The de Morgan presentation used by switchings: A -o B is encoded as the par
# of (dual of A) and B; dualising swaps tensor/par and one/bottom and negates
# atoms.  Leaf order always matches the source formula's leaf order.


class ClassicalFormula:
    __slots__ = ()


@dataclass(frozen=True)
class PosAtom(ClassicalFormula):
    sort: Sort
    __slots__ = ("sort",)


@dataclass(frozen=True)
class NegAtom(ClassicalFormula):
    sort: Sort
    __slots__ = ("sort",)


@dataclass(frozen=True)
class One(ClassicalFormula):
    __slots__ = ()


@dataclass(frozen=True)
class Bottom(ClassicalFormula):
    __slots__ = ()


@dataclass(frozen=True)
class CTensor(ClassicalFormula):
    left: ClassicalFormula
    right: ClassicalFormula
    __slots__ = ("left", "right")


@dataclass(frozen=True)
class CPar(ClassicalFormula):
    left: ClassicalFormula
    right: ClassicalFormula
    __slots__ = ("left", "right")


@lru_cache(maxsize=None)
def classicalize(f: Formula, negate: bool = False) -> ClassicalFormula:
    if isinstance(f, Atom):
        return NegAtom(f.sort) if negate else PosAtom(f.sort)
    if isinstance(f, Unit):
        return Bottom() if negate else One()
    if isinstance(f, Tensor):
        if negate:
            return CPar(classicalize(f.left, True), classicalize(f.right, True))
        return CTensor(classicalize(f.left, False), classicalize(f.right, False))
    # A -o B  ~~>  (dual A) par B;   its dual  ~~>  A tensor (dual B)
    if negate:
        return CTensor(classicalize(f.left, False), classicalize(f.right, True))
    return CPar(classicalize(f.left, True), classicalize(f.right, False))


def classical_leaves(c: ClassicalFormula) -> tuple[ClassicalFormula, ...]:
    if isinstance(c, (CTensor, CPar)):
        return classical_leaves(c.left) + classical_leaves(c.right)
    return (c,)


def par_count(c: ClassicalFormula) -> int:
    if isinstance(c, CPar):
        return 1 + par_count(c.left) + par_count(c.right)
    if isinstance(c, CTensor):
        return par_count(c.left) + par_count(c.right)
    return 0


def format_classical(c: ClassicalFormula) -> str:
    def fmt(x: ClassicalFormula, parent_binds: bool) -> str:
        if isinstance(x, PosAtom):
            return x.sort.name
        if isinstance(x, NegAtom):
            return x.sort.name + "^"
        if isinstance(x, One):
            return "1"
        if isinstance(x, Bottom):
            return "_|_"
        op = " (x) " if isinstance(x, CTensor) else " par "
        body = fmt(x.left, True) + op + fmt(x.right, True)
        return f"({body})" if parent_binds else body

    return fmt(c, False)


# -- concrete syntax ---------------------------------------------------------
# F ::= sort | I | F * F | F -o F | ( F )
# `-o` is right-associative; `*` is left-associative and binds tighter.

_TOKEN = re.compile(r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<tens>\*)|(?P<lolli>-o)|(?P<name>[a-zA-Z0-9_']+))")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_formula(text: str, sorts: frozenset[Sort] | set[Sort] | None = None) -> Formula:
    """Parse `text`; when `sorts` is given, reject atoms outside it."""
    tokens = _tokenize(text)
    index = 0

    def peek():
        return tokens[index]

    def advance():
        nonlocal index
        tok = tokens[index]
        index += 1
        return tok

    def parse_atom() -> Formula:
        kind, value, pos = advance()
        if kind == "lpar":
            inner = parse_impl()
            kind2, _, pos2 = advance()
            if kind2 != "rpar":
                raise ParseError("expected ')'", pos2)
            return inner
        if kind == "name":
            if value == "I":
                return UNIT
            sort = Sort(value)
            if sorts is not None and sort not in sorts:
                raise ParseError(f"unknown sort {value!r}", pos)
            return Atom(sort)
        raise ParseError("expected a formula", pos)

    def parse_tensor() -> Formula:
        out = parse_atom()
        while peek()[0] == "tens":
            advance()
            out = Tensor(out, parse_atom())
        return out

    def parse_impl() -> Formula:
        left = parse_tensor()
        if peek()[0] == "lolli":
            advance()
            return Lollipop(left, parse_impl())
        return left

    result = parse_impl()
    kind, _, pos = peek()
    if kind != "end":
        raise ParseError("trailing input", pos)
    return result


def format_formula(f: Formula) -> str:
    """Print `f` so that parse_formula(format_formula(f)) == f."""

    def fmt(x: Formula, prec: int) -> str:
        if isinstance(x, Atom):
            return x.sort.name
        if isinstance(x, Unit):
            return "I"
        if isinstance(x, Tensor):
            body = fmt(x.left, 1) + " * " + fmt(x.right, 2)
            return f"({body})" if prec >= 2 else body
        body = fmt(x.left, 1) + " -o " + fmt(x.right, 0)
        return f"({body})" if prec >= 1 else body

    return fmt(f, 0)
