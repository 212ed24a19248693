"""Propositional vocabulary for Boolean classifiers.

Features live in an ordered FeatureSpace; literals, terms and instances are
built on top of them.  Classifiers can be written in a small DSL:

    ~ (not)  binds tighter than  & (and)  binds tighter than  | (or)

with parentheses, the constants 0 and 1, and feature names matching
[A-Za-z_][A-Za-z0-9_]*.  Instances and terms are comma-separated literal
lists such as "E,~F,~G,W".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ParseError(InputError):
    """Syntax or vocabulary error with a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Variable:
    """A named feature; index is its 1-based position in the space."""

    name: str
    index: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Literal:
    variable: Variable
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.variable, not self.positive)

    @property
    def code(self) -> int:
        # signed feature index, the encoding circuits use
        return self.variable.index if self.positive else -self.variable.index

    @property
    def key(self) -> tuple[int, int]:
        # canonical order: by feature, positive before negative
        return (self.variable.index, 0 if self.positive else 1)

    def __str__(self) -> str:
        return self.variable.name if self.positive else "~" + self.variable.name


class Term:
    """A consistent set of literals, kept sorted by feature index.

    The empty term denotes the constant 1.
    """

    __slots__ = ("_literals", "_codes")

    def __init__(self, literals: Iterable[Literal] = ()):
        by_var: dict[int, Literal] = {}
        for lit in literals:
            prev = by_var.get(lit.variable.index)
            if prev is not None and prev.positive != lit.positive:
                raise InputError(f"contradictory literals {prev} and {lit}")
            by_var[lit.variable.index] = lit
        lits = tuple(by_var[i] for i in sorted(by_var))
        self._literals = lits
        self._codes = frozenset(lit.code for lit in lits)

    @property
    def literals(self) -> tuple[Literal, ...]:
        return self._literals

    def __iter__(self) -> Iterator[Literal]:
        return iter(self._literals)

    def __len__(self) -> int:
        return len(self._literals)

    def __contains__(self, lit: Literal) -> bool:
        return lit.code in self._codes

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Term) and self._codes == other._codes

    def __hash__(self) -> int:
        return hash(self._codes)

    @property
    def codes(self) -> frozenset[int]:
        return self._codes

    def variables(self) -> tuple[Variable, ...]:
        return tuple(lit.variable for lit in self._literals)

    def subsumes(self, other: "Term") -> bool:
        """True when self's literals are a subset of other's."""
        return self._codes <= other._codes

    def negate(self) -> "Term":
        return Term(lit.negate() for lit in self._literals)

    def union(self, other: "Term") -> "Term":
        return Term(self._literals + other._literals)

    def is_property_of(self, instance: "Instance") -> bool:
        return all(instance.value(lit.variable) == lit.positive for lit in self)

    @property
    def key(self) -> tuple:
        """Sort key: size first, then canonical literal order."""
        return (len(self._literals), tuple(lit.key for lit in self._literals))

    def __str__(self) -> str:
        if not self._literals:
            return "1"
        return ",".join(str(lit) for lit in self._literals)

    def __repr__(self) -> str:
        return f"Term({str(self)!r})"


class FeatureSpace:
    """Ordered feature declarations with an optional protected subset.

    Indices are 1-based and contiguous.  Parsing a formula may append
    newly mentioned features; treat a space as frozen once classifiers
    over it have been built.
    """

    def __init__(self, names: Iterable[str] = (), protected: Iterable[str] = ()):
        self._vars: list[Variable] = []
        self._by_name: dict[str, Variable] = {}
        for name in names:
            self.declare(name)
        self._protected: frozenset[Variable] = frozenset()
        self.set_protected(protected)

    def declare(self, name: str) -> Variable:
        if not _NAME_RE.fullmatch(name):
            raise InputError(f"invalid feature name {name!r}")
        if name in self._by_name:
            raise InputError(f"duplicate feature {name!r}")
        var = Variable(name, len(self._vars) + 1)
        self._vars.append(var)
        self._by_name[name] = var
        return var

    def get_or_declare(self, name: str) -> Variable:
        var = self._by_name.get(name)
        return var if var is not None else self.declare(name)

    def lookup(self, name: str) -> Variable:
        var = self._by_name.get(name)
        if var is None:
            raise InputError(f"unknown feature {name!r}")
        return var

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(self._vars)

    @property
    def protected(self) -> frozenset[Variable]:
        return self._protected

    def set_protected(self, names: Iterable[str]) -> None:
        self._protected = frozenset(self.lookup(n) for n in names)

    def unprotected(self) -> tuple[Variable, ...]:
        return tuple(v for v in self._vars if v not in self._protected)

    def __len__(self) -> int:
        return len(self._vars)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._vars)

    def __contains__(self, var: Variable) -> bool:
        return self._by_name.get(var.name) == var

    @classmethod
    def from_text(cls, text: str) -> "FeatureSpace":
        """One feature name per line; a trailing ``*`` marks it protected."""
        names, protected = [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 2 and parts[1] == "*":
                names.append(parts[0])
                protected.append(parts[0])
            elif len(parts) == 1:
                names.append(parts[0])
            else:
                raise ParseError("expected 'name' or 'name *'", lineno, 1)
        return cls(names, protected)

    @classmethod
    def from_file(cls, path) -> "FeatureSpace":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


class Instance:
    """A total assignment over a feature space."""

    __slots__ = ("space", "_values")

    def __init__(self, space: FeatureSpace, values: Iterable[bool]):
        vals = tuple(bool(v) for v in values)
        if len(vals) != len(space):
            raise InputError(
                f"instance has {len(vals)} values for {len(space)} features"
            )
        self.space = space
        self._values = vals

    def value(self, var: Variable) -> bool:
        return self._values[var.index - 1]

    def literal(self, var: Variable) -> Literal:
        return Literal(var, self._values[var.index - 1])

    def literals(self) -> tuple[Literal, ...]:
        return tuple(Literal(v, b) for v, b in zip(self.space.variables, self._values))

    def as_term(self) -> Term:
        return Term(self.literals())

    def satisfies(self, term: Term) -> bool:
        return term.is_property_of(self)

    def override(self, term: Term) -> "Instance":
        """A copy with the term's features set to the term's polarities."""
        vals = list(self._values)
        for lit in term:
            vals[lit.variable.index - 1] = lit.positive
        return Instance(self.space, vals)

    @property
    def index(self) -> int:
        """Position of this assignment in truth-table order."""
        idx = 0
        for pos, bit in enumerate(self._values):
            if bit:
                idx |= 1 << pos
        return idx

    def kernel_values(self):
        from array import array

        return array("i", (0,) + tuple(int(b) for b in self._values))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Instance)
            and self.space is other.space
            and self._values == other._values
        )

    def __hash__(self) -> int:
        return hash(self._values)

    def __str__(self) -> str:
        return ",".join(str(lit) for lit in self.literals())

    def __repr__(self) -> str:
        return f"Instance({str(self)!r})"

    @classmethod
    def parse(cls, text: str, space: FeatureSpace) -> "Instance":
        return parse_instance(text, space)


def _parse_literal_list(text: str, space: FeatureSpace) -> list[Literal]:
    """Shared scanner for instance and term strings (comma-separated literals)."""
    literals: list[Literal] = []
    column = 1
    for chunk in text.split(","):
        item = chunk.strip()
        at = column + (len(chunk) - len(chunk.lstrip()))
        if not item:
            raise ParseError("empty literal", 1, at)
        positive = True
        name = item
        if item.startswith("~"):
            positive = False
            name = item[1:].strip()
        if not _NAME_RE.fullmatch(name):
            raise ParseError(f"bad literal {item!r}", 1, at)
        try:
            var = space.lookup(name)
        except InputError:
            raise ParseError(f"unknown feature {name!r}", 1, at) from None
        literals.append(Literal(var, positive))
        column += len(chunk) + 1
    return literals


def parse_term(text: str, space: FeatureSpace) -> Term:
    """Parse a comma-separated literal list into a Term. "1" is the empty term."""
    if text.strip() in ("", "1"):
        return Term()
    lits = _parse_literal_list(text, space)
    seen: dict[int, Literal] = {}
    for lit in lits:
        prev = seen.get(lit.variable.index)
        if prev is not None:
            if prev.positive != lit.positive:
                raise InputError(f"contradictory literals {prev} and {lit}")
            raise InputError(f"duplicate literal {lit}")
        seen[lit.variable.index] = lit
    return Term(lits)


def parse_instance(text: str, space: FeatureSpace) -> Instance:
    """Parse a total assignment like "E,~F,~G,W"; every feature must appear once."""
    lits = _parse_literal_list(text, space)
    values: dict[int, bool] = {}
    for lit in lits:
        idx = lit.variable.index
        if idx in values:
            if values[idx] != lit.positive:
                raise InputError(
                    f"contradictory literals {Literal(lit.variable, values[idx])} and {lit}"
                )
            raise InputError(f"duplicate literal {lit}")
        values[idx] = lit.positive
    missing = [v.name for v in space.variables if v.index not in values]
    if missing:
        raise InputError("instance is missing features: " + ", ".join(missing))
    return Instance(space, (values[v.index] for v in space.variables))


# ---------------------------------------------------------------------------
# Formula AST


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return formula_to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    variable: Variable


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    operands: tuple[Formula, ...]

    def __post_init__(self):
        assert len(self.operands) >= 2, "n-ary gates need at least two operands"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    operands: tuple[Formula, ...]

    def __post_init__(self):
        assert len(self.operands) >= 2, "n-ary gates need at least two operands"


_TOKEN_RE = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>[01])|(?P<op>[~&|()])|(?P<ws>\s+)"
)


class _Parser:
    """Recursive-descent parser for the classifier DSL."""

    def __init__(self, text: str, space: FeatureSpace):
        self.space = space
        self.tokens: list[tuple[str, str, int, int]] = []
        line, col = 1, 1
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unknown token {text[pos]!r}", line, col)
            kind = m.lastgroup
            value = m.group()
            if kind != "ws":
                self.tokens.append((kind, value, line, col))
            newlines = value.count("\n")
            if newlines:
                line += newlines
                col = len(value) - value.rfind("\n")
            else:
                col += len(value)
            pos = m.end()
        self.tokens.append(("eof", "", line, col))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, line, col = self.peek()
        if val != value:
            shown = val if val else "end of input"
            raise ParseError(f"expected {value!r}, found {shown!r}", line, col)
        return self.advance()

    def parse(self) -> Formula:
        f = self.disjunction()
        kind, val, line, col = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", line, col)
        return f

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek()[1] == "|":
            self.advance()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.negation()]
        while self.peek()[1] == "&":
            self.advance()
            parts.append(self.negation())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def negation(self) -> Formula:
        if self.peek()[1] == "~":
            self.advance()
            return Not(self.negation())
        return self.atom()

    def atom(self) -> Formula:
        kind, val, line, col = self.advance()
        if kind == "name":
            return Atom(self.space.get_or_declare(val))
        if kind == "const":
            return Const(val == "1")
        if val == "(":
            f = self.disjunction()
            self.expect(")")
            return f
        shown = val if val else "end of input"
        raise ParseError(f"unexpected {shown!r}", line, col)


def parse_formula(text: str, space: FeatureSpace) -> Formula:
    """Parse DSL text; features not yet declared are appended to the space
    in first-mention order."""
    return _Parser(text, space).parse()


def formula_to_text(f: Formula) -> str:
    """Shape-preserving printer; parse(formula_to_text(f)) rebuilds f."""

    def rec(node: Formula) -> tuple[str, int]:
        if isinstance(node, Const):
            return ("1" if node.value else "0", 4)
        if isinstance(node, Atom):
            return (node.variable.name, 4)
        if isinstance(node, Not):
            text, prec = rec(node.operand)
            if prec < 3:
                text = f"({text})"
            return ("~" + text, 3)
        if isinstance(node, And):
            parts = []
            for child in node.operands:
                text, prec = rec(child)
                parts.append(f"({text})" if prec <= 2 else text)
            return (" & ".join(parts), 2)
        assert isinstance(node, Or)
        parts = []
        for child in node.operands:
            text, prec = rec(child)
            parts.append(f"({text})" if prec <= 1 else text)
        return (" | ".join(parts), 1)

    return rec(f)[0]


def evaluate(f: Formula, instance: Instance) -> int:
    """Decision bit of the formula on a total assignment."""
    if isinstance(f, Const):
        return int(f.value)
    if isinstance(f, Atom):
        return int(instance.value(f.variable))
    if isinstance(f, Not):
        return 1 - evaluate(f.operand, instance)
    if isinstance(f, And):
        return int(all(evaluate(c, instance) for c in f.operands))
    assert isinstance(f, Or)
    return int(any(evaluate(c, instance) for c in f.operands))


def condition(f: Formula, term: Term) -> Formula:
    """Substitute the term's literals and propagate constants."""
    assignment = {lit.variable.index: lit.positive for lit in term}

    def rec(node: Formula) -> Formula:
        if isinstance(node, Const):
            return node
        if isinstance(node, Atom):
            fixed = assignment.get(node.variable.index)
            return node if fixed is None else Const(fixed)
        if isinstance(node, Not):
            child = rec(node.operand)
            if isinstance(child, Const):
                return Const(not child.value)
            return node if child is node.operand else Not(child)
        flat_and = isinstance(node, And)
        children = []
        changed = False
        for c in node.operands:
            rc = rec(c)
            changed = changed or rc is not c
            if isinstance(rc, Const):
                if rc.value != flat_and:
                    return Const(rc.value)  # absorbing constant
                changed = True
                continue  # neutral constant
            children.append(rc)
        if not changed:
            return node
        if not children:
            return Const(flat_and)
        if len(children) == 1:
            return children[0]
        return And(tuple(children)) if flat_and else Or(tuple(children))

    return rec(f)


def formula_variables(f: Formula) -> tuple[Variable, ...]:
    """Variables of f in first-occurrence order."""
    seen: dict[Variable, None] = {}

    def rec(node: Formula) -> None:
        if isinstance(node, Atom):
            seen.setdefault(node.variable)
        elif isinstance(node, Not):
            rec(node.operand)
        elif isinstance(node, (And, Or)):
            for c in node.operands:
                rec(c)

    rec(f)
    return tuple(seen)


def term_to_formula(term: Term) -> Formula:
    if len(term) == 0:
        return Const(True)
    parts = tuple(
        Atom(lit.variable) if lit.positive else Not(Atom(lit.variable)) for lit in term
    )
    return parts[0] if len(parts) == 1 else And(parts)
