"""Flat NNF circuit containers shared by the circuit-valued modules.

Nodes live in parallel int arrays, topologically ordered: children strictly
before parents, root last.

    kind[i]     one of FALSE/TRUE/LIT/AND/OR/DEC
    payload[i]  LIT: signed feature index; DEC: feature index; else 0
    children    CSR layout, children[child_off[i]:child_off[i+1]]

DEC is the binary decision gate (X and hi) or (not X and lo) used by
Decision-DNNF circuits.  Plain OR gates are n-ary and carry no variable.
"""

from __future__ import annotations

from array import array
from typing import Iterable

from . import kernels
from ._encoding import AND, DEC, FALSE, LIT, OR, TRUE
from .formula import FeatureSpace, Instance, Literal, Variable

KIND_NAMES = ("false", "true", "lit", "and", "or", "dec")


class BaseCircuit:
    __slots__ = ("space", "kind", "payload", "child_off", "children", "root")

    def __init__(self, space, kind, payload, child_off, children, root):
        assert len(kind) == len(payload) == len(child_off) - 1
        assert 0 <= root < len(kind)
        self.space = space
        self.kind = kind
        self.payload = payload
        self.child_off = child_off
        self.children = children
        self.root = root

    @property
    def node_count(self) -> int:
        return len(self.kind)

    def kind_of(self, i: int) -> int:
        return self.kind[i]

    def children_of(self, i: int) -> list[int]:
        return list(self.children[self.child_off[i] : self.child_off[i + 1]])

    def arrays(self):
        """The raw arrays in kernel-call order."""
        return self.kind, self.payload, self.child_off, self.children, self.root

    def evaluate(self, instance: Instance) -> int:
        assert instance.space is self.space or (
            tuple(v.name for v in instance.space) == tuple(v.name for v in self.space)
        )
        return kernels.nnf_eval(*self.arrays(), instance.kernel_values())

    def literal_codes(self) -> set[int]:
        codes = set()
        for i in range(self.node_count):
            if self.kind[i] == LIT:
                codes.add(self.payload[i])
            elif self.kind[i] == DEC:
                codes.add(self.payload[i])
                codes.add(-self.payload[i])
        return codes

    def literals(self) -> set[Literal]:
        vars_ = self.space.variables
        return {Literal(vars_[abs(c) - 1], c > 0) for c in self.literal_codes()}

    def variables(self) -> set[Variable]:
        return {lit.variable for lit in self.literals()}


class NnfCircuit(BaseCircuit):
    """General NNF: FALSE/TRUE/LIT/AND/OR nodes."""

    __slots__ = ()

    def is_monotone(self) -> Variable | None:
        """None when every feature occurs in one polarity; else a violator."""
        seen: dict[int, int] = {}
        for code in self.literal_codes():
            v = abs(code)
            if seen.get(v, code) != code:
                return self.space.variables[v - 1]
            seen[v] = code
        return None


class DecisionDnnf(BaseCircuit):
    """Decision-DNNF: FALSE/TRUE/LIT/AND/DEC nodes, decomposable ands."""

    __slots__ = ()

    @property
    def explicit_size(self) -> int:
        """Node count with every decision gate expanded to explicit
        or/and/literal gates, the size the .nnf serialization has."""
        lits: set[int] = set()
        gates = 0
        for i in range(self.node_count):
            k = self.kind[i]
            if k == LIT:
                lits.add(self.payload[i])
            elif k == DEC:
                gates += 3
                lits.add(self.payload[i])
                lits.add(-self.payload[i])
            else:
                gates += 1
        return gates + len(lits)

    def decision_count(self) -> int:
        return sum(1 for k in self.kind if k == DEC)


class Builder:
    """Bottom-up circuit builder.

    With intern=True structurally identical nodes are merged (leaves are
    always merged).  With fold=True and/or gates propagate constants and
    collapse single-child gates instead of being materialized.
    """

    def __init__(self, intern: bool = True, fold: bool = False):
        self._intern = intern
        self._fold = fold
        self.kind: list[int] = []
        self.payload: list[int] = []
        self.child_off: list[int] = [0]
        self.children: list[int] = []
        self.mask: list[int] = []  # feature bitmask per node
        self._table: dict[tuple, int] = {}

    def _emit(self, kind: int, payload: int, childs: tuple[int, ...]) -> int:
        key = (kind, payload, childs)
        if self._intern or kind in (FALSE, TRUE, LIT):
            got = self._table.get(key)
            if got is not None:
                return got
        node = len(self.kind)
        self.kind.append(kind)
        self.payload.append(payload)
        self.children.extend(childs)
        self.child_off.append(len(self.children))
        m = 0
        if kind == LIT:
            m = 1 << abs(payload)
        elif kind == DEC:
            m = (1 << payload) | self.mask[childs[0]] | self.mask[childs[1]]
        else:
            for c in childs:
                m |= self.mask[c]
        self.mask.append(m)
        if self._intern or kind in (FALSE, TRUE, LIT):
            self._table[key] = node
        return node

    def false_(self) -> int:
        return self._emit(FALSE, 0, ())

    def true_(self) -> int:
        return self._emit(TRUE, 0, ())

    def literal(self, code: int) -> int:
        assert code != 0
        return self._emit(LIT, code, ())

    def and_(self, child_ids: Iterable[int]) -> int:
        childs = tuple(child_ids)
        if self._fold:
            kept = []
            for c in childs:
                k = self.kind[c]
                if k == FALSE:
                    return self.false_()
                if k != TRUE:
                    kept.append(c)
            kept = list(dict.fromkeys(kept))
            if not kept:
                return self.true_()
            if len(kept) == 1:
                return kept[0]
            childs = tuple(kept)
        return self._emit(AND, 0, childs)

    def or_(self, child_ids: Iterable[int]) -> int:
        childs = tuple(child_ids)
        if self._fold:
            kept = []
            for c in childs:
                k = self.kind[c]
                if k == TRUE:
                    return self.true_()
                if k != FALSE:
                    kept.append(c)
            kept = list(dict.fromkeys(kept))
            if not kept:
                return self.false_()
            if len(kept) == 1:
                return kept[0]
            childs = tuple(kept)
        return self._emit(OR, 0, childs)

    def decision(self, var_index: int, hi: int, lo: int) -> int:
        assert var_index > 0
        return self._emit(DEC, var_index, (hi, lo))

    def node_mask(self, node: int) -> int:
        return self.mask[node]

    def finish(self, root: int, cls, space: FeatureSpace, **extra):
        assert self.kind, "empty circuit"
        return cls(
            space,
            array("i", self.kind),
            array("i", self.payload),
            array("i", self.child_off),
            array("i", self.children),
            root,
            **extra,
        )


def compact_arrays(kind, payload, child_off, children, root):
    """Drop nodes unreachable from the root, preserving relative order."""
    n = len(kind)
    keep = bytearray(n)
    keep[root] = 1
    for i in range(root, -1, -1):
        if keep[i]:
            for j in range(child_off[i], child_off[i + 1]):
                keep[children[j]] = 1
    if all(keep[: root + 1]) and root == n - 1:
        return kind, payload, child_off, children, root
    remap = [0] * n
    nk, np_, noff, nch = [], [], [0], []
    for i in range(root + 1):
        if not keep[i]:
            continue
        remap[i] = len(nk)
        nk.append(kind[i])
        np_.append(payload[i])
        for j in range(child_off[i], child_off[i + 1]):
            nch.append(remap[children[j]])
        noff.append(len(nch))
    return (
        array("i", nk),
        array("i", np_),
        array("i", noff),
        array("i", nch),
        remap[root],
    )
