"""Reduced ordered BDD engine.

Compiles DSL formulas into canonical OBDDs (hash-consed apply/mk, memo
tables discarded after the build), negates in constant time via a flag,
exports to Decision-DNNF, and reads/writes a small text format:

    obdd <numvars> <numnodes>
    n <id> <varindex> <hi-id> <lo-id>
    root <id>

Ids 0 and 1 are the reserved sinks.  Node ids are canonical: equal
functions over the same order produce array-identical objects.
"""

from __future__ import annotations

from array import array

from .circuit import Builder, DecisionDnnf
from .errors import InputError
from .formula import (
    And,
    Atom,
    Const,
    FeatureSpace,
    Formula,
    Instance,
    Not,
    Or,
    Variable,
    formula_variables,
)


class Obdd:
    """An immutable reduced OBDD; `negated` swaps the sinks virtually."""

    __slots__ = ("space", "order", "var", "hi", "lo", "root", "negated")

    def __init__(self, space, order, var, hi, lo, root, negated=False):
        self.space = space
        self.order = tuple(order)
        self.var = var  # array('i'); entries 0/1 are sink placeholders
        self.hi = hi
        self.lo = lo
        self.root = root
        self.negated = negated

    @property
    def node_count(self) -> int:
        return len(self.var) - 2

    def evaluate(self, instance: Instance) -> int:
        cur = self.root
        var, hi, lo = self.var, self.hi, self.lo
        values = instance.kernel_values()
        while cur >= 2:
            cur = hi[cur] if values[var[cur]] else lo[cur]
        bit = 1 if cur == 1 else 0
        return 1 - bit if self.negated else bit

    def negate(self) -> "Obdd":
        return Obdd(
            self.space, self.order, self.var, self.hi, self.lo, self.root,
            not self.negated,
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Obdd)
            and self.space is other.space
            and self.order == other.order
            and self.negated == other.negated
            and self.root == other.root
            and self.var == other.var
            and self.hi == other.hi
            and self.lo == other.lo
        )

    def __hash__(self) -> int:
        return hash((tuple(self.var), tuple(self.hi), tuple(self.lo), self.root, self.negated))

    def validate(self) -> None:
        """Re-check orderedness, reducedness and id sanity after a build."""
        level = {v.index: pos for pos, v in enumerate(self.order)}
        seen: set[tuple[int, int, int]] = set()
        n = len(self.var)
        assert 0 <= self.root < n
        for i in range(2, n):
            v, h, l = self.var[i], self.hi[i], self.lo[i]
            assert v in level, f"node {i} tests undeclared feature index {v}"
            assert h != l, f"node {i} is redundant"
            assert 0 <= h < i and 0 <= l < i, f"node {i} children out of order"
            for child in (h, l):
                if child >= 2:
                    assert level[self.var[child]] > level[v], (
                        f"order violated between node {i} and {child}"
                    )
            triple = (v, h, l)
            assert triple not in seen, f"node {i} duplicates an earlier node"
            seen.add(triple)


class _Builder:
    """Construction-local unique table and apply/negate memos."""

    def __init__(self):
        self.var = [0, 0]  # per-id level during construction
        self.hi = [0, 0]
        self.lo = [0, 0]
        self.unique: dict[tuple[int, int, int], int] = {}
        self.not_memo: dict[int, int] = {0: 1, 1: 0}

    def mk(self, level: int, hi: int, lo: int) -> int:
        if hi == lo:
            return hi
        key = (level, hi, lo)
        node = self.unique.get(key)
        if node is None:
            node = len(self.var)
            self.var.append(level)
            self.hi.append(hi)
            self.lo.append(lo)
            self.unique[key] = node
        return node

    def level(self, node: int) -> int:
        return self.var[node] if node >= 2 else 1 << 30

    def apply_not(self, a: int) -> int:
        got = self.not_memo.get(a)
        if got is None:
            got = self.mk(self.var[a], self.apply_not(self.hi[a]), self.apply_not(self.lo[a]))
            self.not_memo[a] = got
        return got

    def apply(self, op: str, a: int, b: int, memo: dict) -> int:
        if op == "and":
            if a == 0 or b == 0:
                return 0
            if a == 1:
                return b
            if b == 1:
                return a
        else:
            if a == 1 or b == 1:
                return 1
            if a == 0:
                return b
            if b == 0:
                return a
        if a == b:
            return a
        key = (a, b) if a <= b else (b, a)
        got = memo.get(key)
        if got is None:
            la, lb = self.level(a), self.level(b)
            top = min(la, lb)
            a_hi, a_lo = (self.hi[a], self.lo[a]) if la == top else (a, a)
            b_hi, b_lo = (self.hi[b], self.lo[b]) if lb == top else (b, b)
            got = self.mk(
                top,
                self.apply(op, a_hi, b_hi, memo),
                self.apply(op, a_lo, b_lo, memo),
            )
            memo[key] = got
        return got


def _canonical(builder: _Builder, root: int, order) -> tuple:
    """Renumber the subgraph under root: post-order, hi before lo, so
    children always get smaller ids than parents."""
    var_out = array("i", (0, 0))
    hi_out = array("i", (0, 0))
    lo_out = array("i", (0, 0))
    if root < 2:
        return var_out, hi_out, lo_out, root
    idmap: dict[int, int] = {}
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        node, ready = stack.pop()
        if node in idmap:
            continue  # resolved via another parent in the meantime
        if ready:
            h, l = builder.hi[node], builder.lo[node]
            idmap[node] = len(var_out)
            # construction levels back to feature indices
            var_out.append(order[builder.var[node]].index)
            hi_out.append(idmap[h] if h >= 2 else h)
            lo_out.append(idmap[l] if l >= 2 else l)
            continue
        stack.append((node, True))
        # a node may be pushed once per parent; the idmap check above
        # makes the extra visits no-ops, so this stays linear in edges
        for child in (builder.lo[node], builder.hi[node]):
            if child >= 2 and child not in idmap:
                stack.append((child, False))
    return var_out, hi_out, lo_out, idmap[root]


def compile_formula(
    f: Formula, space: FeatureSpace, order: tuple[Variable, ...] | None = None
) -> Obdd:
    """Compile a formula into the canonical reduced OBDD for the order
    (default: declaration order of the space)."""
    if order is None:
        order = space.variables
    else:
        order = tuple(order)
    level_of = {v.index: pos for pos, v in enumerate(order)}
    missing = [v.name for v in formula_variables(f) if v.index not in level_of]
    if missing:
        raise InputError("order is missing features: " + ", ".join(missing))

    b = _Builder()
    memo: dict = {}
    apply_memos: dict[str, dict] = {}

    def rec(node: Formula) -> int:
        if isinstance(node, Const):
            return 1 if node.value else 0
        if isinstance(node, Atom):
            return b.mk(level_of[node.variable.index], 1, 0)
        got = memo.get(node)
        if got is not None:
            return got
        if isinstance(node, Not):
            out = b.apply_not(rec(node.operand))
        elif isinstance(node, And):
            out = rec(node.operands[0])
            for child in node.operands[1:]:
                out = b.apply("and", out, rec(child), apply_memos.setdefault("and", {}))
        else:
            assert isinstance(node, Or)
            out = rec(node.operands[0])
            for child in node.operands[1:]:
                out = b.apply("or", out, rec(child), apply_memos.setdefault("or", {}))
        memo[node] = out
        return out

    root = rec(f)
    var, hi, lo, new_root = _canonical(b, root, order)
    d = Obdd(space, order, var, hi, lo, new_root)
    d.validate()
    return d


def to_decision_dnnf(d: Obdd) -> DecisionDnnf:
    """Expand every node into a decision gate; sinks become constants."""
    b = Builder(intern=True, fold=False)
    if d.root < 2:
        value = (d.root == 1) != d.negated
        single = b.true_() if value else b.false_()
        return b.finish(single, DecisionDnnf, d.space)
    img = [0] * len(d.var)
    img[0] = b.true_() if d.negated else b.false_()
    img[1] = b.false_() if d.negated else b.true_()
    for i in range(2, len(d.var)):
        img[i] = b.decision(d.var[i], img[d.hi[i]], img[d.lo[i]])
    return b.finish(img[d.root], DecisionDnnf, d.space)


def dump_obdd(d: Obdd) -> str:
    """Serialize; a pending negation flag is materialized by swapping sinks."""

    def fix(node: int) -> int:
        if d.negated and node < 2:
            return 1 - node
        return node

    lines = [f"obdd {len(d.space)} {d.node_count}"]
    for i in range(2, len(d.var)):
        lines.append(f"n {i} {d.var[i]} {fix(d.hi[i])} {fix(d.lo[i])}")
    lines.append(f"root {fix(d.root)}")
    return "\n".join(lines) + "\n"


def parse_obdd(text: str, space: FeatureSpace) -> Obdd:
    """Parse the text format and renumber canonically.

    The variable order is recovered from the edges (it need not follow
    declaration order); reducedness and id sanity are checked.
    """
    header = None
    nodes: dict[int, tuple[int, int, int]] = {}
    root = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "obdd" or len(parts) != 3:
                raise InputError(f"line {lineno}: expected 'obdd <vars> <nodes>' header")
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise InputError(f"line {lineno}: bad header counts") from None
            if header[0] != len(space):
                raise InputError(
                    f"line {lineno}: file declares {header[0]} features, space has {len(space)}"
                )
            continue
        if parts[0] == "n":
            if len(parts) != 5:
                raise InputError(f"line {lineno}: expected 'n <id> <var> <hi> <lo>'")
            try:
                nid, v, h, l = (int(p) for p in parts[1:])
            except ValueError:
                raise InputError(f"line {lineno}: ids must be integers") from None
            if nid < 2:
                raise InputError(f"line {lineno}: ids 0 and 1 are reserved sinks")
            if nid in nodes:
                raise InputError(f"line {lineno}: duplicate node id {nid}")
            if not 1 <= v <= len(space):
                raise InputError(f"line {lineno}: feature index {v} out of range")
            nodes[nid] = (v, h, l)
        elif parts[0] == "root":
            if len(parts) != 2 or root is not None:
                raise InputError(f"line {lineno}: bad root line")
            root = int(parts[1])
        else:
            raise InputError(f"line {lineno}: unknown line {parts[0]!r}")
    if header is None:
        raise InputError("missing obdd header")
    if root is None:
        raise InputError("missing root line")
    if len(nodes) != header[1]:
        raise InputError(f"header declares {header[1]} nodes, file has {len(nodes)}")
    if root >= 2 and root not in nodes:
        raise InputError(f"root {root} is not declared")

    seen_triples: set[tuple[int, int, int]] = set()
    precedes: set[tuple[int, int]] = set()  # (parent feature, child feature)
    for nid, (v, h, l) in nodes.items():
        if h == l:
            raise InputError(f"node {nid} is redundant (equal children)")
        for child in (h, l):
            if child >= 2:
                if child not in nodes:
                    raise InputError(f"node {nid} references undeclared node {child}")
                if nodes[child][0] == v:
                    raise InputError(f"node {nid} repeats feature index {v} below itself")
                precedes.add((v, nodes[child][0]))
        triple = (v, h, l)
        if triple in seen_triples:
            raise InputError(f"node {nid} duplicates another node (not reduced)")
        seen_triples.add(triple)

    # recover the variable order implied by the edges (Kahn, smallest
    # feature index first among the unconstrained)
    indices = [v.index for v in space.variables]
    indegree = {i: 0 for i in indices}
    before: dict[int, list[int]] = {i: [] for i in indices}
    for u, w in precedes:
        before[u].append(w)
        indegree[w] += 1
    order_idx: list[int] = []
    ready = sorted(i for i in indices if indegree[i] == 0)
    while ready:
        u = ready.pop(0)
        order_idx.append(u)
        changed = False
        for w in sorted(before[u]):
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
                changed = True
        if changed:
            ready.sort()
    if len(order_idx) != len(indices):
        raise InputError("node lines imply a cyclic variable order")
    vars_by_index = {v.index: v for v in space.variables}
    order = tuple(vars_by_index[i] for i in order_idx)

    # rebuild through the canonical renumbering used by the compiler
    b = _Builder()
    level_of = {v.index: pos for pos, v in enumerate(order)}
    idmap = {0: 0, 1: 1}

    def build(nid: int) -> int:
        got = idmap.get(nid)
        if got is not None:
            return got
        v, h, l = nodes[nid]
        out = b.mk(level_of[v], build(h), build(l))
        idmap[nid] = out
        return out

    new_root = build(root)  # recursion depth is bounded by the order length
    var, hi, lo, new_root = _canonical(b, new_root, order)
    d = Obdd(space, order, var, hi, lo, new_root)
    d.validate()
    return d
