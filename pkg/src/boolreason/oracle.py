"""Exhaustive truth-table reference for every query, capped at 16 features.

Truth tables are ints: bit i holds the function's value on the assignment
whose truth-table index is i (feature at position p contributes bit p of
the index).  Prime implicants come from two independent methods, ascending
size enumeration and consensus closure of the minterm expansion, so the
engine can be checked against either and the methods against each other.
"""

from __future__ import annotations

from itertools import combinations, product as iproduct

from ._encoding import AND, DEC, FALSE, LIT, OR, TRUE
from .errors import PreconditionError
from .formula import (
    And,
    Atom,
    Const,
    FeatureSpace,
    Formula,
    Instance,
    Literal,
    Not,
    Or,
    Term,
    term_to_formula,
)

VARIABLE_LIMIT = 16


class CapExceeded(PreconditionError):
    def __init__(self, n: int):
        super().__init__(
            f"oracle supports at most {VARIABLE_LIMIT} features, space has {n}"
        )


_column_cache: dict[tuple[int, int], int] = {}


def _column(pos: int, n: int) -> int:
    """Truth-table mask of the feature at 0-based position pos."""
    got = _column_cache.get((pos, n))
    if got is None:
        period = 1 << pos
        block = ((1 << period) - 1) << period
        got = 0
        for start in range(0, 1 << n, period << 1):
            got |= block << start
        _column_cache[(pos, n)] = got
    return got


class TruthTable:
    __slots__ = ("space", "bits")

    def __init__(self, space: FeatureSpace, bits: int):
        if len(space) > VARIABLE_LIMIT:
            raise CapExceeded(len(space))
        self.space = space
        self.bits = bits

    @property
    def size(self) -> int:
        return 1 << len(self.space)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def value(self, instance: Instance) -> int:
        return (self.bits >> instance.index) & 1

    def complement(self) -> "TruthTable":
        return TruthTable(self.space, self.bits ^ self.full)

    def is_implicant(self, term: Term) -> bool:
        return self._term_mask(term) & ~self.bits == 0

    def _term_mask(self, term: Term) -> int:
        n = len(self.space)
        mask = self.full
        for lit in term:
            col = _column(lit.variable.index - 1, n)
            mask &= col if lit.positive else ~col & self.full
        return mask

    def depends_on(self, var) -> bool:
        n = len(self.space)
        pos = var.index - 1
        lo_mask = ~_column(pos, n) & self.full
        return ((self.bits >> (1 << pos)) & lo_mask) != (self.bits & lo_mask)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruthTable)
            and len(self.space) == len(other.space)
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((len(self.space), self.bits))


def truth_table(obj, space: FeatureSpace | None = None) -> TruthTable:
    """Build the truth table of a formula, circuit, OBDD or term."""
    if isinstance(obj, TruthTable):
        return obj
    if isinstance(obj, Term):
        assert space is not None, "terms need an explicit space"
        tt = TruthTable(space, 0)
        return TruthTable(space, tt._term_mask(obj))
    if isinstance(obj, Formula):
        assert space is not None, "formulas need an explicit space"
        return TruthTable(space, _formula_bits(obj, space))
    space = obj.space
    if len(space) > VARIABLE_LIMIT:
        raise CapExceeded(len(space))
    if hasattr(obj, "var"):  # an Obdd
        return TruthTable(space, _obdd_bits(obj))
    return TruthTable(space, _circuit_bits(obj))


def _formula_bits(f: Formula, space: FeatureSpace) -> int:
    n = len(space)
    if n > VARIABLE_LIMIT:
        raise CapExceeded(n)
    full = (1 << (1 << n)) - 1

    def rec(node: Formula) -> int:
        if isinstance(node, Const):
            return full if node.value else 0
        if isinstance(node, Atom):
            return _column(node.variable.index - 1, n)
        if isinstance(node, Not):
            return rec(node.operand) ^ full
        if isinstance(node, And):
            bits = full
            for c in node.operands:
                bits &= rec(c)
            return bits
        assert isinstance(node, Or)
        bits = 0
        for c in node.operands:
            bits |= rec(c)
        return bits

    return rec(f)


def _circuit_bits(c) -> int:
    n = len(c.space)
    full = (1 << (1 << n)) - 1
    bits = [0] * c.node_count
    for i in range(c.node_count):
        k = c.kind[i]
        if k == FALSE:
            b = 0
        elif k == TRUE:
            b = full
        elif k == LIT:
            code = c.payload[i]
            col = _column(abs(code) - 1, n)
            b = col if code > 0 else col ^ full
        elif k == AND:
            b = full
            for ch in c.children_of(i):
                b &= bits[ch]
        elif k == OR:
            b = 0
            for ch in c.children_of(i):
                b |= bits[ch]
        else:  # DEC
            col = _column(c.payload[i] - 1, n)
            hi, lo = c.children_of(i)
            b = (col & bits[hi]) | (~col & full & bits[lo])
        bits[i] = b
    return bits[c.root]


def _obdd_bits(d) -> int:
    n = len(d.space)
    full = (1 << (1 << n)) - 1
    bits = [0, full] + [0] * (len(d.var) - 2)
    for i in range(2, len(d.var)):
        col = _column(d.var[i] - 1, n)
        bits[i] = (col & bits[d.hi[i]]) | (~col & full & bits[d.lo[i]])
    out = bits[d.root]
    return out ^ full if d.negated else out


# memo keyed by space identity, not TruthTable equality: equal bit patterns
# over distinct spaces must not share Terms (their Variable objects differ).
# The value keeps the space alive so ids are never reused.
_pi_cache: dict[tuple[int, int], tuple[FeatureSpace, frozenset[Term]]] = {}


def all_prime_implicants(obj, space: FeatureSpace | None = None) -> frozenset[Term]:
    """Prime implicants by ascending-size enumeration over the support
    features, pruning terms subsumed by an already-found implicant."""
    tt = truth_table(obj, space)
    space = tt.space
    key = (id(space), tt.bits)
    hit = _pi_cache.get(key)
    if hit is not None:
        return hit[1]
    result = _enumerate_prime_implicants(tt)
    _pi_cache[key] = (space, result)
    return result


def _enumerate_prime_implicants(tt: TruthTable) -> frozenset[Term]:
    space = tt.space
    if tt.bits == 0:
        return frozenset()
    support = [v for v in space.variables if tt.depends_on(v)]
    if tt.bits == tt.full:
        return frozenset((Term(),))
    found: list[Term] = []
    for size in range(1, len(support) + 1):
        for vars_ in combinations(support, size):
            for polarity in iproduct((True, False), repeat=size):
                term = Term(Literal(v, p) for v, p in zip(vars_, polarity))
                if any(prev.subsumes(term) for prev in found):
                    continue
                if tt.is_implicant(term):
                    found.append(term)
    return frozenset(found)


def prime_implicants_by_consensus(
    obj, space: FeatureSpace | None = None
) -> frozenset[Term]:
    """Prime implicants by consensus closure of the minterm expansion.

    Independent of the enumeration method; practical only for small spaces,
    so the cap is tighter here.
    """
    tt = truth_table(obj, space)
    space = tt.space
    n = len(space)
    if n > 12:
        raise CapExceeded(n)
    if tt.bits == tt.full:
        return frozenset((Term(),))

    # terms as (mask of mentioned features, bits of their polarities)
    minterms = set()
    for idx in range(tt.size):
        if (tt.bits >> idx) & 1:
            minterms.add(((1 << n) - 1, idx))
    terms = set(minterms)
    frontier = set(minterms)
    while frontier:
        new: set[tuple[int, int]] = set()
        for mask_a, bits_a in frontier:
            for mask_b, bits_b in terms:
                if mask_a != mask_b:
                    continue
                diff = bits_a ^ bits_b
                if diff and (diff & (diff - 1)) == 0:  # single clashing feature
                    merged = (mask_a & ~diff, bits_a & ~diff)
                    if merged not in terms:
                        new.add(merged)
        terms |= new
        frontier = new

    prime = [
        (mask, bits)
        for mask, bits in terms
        if not any(
            other_mask != mask
            and mask & other_mask == other_mask
            and bits & other_mask == other_bits
            for other_mask, other_bits in terms
        )
    ]
    vars_ = space.variables
    return frozenset(
        Term(
            Literal(vars_[p], bool((bits >> p) & 1))
            for p in range(n)
            if (mask >> p) & 1
        )
        for mask, bits in prime
    )


def oracle_sufficient_reasons(obj, alpha: Instance, space=None) -> frozenset[Term]:
    """Prime implicants of the made decision that alpha satisfies."""
    tt = truth_table(obj, space if space is not None else getattr(obj, "space", alpha.space))
    decided = tt if tt.value(alpha) else tt.complement()
    return frozenset(
        t for t in all_prime_implicants(decided) if t.is_property_of(alpha)
    )


def oracle_complete_reason(obj, alpha: Instance, space=None) -> Formula:
    """Disjunction of all sufficient reasons, as a formula."""
    reasons = sorted(oracle_sufficient_reasons(obj, alpha, space), key=lambda t: t.key)
    if not reasons:
        return Const(False)
    if any(len(t) == 0 for t in reasons):
        return Const(True)
    parts = tuple(term_to_formula(t) for t in reasons)
    return parts[0] if len(parts) == 1 else Or(parts)


def oracle_necessary_property(obj, alpha: Instance, space=None) -> Term:
    """Intersection of all sufficient reasons."""
    reasons = oracle_sufficient_reasons(obj, alpha, space)
    shared = None
    for t in reasons:
        shared = t.codes if shared is None else shared & t.codes
    assert shared is not None, "a made decision has at least one sufficient reason"
    vars_ = alpha.space.variables
    return Term(Literal(vars_[abs(c) - 1], c > 0) for c in shared)


def oracle_decision_bias(obj, alpha: Instance, space=None) -> bool:
    """Can flipping protected features alone flip this decision?

    With no protected features the only candidate is alpha itself, so False.
    """
    sp = space if space is not None else alpha.space
    tt = truth_table(obj, sp)
    protected = [v.index - 1 for v in sp.protected]
    base = alpha.index
    original = (tt.bits >> base) & 1
    for combo in range(1, 1 << len(protected)):
        flips = 0
        for j, pos in enumerate(protected):
            if (combo >> j) & 1:
                flips |= 1 << pos
        if ((tt.bits >> (base ^ flips)) & 1) != original:
            return True
    return False


def oracle_classifier_bias(obj, space: FeatureSpace | None = None) -> bool:
    """True when some instance's decision is biased (full enumeration)."""
    tt = truth_table(obj, space)
    sp = tt.space
    protected = [v.index - 1 for v in sp.protected]
    flip_masks = []
    for combo in range(1, 1 << len(protected)):
        flips = 0
        for j, pos in enumerate(protected):
            if (combo >> j) & 1:
                flips |= 1 << pos
        flip_masks.append(flips)
    for base in range(tt.size):
        original = (tt.bits >> base) & 1
        for flips in flip_masks:
            if ((tt.bits >> (base ^ flips)) & 1) != original:
                return True
    return False
