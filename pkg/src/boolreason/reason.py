"""Complete-reason circuits.

The complete reason behind a decision is obtained from the Decision-DNNF
circuit of the made decision by adding a consensus input to every decision
gate and then filtering by the instance: literals the instance falsifies
become constant 0.  The result is monotone, mentions only literals of the
instance, and its prime implicants are exactly the sufficient reasons.

build_reason() fuses consensus, filtering and constant propagation into a
single kernel pass; staged=True materializes the intermediate circuits
instead (handy for debugging, same models).
"""

from __future__ import annotations

import hashlib
from array import array

from ._encoding import AND, DEC, FALSE, LIT, OR, TRUE
from . import kernels
from .circuit import Builder, DecisionDnnf, NnfCircuit, compact_arrays
from .errors import PreconditionError, InputError
from .formula import FeatureSpace, Formula, Instance, parse_instance
from .obdd import Obdd, compile_formula, to_decision_dnnf


class NegationUnavailable(PreconditionError):
    """Raised when a negative decision needs the complement circuit."""


class ReasonCircuit(NnfCircuit):
    """Monotone NNF circuit for the complete reason behind one decision.

    raw_node_count is the explicit size before filtering and constant
    propagation (the consensus stage); node_count is the simplified size.
    """

    __slots__ = ("instance", "raw_node_count")

    def __init__(self, space, kind, payload, child_off, children, root,
                 instance: Instance, raw_node_count: int | None = None):
        super().__init__(space, kind, payload, child_off, children, root)
        self.instance = instance
        self.raw_node_count = (
            raw_node_count if raw_node_count is not None else self.node_count
        )


class DecisionCase:
    """A classifier's decision on an instance, with the circuit of the
    decision actually made (the classifier itself for positive decisions,
    its complement for negative ones)."""

    __slots__ = ("space", "instance", "decision", "circuit")

    def __init__(self, space: FeatureSpace, instance: Instance, decision: int,
                 circuit: DecisionDnnf):
        if circuit.evaluate(instance) != 1:
            raise PreconditionError(
                "decision circuit does not evaluate to 1 on the instance"
            )
        self.space = space
        self.instance = instance
        self.decision = decision
        self.circuit = circuit


class Classifier:
    """Decision-DNNF circuits for a classifier and (usually) its complement."""

    def __init__(self, space: FeatureSpace, positive: DecisionDnnf,
                 negative: DecisionDnnf | None, source: str = "dsl",
                 formula: Formula | None = None, obdd: Obdd | None = None):
        self.space = space
        self.positive = positive
        self.negative = negative
        self.source = source
        self.formula = formula
        self.obdd = obdd

    @classmethod
    def from_formula(cls, f: Formula, space: FeatureSpace, order=None) -> "Classifier":
        d = compile_formula(f, space, order)
        return cls(
            space,
            to_decision_dnnf(d),
            to_decision_dnnf(d.negate()),
            source="dsl",
            formula=f,
            obdd=d,
        )

    @classmethod
    def from_obdd(cls, d: Obdd) -> "Classifier":
        return cls(
            d.space,
            to_decision_dnnf(d),
            to_decision_dnnf(d.negate()),
            source="obdd",
            obdd=d,
        )

    @classmethod
    def from_circuits(cls, positive: DecisionDnnf,
                      negative: DecisionDnnf | None = None) -> "Classifier":
        return cls(positive.space, positive, negative, source="nnf")

    def decide(self, instance: Instance) -> int:
        return self.positive.evaluate(instance)

    def case(self, instance: Instance) -> DecisionCase:
        decision = self.decide(instance)
        if decision == 1:
            return DecisionCase(self.space, instance, 1, self.positive)
        if self.negative is None:
            raise NegationUnavailable(
                f"decision on {instance} is negative and no circuit for the"
                " negated classifier is available; supply one to explain"
                " negative decisions"
            )
        return DecisionCase(self.space, instance, 0, self.negative)

    @property
    def sha256(self) -> str:
        """Digest of the canonical circuit text plus the feature names."""
        from .dnnf import dump_nnf

        h = hashlib.sha256()
        h.update(",".join(v.name for v in self.space.variables).encode())
        h.update(b"\n")
        h.update(dump_nnf(self.positive).encode())
        return h.hexdigest()


def consensus(c: DecisionDnnf) -> NnfCircuit:
    """Add the consensus input to every decision gate.

    Each decision gate on X with branches (hi, lo) becomes the explicit
    or-gate (X and hi) or (not X and lo) or (hi and lo).  Subcircuit sharing
    is preserved; the added gates are materialized one per decision gate.
    """
    b = Builder(intern=False, fold=False)
    image = [0] * c.node_count
    for i in range(c.node_count):
        k = c.kind[i]
        if k == FALSE:
            image[i] = b.false_()
        elif k == TRUE:
            image[i] = b.true_()
        elif k == LIT:
            image[i] = b.literal(c.payload[i])
        elif k == AND:
            image[i] = b.and_(image[ch] for ch in c.children_of(i))
        else:
            assert k == DEC
            v = c.payload[i]
            hi, lo = (image[ch] for ch in c.children_of(i))
            pos_branch = b.and_((b.literal(v), hi))
            neg_branch = b.and_((b.literal(-v), lo))
            middle = b.and_((hi, lo))
            image[i] = b.or_((pos_branch, neg_branch, middle))
    return b.finish(image[c.root], NnfCircuit, c.space)


def filter_by(c: NnfCircuit, instance: Instance) -> ReasonCircuit:
    """Replace every literal the instance falsifies with constant 0.

    Precondition: the circuit evaluates to 1 on the instance; otherwise the
    filtered circuit would not capture a made decision.
    """
    if c.evaluate(instance) != 1:
        raise PreconditionError(
            "cannot filter: the circuit evaluates to 0 on the instance"
        )
    b = Builder(intern=False, fold=False)
    image = [0] * c.node_count
    values = instance.kernel_values()
    for i in range(c.node_count):
        k = c.kind[i]
        if k == FALSE:
            image[i] = b.false_()
        elif k == TRUE:
            image[i] = b.true_()
        elif k == LIT:
            code = c.payload[i]
            agrees = (code > 0) == (values[abs(code)] == 1)
            image[i] = b.literal(code) if agrees else b.false_()
        elif k == AND:
            image[i] = b.and_(image[ch] for ch in c.children_of(i))
        elif k == OR:
            image[i] = b.or_(image[ch] for ch in c.children_of(i))
        else:
            raise PreconditionError("decision gates must be expanded before filtering")
    return b.finish(
        image[c.root], ReasonCircuit, c.space,
        instance=instance, raw_node_count=c.node_count,
    )


def simplify(r: ReasonCircuit) -> ReasonCircuit:
    """Propagate constants: no constant leaves remain unless the root is
    constant.  Models are unchanged; shapes are not otherwise normalized."""
    zero_actions = array("i", bytes(4 * (len(r.space) + 1)))
    kind, payload, child_off, children, root, _ = kernels.substitute(
        *r.arrays(), zero_actions, len(r.space)
    )
    kind, payload, child_off, children, root = compact_arrays(
        kind, payload, child_off, children, root
    )
    return ReasonCircuit(
        r.space, kind, payload, child_off, children, root,
        instance=r.instance, raw_node_count=r.raw_node_count,
    )


def build_reason(case: DecisionCase, staged: bool = False) -> ReasonCircuit:
    """The complete-reason circuit for a decision case.

    One fused kernel pass by default; staged=True materializes the
    consensus and filter stages separately (same models, for debugging).
    """
    raw_size = case.circuit.explicit_size + case.circuit.decision_count()
    if staged:
        cc = consensus(case.circuit)
        fc = filter_by(cc, case.instance)
        r = simplify(fc)
        r.raw_node_count = raw_size
        return r
    kind, payload, child_off, children, root, visited = kernels.reason_build(
        *case.circuit.arrays(), case.instance.kernel_values(), len(case.space)
    )
    assert visited <= case.circuit.node_count
    if kind[root] == FALSE:
        raise PreconditionError("decision circuit evaluates to 0 on the instance")
    kind, payload, child_off, children, root = compact_arrays(
        kind, payload, child_off, children, root
    )
    r = ReasonCircuit(
        case.space, kind, payload, child_off, children, root,
        instance=case.instance, raw_node_count=raw_size,
    )
    assert r.node_count <= 2 * case.circuit.explicit_size
    return r


def dump_reason(r: ReasonCircuit) -> str:
    """Serialize in the .nnf style with an rnnf header and the instance."""
    lines: list[str] = []
    edge_total = 0
    for i in range(r.node_count):
        k = r.kind[i]
        childs = r.children_of(i)
        if k == LIT:
            lines.append(f"L {r.payload[i]}")
        elif k == TRUE:
            lines.append("A 0")
        elif k == FALSE:
            lines.append("O 0 0")
        elif k == AND:
            edge_total += len(childs)
            lines.append("A " + " ".join([str(len(childs))] + [str(x) for x in childs]))
        else:
            assert k == OR
            edge_total += len(childs)
            lines.append(
                "O 0 " + " ".join([str(len(childs))] + [str(x) for x in childs])
            )
    header = f"rnnf {len(lines)} {edge_total} {len(r.space)}"
    comment = f"c instance {r.instance}"
    return "\n".join([header, comment] + lines) + "\n"


def parse_reason(text: str, space: FeatureSpace) -> ReasonCircuit:
    """Parse an rnnf dump back into a reason circuit."""
    header = None
    instance = None
    b = Builder(intern=True, fold=False)
    ids: list[int] = []
    edge_total = 0
    for lineno, line_text in enumerate(text.splitlines(), start=1):
        line = line_text.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) >= 3 and parts[1] == "instance" and instance is None:
                instance = parse_instance(parts[2], space)
            continue
        if header is None:
            if parts[0] != "rnnf" or len(parts) != 4:
                raise InputError(f"line {lineno}: expected 'rnnf <v> <e> <n>' header")
            header = tuple(int(p) for p in parts[1:])
            continue
        me = len(ids)
        if parts[0] == "L":
            code = int(parts[1])
            if code == 0 or abs(code) > len(space):
                raise InputError(f"line {lineno}: bad literal {parts[1]}")
            ids.append(b.literal(code))
        elif parts[0] in ("A", "O"):
            if parts[0] == "A":
                count = int(parts[1])
                childs = [int(p) for p in parts[2:]]
            else:
                if int(parts[1]) != 0:
                    raise InputError(
                        f"line {lineno}: decision or-gates are not allowed here"
                    )
                count = int(parts[2])
                childs = [int(p) for p in parts[3:]]
            if len(childs) != count:
                raise InputError(f"line {lineno}: gate arity mismatch")
            for ch in childs:
                if not 0 <= ch < me:
                    raise InputError(f"line {lineno}: child {ch} must precede node {me}")
            edge_total += count
            mapped = [ids[ch] for ch in childs]
            if parts[0] == "A":
                ids.append(b.true_() if not mapped else (
                    mapped[0] if len(mapped) == 1 else b.and_(mapped)))
            else:
                ids.append(b.false_() if not mapped else (
                    mapped[0] if len(mapped) == 1 else b.or_(mapped)))
        else:
            raise InputError(f"line {lineno}: unknown node type {parts[0]!r}")
    if header is None:
        raise InputError("missing rnnf header")
    if instance is None:
        raise InputError("missing 'c instance' line")
    if not ids:
        raise InputError("circuit has no nodes")
    if header[0] != len(ids):
        raise InputError(f"header declares {header[0]} nodes, file has {len(ids)}")
    if header[1] != edge_total:
        raise InputError(f"header declares {header[1]} edges, file has {edge_total}")
    r = b.finish(ids[-1], ReasonCircuit, space, instance=instance)
    violator = r.is_monotone()
    if violator is not None:
        raise InputError(f"feature {violator.name} occurs in both polarities")
    values = instance.kernel_values()
    for code in r.literal_codes():
        if (code > 0) != (values[abs(code)] == 1):
            raise InputError(
                f"literal {'' if code > 0 else '~'}{space.variables[abs(code) - 1].name}"
                " disagrees with the instance"
            )
    return r
