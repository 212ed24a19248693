"""Decision-DNNF ingestion: the .nnf exchange format and validation.

File format (c2d conventions):

    nnf <v> <e> <n>          header: node lines, edge refs, variable count
    L <lit>                  literal, signed variable index
    A <c> <i1> ... <ic>      and-gate; A 0 is the constant true
    O <j> 2 <i1> <i2>        decision or-gate on variable j (j != 0)
    O 0 0                    the constant false

Node ids are 0-based line positions; children must precede parents and the
root is the last node.  An optional varmap (lines "index name") renames
file variable indices onto the feature space.

Or-gates must be decisions: each branch is the decision literal itself,
normalized as literal AND true, or an and-gate containing it.  Anything
else is rejected with a Violation rather than repaired.  Nodes unreachable
from the root are dropped during parsing, so parse -> dump -> parse is
structurally idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._encoding import AND, DEC, FALSE, LIT, TRUE
from .circuit import Builder, DecisionDnnf
from .errors import InputError
from .formula import FeatureSpace, Instance, Variable


class DnnfError(InputError):
    """Malformed .nnf text."""


@dataclass(frozen=True)
class Violation:
    """A structural rule the circuit breaks: which rule, where."""

    rule: str  # "decision-form" | "decomposability"
    node: int
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} violation at node {self.node}: {self.detail}"


class DnnfInvalidError(DnnfError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def parse_varmap(text: str) -> dict[int, str]:
    """Lines of "index name" mapping file variable indices to feature names."""
    mapping: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"varmap line {lineno}: expected 'index name'")
        try:
            idx = int(parts[0])
        except ValueError:
            raise InputError(f"varmap line {lineno}: bad index {parts[0]!r}") from None
        if idx in mapping:
            raise InputError(f"varmap line {lineno}: duplicate index {idx}")
        mapping[idx] = parts[1]
    return mapping


def parse_nnf(
    text: str, space: FeatureSpace, varmap: dict[int, Variable] | None = None
) -> DecisionDnnf:
    """Parse .nnf text into a Decision-DNNF circuit over the space.

    varmap maps file variable indices to features; by default index i is
    the space's i-th feature.
    """
    if varmap is None:
        varmap = {v.index: v for v in space.variables}

    header = None
    raw: list[tuple] = []  # ("L", code) | ("A", childs) | ("O", j, childs)
    edge_total = 0
    for lineno, line_text in enumerate(text.splitlines(), start=1):
        line = line_text.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "nnf" or len(parts) != 4:
                raise DnnfError(f"line {lineno}: expected 'nnf <v> <e> <n>' header")
            try:
                header = tuple(int(p) for p in parts[1:])
            except ValueError:
                raise DnnfError(f"line {lineno}: bad header counts") from None
            continue
        me = len(raw)
        if parts[0] == "L":
            if len(parts) != 2:
                raise DnnfError(f"line {lineno}: expected 'L <lit>'")
            code = int(parts[1])
            if code == 0:
                raise DnnfError(f"line {lineno}: literal 0 is not allowed")
            var = varmap.get(abs(code))
            if var is None:
                raise DnnfError(f"line {lineno}: unmapped variable index {abs(code)}")
            raw.append(("L", var.index if code > 0 else -var.index))
        elif parts[0] == "A":
            try:
                count = int(parts[1])
                childs = [int(p) for p in parts[2:]]
            except (ValueError, IndexError):
                raise DnnfError(f"line {lineno}: malformed and-gate") from None
            if len(childs) != count:
                raise DnnfError(f"line {lineno}: and-gate arity mismatch")
            for c in childs:
                if not 0 <= c < me:
                    raise DnnfError(
                        f"line {lineno}: child {c} must precede node {me}"
                    )
            edge_total += count
            raw.append(("A", childs))
        elif parts[0] == "O":
            try:
                j = int(parts[1])
                count = int(parts[2])
                childs = [int(p) for p in parts[3:]]
            except (ValueError, IndexError):
                raise DnnfError(f"line {lineno}: malformed or-gate") from None
            if len(childs) != count:
                raise DnnfError(f"line {lineno}: or-gate arity mismatch")
            for c in childs:
                if not 0 <= c < me:
                    raise DnnfError(
                        f"line {lineno}: child {c} must precede node {me}"
                    )
            edge_total += count
            if count == 0:
                if j != 0:
                    raise DnnfError(f"line {lineno}: empty or-gate with a variable")
                raw.append(("O", 0, []))
            else:
                if j == 0:
                    raise DnnfInvalidError(
                        Violation("decision-form", me, "or-gate carries no decision variable")
                    )
                if count != 2:
                    raise DnnfInvalidError(
                        Violation("decision-form", me, "or-gate must have exactly two inputs")
                    )
                var = varmap.get(j)
                if var is None:
                    raise DnnfError(f"line {lineno}: unmapped variable index {j}")
                raw.append(("O", var.index, childs))
        else:
            raise DnnfError(f"line {lineno}: unknown node type {parts[0]!r}")

    if header is None:
        raise DnnfError("missing nnf header")
    if not raw:
        raise DnnfError("circuit has no nodes")
    if header[0] != len(raw):
        raise DnnfError(f"header declares {header[0]} nodes, file has {len(raw)}")
    if header[1] != edge_total:
        raise DnnfError(f"header declares {header[1]} edges, file has {edge_total}")

    root = len(raw) - 1
    return _from_raw(raw, root, space)


def _branch_parts(raw, branch: int, feature: int):
    """Split an or-branch into (polarity, part node ids).

    The branch is either the decision literal itself or an and-gate with
    exactly one occurrence of it; returns None when it is neither.
    """
    node = raw[branch]
    if node[0] == "L" and abs(node[1]) == feature:
        return (node[1] > 0, [])
    if node[0] == "A":
        polarity = None
        parts = []
        for c in node[1]:
            child = raw[c]
            if child[0] == "L" and abs(child[1]) == feature:
                if polarity is not None:
                    return None  # the decision literal may appear once only
                polarity = child[1] > 0
            else:
                parts.append(c)
        if polarity is None:
            return None
        return (polarity, parts)
    return None


def _check_disjoint(b: Builder, childs, node: int, space: FeatureSpace) -> None:
    seen_mask = 0
    for c in childs:
        m = b.node_mask(c)
        if seen_mask & m:
            shared = (seen_mask & m).bit_length() - 1
            raise DnnfInvalidError(
                Violation(
                    "decomposability",
                    node,
                    f"children share feature {space.variables[shared - 1].name}",
                )
            )
        seen_mask |= m


def _from_raw(raw, root: int, space: FeatureSpace) -> DecisionDnnf:
    """Translate raw file nodes into a DEC-form circuit.

    Only nodes the root needs as standalone inputs get images: or-branch
    and-gates dissolve into their decision gate, so they are skipped unless
    something else references them.
    """
    n = len(raw)
    need = bytearray(n)
    need[root] = 1
    branch_info: dict[int, tuple] = {}
    for i in range(n - 1, -1, -1):
        if not need[i]:
            continue
        node = raw[i]
        if node[0] == "A":
            for c in node[1]:
                need[c] = 1
        elif node[0] == "O" and node[2]:
            feature = node[1]
            sides = []
            for branch in node[2]:
                split = _branch_parts(raw, branch, feature)
                if split is None:
                    raise DnnfInvalidError(
                        Violation(
                            "decision-form",
                            i,
                            "branch does not carry the decision literal",
                        )
                    )
                for p in split[1]:
                    need[p] = 1
                sides.append(split)
            if sides[0][0] == sides[1][0]:
                raise DnnfInvalidError(
                    Violation("decision-form", i, "branches test the same polarity")
                )
            branch_info[i] = tuple(sides)

    b = Builder(intern=True, fold=False)
    image = [-1] * n
    for i in range(n):
        if not need[i]:
            continue
        node = raw[i]
        if node[0] == "L":
            image[i] = b.literal(node[1])
        elif node[0] == "A":
            childs = [image[c] for c in node[1]]
            _check_disjoint(b, childs, i, space)
            image[i] = b.true_() if not childs else (
                childs[0] if len(childs) == 1 else b.and_(childs)
            )
        else:  # or-gate
            feature = node[1]
            if not node[2]:
                image[i] = b.false_()
                continue
            sides = branch_info[i]

            def side_image(split):
                parts = [image[p] for p in split[1]]
                _check_disjoint(b, parts, i, space)
                if not parts:
                    return b.true_()
                if len(parts) == 1:
                    return parts[0]
                return b.and_(parts)

            hi = side_image(sides[0] if sides[0][0] else sides[1])
            lo = side_image(sides[1] if sides[0][0] else sides[0])
            for branch_img in (hi, lo):
                if b.node_mask(branch_img) & (1 << feature):
                    raise DnnfInvalidError(
                        Violation(
                            "decomposability",
                            i,
                            f"decision feature {space.variables[feature - 1].name}"
                            " reappears below the gate",
                        )
                    )
            image[i] = b.decision(feature, hi, lo)

    return b.finish(image[root], DecisionDnnf, space)


def validate(c: DecisionDnnf) -> Violation | None:
    """Recheck decomposability and decision form on a finished circuit."""
    masks = [0] * c.node_count
    for i in range(c.node_count):
        k = c.kind[i]
        childs = c.children_of(i)
        for child in childs:
            if child >= i:
                return Violation("topology", i, "children must precede parents")
        if k == LIT:
            masks[i] = 1 << abs(c.payload[i])
        elif k == AND:
            m = 0
            for child in childs:
                if m & masks[child]:
                    shared = (m & masks[child]).bit_length() - 1
                    return Violation(
                        "decomposability",
                        i,
                        f"children share feature {c.space.variables[shared - 1].name}",
                    )
                m |= masks[child]
            masks[i] = m
        elif k == DEC:
            if len(childs) != 2:
                return Violation("decision-form", i, "decision gate needs two branches")
            v = c.payload[i]
            m = masks[childs[0]] | masks[childs[1]]
            if m & (1 << v):
                return Violation(
                    "decomposability",
                    i,
                    f"decision feature {c.space.variables[v - 1].name} reappears below the gate",
                )
            masks[i] = m | (1 << v)
        elif k not in (TRUE, FALSE):
            return Violation("decision-form", i, "plain or-gates are not allowed")
    return None


def evaluate(c: DecisionDnnf, instance: Instance) -> int:
    return c.evaluate(instance)


def dump_nnf(c: DecisionDnnf) -> str:
    """Serialize with decision gates expanded to literal/and/or lines."""
    lines: list[str] = []
    edge_total = 0
    file_id: dict[int, int] = {}  # internal node -> line id
    lit_line: dict[int, int] = {}  # literal code -> line id

    def lit_id(code: int) -> int:
        got = lit_line.get(code)
        if got is None:
            got = len(lines)
            lines.append(f"L {code}")
            lit_line[code] = got
        return got

    for i in range(c.node_count):
        k = c.kind[i]
        if k == LIT:
            file_id[i] = lit_id(c.payload[i])
        elif k == TRUE:
            file_id[i] = len(lines)
            lines.append("A 0")
        elif k == FALSE:
            file_id[i] = len(lines)
            lines.append("O 0 0")
        elif k == AND:
            childs = [file_id[ch] for ch in c.children_of(i)]
            edge_total += len(childs)
            file_id[i] = len(lines)
            lines.append("A " + " ".join([str(len(childs))] + [str(x) for x in childs]))
        else:  # DEC
            v = c.payload[i]
            hi, lo = c.children_of(i)
            pos_lit = lit_id(v)
            neg_lit = lit_id(-v)
            hi_branch = len(lines)
            lines.append(f"A 2 {pos_lit} {file_id[hi]}")
            lo_branch = len(lines)
            lines.append(f"A 2 {neg_lit} {file_id[lo]}")
            file_id[i] = len(lines)
            lines.append(f"O {v} 2 {hi_branch} {lo_branch}")
            edge_total += 6
    header = f"nnf {len(lines)} {edge_total} {len(c.space)}"
    return "\n".join([header] + lines) + "\n"
