import random

import pytest

from boolreason import PreconditionError
from boolreason.formula import parse_formula
from boolreason.obdd import compile_formula, to_decision_dnnf
from boolreason.oracle import truth_table
from boolreason.reason import (
    DecisionCase,
    NegationUnavailable,
    build_reason,
    consensus,
    dump_reason,
    filter_by,
    parse_reason,
    simplify,
)

from helpers import (
    admission1,
    every_instance,
    instance,
    make_classifier,
    random_formula,
    random_space,
)


def greg_case():
    c = admission1()
    return c, c.case(instance("E,~F,~G,W", c))


def test_reason_for_positive_decision():
    c, case = greg_case()
    r = build_reason(case)
    want = parse_formula("E & (~F | W)", c.space)
    assert truth_table(r) == truth_table(want, c.space)
    assert r.node_count == 8
    assert r.raw_node_count == 26


def test_reason_for_negative_decision():
    c = admission1()
    case = c.case(instance("~E,~F,~G,W", c))
    assert case.decision == 0
    r = build_reason(case)
    want = parse_formula("~E", c.space)
    assert truth_table(r) == truth_table(want, c.space)


def test_negative_decision_needs_negated_circuit():
    from boolreason.reason import Classifier

    c = admission1()
    bare = Classifier.from_circuits(c.positive)
    assert bare.decide(instance("~E,F,G,W", c)) == 0
    with pytest.raises(NegationUnavailable):
        bare.case(instance("~E,F,G,W", c))


def test_staged_equals_fused():
    rng = random.Random(31)
    for _ in range(60):
        sp = random_space(rng, rng.randint(1, 5))
        f = random_formula(rng, sp, depth=4)
        c = make_classifier_from(f, sp)
        for alpha in every_instance(sp):
            case = c.case(alpha)
            fused = build_reason(case)
            staged = build_reason(case, staged=True)
            assert truth_table(fused) == truth_table(staged)
            assert fused.raw_node_count == staged.raw_node_count


def make_classifier_from(f, sp):
    from boolreason.reason import Classifier

    return Classifier.from_formula(f, sp)


def test_consensus_preserves_models():
    c, case = greg_case()
    cc = consensus(case.circuit)
    assert truth_table(cc) == truth_table(case.circuit)


def test_filter_keeps_only_instance_literals():
    from boolreason._encoding import LIT

    c, case = greg_case()
    fc = filter_by(consensus(case.circuit), case.instance)
    values = case.instance.kernel_values()
    for i in range(fc.node_count):
        if fc.kind[i] == LIT:
            code = fc.payload[i]
            assert values[abs(code)] == (1 if code > 0 else 0)


def test_filtered_circuit_is_monotone_toward_the_instance():
    rng = random.Random(32)
    c, case = greg_case()
    r = build_reason(case)
    alpha = case.instance
    for _ in range(300):
        beta = next_random_instance(rng, c.space)
        # move beta toward alpha on a random subset of disagreements
        moved = [
            lit
            for lit in alpha.literals()
            if beta.value(lit.variable) != lit.positive and rng.random() < 0.5
        ]
        from boolreason.formula import Term

        gamma = beta.override(Term(moved))
        assert r.evaluate(gamma) >= r.evaluate(beta)


def next_random_instance(rng, sp):
    from boolreason.formula import Instance

    return Instance(sp, (rng.random() < 0.5 for _ in sp.variables))


def test_case_rejects_wrong_circuit_for_instance():
    c = admission1()
    alpha = instance("~E,F,G,W", c)  # negative instance, positive circuit
    with pytest.raises(PreconditionError):
        DecisionCase(c.space, alpha, 1, c.positive)


def test_reason_size_bound():
    rng = random.Random(33)
    for _ in range(80):
        sp = random_space(rng, rng.randint(1, 6))
        f = random_formula(rng, sp, depth=4)
        c = make_classifier_from(f, sp)
        for alpha in every_instance(sp):
            case = c.case(alpha)
            r = build_reason(case)
            assert r.raw_node_count <= 2 * case.circuit.explicit_size
            assert r.node_count <= 2 * case.circuit.explicit_size


def test_simplify_is_idempotent_and_equivalent():
    c, case = greg_case()
    fc = filter_by(consensus(case.circuit), case.instance)
    once = simplify(fc)
    twice = simplify(once)
    assert truth_table(once) == truth_table(fc)
    assert twice.node_count == once.node_count


def test_dump_parse_round_trip():
    c, case = greg_case()
    r = build_reason(case)
    text = dump_reason(r)
    again = parse_reason(text, c.space)
    assert truth_table(again) == truth_table(r)
    assert again.node_count == r.node_count
    assert dump_reason(again) == text
