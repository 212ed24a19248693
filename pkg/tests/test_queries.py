import random

import pytest

from boolreason import PreconditionError
from boolreason.circuit import Builder, NnfCircuit
from boolreason.formula import Term
from boolreason.oracle import truth_table
from boolreason.queries import (
    MonotonicityError,
    bias_verdict,
    bias_witness_pair,
    classifier_bias_witness,
    decision_is_biased,
    holds_because,
    is_satisfiable,
    is_valid,
    mcondition,
    mexists,
    mnegate,
    necessary_property,
    necessary_reason,
    sticks_even_if_because,
    sufficient_reasons,
)
from boolreason.reason import build_reason

from helpers import (
    admission1,
    admission2,
    every_instance,
    gpa_classifier,
    instance,
    make_classifier,
    random_formula,
    random_space,
    refined_classifier,
    term,
)


def case_of(c, text):
    return c.case(instance(text, c))


def reasons_of(c, text):
    return set(sufficient_reasons(case_of(c, text)))


# --- sufficient reasons ----------------------------------------------------

def test_reasons_for_positive_decision():
    c = admission1()
    assert reasons_of(c, "E,~F,~G,W") == {term("E,~F", c), term("E,W", c)}
    assert reasons_of(c, "E,F,G,~W") == {term("E,G", c)}


def test_reasons_for_negative_decision():
    c = admission1()
    assert reasons_of(c, "~E,F,~G,~W") == {term("~E", c), term("F,~G,~W", c)}
    assert reasons_of(c, "~E,~F,G,W") == {term("~E", c)}


def test_reason_set_is_ordered_and_queryable():
    c = admission1()
    rs = sufficient_reasons(case_of(c, "E,~F,~G,W"))
    assert [str(t) for t in rs] == ["E,~F", "E,W"]
    assert len(rs) == 2
    assert term("E,W", c) in rs
    assert term("E,G", c) not in rs


def test_reasons_on_constant_decision():
    c = make_classifier("A | ~A", ["A"])
    rs = sufficient_reasons(case_of(c, "A"))
    assert set(rs) == {Term()}


# --- monotone primitives ---------------------------------------------------

def random_reason(rng, nvars=5):
    sp = random_space(rng, nvars)
    f = random_formula(rng, sp, depth=4)
    c = make_classifier_from(f, sp)
    alpha = rng.choice(list(every_instance(sp)))
    return build_reason(c.case(alpha))


def make_classifier_from(f, sp):
    from boolreason.reason import Classifier

    return Classifier.from_formula(f, sp)


def test_satisfiable_and_valid():
    rng = random.Random(41)
    for _ in range(120):
        r = random_reason(rng)
        tt = truth_table(r)
        assert is_satisfiable(r) == (tt.bits != 0)
        assert is_valid(r) == (tt.bits == tt.full)
        # a reason circuit is satisfied by its own instance
        assert is_satisfiable(r)


def test_mnegate_complements_models():
    rng = random.Random(42)
    for _ in range(100):
        r = random_reason(rng)
        tt = truth_table(r)
        assert truth_table(mnegate(r)).bits == tt.bits ^ tt.full


def test_mcondition_matches_semantics():
    rng = random.Random(43)
    for _ in range(100):
        r = random_reason(rng)
        sp = r.space
        vars_ = list(sp.variables)
        rng.shuffle(vars_)
        picked = Term(
            r.instance.literal(v) for v in vars_[: rng.randint(1, len(vars_))]
        )
        conditioned = mcondition(r, picked)
        tt = truth_table(r)
        want = 0
        for alpha in every_instance(sp):
            if tt.value(alpha.override(picked)):
                want |= 1 << alpha.index
        assert truth_table(conditioned).bits == want


def test_mexists_matches_semantics():
    rng = random.Random(44)
    for _ in range(100):
        r = random_reason(rng)
        sp = r.space
        chosen = [v for v in sp.variables if rng.random() < 0.4]
        gone = mexists(r, chosen)
        tt = truth_table(r)
        want = 0
        for alpha in every_instance(sp):
            outcomes = []
            for bits in range(1 << len(chosen)):
                patch = Term(
                    alpha.literal(v) if not (bits >> j) & 1 else alpha.literal(v).negate()
                    for j, v in enumerate(chosen)
                )
                outcomes.append(tt.value(alpha.override(patch)))
            if any(outcomes):
                want |= 1 << alpha.index
        assert truth_table(gone).bits == want
        for v in chosen:
            assert not truth_table(gone).depends_on(v)


def test_monotonicity_violation_is_reported():
    from boolreason import FeatureSpace

    sp = FeatureSpace(["A", "B"])
    b = Builder()
    both = b.and_([b.literal(1), b.literal(-1), b.literal(2)])
    c = b.finish(both, NnfCircuit, sp)
    with pytest.raises(MonotonicityError) as err:
        is_satisfiable(c)
    assert "A" in str(err.value)


# --- necessary property / reason -------------------------------------------

def test_necessary_property_golden():
    c = admission1()
    greg = case_of(c, "E,~F,~G,W")
    assert necessary_property(build_reason(greg)) == term("E", c)
    assert necessary_reason(greg) is None
    susan = case_of(c, "E,F,G,~W")
    assert necessary_property(build_reason(susan)) == term("E,G", c)
    assert necessary_reason(susan) == term("E,G", c)


def test_necessary_property_can_be_empty():
    c = make_classifier("A | B", ["A", "B"])
    case = c.case(instance("A,B", c))
    assert necessary_property(build_reason(case)) == Term()
    assert necessary_reason(case) is None


def test_necessary_property_equals_reason_intersection():
    rng = random.Random(45)
    for _ in range(80):
        sp = random_space(rng, rng.randint(1, 5))
        f = random_formula(rng, sp, depth=4)
        c = make_classifier_from(f, sp)
        for alpha in every_instance(sp):
            case = c.case(alpha)
            rs = list(sufficient_reasons(case))
            shared = rs[0].codes
            for t in rs[1:]:
                shared &= t.codes
            got = necessary_property(build_reason(case))
            assert got.codes == shared
            nr = necessary_reason(case)
            assert (nr == got) == (len(rs) == 1)
            if len(rs) != 1:
                assert nr is None


# --- because / even-if-because ----------------------------------------------

def test_because_golden():
    c = admission1()
    susan = case_of(c, "E,F,G,~W")
    assert holds_because(build_reason(susan), term("E,G", c))
    greg = case_of(c, "E,~F,~G,W")
    r = build_reason(greg)
    assert not holds_because(r, term("E,W", c))
    assert not holds_because(r, term("E", c))


def test_because_requires_a_property():
    c = admission1()
    r = build_reason(case_of(c, "E,F,G,~W"))
    with pytest.raises(PreconditionError):
        holds_because(r, term("~E", c))


def test_even_if_golden():
    c2 = admission2()
    susan = instance("E,F,G,~W,R", c2)
    assert sticks_even_if_because(c2, susan, term("G", c2), term("E,R", c2))
    assert not sticks_even_if_because(c2, susan, term("G", c2), term("E", c2))
    c1 = admission1()
    jackie = instance("~E,~F,~G,W", c1)
    assert sticks_even_if_because(c1, jackie, term("~G", c1), term("~E", c1))


def test_even_if_preconditions():
    c = admission1()
    alpha = instance("E,F,G,~W", c)
    with pytest.raises(PreconditionError):
        sticks_even_if_because(c, alpha, term("~G", c), term("E", c))  # rho not a property
    with pytest.raises(PreconditionError):
        sticks_even_if_because(c, alpha, term("G", c), term("~E", c))  # tau not a property
    with pytest.raises(PreconditionError):
        sticks_even_if_because(c, alpha, term("G", c), term("E,G", c))  # overlap


def test_even_if_with_empty_rho_is_because():
    c = admission1()
    susan = instance("E,F,G,~W", c)
    assert sticks_even_if_because(c, susan, Term(), term("E,G", c))


# --- bias --------------------------------------------------------------------

def test_decision_bias_golden():
    c = gpa_classifier()
    bob = case_of(c, "G,~E,M,R")
    assert reasons_of(c, "G,~E,M,R") == {term("G,M", c), term("G,R", c)}
    assert decision_is_biased(build_reason(bob), c.space)
    lisa = case_of(c, "G,E,~M,R")
    assert reasons_of(c, "G,E,~M,R") == {term("G,E", c), term("G,R", c)}
    assert not decision_is_biased(build_reason(lisa), c.space)


def test_decision_bias_needs_protected_features():
    c = admission1()
    r = build_reason(case_of(c, "E,F,G,~W"))
    with pytest.raises(PreconditionError):
        decision_is_biased(r, c.space)


def test_classifier_bias_witness():
    c = gpa_classifier()
    lisa = sufficient_reasons(case_of(c, "G,E,~M,R"))
    w = classifier_bias_witness(lisa, c.space)
    assert w == term("G,M", c) or w == term("G,R", c)
    unbiased = make_classifier("G & E", ["G", "E", "M"], protected=["M"])
    rs = sufficient_reasons(unbiased.case(instance("G,E,M", unbiased)))
    assert classifier_bias_witness(rs, unbiased.space) is None


def test_bias_witness_pair_golden():
    c = gpa_classifier()
    lisa = sufficient_reasons(case_of(c, "G,E,~M,R"))
    w = classifier_bias_witness(lisa, c.space)
    beta, gamma = bias_witness_pair(c, w)
    assert c.decide(beta) != c.decide(gamma)
    differ = [
        v.name for v in c.space.variables if beta.value(v) != gamma.value(v)
    ]
    assert set(differ) <= {"M", "R"} and differ


def test_bias_witness_pair_budget():
    c = make_classifier("G & R & E", ["G", "E", "R"], protected=["R"])
    tau = term("G,R", c)
    assert bias_witness_pair(c, tau, budget=1) is None
    pair = bias_witness_pair(c, tau, budget=2)
    assert pair is not None
    beta, gamma = pair
    assert beta.value(c.space.lookup("E"))
    # flipping an irrelevant protected feature can never flip the decision
    silent = make_classifier("G & E", ["G", "E", "R"], protected=["R"])
    assert bias_witness_pair(silent, term("G,R", silent)) is None


def test_bias_witness_pair_needs_protected_in_term():
    c = gpa_classifier()
    with pytest.raises(PreconditionError):
        bias_witness_pair(c, term("G,E", c))


def test_bias_verdict_assembly():
    c = gpa_classifier()
    v = bias_verdict(case_of(c, "G,~E,M,R"), classifier=c)
    assert v.decision_biased
    assert v.classifier_status == "biased"
    assert v.witness is not None and v.pair is not None
    quiet = make_classifier("G & E", ["G", "E", "M"], protected=["M"])
    v2 = bias_verdict(quiet.case(instance("G,E,~M", quiet)), classifier=quiet)
    assert not v2.decision_biased
    assert v2.classifier_status == "inconclusive"
    assert v2.witness is None and v2.pair is None


def test_study_classifier_battery():
    c = refined_classifier()
    scott = case_of(c, "E,~F,G,W,R")
    assert set(sufficient_reasons(scott)) == {
        term("E,G,R", c),
        term("E,R,W", c),
        term("E,~F,R", c),
        term("G,R,W", c),
    }
    assert decision_is_biased(build_reason(scott), c.space)

    robin = case_of(c, "E,F,G,W,R")
    assert len(sufficient_reasons(robin)) == 5
    assert not decision_is_biased(build_reason(robin), c.space)
    assert classifier_bias_witness(sufficient_reasons(robin), c.space) is not None

    april = case_of(c, "E,F,G,W,~R")
    assert set(sufficient_reasons(april)) == {term("E,F,G", c), term("E,F,W", c)}
    assert necessary_property(build_reason(april)) == term("E,F", c)
    assert not decision_is_biased(build_reason(april), c.space)
    assert classifier_bias_witness(sufficient_reasons(april), c.space) is None

    # Scott with the protected feature flipped is denied, for one terse reason
    flipped = case_of(c, "E,~F,G,W,~R")
    assert flipped.decision == 0
    assert set(sufficient_reasons(flipped)) == {term("~F,~R", c)}

    april_flip = instance("E,F,G,W,~R", c)
    assert sticks_even_if_because(c, april_flip, term("W", c), term("E,F,G", c))
