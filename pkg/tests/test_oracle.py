import random
from itertools import combinations

import pytest

from boolreason import FeatureSpace
from boolreason.formula import Term, evaluate, parse_formula, parse_instance
from boolreason.oracle import (
    CapExceeded,
    all_prime_implicants,
    oracle_classifier_bias,
    oracle_complete_reason,
    oracle_decision_bias,
    oracle_necessary_property,
    oracle_sufficient_reasons,
    prime_implicants_by_consensus,
    truth_table,
)

from helpers import every_instance, instance, random_formula, random_space


def test_truth_table_matches_evaluation():
    sp = FeatureSpace(["E", "F", "G", "W"])
    f = parse_formula("E & (~F | G | W)", sp)
    tt = truth_table(f, sp)
    for alpha in every_instance(sp):
        assert tt.value(alpha) == evaluate(f, alpha)
    comp = tt.complement()
    assert all(comp.value(a) != tt.value(a) for a in every_instance(sp))


def test_truth_table_term_and_dependence():
    sp = FeatureSpace(["A", "B", "C"])
    tt = truth_table(parse_formula("A & ~B", sp), sp)
    assert tt.is_implicant(_t("A,~B,C", sp))
    assert tt.is_implicant(_t("A,~B", sp))
    assert not tt.is_implicant(_t("A", sp))
    assert tt.depends_on(sp.lookup("A"))
    assert not tt.depends_on(sp.lookup("C"))


def _t(text, sp):
    from boolreason.formula import parse_term

    return parse_term(text, sp)


def test_known_prime_implicants():
    sp = FeatureSpace(["E", "F", "G", "W"])
    f = parse_formula("E & (~F | G | W)", sp)
    pis = all_prime_implicants(f, sp)
    assert pis == {_t("E,~F", sp), _t("E,G", sp), _t("E,W", sp)}
    neg = all_prime_implicants(truth_table(f, sp).complement())
    assert neg == {_t("~E", sp), _t("F,~G,~W", sp)}


def test_prime_implicants_of_constants():
    sp = FeatureSpace(["A", "B"])
    assert all_prime_implicants(parse_formula("0", sp), sp) == frozenset()
    assert all_prime_implicants(parse_formula("1", sp), sp) == {Term()}
    assert prime_implicants_by_consensus(parse_formula("1", sp), sp) == {Term()}
    assert prime_implicants_by_consensus(parse_formula("0", sp), sp) == frozenset()


def test_both_pi_methods_agree_on_random_formulas():
    rng = random.Random(11)
    for _ in range(150):
        sp = random_space(rng, rng.randint(1, 6))
        f = random_formula(rng, sp, depth=4)
        assert all_prime_implicants(f, sp) == prime_implicants_by_consensus(f, sp)


def test_prime_implicants_are_prime_and_cover():
    rng = random.Random(12)
    for _ in range(80):
        sp = random_space(rng, rng.randint(1, 5))
        f = random_formula(rng, sp, depth=4)
        tt = truth_table(f, sp)
        pis = all_prime_implicants(tt)
        union = 0
        for t in pis:
            assert tt.is_implicant(t)
            # dropping any literal must break implicanthood
            for lit in t:
                weaker = Term(m for m in t if m is not lit)
                assert not tt.is_implicant(weaker)
            union |= truth_table(t, sp).bits
        assert union == tt.bits
        for a, b in combinations(pis, 2):
            assert not a.subsumes(b) and not b.subsumes(a)


def _brute_sufficient_reasons(tt, alpha):
    """Minimal implicants among subsets of the instance's literals."""
    decided = tt if tt.value(alpha) else tt.complement()
    lits = alpha.literals()
    hits = [
        Term(sub)
        for size in range(len(lits) + 1)
        for sub in combinations(lits, size)
        if decided.is_implicant(Term(sub))
    ]
    return frozenset(
        t for t in hits if not any(o != t and o.subsumes(t) for o in hits)
    )


def test_sufficient_reasons_against_brute_force():
    rng = random.Random(13)
    for _ in range(60):
        sp = random_space(rng, rng.randint(1, 5))
        f = random_formula(rng, sp, depth=4)
        tt = truth_table(f, sp)
        for alpha in every_instance(sp):
            assert oracle_sufficient_reasons(tt, alpha) == _brute_sufficient_reasons(
                tt, alpha
            )


def test_complete_reason_and_necessary_property():
    sp = FeatureSpace(["E", "F", "G", "W"])
    f = parse_formula("E & (~F | G | W)", sp)
    greg = instance("E,~F,~G,W", sp)
    cr = oracle_complete_reason(f, greg, sp)
    want = parse_formula("E & (~F | W)", sp)
    assert truth_table(cr, sp) == truth_table(want, sp)
    assert oracle_necessary_property(f, greg, sp) == _t("E", sp)
    susan = instance("E,F,G,~W", sp)
    assert oracle_necessary_property(f, susan, sp) == _t("E,G", sp)


def test_decision_bias_without_protected_features_is_false():
    sp = FeatureSpace(["E", "F", "G", "W"])
    f = parse_formula("E & (~F | G | W)", sp)
    for alpha in every_instance(sp):
        assert oracle_decision_bias(f, alpha, sp) is False
    assert oracle_classifier_bias(f, sp) is False


def test_bias_with_protected_features():
    sp = FeatureSpace(["G", "E", "M", "R"], protected=["M", "R"])
    f = parse_formula("G & E | G & M | G & R", sp)
    bob = instance("G,~E,M,R", sp)
    assert oracle_decision_bias(f, bob, sp) is True
    lisa = instance("G,E,~M,R", sp)
    assert oracle_decision_bias(f, lisa, sp) is False
    assert oracle_classifier_bias(f, sp) is True
    # protecting a feature the function ignores changes nothing
    sp2 = FeatureSpace(["A", "B"], protected=["B"])
    assert oracle_classifier_bias(parse_formula("A", sp2), sp2) is False


def test_variable_caps():
    big = FeatureSpace(f"v{i}" for i in range(17))
    with pytest.raises(CapExceeded):
        truth_table(parse_formula("v0", big), big)
    mid = FeatureSpace(f"v{i}" for i in range(13))
    with pytest.raises(CapExceeded):
        prime_implicants_by_consensus(parse_formula("v0", mid), mid)
    # the enumeration method still works at 13
    assert all_prime_implicants(parse_formula("v0", mid), mid) == {_t("v0", mid)}


def test_pi_cache_keeps_spaces_apart():
    a = FeatureSpace(["A", "B"])
    b = FeatureSpace(["X", "Y"])
    fa = all_prime_implicants(parse_formula("A & B", a), a)
    fb = all_prime_implicants(parse_formula("X & Y", b), b)
    (ta,) = fa
    (tb,) = fb
    assert {lit.variable.name for lit in ta} == {"A", "B"}
    assert {lit.variable.name for lit in tb} == {"X", "Y"}
