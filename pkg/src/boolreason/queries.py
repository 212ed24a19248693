"""Queries on reason circuits and decision cases.

The primitive operations exploit monotonicity: satisfiability, validity,
negation, conditioning and existential quantification are all single
bottom-up passes.  On top of them sit the explanation queries: sufficient
reasons (prime implicants of the reason circuit), necessary property and
reason, counterfactual statements, and the two bias notions.

Decision bias asks whether flipping protected features alone can flip this
decision; it holds exactly when every sufficient reason involves a
protected feature.  The classifier-level check scans one decision's
reasons for a protected feature, so a Biased verdict is definite while
Inconclusive only means this decision gave no witness.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from ._encoding import AND, DEC, FALSE, LIT, OR, TRUE
from . import kernels
from .circuit import Builder, NnfCircuit
from .errors import PreconditionError
from .formula import FeatureSpace, Instance, Literal, Term, Variable
from .reason import Classifier, DecisionCase, ReasonCircuit, build_reason


class MonotonicityError(PreconditionError):
    """A supposedly monotone circuit used some feature in both polarities."""

    def __init__(self, space: FeatureSpace, var_index: int):
        name = space.variables[var_index - 1].name
        super().__init__(f"feature {name} occurs in both polarities")


def _checked(result_visited, circuit: NnfCircuit) -> int:
    result, visited = result_visited
    assert visited <= circuit.node_count
    if result < 0:
        raise MonotonicityError(circuit.space, -result)
    return result


def is_satisfiable(r: NnfCircuit) -> bool:
    """Single-pass satisfiability for monotone circuits."""
    return bool(_checked(kernels.monotone_sat(*r.arrays(), len(r.space)), r))


def is_valid(r: NnfCircuit) -> bool:
    """Single-pass validity for monotone circuits."""
    return bool(_checked(kernels.monotone_valid(*r.arrays(), len(r.space)), r))


def mnegate(r: NnfCircuit) -> NnfCircuit:
    """De Morgan dual: swap gate kinds and literal polarities.

    The result is again monotone and has exactly the complement models.
    """
    b = Builder(intern=True, fold=False)
    image = [0] * r.node_count
    for i in range(r.node_count):
        k = r.kind[i]
        if k == FALSE:
            image[i] = b.true_()
        elif k == TRUE:
            image[i] = b.false_()
        elif k == LIT:
            image[i] = b.literal(-r.payload[i])
        elif k == AND:
            image[i] = b.or_(image[ch] for ch in r.children_of(i))
        elif k == OR:
            image[i] = b.and_(image[ch] for ch in r.children_of(i))
        else:
            raise PreconditionError("decision gates have no monotone negation here")
    return b.finish(image[r.root], NnfCircuit, r.space)


def _substituted(r: NnfCircuit, actions: array) -> NnfCircuit:
    kind, payload, child_off, children, root, visited = kernels.substitute(
        *r.arrays(), actions, len(r.space)
    )
    assert visited <= r.node_count
    return NnfCircuit(r.space, kind, payload, child_off, children, root)


def mcondition(r: NnfCircuit, term: Term) -> NnfCircuit:
    """Condition on a term: substitute its literals and propagate constants."""
    actions = array("i", bytes(4 * (len(r.space) + 1)))
    for lit in term:
        actions[lit.variable.index] = 1 if lit.positive else 2
    return _substituted(r, actions)


def mexists(r: NnfCircuit, variables) -> NnfCircuit:
    """Existentially quantify features away (replace their literals with 1).

    Sound on monotone and on decomposable circuits alike.
    """
    actions = array("i", bytes(4 * (len(r.space) + 1)))
    for var in variables:
        actions[var.index] = 3
    return _substituted(r, actions)


# ---------------------------------------------------------------------------
# Sufficient reasons


@dataclass(frozen=True)
class SufficientReasonSet:
    """All sufficient reasons of one decision, canonically ordered."""

    terms: tuple[Term, ...]

    def __post_init__(self):
        assert all(
            not a.subsumes(b)
            for i, a in enumerate(self.terms)
            for j, b in enumerate(self.terms)
            if i != j
        ), "sufficient reasons must form an antichain"

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: Term) -> bool:
        return term in self.terms


def _remove_subsumed(terms: set[frozenset[int]]) -> set[frozenset[int]]:
    kept: list[frozenset[int]] = []
    for t in sorted(terms, key=lambda s: (len(s), sorted(s))):
        if not any(k <= t for k in kept):
            kept.append(t)
    return set(kept)


def _pair_product(left: set[frozenset[int]], right: set[frozenset[int]]):
    return _remove_subsumed({a | b for a in left for b in right})


def sufficient_reasons(case: DecisionCase) -> SufficientReasonSet:
    """Enumerate the prime implicants of the decision that the instance
    satisfies, bottom-up over the decision circuit.

    Per node the set of candidate terms is kept subsumption-free; and-gates
    combine children by products, decision gates take the product of both
    branches (the consensus terms) plus the instance's literal extending
    the branch it selects.
    """
    c = case.circuit
    values = case.instance.kernel_values()
    pis: list[set[frozenset[int]]] = [set()] * c.node_count
    empty_term = frozenset()
    for i in range(c.node_count):
        k = c.kind[i]
        if k == FALSE:
            out: set[frozenset[int]] = set()
        elif k == TRUE:
            out = {empty_term}
        elif k == LIT:
            code = c.payload[i]
            agrees = (code > 0) == (values[abs(code)] == 1)
            out = {frozenset((code,))} if agrees else set()
        elif k == AND:
            out = {empty_term}
            for ch in c.children_of(i):
                out = _pair_product(out, pis[ch])
                if not out:
                    break
        else:
            assert k == DEC
            v = c.payload[i]
            hi, lo = c.children_of(i)
            lit_code = v if values[v] else -v
            branch = pis[hi] if values[v] else pis[lo]
            out = {t | {lit_code} for t in branch}
            out |= _pair_product(pis[hi], pis[lo])
            out = _remove_subsumed(out)
        pis[i] = out

    vars_ = case.space.variables
    terms = tuple(
        sorted(
            (
                Term(Literal(vars_[abs(code) - 1], code > 0) for code in codes)
                for codes in pis[c.root]
            ),
            key=lambda t: t.key,
        )
    )
    assert terms, "a made decision has at least one sufficient reason"
    assert all(t.is_property_of(case.instance) for t in terms)
    return SufficientReasonSet(terms)


# ---------------------------------------------------------------------------
# Necessity and counterfactuals


def necessary_property(r: ReasonCircuit) -> Term:
    """Literals shared by every sufficient reason: those whose removal
    (conditioning on their negation) kills the reason circuit."""
    needed = []
    for lit in r.instance.literals():
        if not is_satisfiable(mcondition(r, Term((lit.negate(),)))):
            needed.append(lit)
    return Term(needed)


def necessary_reason(case: DecisionCase, reason: ReasonCircuit | None = None) -> Term | None:
    """The necessary property when it is itself the only sufficient reason."""
    r = build_reason(case) if reason is None else reason
    prop = necessary_property(r)
    if not is_satisfiable(mcondition(mnegate(r), prop)):
        return prop
    return None


def holds_because(r: ReasonCircuit, tau: Term) -> bool:
    """True when tau is equivalent to the complete reason: tau entails the
    reason circuit and each of its literals is necessary."""
    if not tau.is_property_of(r.instance):
        raise PreconditionError(f"{tau} is not a property of {r.instance}")
    if is_satisfiable(mcondition(mnegate(r), tau)):
        return False
    for lit in tau:
        if is_satisfiable(mcondition(r, Term((lit.negate(),)))):
            return False
    return True


def sticks_even_if_because(
    classifier: Classifier, alpha: Instance, rho: Term, tau: Term
) -> bool:
    """Would the decision stick even if rho were flipped, because of tau?

    Holds when tau is the complete reason for the decision on the flipped
    instance.  rho and tau must be disjoint properties of alpha.
    """
    if not rho.is_property_of(alpha):
        raise PreconditionError(f"{rho} is not a property of {alpha}")
    if not tau.is_property_of(alpha):
        raise PreconditionError(f"{tau} is not a property of {alpha}")
    if set(rho.variables()) & set(tau.variables()):
        raise PreconditionError("the flipped and explaining terms must be disjoint")
    beta = alpha.override(rho.negate())
    case = classifier.case(beta)
    return holds_because(build_reason(case), tau)


# ---------------------------------------------------------------------------
# Bias


@dataclass(frozen=True)
class BiasVerdict:
    """Bias findings for one decision.

    decision_biased: protected features alone could flip this decision.
    witness: a sufficient reason containing a protected feature, when one
    exists; a decision-biased case always has one, otherwise the classifier
    check is Inconclusive from this decision.
    """

    decision_biased: bool
    witness: Term | None
    pair: tuple[Instance, Instance] | None = None

    def __post_init__(self):
        assert not (self.decision_biased and self.witness is None)

    @property
    def classifier_status(self) -> str:
        return "biased" if self.witness is not None else "inconclusive"


def decision_is_biased(r: ReasonCircuit, space: FeatureSpace) -> bool:
    """True when every sufficient reason involves a protected feature,
    i.e. forgetting the unprotected features leaves no valid reason."""
    if not space.protected:
        raise PreconditionError("no protected features are declared")
    return not is_valid(mexists(r, space.unprotected()))


def classifier_bias_witness(
    reasons: SufficientReasonSet, space: FeatureSpace
) -> Term | None:
    """First sufficient reason (canonical order) containing a protected
    feature; None means this decision shows no witness, not that the
    classifier is unbiased."""
    for term in reasons:
        if any(lit.variable in space.protected for lit in term):
            return term
    return None


def bias_witness_pair(
    classifier: Classifier, tau: Term, budget: int = 4096
) -> tuple[Instance, Instance] | None:
    """Search for instances beta (satisfying tau) and gamma, differing only
    on tau's protected features, that get different decisions.

    Candidates are enumerated in ascending truth-table order of the free
    features; at most `budget` candidates are tried.
    """
    space = classifier.space
    protected_in_tau = Term(lit for lit in tau if lit.variable in space.protected)
    if not len(protected_in_tau):
        raise PreconditionError("the witness term has no protected features")
    free = [v for v in space.variables if v not in set(tau.variables())]
    flipped = protected_in_tau.negate()
    total = 1 << len(free)
    for k in range(min(total, budget)):
        values = [False] * len(space)
        for lit in tau:
            values[lit.variable.index - 1] = lit.positive
        for j, var in enumerate(free):
            values[var.index - 1] = bool((k >> j) & 1)
        beta = Instance(space, values)
        gamma = beta.override(flipped)
        if classifier.decide(beta) != classifier.decide(gamma):
            return (beta, gamma)
    return None


def bias_verdict(
    case: DecisionCase,
    classifier: Classifier | None = None,
    reason: ReasonCircuit | None = None,
    reasons: SufficientReasonSet | None = None,
    budget: int = 4096,
) -> BiasVerdict:
    """Assemble the full bias report for one decision."""
    r = build_reason(case) if reason is None else reason
    rs = sufficient_reasons(case) if reasons is None else reasons
    biased = decision_is_biased(r, case.space)
    witness = classifier_bias_witness(rs, case.space)
    pair = None
    if witness is not None and classifier is not None:
        pair = bias_witness_pair(classifier, witness, budget)
    return BiasVerdict(biased, witness, pair)
