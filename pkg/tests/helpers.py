"""Shared fixtures: the worked admission classifiers and random generators."""

from __future__ import annotations

import random

from boolreason import Classifier, FeatureSpace, Instance, parse_formula
from boolreason.formula import And, Atom, Const, Formula, Not, Or, parse_term


def make_classifier(text: str, names, protected=()) -> Classifier:
    space = FeatureSpace(names, protected)
    return Classifier.from_formula(parse_formula(text, space), space)


# The admission classifiers used throughout the tests.
# Features: E entrance exam, F first-time applicant, G good GPA,
# W work experience, R rich hometown, M male.

def admission1(protected=()) -> Classifier:
    return make_classifier("E & (~F | G | W)", ["E", "F", "G", "W"], protected)


def admission2(protected=()) -> Classifier:
    return make_classifier("E & (~F | G | W | R)", ["E", "F", "G", "W", "R"], protected)


def gpa_classifier(protected=("M", "R")) -> Classifier:
    # admits good GPA together with exam, being male, or a rich hometown
    return make_classifier("G & E | G & M | G & R", ["G", "E", "M", "R"], protected)


def refined_classifier(protected=("R",)) -> Classifier:
    # rich hometown unlocks the only path for exam passers who applied before
    return make_classifier(
        "E & ((F & (G | W)) | (~F & R)) | G & R & W",
        ["E", "F", "G", "W", "R"],
        protected,
    )


def term(text: str, classifier_or_space) -> object:
    space = getattr(classifier_or_space, "space", classifier_or_space)
    return parse_term(text, space)


def instance(text: str, classifier_or_space) -> Instance:
    space = getattr(classifier_or_space, "space", classifier_or_space)
    return Instance.parse(text, space)


def every_instance(space: FeatureSpace):
    """All instances in ascending truth-table order."""
    n = len(space)
    for k in range(1 << n):
        yield Instance(space, ((k >> j) & 1 for j in range(n)))


def random_space(rng: random.Random, nvars: int) -> FeatureSpace:
    return FeatureSpace(f"x{i}" for i in range(1, nvars + 1))


def random_formula(rng: random.Random, space: FeatureSpace, depth: int = 4) -> Formula:
    vars_ = space.variables

    def gen(d: int) -> Formula:
        roll = rng.random()
        if d == 0 or roll < 0.30:
            leaf = Atom(rng.choice(vars_))
            return Not(leaf) if rng.random() < 0.5 else leaf
        if roll < 0.33:
            return Const(rng.random() < 0.5)
        op = And if rng.random() < 0.5 else Or
        return op(tuple(gen(d - 1) for _ in range(rng.randint(2, 3))))

    return gen(depth)
