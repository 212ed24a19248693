"""Backend parity: the compiled kernels must be bit-for-bit twins of the
pure-Python ones on identical inputs, including visit counts and errors."""

import random
from array import array

import pytest

from boolreason import _pykernels
from boolreason import kernels
from boolreason.circuit import Builder, NnfCircuit
from boolreason.obdd import compile_formula, to_decision_dnnf
from boolreason.reason import build_reason

from helpers import every_instance, random_formula, random_space

_ckernels = pytest.importorskip(
    "boolreason._ckernels", reason="compiled backend not built"
)

BACKENDS = (_pykernels, _ckernels)


def random_dnnf(rng, nvars):
    sp = random_space(rng, nvars)
    f = random_formula(rng, sp, depth=4)
    return sp, to_decision_dnnf(compile_formula(f, sp))


def random_monotone(rng, nvars):
    """A reason circuit, the monotone shape the query kernels accept."""
    sp = random_space(rng, nvars)
    f = random_formula(rng, sp, depth=4)
    from boolreason.reason import Classifier

    c = Classifier.from_formula(f, sp)
    alpha = rng.choice(list(every_instance(sp)))
    return sp, build_reason(c.case(alpha))


def as_tuple(result):
    return tuple(list(x) if isinstance(x, array) else x for x in result)


def test_backend_is_compiled_by_default():
    assert kernels.backend() == "compiled"


def test_nnf_eval_parity():
    rng = random.Random(51)
    for _ in range(60):
        sp, c = random_dnnf(rng, rng.randint(1, 6))
        for alpha in every_instance(sp):
            vals = alpha.kernel_values()
            got = [mod.nnf_eval(*c.arrays(), vals) for mod in BACKENDS]
            assert got[0] == got[1] == c.evaluate(alpha)


def test_monotone_query_parity():
    rng = random.Random(52)
    for _ in range(80):
        sp, r = random_monotone(rng, rng.randint(1, 6))
        n = len(sp)
        for mono in ("monotone_sat", "monotone_valid"):
            got = [getattr(mod, mono)(*r.arrays(), n) for mod in BACKENDS]
            assert got[0] == got[1]
            assert got[0][1] <= r.node_count


def test_substitute_parity():
    rng = random.Random(53)
    for _ in range(80):
        sp, r = random_monotone(rng, rng.randint(1, 6))
        n = len(sp)
        action = array("i", bytes(4 * (n + 1)))
        for v in sp.variables:
            action[v.index] = rng.choice((0, 0, 1, 2, 3))
        got = [as_tuple(mod.substitute(*r.arrays(), action, n)) for mod in BACKENDS]
        assert got[0] == got[1]


def test_reason_build_parity():
    rng = random.Random(54)
    for _ in range(80):
        sp, c = random_dnnf(rng, rng.randint(1, 6))
        for alpha in every_instance(sp):
            if c.evaluate(alpha) != 1:
                continue
            vals = alpha.kernel_values()
            got = [
                as_tuple(mod.reason_build(*c.arrays(), vals, len(sp)))
                for mod in BACKENDS
            ]
            assert got[0] == got[1]


def test_polarity_violation_parity():
    from boolreason import FeatureSpace

    sp = FeatureSpace(["A", "B"])
    b = Builder()
    both = b.and_([b.literal(1), b.literal(-1), b.literal(2)])
    c = b.finish(both, NnfCircuit, sp)
    got = [mod.monotone_sat(*c.arrays(), 2) for mod in BACKENDS]
    assert got[0] == got[1]
    assert got[0][0] == -1  # feature A, reported as a negative result


def test_decision_gate_rejected_by_monotone_kernels():
    rng = random.Random(55)
    sp, c = random_dnnf(rng, 4)
    if c.decision_count() == 0:
        sp = random_space(rng, 4)
        from boolreason.formula import parse_formula

        c = to_decision_dnnf(compile_formula(parse_formula("x1 & x2", sp), sp))
    for mod in BACKENDS:
        with pytest.raises(ValueError):
            mod.monotone_sat(*c.arrays(), len(sp))
        with pytest.raises(ValueError):
            mod.monotone_valid(*c.arrays(), len(sp))
