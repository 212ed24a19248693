"""Kernel timing harness.

Grows one seeded random DNF into an OBDD, snapshots the exported circuit
the first time its node count crosses each target, and times the kernel
passes (reason build, satisfiability, validity, conditioning) on every
snapshot for each available backend.

    python -m boolreason.bench [--targets 1000,10000,100000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import gc
import random
import time
from array import array

from . import _pykernels
from .circuit import DecisionDnnf
from .formula import FeatureSpace, Instance
from .obdd import Obdd, _Builder, _canonical, to_decision_dnnf

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

NVARS = 40
TERM_WIDTH = 6


def _reachable_count(builder: _Builder, root: int) -> int:
    if root < 2:
        return 0
    seen = {root}
    stack = [root]
    while stack:
        node = stack.pop()
        for child in (builder.hi[node], builder.lo[node]):
            if child >= 2 and child not in seen:
                seen.add(child)
                stack.append(child)
    return len(seen)


def _positive_instance(d: Obdd) -> Instance:
    """Some instance the OBDD accepts (the function must be satisfiable)."""
    target = 0 if d.negated else 1
    n = len(d.var)
    reach = bytearray(n)
    reach[target] = 1
    for i in range(2, n):  # children have smaller ids
        reach[i] = reach[d.hi[i]] or reach[d.lo[i]]
    assert reach[d.root], "constant-false classifier"
    values = [False] * len(d.space)
    cur = d.root
    while cur >= 2:
        take_hi = bool(reach[d.hi[cur]])
        values[d.var[cur] - 1] = take_hi
        cur = d.hi[cur] if take_hi else d.lo[cur]
    return Instance(d.space, values)


def _rich_instance(d: Obdd, circuit: DecisionDnnf, rng: random.Random,
                   samples: int = 8, attempts: int = 400) -> Instance:
    """The accepted instance with the largest reason among a few samples.

    The reason size, not the circuit size, is what the query passes walk,
    and it swings with instance luck.  Taking the richest of a fixed
    number of samples keeps the timed workload proportional to the
    circuit, so snapshots of different sizes are comparable.
    """
    from .reason import DecisionCase, build_reason

    def reason_size(inst: Instance) -> int:
        return build_reason(DecisionCase(d.space, inst, 1, circuit)).node_count

    best = _positive_instance(d)
    best_size = reason_size(best)
    found = 0
    for _ in range(attempts):
        if found >= samples:
            break
        cand = Instance(d.space, [rng.random() < 0.5 for _ in d.space.variables])
        if circuit.evaluate(cand) != 1:
            continue
        found += 1
        size = reason_size(cand)
        if size > best_size:
            best, best_size = cand, size
    return best


class Snapshot:
    __slots__ = ("target", "obdd", "circuit", "instance")

    def __init__(self, target: int, obdd: Obdd, circuit: DecisionDnnf,
                 instance: Instance | None = None):
        self.target = target
        self.obdd = obdd
        self.circuit = circuit
        self.instance = _positive_instance(obdd) if instance is None else instance


def grow_snapshots(
    targets, seed: int = 2024, nvars: int = NVARS, term_width: int = TERM_WIDTH
) -> list[Snapshot]:
    """One seeded growth run, snapshotting at the first crossing of each
    target circuit size."""
    rng = random.Random(seed)
    space = FeatureSpace(f"x{i}" for i in range(1, nvars + 1))
    order = space.variables
    b = _Builder()
    or_memo: dict = {}
    root = 0
    want = sorted(set(targets))
    out: list[Snapshot] = []
    count = 0
    while want:
        # one random term, built bottom-up along the order
        node = 1
        for level in sorted(rng.sample(range(nvars), term_width), reverse=True):
            if rng.random() < 0.5:
                node = b.mk(level, node, 0)
            else:
                node = b.mk(level, 0, node)
        root = b.apply("or", root, node, or_memo)
        count = _reachable_count(b, root)
        while want and count + 2 >= want[0]:  # +2: the circuit's constants
            target = want.pop(0)
            var, hi, lo, new_root = _canonical(b, root, order)
            d = Obdd(space, order, var, hi, lo, new_root)
            circuit = to_decision_dnnf(d)
            out.append(Snapshot(target, d, circuit, _rich_instance(d, circuit, rng)))
    return out


def _backend_run(mod, snap: Snapshot) -> float:
    """Seconds of one reason build plus the primitive query passes."""
    kind, payload, child_off, children, root = snap.circuit.arrays()
    values = snap.instance.kernel_values()
    nvars = len(snap.circuit.space)
    no_action = array("i", bytes(4 * (nvars + 1)))
    t0 = time.perf_counter()
    rk, rp, roff, rch, rroot, _ = mod.reason_build(
        kind, payload, child_off, children, root, values, nvars
    )
    mod.monotone_sat(rk, rp, roff, rch, rroot, nvars)
    mod.monotone_valid(rk, rp, roff, rch, rroot, nvars)
    mod.substitute(rk, rp, roff, rch, rroot, no_action, nvars)
    return time.perf_counter() - t0


def backends() -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = [("python", _pykernels)]
    if _ckernels is not None:
        pairs.append(("compiled", _ckernels))
    return pairs


def run(targets, repeats: int = 3, seed: int = 2024) -> list[dict]:
    """Benchmark rows: one per (snapshot, backend), min time of repeats."""
    snaps = grow_snapshots(targets, seed=seed)
    rows = []
    gc.disable()
    try:
        for snap in snaps:
            for name, mod in backends():
                best = min(_backend_run(mod, snap) for _ in range(repeats))
                rows.append(
                    {
                        "target": snap.target,
                        "nodes": snap.circuit.node_count,
                        "backend": name,
                        "seconds": best,
                    }
                )
    finally:
        gc.enable()
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="python -m boolreason.bench", description=__doc__.splitlines()[0]
    )
    ap.add_argument("--targets", default="1000,10000,100000")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    targets = [int(t) for t in args.targets.split(",")]
    rows = run(targets, repeats=args.repeats, seed=args.seed)
    print(f"{'target':>8} {'nodes':>8} {'backend':>9} {'seconds':>10} {'ns/node':>9}")
    for r in rows:
        ns = r["seconds"] / r["nodes"] * 1e9
        print(
            f"{r['target']:>8} {r['nodes']:>8} {r['backend']:>9}"
            f" {r['seconds']:>10.6f} {ns:>9.1f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
