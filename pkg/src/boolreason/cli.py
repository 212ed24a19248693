"""Command-line front end.

Exit statuses: 0 success, 2 input error, 3 precondition violation,
4 engine/oracle mismatch from oracle-check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as rpt
from .dnnf import dump_nnf, parse_nnf, parse_varmap
from .errors import InputError, PreconditionError
from .formula import (
    FeatureSpace,
    Instance,
    Term,
    parse_formula,
    parse_instance,
    parse_term,
)
from .obdd import dump_obdd, parse_obdd
from .oracle import (
    VARIABLE_LIMIT,
    oracle_classifier_bias,
    oracle_complete_reason,
    oracle_decision_bias,
    oracle_necessary_property,
    oracle_sufficient_reasons,
    truth_table,
)
from .queries import (
    bias_verdict,
    classifier_bias_witness,
    decision_is_biased,
    holds_because,
    necessary_property,
    necessary_reason,
    sticks_even_if_because,
    sufficient_reasons,
)
from .reason import Classifier, build_reason

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_MISMATCH = 4


def _read_file(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _looks_like_varmap(text: str) -> bool:
    saw = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[0].isdigit():
            return False
        saw = True
    return saw


def _load_features(path: str | None):
    """Feature file -> (space, varmap or None).

    Accepts either one feature name per line (trailing ``*`` marks it
    protected) or a varmap of "index name" lines; the varmap also fixes
    how .nnf literal indices translate to features.
    """
    if path is None:
        return None, None
    text = _read_file(path)
    if _looks_like_varmap(text):
        names = parse_varmap(text)
        space = FeatureSpace(names[i] for i in sorted(names))
        return space, {i: space.lookup(n) for i, n in names.items()}
    return FeatureSpace.from_text(text), None


def _split_names(raw: str) -> list[str]:
    return [n.strip() for n in raw.split(",") if n.strip()]


def _load_classifier(args) -> Classifier:
    src = args.classifier
    space, varmap = _load_features(args.features)
    order = args.order
    negated = args.negated_classifier

    if src.endswith(".nnf"):
        if space is None:
            raise InputError(
                "a .nnf classifier needs --features (feature list or varmap)"
            )
        if order:
            raise InputError("--order applies only to formula sources")
        positive = parse_nnf(_read_file(src), space, varmap)
        negative = None
        if negated:
            negative = parse_nnf(_read_file(negated), space, varmap)
        classifier = Classifier.from_circuits(positive, negative)
    elif src.endswith(".obdd"):
        if space is None:
            raise InputError("an .obdd classifier needs --features")
        if order:
            raise InputError("--order applies only to formula sources")
        if negated:
            raise InputError("--negated-classifier applies only to .nnf sources")
        classifier = Classifier.from_obdd(parse_obdd(_read_file(src), space))
    else:
        if negated:
            raise InputError("--negated-classifier applies only to .nnf sources")
        text = _read_file(src) if Path(src).is_file() else src
        sp = space if space is not None else FeatureSpace()
        f = parse_formula(text, sp)
        order_vars = None
        if order:
            order_vars = tuple(sp.lookup(n) for n in _split_names(order))
            if len(order_vars) != len(sp) or len(set(order_vars)) != len(sp):
                raise InputError("--order must mention every feature exactly once")
        classifier = Classifier.from_formula(f, sp, order_vars)

    if args.protected:
        classifier.space.set_protected(_split_names(args.protected))
    return classifier


def _emit(report: dict, fmt: str) -> None:
    text = rpt.render_json(report) if fmt == "structured" else rpt.render_text(report)
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_explain(args) -> int:
    classifier = _load_classifier(args)
    alpha = parse_instance(args.instance, classifier.space)
    case = classifier.case(alpha)
    r = build_reason(case)
    reasons = sufficient_reasons(case)
    prop = necessary_property(r)
    nreason = necessary_reason(case, r)
    _emit(rpt.explain_report(classifier, case, reasons, prop, nreason, r), args.format)
    return EXIT_OK


def cmd_bias(args) -> int:
    classifier = _load_classifier(args)
    if not classifier.space.protected:
        raise InputError(
            "no protected features declared; pass --protected or mark them"
            " with * in the features file"
        )
    alpha = parse_instance(args.instance, classifier.space)
    case = classifier.case(alpha)
    verdict = bias_verdict(case, classifier=classifier, budget=args.budget)
    _emit(rpt.bias_report(classifier, case, verdict), args.format)
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    classifier = _load_classifier(args)
    alpha = parse_instance(args.instance, classifier.space)
    tau = parse_term(args.tau, classifier.space)
    rho = parse_term(args.rho, classifier.space) if args.rho else Term()
    decision = classifier.decide(alpha)

    if len(rho) == 0:
        case = classifier.case(alpha)
        holds = holds_because(build_reason(case), tau)
        complete = sufficient_reasons(case) if holds else None
        report = rpt.counterfactual_report(
            classifier, alpha, decision, tau, holds, complete_reason=complete
        )
    else:
        holds = sticks_even_if_because(classifier, alpha, rho, tau)
        flipped = alpha.override(rho.negate())
        complete = sufficient_reasons(classifier.case(flipped)) if holds else None
        report = rpt.counterfactual_report(
            classifier,
            alpha,
            decision,
            tau,
            holds,
            rho=rho,
            flipped=flipped,
            complete_reason=complete,
        )
    _emit(report, args.format)
    return EXIT_OK


def cmd_compile(args) -> int:
    if args.classifier.endswith((".nnf", ".obdd")):
        raise InputError("compile expects a formula source, not a circuit file")
    classifier = _load_classifier(args)
    assert classifier.obdd is not None
    base = args.output
    obdd_path, nnf_path, vars_path = base + ".obdd", base + ".nnf", base + ".vars"
    Path(obdd_path).write_text(dump_obdd(classifier.obdd), encoding="utf-8")
    Path(nnf_path).write_text(dump_nnf(classifier.positive), encoding="utf-8")
    vars_lines = [
        v.name + (" *" if v in classifier.space.protected else "")
        for v in classifier.space.variables
    ]
    Path(vars_path).write_text("\n".join(vars_lines) + "\n", encoding="utf-8")
    _emit(rpt.compile_report(classifier, obdd_path, nnf_path, vars_path), args.format)
    return EXIT_OK


def _canon(value):
    """Mismatch values in a JSON-friendly, canonically ordered shape."""
    if isinstance(value, (set, frozenset)):
        return sorted(str(t) for t in value)
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def cmd_oracle_check(args) -> int:
    classifier = _load_classifier(args)
    space = classifier.space
    if len(space) > VARIABLE_LIMIT:
        raise PreconditionError(
            f"oracle-check supports at most {VARIABLE_LIMIT} features,"
            f" this classifier has {len(space)}"
        )
    if args.all_instances:
        n = len(space)
        instances = [
            Instance(space, ((k >> j) & 1 for j in range(n))) for k in range(1 << n)
        ]
    elif args.instance:
        instances = [parse_instance(args.instance, space)]
    else:
        raise InputError("oracle-check needs --instance or --all-instances")

    tt = truth_table(classifier.positive)
    has_protected = bool(space.protected)
    oracle_cb = oracle_classifier_bias(classifier.positive) if has_protected else None

    mismatches: list[dict] = []
    checks = 0

    def check(inst: Instance, name: str, engine, oracle) -> bool:
        nonlocal checks
        checks += 1
        if engine != oracle:
            mismatches.append(
                {
                    "instance": str(inst),
                    "check": name,
                    "engine": _canon(engine),
                    "oracle": _canon(oracle),
                }
            )
            return False
        return True

    for inst in instances:
        decision_ok = check(inst, "decision", classifier.decide(inst), tt.value(inst))
        if classifier.negative is not None:
            decision_ok &= check(
                inst,
                "negated-decision",
                classifier.negative.evaluate(inst),
                1 - tt.value(inst),
            )
        if not decision_ok:
            continue  # deeper queries assume consistent decision circuits
        if classifier.decide(inst) == 0 and classifier.negative is None:
            continue  # decision bit verified; no circuit to explain it with
        case = classifier.case(inst)
        r = build_reason(case)
        reasons = sufficient_reasons(case)
        oracle_rs = oracle_sufficient_reasons(classifier.positive, inst)
        check(inst, "sufficient-reasons", set(reasons), set(oracle_rs))
        oracle_cr = oracle_complete_reason(classifier.positive, inst)
        check(
            inst,
            "complete-reason",
            f"{truth_table(r).bits:#x}",
            f"{truth_table(oracle_cr, space).bits:#x}",
        )
        check(
            inst,
            "necessary-property",
            necessary_property(r),
            oracle_necessary_property(classifier.positive, inst),
        )
        oracle_nr = next(iter(oracle_rs)) if len(oracle_rs) == 1 else None
        check(inst, "necessary-reason", necessary_reason(case, r), oracle_nr)
        if has_protected:
            check(
                inst,
                "decision-bias",
                decision_is_biased(r, space),
                oracle_decision_bias(classifier.positive, inst),
            )
            if classifier_bias_witness(reasons, space) is not None:
                # a witness is a soundness claim: the classifier is biased
                check(inst, "classifier-bias-witness", True, oracle_cb)

    _emit(
        rpt.oracle_check_report(classifier, len(instances), checks, mismatches),
        args.format,
    )
    return EXIT_MISMATCH if mismatches else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boolreason",
        description="Explain the decisions of Boolean classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_instance: bool) -> None:
        p.add_argument(
            "--classifier",
            required=True,
            help="formula text, or a path to a formula, .obdd, or .nnf file",
        )
        p.add_argument(
            "--features",
            help="feature file: 'name [*]' lines, or an 'index name' varmap",
        )
        p.add_argument(
            "--protected",
            help="comma-separated protected features (overrides the file marks)",
        )
        p.add_argument(
            "--order",
            help="comma-separated compilation order (formula sources only)",
        )
        p.add_argument(
            "--negated-classifier",
            help=".nnf file for the negated classifier (.nnf sources only)",
        )
        p.add_argument(
            "--format", choices=("text", "structured"), default="text",
            help="report style: human text or stable JSON",
        )
        if with_instance:
            p.add_argument(
                "--instance", required=True, help='total assignment, e.g. "E,~F,G,W"'
            )

    p = sub.add_parser(
        "explain", help="sufficient reasons and necessary properties of a decision"
    )
    common(p, with_instance=True)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("bias", help="decision bias and classifier bias checks")
    common(p, with_instance=True)
    p.add_argument(
        "--budget",
        type=int,
        default=4096,
        help="max candidates tried in the witness-pair search",
    )
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser(
        "counterfactual", help='check "because" and "even if ... because" claims'
    )
    common(p, with_instance=True)
    p.add_argument("--tau", required=True, help="the explaining term")
    p.add_argument(
        "--rho", help="property to flip; omit for a plain 'because' check"
    )
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser(
        "compile", help="compile a formula to .obdd, .nnf and .vars files"
    )
    common(p, with_instance=False)
    p.add_argument("--output", required=True, help="output path stem")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser(
        "oracle-check",
        help="cross-check every query against the truth-table oracle",
    )
    common(p, with_instance=False)
    p.add_argument("--instance", help="single instance to check")
    p.add_argument(
        "--all-instances",
        action="store_true",
        help="check every instance of the feature space",
    )
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits on --help and usage errors
        code = e.code
        return code if isinstance(code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    raise SystemExit(main())
