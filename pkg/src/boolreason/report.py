"""Query reports: one plain dict per command, rendered as text or JSON.

Structured output has to be byte-identical across runs for identical
inputs, so everything here is canonically ordered and nothing
time-dependent or machine-dependent goes into a report.
"""

from __future__ import annotations

import json

from .formula import Instance, Term
from .queries import BiasVerdict, SufficientReasonSet
from .reason import Classifier, DecisionCase, ReasonCircuit


def term_json(term: Term) -> list[str]:
    # empty list is the empty term; None stays None at the call sites
    return [str(lit) for lit in term]


def instance_json(instance: Instance) -> list[str]:
    return [str(lit) for lit in instance.literals()]


def _header(classifier: Classifier, instance: Instance, decision: int) -> dict:
    return {
        "classifier": {"sha256": classifier.sha256, "source": classifier.source},
        "instance": instance_json(instance),
        "decision": decision,
    }


def explain_report(
    classifier: Classifier,
    case: DecisionCase,
    reasons: SufficientReasonSet,
    prop: Term,
    nreason: Term | None,
    circuit: ReasonCircuit,
) -> dict:
    out = _header(classifier, case.instance, case.decision)
    out["query"] = "explain"
    out["sufficient_reasons"] = [term_json(t) for t in reasons]
    out["necessary_property"] = term_json(prop)
    out["necessary_reason"] = None if nreason is None else term_json(nreason)
    out["reason_nodes"] = circuit.node_count
    out["reason_raw_nodes"] = circuit.raw_node_count
    return out


def bias_report(
    classifier: Classifier, case: DecisionCase, verdict: BiasVerdict
) -> dict:
    out = _header(classifier, case.instance, case.decision)
    out["query"] = "bias"
    out["protected"] = [
        v.name for v in sorted(classifier.space.protected, key=lambda v: v.index)
    ]
    out["decision_biased"] = verdict.decision_biased
    out["classifier_status"] = verdict.classifier_status
    out["witness"] = None if verdict.witness is None else term_json(verdict.witness)
    if verdict.pair is None:
        out["witness_pair"] = None
    else:
        out["witness_pair"] = [
            {"instance": instance_json(inst), "decision": classifier.decide(inst)}
            for inst in verdict.pair
        ]
    return out


def counterfactual_report(
    classifier: Classifier,
    alpha: Instance,
    decision: int,
    tau: Term,
    holds: bool,
    rho: Term | None = None,
    flipped: Instance | None = None,
    complete_reason: SufficientReasonSet | None = None,
) -> dict:
    out = _header(classifier, alpha, decision)
    out["query"] = "because" if rho is None else "even-if-because"
    out["rho"] = None if rho is None else term_json(rho)
    out["tau"] = term_json(tau)
    out["holds"] = holds
    out["flipped_instance"] = None if flipped is None else instance_json(flipped)
    out["complete_reason"] = (
        None if complete_reason is None else [term_json(t) for t in complete_reason]
    )
    return out


def compile_report(
    classifier: Classifier,
    obdd_path: str,
    nnf_path: str,
    vars_path: str,
) -> dict:
    assert classifier.obdd is not None
    return {
        "query": "compile",
        "classifier": {"sha256": classifier.sha256, "source": classifier.source},
        "obdd_file": obdd_path,
        "obdd_nodes": classifier.obdd.node_count,
        "circuit_file": nnf_path,
        "circuit_nodes": classifier.positive.node_count,
        "features_file": vars_path,
    }


def oracle_check_report(
    classifier: Classifier, checked: int, queries: int, mismatches: list[dict]
) -> dict:
    return {
        "query": "oracle-check",
        "classifier": {"sha256": classifier.sha256, "source": classifier.source},
        "instances_checked": checked,
        "checks_run": queries,
        "status": "pass" if not mismatches else "fail",
        "mismatches": mismatches,
    }


# ---------------------------------------------------------------------------
# rendering


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _term_text(names: list[str] | None) -> str:
    if names is None:
        return "none"
    return ",".join(names) if names else "1"


def _dnf_text(terms: list[list[str]] | None) -> str:
    if terms is None:
        return "none"
    if not terms:
        return "0"
    return " | ".join(_term_text(t) for t in terms)


def _decision_text(bit: int) -> str:
    return f"positive ({bit})" if bit == 1 else f"negative ({bit})"


def _head_lines(report: dict) -> list[str]:
    lines = [
        "classifier: {sha} ({src})".format(
            sha=report["classifier"]["sha256"][:16],
            src=report["classifier"]["source"],
        )
    ]
    if "instance" in report:
        lines.append("instance:   " + ",".join(report["instance"]))
        lines.append("decision:   " + _decision_text(report["decision"]))
    return lines


def _explain_text(report: dict) -> list[str]:
    lines = _head_lines(report)
    reasons = report["sufficient_reasons"]
    lines.append(f"sufficient reasons ({len(reasons)}):")
    for t in reasons:
        lines.append("  " + _term_text(t))
    lines.append("necessary property: " + _term_text(report["necessary_property"]))
    lines.append("necessary reason:   " + _term_text(report["necessary_reason"]))
    lines.append(
        "reason circuit:     {n} nodes ({raw} before simplification)".format(
            n=report["reason_nodes"], raw=report["reason_raw_nodes"]
        )
    )
    return lines


def _bias_text(report: dict) -> list[str]:
    lines = _head_lines(report)
    lines.append("protected:  " + ",".join(report["protected"]))
    lines.append(
        "decision bias:   " + ("biased" if report["decision_biased"] else "unbiased")
    )
    status = report["classifier_status"]
    lines.append("classifier bias: " + status.capitalize())
    if report["witness"] is not None:
        lines.append("witness reason:  " + _term_text(report["witness"]))
    if report["witness_pair"] is not None:
        lines.append("witness pair:")
        for side in report["witness_pair"]:
            lines.append(
                "  {inst} -> {d}".format(
                    inst=",".join(side["instance"]), d=side["decision"]
                )
            )
    return lines


def _counterfactual_text(report: dict) -> list[str]:
    lines = _head_lines(report)
    tau = _term_text(report["tau"])
    if report["query"] == "because":
        lines.append(f"claim:      decided because {tau}")
    else:
        rho = [("~" + n if not n.startswith("~") else n[1:]) for n in report["rho"]]
        lines.append(
            "claim:      decision sticks even if {rho}, because {tau}".format(
                rho=",".join(rho), tau=tau
            )
        )
    lines.append("holds:      " + ("yes" if report["holds"] else "no"))
    if report["flipped_instance"] is not None:
        lines.append("flipped:    " + ",".join(report["flipped_instance"]))
    if report["complete_reason"] is not None:
        lines.append("complete reason: " + _dnf_text(report["complete_reason"]))
    return lines


def _compile_text(report: dict) -> list[str]:
    lines = _head_lines(report)
    lines.append(
        "obdd:     {f} ({n} nodes)".format(
            f=report["obdd_file"], n=report["obdd_nodes"]
        )
    )
    lines.append(
        "circuit:  {f} ({n} nodes)".format(
            f=report["circuit_file"], n=report["circuit_nodes"]
        )
    )
    lines.append("features: " + report["features_file"])
    return lines


def _oracle_check_text(report: dict) -> list[str]:
    lines = _head_lines(report)
    lines.append(
        "checked {i} instance(s), {q} checks: {s}".format(
            i=report["instances_checked"],
            q=report["checks_run"],
            s=report["status"],
        )
    )
    for m in report["mismatches"]:
        lines.append(
            "mismatch on {inst}: {check} (engine {e!r}, oracle {o!r})".format(
                inst=m["instance"], check=m["check"], e=m["engine"], o=m["oracle"]
            )
        )
    return lines


_RENDERERS = {
    "explain": _explain_text,
    "bias": _bias_text,
    "because": _counterfactual_text,
    "even-if-because": _counterfactual_text,
    "compile": _compile_text,
    "oracle-check": _oracle_check_text,
}


def render_text(report: dict) -> str:
    return "\n".join(_RENDERERS[report["query"]](report)) + "\n"
